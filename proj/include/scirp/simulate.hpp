#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "scirp/clustergen.hpp"
#include "scirp/mdp.hpp"
#include "scirp/setpart.hpp"

namespace scirp {

/// Sample mean of per-cycle values. std_error uses batch means (100 batches
/// per run); sample_std is the plain per-cycle spread.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    double sample_std = 0.0;
    std::int64_t samples = 0;
};

struct SimReport {
    std::int64_t periods = 0;  // simulated after warm-up
    std::int64_t cycles = 0;
    Estimate transport, holding, emergency, purchasing, total;
    double negative_order_frequency = 0.0;  // share of deliveries with a negative raw order
    double emergency_frequency = 0.0;       // share of deliveries with load above Q
    /// Per customer (node order): lowest per-period share of periods ending without back-orders.
    std::vector<double> service_level;
    /// Per customer: share of all periods ending without back-orders.
    std::vector<double> service_level_overall;
    std::int64_t clamp_count = 0;
};

struct SimOptions {
    std::int64_t periods = 1'000'000;
    std::uint64_t seed = 1;
    std::int64_t warmup_cycles = 100;
    bool clamp_orders = true;  // full model only: negative raw orders become zero
};

/// Replays the purchasing policy against continuous net-outflow samples
/// (rounded to the policy grid); only purchasing costs are accrued.
SimReport simulate_aggregate(const Policy& policy, const OutflowModel& outflow, const SimOptions& options);

/// Customer-level replay: per-customer demand, base-stock orders, vehicle
/// loads with emergency top-ups, producer supply and the purchasing policy.
SimReport simulate_full(const Instance& inst, const ClusterPool& pool, const Selection& sel, const Policy& policy,
                        const SimOptions& options);

/// Pools independent replications into one report.
SimReport merge_reports(const std::vector<SimReport>& reports);

nlohmann::json report_to_json(const SimReport& report);

}  // namespace scirp
