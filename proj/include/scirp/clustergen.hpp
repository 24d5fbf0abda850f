#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "scirp/instance.hpp"
#include "scirp/routing.hpp"
#include "scirp/stochastics.hpp"

namespace scirp {

/// Cyclic delivery schedule over periods 0..T-1.
struct Schedule {
    int T = 0;
    std::uint32_t mask = 0;        // bit t set: delivery in period t
    std::vector<int> periods;      // delivery periods, ascending
    std::vector<int> next_gap;     // n_t: periods until the next delivery
    std::vector<int> prev_gap;     // m_t: periods since the previous delivery

    static Schedule from_mask(int T, std::uint32_t mask);
    int longest_gap() const;
    std::size_t deliveries() const { return periods.size(); }
};

struct Cluster {
    std::vector<int> customers;  // node indices, ascending
    Route route;
    Schedule schedule;
    /// base_stocks[k][d]: level of customers[k] at delivery d
    std::vector<std::vector<std::int64_t>> base_stocks;
    double cT = 0.0, cH = 0.0, cE = 0.0;
    std::vector<double> delta;   // expected order per period (0 off-schedule)
    std::vector<double> lambda;  // order variance per period

    double cost() const { return cT + cH + cE; }
};

using ClusterPool = std::vector<Cluster>;

/// Order-up-to level covering n periods at service level alpha, rounded half up.
std::int64_t base_stock(const Gaussian& demand, int n, double alpha);

/// Law of one customer's replenishment at a delivery with gaps (n, m).
Gaussian order_distribution(const Gaussian& demand, int n, int m, double alpha);

/// Law of the vehicle load of `customers` (node indices) at a delivery with gaps (n, m).
Gaussian delivery_load(const Instance& inst, std::span<const int> customers, int n, int m);

/// Vehicle-capacity chance constraint P(load <= Q) >= gamma.
bool check_cc2(const Gaussian& load, double Q, double gamma);

/// Expected on-hand inventory summed over the n periods following a
/// replenishment up to `level`, each period averaging its start and end.
double cumulative_average_inventory(const Gaussian& demand, double level, int n);

double holding_cost(const Instance& inst, const Cluster& cluster);
double emergency_cost(const Instance& inst, const Cluster& cluster);

/// Builds a fully priced cluster. Feasibility is not checked.
Cluster price_cluster(const Instance& inst, std::vector<int> customers, std::uint32_t mask);

/// Largest n in 1..T whose base stock fits the customer's capacity; 0 if none.
int max_cover_periods(const Instance& inst, int node);

/// All feasible (subset, schedule) clusters sorted by subset, then schedule mask.
ClusterPool enumerate(const Instance& inst, unsigned threads = 1);

nlohmann::json cluster_to_json(const Instance& inst, const Cluster& cluster);
void write_pool_jsonl(const Instance& inst, const ClusterPool& pool, std::ostream& out);

}  // namespace scirp
