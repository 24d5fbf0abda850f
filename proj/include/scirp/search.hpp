#pragma once

#include <cstddef>
#include <functional>
#include <future>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scirp/mdp.hpp"
#include "scirp/setpart.hpp"

namespace scirp {

/// One joint evaluation at a penalty pair.
struct EvalRecord {
    double eta1 = 0.0, eta2 = 0.0;
    double tactical_cost = 0.0;
    double penalty_value = 0.0;
    double mdp_cycle_cost = 0.0;
    double total = 0.0;  // tactical_cost + mdp_cycle_cost
    std::vector<std::size_t> cluster_ids;
    double solve_seconds = 0.0;  // wall time, not exported
    double mdp_seconds = 0.0;
};

using EvalFn = std::function<EvalRecord(double eta1, double eta2)>;

/// Solves the tactical model and the purchasing MDP for penalty pairs.
/// Thread safe; results are cached per penalty pair and MDP solutions per
/// selection, so repeated pairs and repeated selections cost nothing.
class Evaluator {
public:
    Evaluator(const Instance& inst, const ClusterPool& pool, MdpSettings settings = {});

    EvalRecord operator()(double eta1, double eta2);
    EvalFn fn() { return [this](double a, double b) { return (*this)(a, b); }; }

    /// MDP solution for a selection (solved on first use).
    std::shared_ptr<const Policy> policy(const std::vector<std::size_t>& cluster_ids);
    Selection selection(const EvalRecord& record) const;

    const Instance& instance() const { return inst_; }
    const ClusterPool& pool() const { return pool_; }
    const MdpSettings& settings() const { return settings_; }
    std::size_t mdp_solves() const;

private:
    using PolicyFuture = std::shared_future<std::shared_ptr<const Policy>>;

    const Instance& inst_;
    const ClusterPool& pool_;
    MdpSettings settings_;
    mutable std::mutex mutex_;
    std::map<std::pair<double, double>, std::shared_future<EvalRecord>> records_;
    std::map<std::vector<std::size_t>, PolicyFuture> policies_;
};

/// Baseline: tactical optimum without penalties, then its purchasing MDP.
EvalRecord step_by_step(const EvalFn& eval);

struct LineSearchParams {
    double zeta1 = 1.0;  // increment of eta1
    double zeta2 = 0.5;  // increment of eta2
    double ub1 = 8.0;
    double ub2 = 4.0;
    double eps_init = 1e-4;
    bool include_origin = true;  // evaluate (0, 0) ahead of the walk
};

struct SearchState {
    int psi = 1;  // 1: eta1 moves, 0: eta2 moves
    int i = 0;    // completed phases
    double eta1 = 0.0, eta2 = 0.0;
    double z = 0.0;  // incumbent of the walk
    std::vector<EvalRecord> history;
};

struct SearchResult {
    EvalRecord best;  // minimum total over the history, earliest on ties
    std::vector<EvalRecord> history;
};

/// Alternating coordinate walk: eta1 grows by zeta1 while the total does not
/// increase, then eta2 by zeta2, each capped at its bound. A worse point
/// sends the active parameter back one step and switches to the other one.
SearchResult line_search(const EvalFn& eval, const LineSearchParams& params = {});

std::vector<double> default_grid_eta1();
std::vector<double> default_grid_eta2();

struct GridResult {
    EvalRecord best;
    std::vector<EvalRecord> records;  // eta1-major order
};

GridResult grid_search(const EvalFn& eval, const std::vector<double>& eta1_list, const std::vector<double>& eta2_list,
                       unsigned threads);

/// Percentage increase of `baseline` over `reference`.
double delta_percent(const EvalRecord& baseline, const EvalRecord& reference);

nlohmann::json record_to_json(const EvalRecord& record);
EvalRecord record_from_json(const nlohmann::json& j);
void write_records_csv(const std::vector<EvalRecord>& records, std::ostream& out);

}  // namespace scirp
