#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "scirp/clustergen.hpp"

namespace scirp {

/// Weights of the per-period balance penalties on the order mean and variance profiles.
struct PenaltyParams {
    double eta1 = 0.0;
    double eta2 = 0.0;
};

/// A partition of the customers into pool clusters.
struct Selection {
    std::vector<std::size_t> cluster_ids;  // ascending pool indices
    double tactical_cost = 0.0;
    double penalty_value = 0.0;
    std::vector<double> delta_profile;
    std::vector<double> lambda_profile;

    double objective() const { return tactical_cost + penalty_value; }
};

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fills costs and profiles of a selection from its cluster ids.
Selection make_selection(const ClusterPool& pool, std::vector<std::size_t> ids, int T, const PenaltyParams& p);

/// sum of c_r + eta1/T * sum_t |avg - Delta_t| + eta2/T * sum_t |avg - Lambda_t|
double objective(const ClusterPool& pool, const Selection& sel, int T, const PenaltyParams& p);

/// True when the clusters cover every customer exactly once.
bool is_partition(const ClusterPool& pool, const std::vector<std::size_t>& ids, std::size_t n_customers);

/// Globally optimal selection by depth-first branch and bound. Among optimal
/// selections the lexicographically smallest id set is returned.
/// Throws InfeasibleError when some customer is not covered by the pool.
Selection solve(const Instance& inst, const ClusterPool& pool, const PenaltyParams& p);

/// Reference optimum by exhaustive recursion over customer partitions. Small instances only.
Selection brute_force(const Instance& inst, const ClusterPool& pool, const PenaltyParams& p);

nlohmann::json selection_to_json(const Instance& inst, const ClusterPool& pool, const Selection& sel);

}  // namespace scirp
