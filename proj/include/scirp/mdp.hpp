#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "scirp/setpart.hpp"
#include "scirp/stochastics.hpp"

namespace scirp {

/// Net producer outflow per cycle period: replenishments minus supply.
struct OutflowModel {
    int T = 0;
    std::vector<Gaussian> laws;                  // continuous law of O_t
    std::vector<DiscreteDistribution> discrete;  // lattice version used by the solver
};

struct MdpSettings {
    std::int64_t step = 5;      // kg per inventory grid cell
    double tail_mass = 1e-6;    // outflow mass dropped by truncation
    double epsilon = 0.1;       // stopping span of successive value differences
    std::int64_t max_iterations = 1'000'000;
    double cost_offset = 0.0;   // added to every action cost (diagnostics)
};

struct MdpModel {
    int T = 0;
    std::int64_t capacity = 0;
    std::int64_t step = 1;
    std::int64_t omega2_min = 0;  // lowest post-outflow position on the grid
    std::int64_t omega2_max = 0;
    double K1 = 0.0, K2 = 0.0, b1 = 0.0, b2 = 0.0;
    double cost_offset = 0.0;

    std::size_t levels() const { return static_cast<std::size_t>(capacity / step) + 1; }
    std::size_t positions() const { return static_cast<std::size_t>((omega2_max - omega2_min) / step) + 1; }
    std::int64_t position(std::size_t j) const { return omega2_min + static_cast<std::int64_t>(j) * step; }
};

struct Action {
    std::int64_t q1 = 0;  // bought
    std::int64_t q2 = 0;  // sold
};

struct Policy {
    MdpModel model;
    /// target[t][j]: inventory level after acting in period t at position model.position(j)
    std::vector<std::vector<std::int64_t>> target;
    /// value[t][k]: relative value of level k*step at the start of period t
    std::vector<std::vector<double>> value;
    double gain = 0.0;        // long-run cost per period
    double cycle_cost = 0.0;  // gain * T
    double span = 0.0;        // final span of successive differences
    std::int64_t iterations = 0;
    std::int64_t clamp_count = 0;

    Action action(int t, std::int64_t omega2) const;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

OutflowModel build_outflow(const std::vector<double>& delta_profile, const std::vector<double>& lambda_profile,
                           const Gaussian& supply, std::int64_t step, double tail_mass);
OutflowModel build_outflow(const Selection& sel, const Instance& inst, std::int64_t step, double tail_mass);

/// State and action grid covering every position reachable under the outflow supports.
MdpModel make_model(const Instance& inst, const OutflowModel& outflow, const MdpSettings& settings);

/// K1*[q1 > 0] + K2*[omega2 < 0] + b1*q1 - b2*q2 (+ the model's offset).
/// Throws std::invalid_argument for inadmissible actions.
double action_cost(const MdpModel& model, std::int64_t omega2, std::int64_t q1, std::int64_t q2);

/// Relative value iteration over the cyclic chain, reference state (period 1, level 0).
/// Throws ConvergenceError when the iteration cap is hit.
Policy solve_mdp(const MdpModel& model, const OutflowModel& outflow, const MdpSettings& settings);

/// Period-dependent (s, S) summary of a policy.
struct SsEntry {
    enum class Kind { SS, NoPurchase, Irregular };
    Kind kind = Kind::SS;
    std::int64_t s = std::numeric_limits<std::int64_t>::min();  // buy iff omega2 < s
    std::int64_t S = 0;                                         // common order-up-to level
};

std::vector<SsEntry> extract_sS(const Policy& policy);

nlohmann::json policy_to_json(const Policy& policy);
void write_sS_csv(const std::vector<SsEntry>& table, std::ostream& out);

}  // namespace scirp
