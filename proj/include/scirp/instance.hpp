#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scirp/stochastics.hpp"

namespace scirp {

struct Customer {
    int id = 0;
    Gaussian demand;        // kg per period
    double capacity = 0.0;  // U_i, kg
    std::optional<double> x, y;
};

struct Producer {
    Gaussian supply;             // kg per period
    std::int64_t capacity = 0;   // storage cap, kg
    double K1 = 0.0;             // fixed ordering cost
    double K2 = 0.0;             // fixed emergent purchase cost
    double b1 = 0.0;             // buy price per kg
    double b2 = 0.0;             // sell price per kg
    std::optional<double> x, y;
};

/// A problem instance. Node 0 is the producer; node k >= 1 is customers[k-1].
struct Instance {
    int T = 7;
    double alpha = 0.95;
    double gamma = 0.9;
    double W = 100.0;  // fixed cost per replenishment
    double w = 20.0;   // cost per distance unit
    double h = 0.05;   // holding cost per kg per period
    double e = 10.0;   // emergency cost per kg
    double Q = 1000.0; // vehicle capacity
    Producer producer;
    std::vector<Customer> customers;
    /// Symmetric (N+1)x(N+1) matrix; empty when no metric is known.
    std::vector<std::vector<double>> distances;

    std::size_t num_customers() const { return customers.size(); }
    bool has_distances() const { return !distances.empty(); }
    double distance(std::size_t from, std::size_t to) const { return distances[from][to]; }
};

/// Overrides for the base system used by generate(). Unset fields keep
/// their defaults.
struct GenerateParams {
    enum class Uncertainty { Low, High };
    Uncertainty uncertainty = Uncertainty::Low;
    std::optional<double> W, w, e, Q, h, alpha, gamma, U;
    std::optional<std::int64_t> producer_capacity;
    std::optional<double> K1, K2, b1, b2;
};

/// Returns the list of violated invariants; empty means the instance is usable.
std::vector<std::string> validate(const Instance& inst);

/// Random base-system instance; a pure function of its arguments.
Instance generate(std::uint64_t seed, int n_customers, int T, const GenerateParams& params = {});

/// Supply mean/std by m_s, then supply std by m_p, then every demand std by m_d.
Instance scale(const Instance& inst, double m_s, double m_p, double m_d);

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& inst);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace scirp
