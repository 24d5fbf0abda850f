#include "scirp/clustergen.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "scirp/parallel.hpp"

namespace scirp {

Schedule Schedule::from_mask(int T, std::uint32_t mask) {
    if (T < 1 || T > 31) throw std::invalid_argument("Schedule: T must lie in [1, 31]");
    if (mask == 0 || (mask >> T) != 0) throw std::invalid_argument("Schedule: invalid delivery mask");
    Schedule s;
    s.T = T;
    s.mask = mask;
    for (int t = 0; t < T; ++t)
        if (mask & (1u << t)) s.periods.push_back(t);
    const std::size_t k = s.periods.size();
    s.next_gap.resize(k);
    s.prev_gap.resize(k);
    for (std::size_t d = 0; d < k; ++d) {
        const int here = s.periods[d];
        const int next = s.periods[(d + 1) % k];
        const int prev = s.periods[(d + k - 1) % k];
        s.next_gap[d] = k == 1 ? T : (next - here + T) % T;
        s.prev_gap[d] = k == 1 ? T : (here - prev + T) % T;
    }
    return s;
}

int Schedule::longest_gap() const {
    return *std::max_element(next_gap.begin(), next_gap.end());
}

std::int64_t base_stock(const Gaussian& demand, int n, double alpha) {
    if (n < 1) throw std::invalid_argument("base_stock: n must be >= 1");
    const double level = n * demand.mean + normal_quantile(alpha) * demand.std * std::sqrt(double(n));
    return static_cast<std::int64_t>(std::floor(level + 0.5));
}

Gaussian order_distribution(const Gaussian& demand, int n, int m, double alpha) {
    if (n < 1 || m < 1) throw std::invalid_argument("order_distribution: gaps must be >= 1");
    const double z = normal_quantile(alpha);
    return {n * demand.mean + z * demand.std * (std::sqrt(double(n)) - std::sqrt(double(m))),
            demand.std * std::sqrt(double(m))};
}

Gaussian delivery_load(const Instance& inst, std::span<const int> customers, int n, int m) {
    std::vector<Gaussian> parts;
    parts.reserve(customers.size());
    for (int node : customers)
        parts.push_back(order_distribution(inst.customers[node - 1].demand, n, m, inst.alpha));
    return sum_independent(parts);
}

bool check_cc2(const Gaussian& load, double Q, double gamma) {
    if (load.std == 0.0) return load.mean <= Q;
    return normal_cdf((Q - load.mean) / load.std) >= gamma;
}

double cumulative_average_inventory(const Gaussian& demand, double level, int n) {
    auto on_hand = [&](int periods) {
        return partial_expectation_pos({level - periods * demand.mean, demand.std * std::sqrt(double(periods))});
    };
    double total = 0.0;
    double start = on_hand(0);
    for (int l = 0; l < n; ++l) {
        const double end = on_hand(l + 1);
        total += 0.5 * (start + end);
        start = end;
    }
    return total;
}

double holding_cost(const Instance& inst, const Cluster& cluster) {
    double kg_periods = 0.0;
    for (std::size_t k = 0; k < cluster.customers.size(); ++k) {
        const auto& demand = inst.customers[cluster.customers[k] - 1].demand;
        for (std::size_t d = 0; d < cluster.schedule.deliveries(); ++d)
            kg_periods += cumulative_average_inventory(demand, double(cluster.base_stocks[k][d]),
                                                       cluster.schedule.next_gap[d]);
    }
    return inst.h * kg_periods;
}

double emergency_cost(const Instance& inst, const Cluster& cluster) {
    double excess = 0.0;
    const auto& s = cluster.schedule;
    for (std::size_t d = 0; d < s.deliveries(); ++d) {
        Gaussian load = delivery_load(inst, cluster.customers, s.next_gap[d], s.prev_gap[d]);
        load.mean -= inst.Q;
        excess += partial_expectation_pos(load);
    }
    return inst.e * excess;
}

namespace {

Cluster price_with_route(const Instance& inst, std::vector<int> customers, const Route& route, std::uint32_t mask) {
    Cluster c;
    c.customers = std::move(customers);
    c.route = route;
    c.schedule = Schedule::from_mask(inst.T, mask);
    const auto& s = c.schedule;

    c.base_stocks.assign(c.customers.size(), std::vector<std::int64_t>(s.deliveries()));
    c.delta.assign(inst.T, 0.0);
    c.lambda.assign(inst.T, 0.0);
    for (std::size_t k = 0; k < c.customers.size(); ++k) {
        const auto& demand = inst.customers[c.customers[k] - 1].demand;
        for (std::size_t d = 0; d < s.deliveries(); ++d) {
            c.base_stocks[k][d] = base_stock(demand, s.next_gap[d], inst.alpha);
            const Gaussian q = order_distribution(demand, s.next_gap[d], s.prev_gap[d], inst.alpha);
            c.delta[s.periods[d]] += q.mean;
            c.lambda[s.periods[d]] += q.variance();
        }
    }
    c.cT = double(s.deliveries()) * (inst.W + inst.w * route.length);
    c.cH = holding_cost(inst, c);
    c.cE = emergency_cost(inst, c);
    return c;
}

}  // namespace

Cluster price_cluster(const Instance& inst, std::vector<int> customers, std::uint32_t mask) {
    std::sort(customers.begin(), customers.end());
    const Route route = shortest_route(inst, customers);
    return price_with_route(inst, std::move(customers), route, mask);
}

int max_cover_periods(const Instance& inst, int node) {
    const auto& c = inst.customers[node - 1];
    int best = 0;
    for (int n = 1; n <= inst.T; ++n) {
        if (double(base_stock(c.demand, n, inst.alpha)) <= c.capacity) best = n;
        else break;  // base stock grows with n
    }
    return best;
}

namespace {

struct Enumerator {
    const Instance& inst;
    std::vector<int> theta;  // indexed by node

    bool full_schedule_ok(const std::vector<int>& subset) const {
        return check_cc2(delivery_load(inst, subset, 1, 1), inst.Q, inst.gamma);
    }

    // Largest g whose worst delivery (n = g, any m <= g) can still meet cc2.
    // The standardized slack is linear in 1/sqrt(m), so m = 1 and m = g bound it.
    int gap_bound(const std::vector<int>& subset) const {
        int ub = 0;
        for (int g = 1; g <= inst.T; ++g) {
            const bool ok = check_cc2(delivery_load(inst, subset, g, 1), inst.Q, inst.gamma) ||
                            check_cc2(delivery_load(inst, subset, g, g), inst.Q, inst.gamma);
            if (ok) ub = g;
        }
        return ub;
    }

    void emit_schedules(const std::vector<int>& subset, ClusterPool& out) const {
        int limit = gap_bound(subset);
        for (int node : subset) limit = std::min(limit, theta[node]);
        if (limit < 1) return;
        const Route route = shortest_route(inst, subset);
        const std::uint32_t masks = (1u << inst.T) - 1;
        for (std::uint32_t mask = 1; mask <= masks; ++mask) {
            const Schedule s = Schedule::from_mask(inst.T, mask);
            if (s.longest_gap() > limit) continue;
            bool feasible = true;
            for (std::size_t d = 0; d < s.deliveries() && feasible; ++d)
                feasible = check_cc2(delivery_load(inst, subset, s.next_gap[d], s.prev_gap[d]), inst.Q, inst.gamma);
            if (feasible) out.push_back(price_with_route(inst, subset, route, mask));
        }
    }

    // Adding a customer raises both mean and spread of the full-schedule
    // load, so for gamma >= 0.5 a failing subset has no feasible superset.
    void grow(std::vector<int>& subset, ClusterPool& out) const {
        emit_schedules(subset, out);
        if (subset.size() >= kMaxRouteSize) return;
        const int n = static_cast<int>(inst.num_customers());
        for (int next = subset.back() + 1; next <= n; ++next) {
            if (theta[next] < 1) continue;
            subset.push_back(next);
            if (inst.gamma < 0.5 || full_schedule_ok(subset)) grow(subset, out);
            subset.pop_back();
        }
    }
};

bool pool_order(const Cluster& a, const Cluster& b) {
    if (a.customers != b.customers) return a.customers < b.customers;
    return a.schedule.mask < b.schedule.mask;
}

}  // namespace

ClusterPool enumerate(const Instance& inst, unsigned threads) {
    if (!inst.has_distances()) throw std::invalid_argument("enumerate: instance has no distances");
    const int n = static_cast<int>(inst.num_customers());
    Enumerator en{inst, std::vector<int>(n + 1, 0)};
    for (int node = 1; node <= n; ++node) en.theta[node] = max_cover_periods(inst, node);

    std::vector<ClusterPool> per_root(n);
    parallel_for(std::size_t(n), threads, [&](std::size_t k) {
        const int root = static_cast<int>(k) + 1;
        if (en.theta[root] < 1) return;
        std::vector<int> subset{root};
        if (en.full_schedule_ok(subset)) en.grow(subset, per_root[k]);
    });

    ClusterPool pool;
    for (auto& part : per_root) std::move(part.begin(), part.end(), std::back_inserter(pool));
    std::sort(pool.begin(), pool.end(), pool_order);
    return pool;
}

nlohmann::json cluster_to_json(const Instance& inst, const Cluster& c) {
    nlohmann::json j;
    std::vector<int> ids, order_ids, periods;
    for (int node : c.customers) ids.push_back(inst.customers[node - 1].id);
    for (int node : c.route.order) order_ids.push_back(inst.customers[node - 1].id);
    for (int t : c.schedule.periods) periods.push_back(t + 1);
    j["customers"] = ids;
    j["route"] = order_ids;
    j["route_length"] = c.route.length;
    j["periods"] = periods;
    j["mask"] = c.schedule.mask;
    j["n"] = c.schedule.next_gap;
    j["m"] = c.schedule.prev_gap;
    j["base_stocks"] = c.base_stocks;
    j["cT"] = c.cT;
    j["cH"] = c.cH;
    j["cE"] = c.cE;
    j["cost"] = c.cost();
    j["delta"] = c.delta;
    j["lambda"] = c.lambda;
    return j;
}

void write_pool_jsonl(const Instance& inst, const ClusterPool& pool, std::ostream& out) {
    for (const auto& c : pool) out << cluster_to_json(inst, c).dump() << '\n';
}

}  // namespace scirp
