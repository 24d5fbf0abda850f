#include "scirp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace scirp {

namespace {

constexpr std::int64_t kBatches = 100;

// Per-cycle mean and spread; the standard error comes from batch means since
// consecutive cycles share the carried-over inventory.
class Accumulator {
public:
    explicit Accumulator(std::int64_t cycles) : batch_size_(std::max<std::int64_t>(1, cycles / kBatches)) {}

    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / double(n_);
        m2_ += d * (x - mean_);
        batch_sum_ += x;
        if (++batch_fill_ == batch_size_) {
            const double b = batch_sum_ / double(batch_size_);
            ++nb_;
            const double db = b - batch_mean_;
            batch_mean_ += db / double(nb_);
            batch_m2_ += db * (b - batch_mean_);
            batch_sum_ = 0.0;
            batch_fill_ = 0;
        }
    }
    Estimate estimate() const {
        Estimate e;
        e.samples = n_;
        e.mean = mean_;
        e.sample_std = n_ > 1 ? std::sqrt(m2_ / double(n_ - 1)) : 0.0;
        if (nb_ > 1) e.std_error = std::sqrt(batch_m2_ / double(nb_ - 1) / double(nb_));
        else if (n_ > 0) e.std_error = e.sample_std / std::sqrt(double(n_));
        return e;
    }

private:
    std::int64_t batch_size_;
    std::int64_t n_ = 0, nb_ = 0, batch_fill_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
    double batch_sum_ = 0.0, batch_mean_ = 0.0, batch_m2_ = 0.0;
};

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

double draw(std::mt19937_64& rng, std::normal_distribution<double>& unit, const Gaussian& g) {
    return g.mean + g.std * unit(rng);
}

// Producer inventory under the policy, operating on the policy's grid.
class ProducerReplay {
public:
    explicit ProducerReplay(const Policy& policy) : policy_(policy), m_(policy.model) {
        level_ = (m_.capacity / 2 / m_.step) * m_.step;
    }

    /// Applies one period's net outflow and returns the action cost.
    double step(int t, double outflow) {
        const auto cell = static_cast<std::int64_t>(std::floor(outflow / double(m_.step) + 0.5)) * m_.step;
        std::int64_t omega2 = level_ - cell;
        if (omega2 < m_.omega2_min || omega2 > m_.omega2_max) {
            ++clamped_;
            omega2 = std::clamp(omega2, m_.omega2_min, m_.omega2_max);
        }
        const Action a = policy_.action(t, omega2);
        level_ = omega2 + a.q1 - a.q2;
        return action_cost(m_, omega2, a.q1, a.q2);
    }

    std::int64_t clamped() const { return clamped_; }

private:
    const Policy& policy_;
    const MdpModel& m_;
    std::int64_t level_ = 0;
    std::int64_t clamped_ = 0;
};

std::int64_t measured_cycles(const SimOptions& o, int T) { return std::max<std::int64_t>(1, o.periods / T); }

}  // namespace

SimReport simulate_aggregate(const Policy& policy, const OutflowModel& outflow, const SimOptions& options) {
    const int T = policy.model.T;
    auto rng = make_stream(options.seed, 0);
    std::normal_distribution<double> unit(0.0, 1.0);
    ProducerReplay producer(policy);
    const std::int64_t cycles = measured_cycles(options, T);
    Accumulator purchasing(cycles);

    for (std::int64_t c = 0; c < options.warmup_cycles + cycles; ++c) {
        double cost = 0.0;
        for (int t = 0; t < T; ++t) cost += producer.step(t, draw(rng, unit, outflow.laws[t]));
        if (c >= options.warmup_cycles) purchasing.add(cost);
    }

    SimReport r;
    r.cycles = cycles;
    r.periods = cycles * T;
    r.purchasing = purchasing.estimate();
    r.total = r.purchasing;
    r.clamp_count = producer.clamped();
    return r;
}

SimReport simulate_full(const Instance& inst, const ClusterPool& pool, const Selection& sel, const Policy& policy,
                        const SimOptions& options) {
    const int T = inst.T;
    const std::size_t N = inst.num_customers();

    std::vector<std::mt19937_64> demand_rng;
    for (std::size_t i = 0; i < N; ++i) demand_rng.push_back(make_stream(options.seed, i + 1));
    auto supply_rng = make_stream(options.seed, 0);
    std::normal_distribution<double> unit(0.0, 1.0);

    // (cluster, member slot, delivery index) for each customer delivered in period t
    struct Visit {
        std::size_t cluster;
        std::size_t delivery;
    };
    std::vector<std::vector<Visit>> visits(T);
    for (std::size_t r : sel.cluster_ids) {
        const auto& s = pool[r].schedule;
        for (std::size_t d = 0; d < s.deliveries(); ++d) visits[s.periods[d]].push_back({r, d});
    }

    std::vector<double> end_inventory(N, 0.0);
    std::vector<double> start_inventory(N, 0.0);
    std::vector<std::vector<std::int64_t>> no_backorder(N, std::vector<std::int64_t>(T, 0));
    std::int64_t deliveries = 0, negative_orders = 0, emergencies = 0, orders = 0;

    ProducerReplay producer(policy);
    const std::int64_t cycles = measured_cycles(options, T);
    Accumulator transport(cycles), holding(cycles), emergency(cycles), purchasing(cycles), total(cycles);

    for (std::int64_t c = 0; c < options.warmup_cycles + cycles; ++c) {
        const bool measure = c >= options.warmup_cycles;
        double c_transport = 0.0, c_holding = 0.0, c_emergency = 0.0, c_purchasing = 0.0;
        for (int t = 0; t < T; ++t) {
            start_inventory = end_inventory;
            double replenishment = 0.0;
            for (const Visit& v : visits[t]) {
                const auto& cl = pool[v.cluster];
                double load = 0.0;
                for (std::size_t k = 0; k < cl.customers.size(); ++k) {
                    const std::size_t i = cl.customers[k] - 1;
                    const double raw = double(cl.base_stocks[k][v.delivery]) - end_inventory[i];
                    const double q = options.clamp_orders ? std::max(raw, 0.0) : raw;
                    if (measure) {
                        ++orders;
                        negative_orders += raw < 0.0;
                    }
                    start_inventory[i] = end_inventory[i] + q;
                    load += q;
                }
                c_transport += inst.W + inst.w * cl.route.length;
                const double excess = std::max(0.0, load - inst.Q);
                c_emergency += inst.e * excess;
                if (measure) {
                    ++deliveries;
                    emergencies += excess > 0.0;
                }
                replenishment += load;
            }
            for (std::size_t i = 0; i < N; ++i) {
                const double d = draw(demand_rng[i], unit, inst.customers[i].demand);
                end_inventory[i] = start_inventory[i] - d;
                c_holding += inst.h * 0.5 * (std::max(0.0, start_inventory[i]) + std::max(0.0, end_inventory[i]));
                if (measure && end_inventory[i] >= 0.0) ++no_backorder[i][t];
            }
            const double supply = draw(supply_rng, unit, inst.producer.supply);
            c_purchasing += producer.step(t, replenishment - supply);
        }
        if (measure) {
            transport.add(c_transport);
            holding.add(c_holding);
            emergency.add(c_emergency);
            purchasing.add(c_purchasing);
            total.add(c_transport + c_holding + c_emergency + c_purchasing);
        }
    }

    SimReport r;
    r.cycles = cycles;
    r.periods = cycles * T;
    r.transport = transport.estimate();
    r.holding = holding.estimate();
    r.emergency = emergency.estimate();
    r.purchasing = purchasing.estimate();
    r.total = total.estimate();
    r.negative_order_frequency = orders ? double(negative_orders) / double(orders) : 0.0;
    r.emergency_frequency = deliveries ? double(emergencies) / double(deliveries) : 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& counts = no_backorder[i];
        const std::int64_t worst = *std::min_element(counts.begin(), counts.end());
        std::int64_t sum = 0;
        for (auto v : counts) sum += v;
        r.service_level.push_back(double(worst) / double(cycles));
        r.service_level_overall.push_back(double(sum) / double(cycles * T));
    }
    r.clamp_count = producer.clamped();
    return r;
}

namespace {

// Independent replications: pooled spread, and the standard error of the
// sample-weighted mean of the replication means.
Estimate merge(const std::vector<Estimate>& parts) {
    Estimate out;
    for (const auto& p : parts) out.samples += p.samples;
    if (out.samples == 0) return out;
    const auto n = double(out.samples);
    double var_of_mean = 0.0;
    for (const auto& p : parts) {
        const double w = double(p.samples) / n;
        out.mean += w * p.mean;
        var_of_mean += w * w * p.std_error * p.std_error;
    }
    double m2 = 0.0;
    for (const auto& p : parts)
        m2 += double(std::max<std::int64_t>(p.samples - 1, 0)) * p.sample_std * p.sample_std +
              double(p.samples) * (p.mean - out.mean) * (p.mean - out.mean);
    out.sample_std = out.samples > 1 ? std::sqrt(m2 / (n - 1)) : 0.0;
    out.std_error = std::sqrt(var_of_mean);
    return out;
}

}  // namespace

SimReport merge_reports(const std::vector<SimReport>& reports) {
    SimReport out;
    if (reports.empty()) return out;
    auto collect = [&](Estimate SimReport::*field) {
        std::vector<Estimate> parts;
        for (const auto& r : reports) parts.push_back(r.*field);
        return merge(parts);
    };
    out.transport = collect(&SimReport::transport);
    out.holding = collect(&SimReport::holding);
    out.emergency = collect(&SimReport::emergency);
    out.purchasing = collect(&SimReport::purchasing);
    out.total = collect(&SimReport::total);
    for (const auto& r : reports) {
        out.periods += r.periods;
        out.cycles += r.cycles;
        out.clamp_count += r.clamp_count;
    }
    // frequencies are averaged with cycle weights
    const std::size_t n_cust = reports.front().service_level.size();
    out.service_level.assign(n_cust, 0.0);
    out.service_level_overall.assign(n_cust, 0.0);
    for (const auto& r : reports) {
        const double w = double(r.cycles) / double(out.cycles);
        out.negative_order_frequency += w * r.negative_order_frequency;
        out.emergency_frequency += w * r.emergency_frequency;
        for (std::size_t i = 0; i < n_cust; ++i) {
            out.service_level[i] += w * r.service_level[i];
            out.service_level_overall[i] += w * r.service_level_overall[i];
        }
    }
    return out;
}

nlohmann::json report_to_json(const SimReport& r) {
    auto est = [](const Estimate& e) {
        return nlohmann::json{{"mean", e.mean}, {"std_error", e.std_error}, {"sample_std", e.sample_std},
                              {"samples", e.samples}};
    };
    return {{"periods", r.periods},
            {"cycles", r.cycles},
            {"transport", est(r.transport)},
            {"holding", est(r.holding)},
            {"emergency", est(r.emergency)},
            {"purchasing", est(r.purchasing)},
            {"total", est(r.total)},
            {"negative_order_frequency", r.negative_order_frequency},
            {"emergency_frequency", r.emergency_frequency},
            {"service_level", r.service_level},
            {"service_level_overall", r.service_level_overall},
            {"clamp_count", r.clamp_count}};
}

}  // namespace scirp
