#include "scirp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

namespace scirp {

OutflowModel build_outflow(const std::vector<double>& delta_profile, const std::vector<double>& lambda_profile,
                           const Gaussian& supply, std::int64_t step, double tail_mass) {
    if (delta_profile.size() != lambda_profile.size() || delta_profile.empty())
        throw std::invalid_argument("build_outflow: profiles must be nonempty and of equal length");
    OutflowModel out;
    out.T = static_cast<int>(delta_profile.size());
    for (int t = 0; t < out.T; ++t) {
        const Gaussian law{delta_profile[t] - supply.mean, std::sqrt(lambda_profile[t] + supply.variance())};
        out.laws.push_back(law);
        out.discrete.push_back(discretize(law, step, tail_mass));
    }
    return out;
}

OutflowModel build_outflow(const Selection& sel, const Instance& inst, std::int64_t step, double tail_mass) {
    return build_outflow(sel.delta_profile, sel.lambda_profile, inst.producer.supply, step, tail_mass);
}

MdpModel make_model(const Instance& inst, const OutflowModel& outflow, const MdpSettings& settings) {
    const auto& p = inst.producer;
    if (settings.step < 1 || p.capacity % settings.step != 0)
        throw std::invalid_argument("make_model: step must divide the producer capacity");
    MdpModel m;
    m.T = outflow.T;
    m.capacity = p.capacity;
    m.step = settings.step;
    m.K1 = p.K1;
    m.K2 = p.K2;
    m.b1 = p.b1;
    m.b2 = p.b2;
    m.cost_offset = settings.cost_offset;
    std::int64_t max_out = std::numeric_limits<std::int64_t>::min();
    std::int64_t min_out = std::numeric_limits<std::int64_t>::max();
    for (const auto& d : outflow.discrete) {
        if (d.step != settings.step) throw std::invalid_argument("make_model: outflow lattice step mismatch");
        max_out = std::max(max_out, d.max_support());
        min_out = std::min(min_out, d.min_support());
    }
    m.omega2_min = std::min<std::int64_t>(0, -max_out);
    m.omega2_max = std::max<std::int64_t>(m.capacity, m.capacity - min_out);
    return m;
}

double action_cost(const MdpModel& model, std::int64_t omega2, std::int64_t q1, std::int64_t q2) {
    const std::int64_t after = omega2 + q1 - q2;
    if (q1 < 0 || q2 < 0 || after < 0 || after > model.capacity)
        throw std::invalid_argument("action_cost: inadmissible action");
    double c = model.cost_offset + model.b1 * double(q1) - model.b2 * double(q2);
    if (q1 > 0) c += model.K1;
    if (omega2 < 0) c += model.K2;
    return c;
}

Action Policy::action(int t, std::int64_t omega2) const {
    const auto j = static_cast<std::size_t>((omega2 - model.omega2_min) / model.step);
    const std::int64_t level = target.at(t).at(j);
    return level >= omega2 ? Action{level - omega2, 0} : Action{0, omega2 - level};
}

namespace {

// Best action for every post-outflow position given the value of the next
// period's start levels. Buying above or selling below the current position
// reduces to a suffix / prefix minimum over target levels.
struct Improvement {
    std::vector<double> y;
    std::vector<std::int64_t> target;
};

void improve(const MdpModel& m, const std::vector<double>& next_value, bool want_target, Improvement& out) {
    const std::size_t L = m.levels();
    const std::size_t P = m.positions();
    const auto step = double(m.step);

    // buy_min[k]: min over levels l >= k of b1*l + v(l); ties keep the lowest level
    static thread_local std::vector<double> buy_min, sell_min;
    static thread_local std::vector<std::size_t> buy_arg, sell_arg;
    buy_min.resize(L + 1);
    buy_arg.resize(L + 1);
    sell_min.resize(L);
    sell_arg.resize(L);
    buy_min[L] = std::numeric_limits<double>::infinity();
    buy_arg[L] = L;
    for (std::size_t k = L; k-- > 0;) {
        const double c = m.b1 * step * double(k) + next_value[k];
        if (c <= buy_min[k + 1]) {
            buy_min[k] = c;
            buy_arg[k] = k;
        } else {
            buy_min[k] = buy_min[k + 1];
            buy_arg[k] = buy_arg[k + 1];
        }
    }
    // sell_min[k]: min over levels l <= k of b2*l + v(l); ties keep the highest level
    for (std::size_t k = 0; k < L; ++k) {
        const double c = m.b2 * step * double(k) + next_value[k];
        if (k == 0 || c <= sell_min[k - 1]) {
            sell_min[k] = c;
            sell_arg[k] = k;
        } else {
            sell_min[k] = sell_min[k - 1];
            sell_arg[k] = sell_arg[k - 1];
        }
    }

    out.y.resize(P);
    if (want_target) out.target.resize(P);
    const std::int64_t top = m.capacity / m.step;
    for (std::size_t j = 0; j < P; ++j) {
        const std::int64_t cell = m.omega2_min / m.step + static_cast<std::int64_t>(j);
        const double x = double(cell) * step;
        double best = std::numeric_limits<double>::infinity();
        std::int64_t level = 0;
        if (cell >= 0 && cell <= top) {
            best = next_value[cell];
            level = cell;
        }
        // buy to a level strictly above the position
        const std::size_t first_buy = static_cast<std::size_t>(std::clamp<std::int64_t>(cell + 1, 0, top + 1));
        if (first_buy < L) {
            const double c = m.K1 - m.b1 * x + buy_min[first_buy];
            if (c < best) {
                best = c;
                level = static_cast<std::int64_t>(buy_arg[first_buy]);
            }
        }
        // sell down to a level strictly below the position
        if (cell >= 1) {
            const auto last_sell = static_cast<std::size_t>(std::min<std::int64_t>(cell - 1, top));
            const double c = -m.b2 * x + sell_min[last_sell];
            if (c < best) {
                best = c;
                level = static_cast<std::int64_t>(sell_arg[last_sell]);
            }
        }
        out.y[j] = best + m.cost_offset + (cell < 0 ? m.K2 : 0.0);
        if (want_target) out.target[j] = level * m.step;
    }
}

// v(k) = sum_phi P(phi) y(k*step - phi)
std::int64_t expectation(const MdpModel& m, const DiscreteDistribution& d, const std::vector<double>& y,
                         std::vector<double>& v) {
    const std::size_t L = m.levels();
    const auto P = static_cast<std::int64_t>(m.positions());
    v.assign(L, 0.0);
    std::int64_t clamped = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double mass = d.masses[k];
        // position index of level 0 after outflow phi
        const std::int64_t shift = (-d.point(k) - m.omega2_min) / m.step;
        if (shift >= 0 && shift + static_cast<std::int64_t>(L) - 1 < P) {
            const double* src = y.data() + shift;
            for (std::size_t l = 0; l < L; ++l) v[l] += mass * src[l];
        } else {
            for (std::size_t l = 0; l < L; ++l) {
                std::int64_t j = shift + static_cast<std::int64_t>(l);
                if (j < 0 || j >= P) {
                    ++clamped;
                    j = std::clamp<std::int64_t>(j, 0, P - 1);
                }
                v[l] += mass * y[static_cast<std::size_t>(j)];
            }
        }
    }
    return clamped;
}

}  // namespace

Policy solve_mdp(const MdpModel& model, const OutflowModel& outflow, const MdpSettings& settings) {
    if (outflow.T != model.T) throw std::invalid_argument("solve_mdp: outflow and model disagree on T");
    const int T = model.T;
    const std::size_t L = model.levels();

    Policy pol;
    pol.model = model;
    pol.value.assign(T, std::vector<double>(L, 0.0));
    std::vector<double> start(L, 0.0);  // normalized value of period 0 from the previous sweep
    Improvement imp;
    std::vector<double> v;

    for (std::int64_t it = 1;; ++it) {
        const std::vector<double>* next = &start;
        std::int64_t clamped = 0;
        for (int t = T - 1; t >= 0; --t) {
            improve(model, *next, false, imp);
            clamped += expectation(model, outflow.discrete[t], imp.y, v);
            pol.value[t].swap(v);
            next = &pol.value[t];
        }
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = 0; k < L; ++k) {
            const double diff = pol.value[0][k] - start[k];
            lo = std::min(lo, diff);
            hi = std::max(hi, diff);
        }
        const double ref = pol.value[0][0];
        for (std::size_t k = 0; k < L; ++k) start[k] = pol.value[0][k] - ref;
        pol.span = hi - lo;
        pol.iterations = it;
        pol.clamp_count = clamped;
        if (pol.span < settings.epsilon) {
            pol.cycle_cost = 0.5 * (hi + lo);
            break;
        }
        if (it >= settings.max_iterations)
            throw ConvergenceError("value iteration did not converge within " + std::to_string(it) + " sweeps");
    }
    pol.gain = pol.cycle_cost / T;

    pol.target.resize(T);
    for (int t = 0; t < T; ++t) {
        improve(model, t + 1 < T ? pol.value[t + 1] : start, true, imp);
        pol.target[t] = imp.target;
    }
    return pol;
}

std::vector<SsEntry> extract_sS(const Policy& policy) {
    const auto& m = policy.model;
    std::vector<SsEntry> table;
    for (int t = 0; t < m.T; ++t) {
        SsEntry e;
        const auto& tgt = policy.target[t];
        std::optional<std::int64_t> order_up_to;
        std::int64_t first_idle = std::numeric_limits<std::int64_t>::max();
        bool consistent = true;
        bool seen_idle = false;
        for (std::size_t j = 0; j < tgt.size(); ++j) {
            const std::int64_t x = m.position(j);
            const bool buys = tgt[j] > x;
            if (buys) {
                if (seen_idle) consistent = false;  // a buy above a non-buy position
                if (order_up_to && *order_up_to != tgt[j]) consistent = false;
                order_up_to = tgt[j];
            } else if (!seen_idle) {
                seen_idle = true;
                first_idle = x;
            }
        }
        if (!order_up_to) {
            e.kind = SsEntry::Kind::NoPurchase;
        } else if (!consistent) {
            e.kind = SsEntry::Kind::Irregular;
        } else {
            e.s = first_idle;
            e.S = *order_up_to;
        }
        table.push_back(e);
    }
    return table;
}

nlohmann::json policy_to_json(const Policy& policy) {
    const auto& m = policy.model;
    nlohmann::json j;
    j["T"] = m.T;
    j["capacity"] = m.capacity;
    j["step"] = m.step;
    j["gain"] = policy.gain;
    j["cycle_cost"] = policy.cycle_cost;
    j["iterations"] = policy.iterations;
    j["span"] = policy.span;
    j["clamp_count"] = policy.clamp_count;
    j["actions"] = nlohmann::json::array();
    for (int t = 0; t < m.T; ++t)
        for (std::size_t k = 0; k < m.positions(); ++k) {
            const std::int64_t x = m.position(k);
            const Action a = policy.action(t, x);
            j["actions"].push_back({{"t", t + 1}, {"omega2", x}, {"q1", a.q1}, {"q2", a.q2}});
        }
    return j;
}

void write_sS_csv(const std::vector<SsEntry>& table, std::ostream& out) {
    out << "t,s,S,kind\n";
    for (std::size_t t = 0; t < table.size(); ++t) {
        const auto& e = table[t];
        out << t + 1 << ',';
        switch (e.kind) {
            case SsEntry::Kind::SS: out << e.s << ',' << e.S << ",sS\n"; break;
            case SsEntry::Kind::NoPurchase: out << "-inf,,no_purchase\n"; break;
            case SsEntry::Kind::Irregular: out << ",,irregular\n"; break;
        }
    }
}

}  // namespace scirp
