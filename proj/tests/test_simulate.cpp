#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "scirp/simulate.hpp"

using namespace scirp;

namespace {

const std::string kAppendix = std::string(SCIRP_DATA_DIR) + "/appendix_a.json";
const std::string kCalibrated = std::string(SCIRP_DATA_DIR) + "/appendix_a_calibrated.json";

struct Fixture {
    Instance inst;
    ClusterPool pool;
    Selection sel;
    OutflowModel outflow;
    Policy policy;
};

Fixture appendix(const std::string& path) {
    Fixture f;
    f.inst = load_instance(path);
    f.pool = {price_cluster(f.inst, {1, 2}, 41), price_cluster(f.inst, {3}, 86)};
    f.sel = make_selection(f.pool, {0, 1}, f.inst.T, {});
    const MdpSettings st;
    f.outflow = build_outflow(f.sel, f.inst, st.step, st.tail_mass);
    f.policy = solve_mdp(make_model(f.inst, f.outflow, st), f.outflow, st);
    return f;
}

Estimate direct(const std::vector<double>& xs) {
    Estimate e;
    e.samples = static_cast<std::int64_t>(xs.size());
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.sample_std = std::sqrt(ss / double(xs.size() - 1));
    e.std_error = e.sample_std / std::sqrt(double(xs.size()));
    return e;
}

}  // namespace

TEST_CASE("aggregate replay agrees with the policy gain") {
    for (const auto& path : {kAppendix, kCalibrated}) {
        const Fixture f = appendix(path);
        SimOptions o;
        o.periods = 200'000;
        o.seed = 3;
        const SimReport r = simulate_aggregate(f.policy, f.outflow, o);
        CHECK(r.cycles == 200'000 / 7);
        CHECK(r.periods == r.cycles * 7);
        CHECK(r.clamp_count == 0);
        CHECK(r.purchasing.std_error > 0);
        CHECK(std::abs(r.purchasing.mean - f.policy.cycle_cost) <= 4 * r.purchasing.std_error);
        CHECK(r.total.mean == r.purchasing.mean);
    }
}

TEST_CASE("replays are reproducible per seed") {
    const Fixture f = appendix(kCalibrated);
    SimOptions o;
    o.periods = 20'000;
    o.seed = 9;
    const auto a = report_to_json(simulate_aggregate(f.policy, f.outflow, o));
    CHECK(a == report_to_json(simulate_aggregate(f.policy, f.outflow, o)));
    const auto fa = report_to_json(simulate_full(f.inst, f.pool, f.sel, f.policy, o));
    CHECK(fa == report_to_json(simulate_full(f.inst, f.pool, f.sel, f.policy, o)));
    o.seed = 10;
    CHECK(a != report_to_json(simulate_aggregate(f.policy, f.outflow, o)));
    CHECK(fa != report_to_json(simulate_full(f.inst, f.pool, f.sel, f.policy, o)));
}

TEST_CASE("customer-level replay reproduces the analytic costs and service levels") {
    const Fixture f = appendix(kCalibrated);
    SimOptions o;
    o.periods = 300'000;
    o.seed = 5;
    const SimReport r = simulate_full(f.inst, f.pool, f.sel, f.policy, o);
    const double cT = f.pool[0].cT + f.pool[1].cT;
    const double cH = f.pool[0].cH + f.pool[1].cH;
    const double cE = f.pool[0].cE + f.pool[1].cE;
    CHECK(r.transport.mean == doctest::Approx(cT));
    CHECK(r.holding.mean == doctest::Approx(cH).epsilon(0.01));
    CHECK(std::abs(r.emergency.mean - cE) <= 4 * r.emergency.std_error + 0.02 * cE);
    CHECK(std::abs(r.purchasing.mean - f.policy.cycle_cost) <= 4 * r.purchasing.std_error + 0.02 * f.policy.cycle_cost);
    CHECK(r.total.mean == doctest::Approx(r.transport.mean + r.holding.mean + r.emergency.mean + r.purchasing.mean));
    REQUIRE(r.service_level.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.service_level[i] >= f.inst.alpha - 0.01);
        CHECK(r.service_level_overall[i] >= r.service_level[i]);
    }
    CHECK(r.emergency_frequency > 0.0);
    CHECK(r.emergency_frequency < 0.2);
    CHECK(r.negative_order_frequency < 0.05);
    CHECK(r.clamp_count == 0);
}

TEST_CASE("unclamped orders keep the order count") {
    const Fixture f = appendix(kCalibrated);
    SimOptions o;
    o.periods = 20'000;
    o.clamp_orders = false;
    const SimReport a = simulate_full(f.inst, f.pool, f.sel, f.policy, o);
    o.clamp_orders = true;
    const SimReport b = simulate_full(f.inst, f.pool, f.sel, f.policy, o);
    CHECK(a.negative_order_frequency == b.negative_order_frequency);
    CHECK(a.transport.mean == b.transport.mean);
}

TEST_CASE("merging replications pools moments") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(10, 3);
    std::vector<double> xa(400), xb(900);
    for (auto& x : xa) x = g(rng);
    for (auto& x : xb) x = g(rng) + 1;
    std::vector<double> all = xa;
    all.insert(all.end(), xb.begin(), xb.end());

    SimReport a, b;
    a.cycles = 400;
    b.cycles = 900;
    a.periods = 2800;
    b.periods = 6300;
    a.purchasing = direct(xa);
    b.purchasing = direct(xb);
    a.service_level = {0.9, 1.0};
    b.service_level = {1.0, 0.8};
    a.service_level_overall = a.service_level;
    b.service_level_overall = b.service_level;
    a.emergency_frequency = 0.1;
    b.emergency_frequency = 0.2;

    const SimReport m = merge_reports({a, b});
    const Estimate ref = direct(all);
    CHECK(m.cycles == 1300);
    CHECK(m.periods == 9100);
    CHECK(m.purchasing.samples == 1300);
    CHECK(m.purchasing.mean == doctest::Approx(ref.mean).epsilon(1e-12));
    CHECK(m.purchasing.sample_std == doctest::Approx(ref.sample_std).epsilon(1e-12));
    const double wa = 400.0 / 1300, wb = 900.0 / 1300;
    CHECK(m.purchasing.std_error == doctest::Approx(std::sqrt(wa * wa * a.purchasing.std_error * a.purchasing.std_error +
                                                              wb * wb * b.purchasing.std_error * b.purchasing.std_error)));
    CHECK(m.service_level[0] == doctest::Approx(wa * 0.9 + wb * 1.0));
    CHECK(m.emergency_frequency == doctest::Approx(wa * 0.1 + wb * 0.2));
    CHECK(merge_reports({}).cycles == 0);
}

TEST_CASE("report json layout") {
    SimReport r;
    r.purchasing.mean = 5;
    const auto j = report_to_json(r);
    for (const char* key : {"periods", "cycles", "transport", "holding", "emergency", "purchasing", "total",
                            "service_level", "clamp_count"})
        CHECK(j.contains(key));
    CHECK(j["purchasing"]["mean"] == 5.0);
}
