#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <sstream>

#include "scirp/search.hpp"

using namespace scirp;

namespace {

const std::string kCalibrated = std::string(SCIRP_DATA_DIR) + "/appendix_a_calibrated.json";

EvalFn stub(std::function<double(double, double)> f, std::vector<std::pair<double, double>>* calls = nullptr) {
    return [f, calls](double a, double b) {
        if (calls) calls->push_back({a, b});
        EvalRecord r;
        r.eta1 = a;
        r.eta2 = b;
        r.tactical_cost = f(a, b);
        r.total = r.tactical_cost;
        return r;
    };
}

bool same(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

TEST_CASE("flat objective walks each parameter to its bound") {
    std::vector<std::pair<double, double>> calls;
    const SearchResult res = line_search(stub([](double, double) { return 1.0; }, &calls));
    std::vector<std::pair<double, double>> want{{0, 0}};
    for (double e1 : {0.0001, 1.0001, 2.0001, 3.0001, 4.0001, 5.0001, 6.0001, 7.0001, 8.0}) want.push_back({e1, 0.0001});
    // the switch re-evaluates the corner before eta2 moves
    want.push_back({8.0, 0.0001});
    for (double e2 : {0.5001, 1.0001, 1.5001, 2.0001, 2.5001, 3.0001, 3.5001}) want.push_back({8.0, e2});
    REQUIRE(calls.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
        CHECK(same(calls[k].first, want[k].first));
        CHECK(same(calls[k].second, want[k].second));
    }
    // earliest record wins ties
    CHECK(res.best.eta1 == 0.0);
    CHECK(res.history.size() == calls.size());
}

TEST_CASE("bowl objective stops next to its minimum") {
    std::vector<std::pair<double, double>> calls;
    auto bowl = [](double a, double b) { return (a - 3) * (a - 3) + (b - 1) * (b - 1); };
    const SearchResult res = line_search(stub(bowl, &calls));
    CHECK(same(res.best.eta1, 3.0001));
    CHECK(same(res.best.eta2, 1.0001));
    // eta1 overshoots to 4.0001, eta2 to 1.5001, then the walk ends
    CHECK(same(calls.back().first, 3.0001));
    CHECK(same(calls.back().second, 1.5001));
    std::set<std::pair<double, double>> distinct(calls.begin(), calls.end());
    CHECK(distinct.size() + 1 == calls.size());
}

TEST_CASE("origin only counts in the history") {
    // the origin is best but does not seed the walk's incumbent
    auto f = [](double a, double b) { return a == 0 && b == 0 ? -1.0 : a + b; };
    const SearchResult res = line_search(stub(f));
    CHECK(res.best.total == -1.0);
    CHECK(res.history.size() > 2);
    LineSearchParams p;
    p.include_origin = false;
    CHECK(line_search(stub(f), p).best.total > 0);
}

TEST_CASE("retreat never goes negative and parameters are validated") {
    LineSearchParams p;
    p.eps_init = 0.0;
    p.zeta1 = 3;
    std::vector<std::pair<double, double>> calls;
    line_search(stub([](double a, double b) { return a + b; }, &calls), p);
    for (const auto& [a, b] : calls) {
        CHECK(a >= 0);
        CHECK(b >= 0);
    }
    p.zeta1 = 0;
    CHECK_THROWS_AS(line_search(stub([](double, double) { return 0.0; }), p), std::invalid_argument);
    p.zeta1 = 1;
    p.ub2 = 0;
    CHECK_THROWS_AS(line_search(stub([](double, double) { return 0.0; }), p), std::invalid_argument);
}

TEST_CASE("grid search evaluates the product in eta1-major order") {
    std::atomic<int> count{0};
    EvalFn f = [&](double a, double b) {
        ++count;
        EvalRecord r;
        r.eta1 = a;
        r.eta2 = b;
        r.total = std::abs(a - 2) + std::abs(b - 0.5);
        return r;
    };
    const GridResult g = grid_search(f, default_grid_eta1(), default_grid_eta2(), 3);
    CHECK(count == 100);
    REQUIRE(g.records.size() == 100);
    CHECK(g.records[23].eta1 == 1);
    CHECK(g.records[23].eta2 == 1);
    CHECK(g.best.eta1 == 2);
    CHECK(g.best.eta2 == 0.5);
    const GridResult one = grid_search(f, {4}, {1.5}, 1);
    CHECK(one.best.total == f(4, 1.5).total);
    CHECK_THROWS_AS(grid_search(f, {}, {1}, 1), std::invalid_argument);
    CHECK(default_grid_eta1() == std::vector<double>{0, 0.0001, 1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(default_grid_eta2() == std::vector<double>{0, 0.0001, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4});
}

TEST_CASE("joint evaluation of the appendix instance") {
    const Instance inst = load_instance(kCalibrated);
    const ClusterPool pool = enumerate(inst);
    Evaluator ev(inst, pool);

    const EvalRecord base = step_by_step(ev.fn());
    CHECK(base.eta1 == 0);
    CHECK(base.total == doctest::Approx(base.tactical_cost + base.mdp_cycle_cost));

    const SearchResult ls = line_search(ev.fn());
    CHECK(ls.best.total <= base.total + 1e-9);
    // 3797.6 + 782 with the rounded table entries
    CHECK(ls.best.total == doctest::Approx(4579.6).epsilon(0.01));

    for (const auto& rec : ls.history) {
        const Selection sel = ev.selection(rec);
        CHECK(rec.total == doctest::Approx(rec.tactical_cost + rec.mdp_cycle_cost));
        CHECK(sel.tactical_cost == doctest::Approx(rec.tactical_cost));
        CHECK(sel.penalty_value == doctest::Approx(rec.penalty_value));
        CHECK(ev.policy(rec.cluster_ids)->cycle_cost == rec.mdp_cycle_cost);
        CHECK(is_partition(pool, rec.cluster_ids, inst.num_customers()));
    }

    const std::size_t solves = ev.mdp_solves();
    const EvalRecord again = ev(ls.best.eta1, ls.best.eta2);
    CHECK(again.total == ls.best.total);
    CHECK(ev.mdp_solves() == solves);

    // agreement whenever the walk visited the grid argmin
    const GridResult g = grid_search(ev.fn(), {0, 0.0001, 1}, {0, 0.0001, 0.5}, 2);
    for (const auto& rec : ls.history)
        if (rec.eta1 == g.best.eta1 && rec.eta2 == g.best.eta2) CHECK(ls.best.total <= g.best.total);
    for (const auto& rec : g.records) CHECK(rec.total >= g.best.total);
    CHECK_THROWS_AS(ev(-1, 0), std::invalid_argument);
}

TEST_CASE("records round trip and export") {
    EvalRecord r;
    r.eta1 = 1;
    r.eta2 = 0.5;
    r.tactical_cost = 100;
    r.penalty_value = 3;
    r.mdp_cycle_cost = 20;
    r.total = 120;
    r.cluster_ids = {2, 5};
    const EvalRecord back = record_from_json(record_to_json(r));
    CHECK(back.total == 120);
    CHECK(back.cluster_ids == r.cluster_ids);
    CHECK(back.penalty_value == 3);

    std::ostringstream os;
    write_records_csv({r}, os);
    CHECK(os.str() == "eta1,eta2,tactical,mdp,total\n1,0.5,100,20,120\n");

    EvalRecord ref = r;
    ref.total = 100;
    CHECK(delta_percent(r, ref) == doctest::Approx(20.0));
}
