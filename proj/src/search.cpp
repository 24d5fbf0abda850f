#include "scirp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "scirp/parallel.hpp"

namespace scirp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool better(const EvalRecord& a, const EvalRecord& b) { return a.total < b.total; }

}  // namespace

Evaluator::Evaluator(const Instance& inst, const ClusterPool& pool, MdpSettings settings)
    : inst_(inst), pool_(pool), settings_(settings) {}

std::shared_ptr<const Policy> Evaluator::policy(const std::vector<std::size_t>& ids) {
    std::promise<std::shared_ptr<const Policy>> promise;
    PolicyFuture future;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        auto [it, inserted] = policies_.try_emplace(ids);
        if (inserted) {
            it->second = promise.get_future().share();
            owner = true;
        }
        future = it->second;
    }
    if (!owner) return future.get();

    try {
        const Selection sel = make_selection(pool_, ids, inst_.T, {});
        const OutflowModel outflow = build_outflow(sel, inst_, settings_.step, settings_.tail_mass);
        const MdpModel model = make_model(inst_, outflow, settings_);
        promise.set_value(std::make_shared<const Policy>(solve_mdp(model, outflow, settings_)));
    } catch (...) {
        promise.set_exception(std::current_exception());
    }
    return future.get();
}

std::size_t Evaluator::mdp_solves() const {
    std::lock_guard lock(mutex_);
    return policies_.size();
}

EvalRecord Evaluator::operator()(double eta1, double eta2) {
    if (eta1 < 0 || eta2 < 0) throw std::invalid_argument("evaluate: penalty weights must be >= 0");
    std::promise<EvalRecord> promise;
    std::shared_future<EvalRecord> future;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        auto [it, inserted] = records_.try_emplace({eta1, eta2});
        if (inserted) {
            it->second = promise.get_future().share();
            owner = true;
        }
        future = it->second;
    }
    if (!owner) return future.get();

    try {
        EvalRecord rec;
        rec.eta1 = eta1;
        rec.eta2 = eta2;
        const auto t0 = std::chrono::steady_clock::now();
        const Selection sel = solve(inst_, pool_, {eta1, eta2});
        rec.solve_seconds = seconds_since(t0);
        rec.cluster_ids = sel.cluster_ids;
        rec.tactical_cost = sel.tactical_cost;
        rec.penalty_value = sel.penalty_value;
        const auto t1 = std::chrono::steady_clock::now();
        rec.mdp_cycle_cost = policy(sel.cluster_ids)->cycle_cost;
        rec.mdp_seconds = seconds_since(t1);
        rec.total = rec.tactical_cost + rec.mdp_cycle_cost;
        promise.set_value(rec);
    } catch (...) {
        promise.set_exception(std::current_exception());
    }
    return future.get();
}

Selection Evaluator::selection(const EvalRecord& record) const {
    return make_selection(pool_, record.cluster_ids, inst_.T, {record.eta1, record.eta2});
}

EvalRecord step_by_step(const EvalFn& eval) { return eval(0.0, 0.0); }

SearchResult line_search(const EvalFn& eval, const LineSearchParams& params) {
    if (params.zeta1 <= 0 || params.zeta2 <= 0) throw std::invalid_argument("line_search: zeta must be > 0");
    if (params.ub1 <= 0 || params.ub2 <= 0) throw std::invalid_argument("line_search: ub must be > 0");

    SearchState s;
    s.eta1 = params.eps_init;
    s.eta2 = params.eps_init;
    s.z = std::numeric_limits<double>::infinity();
    if (params.include_origin) s.history.push_back(eval(0.0, 0.0));

    while (s.i != 2 && !(s.eta1 == params.ub1 && s.eta2 == params.ub2)) {
        const EvalRecord rec = eval(s.eta1, s.eta2);
        s.history.push_back(rec);
        const bool first = s.psi == 1;
        double& eta = first ? s.eta1 : s.eta2;
        const double zeta = first ? params.zeta1 : params.zeta2;
        const double ub = first ? params.ub1 : params.ub2;
        if (rec.total <= s.z) {
            s.z = rec.total;
            if (eta < ub) {
                eta = std::min(eta + zeta, ub);
            } else {
                s.psi = 1 - s.psi;
                ++s.i;
            }
        } else {
            eta = std::max(eta - zeta, 0.0);
            s.psi = 1 - s.psi;
            ++s.i;
        }
    }

    SearchResult out;
    out.history = std::move(s.history);
    out.best = *std::min_element(out.history.begin(), out.history.end(), better);
    return out;
}

std::vector<double> default_grid_eta1() { return {0, 0.0001, 1, 2, 3, 4, 5, 6, 7, 8}; }
std::vector<double> default_grid_eta2() { return {0, 0.0001, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4}; }

GridResult grid_search(const EvalFn& eval, const std::vector<double>& eta1_list, const std::vector<double>& eta2_list,
                       unsigned threads) {
    if (eta1_list.empty() || eta2_list.empty()) throw std::invalid_argument("grid_search: empty parameter list");
    GridResult out;
    out.records.resize(eta1_list.size() * eta2_list.size());
    parallel_for(out.records.size(), threads, [&](std::size_t k) {
        out.records[k] = eval(eta1_list[k / eta2_list.size()], eta2_list[k % eta2_list.size()]);
    });
    out.best = *std::min_element(out.records.begin(), out.records.end(), better);
    return out;
}

double delta_percent(const EvalRecord& baseline, const EvalRecord& reference) {
    return 100.0 * (baseline.total - reference.total) / reference.total;
}

nlohmann::json record_to_json(const EvalRecord& r) {
    return {{"eta1", r.eta1},
            {"eta2", r.eta2},
            {"tactical_cost", r.tactical_cost},
            {"penalty_value", r.penalty_value},
            {"mdp_cycle_cost", r.mdp_cycle_cost},
            {"total", r.total},
            {"cluster_ids", r.cluster_ids}};
}

EvalRecord record_from_json(const nlohmann::json& j) {
    EvalRecord r;
    r.eta1 = j.at("eta1").get<double>();
    r.eta2 = j.at("eta2").get<double>();
    r.tactical_cost = j.at("tactical_cost").get<double>();
    r.penalty_value = j.value("penalty_value", 0.0);
    r.mdp_cycle_cost = j.at("mdp_cycle_cost").get<double>();
    r.total = j.at("total").get<double>();
    if (j.contains("cluster_ids")) r.cluster_ids = j.at("cluster_ids").get<std::vector<std::size_t>>();
    return r;
}

void write_records_csv(const std::vector<EvalRecord>& records, std::ostream& out) {
    out << "eta1,eta2,tactical,mdp,total\n";
    out << std::setprecision(12);
    for (const auto& r : records)
        out << r.eta1 << ',' << r.eta2 << ',' << r.tactical_cost << ',' << r.mdp_cycle_cost << ',' << r.total << '\n';
}

}  // namespace scirp
