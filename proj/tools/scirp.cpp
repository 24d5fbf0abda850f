// Command-line front end: instance generation, cluster enumeration, the
// tactical and purchasing solvers, simulation, parameter search and sweeps.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scirp/parallel.hpp"
#include "scirp/search.hpp"
#include "scirp/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scirp;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string instance;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::int64_t step = 5;
    double tail_mass = 1e-6;
    double epsilon = 0.1;
    std::vector<double> zeta{1.0, 0.5};
    std::vector<double> ub{8.0, 4.0};
    double eps_init = 1e-4;
    std::int64_t periods = 1'000'000;
    double eta1 = 0.0, eta2 = 0.0;
    std::vector<double> grid_eta1 = default_grid_eta1();
    std::vector<double> grid_eta2 = default_grid_eta2();
    std::string which = "m_p";
    double from = 0.0, to = 2.0, step_mult = 0.1;
    std::string mode = "aggregate";
    int n = 10, T = 7;
    std::string uncertainty = "L";
    std::vector<std::string> inputs;
    bool no_simulation = false;
};

MdpSettings mdp_settings(const Options& o) {
    MdpSettings s;
    s.step = o.step;
    s.tail_mass = o.tail_mass;
    s.epsilon = o.epsilon;
    return s;
}

LineSearchParams search_params(const Options& o) {
    if (o.zeta.empty() || o.zeta.size() > 2 || o.ub.empty() || o.ub.size() > 2)
        throw ConfigError("--zeta and --ub take one or two values");
    LineSearchParams p;
    p.zeta1 = o.zeta.front();
    p.zeta2 = o.zeta.back();
    p.ub1 = o.ub.front();
    p.ub2 = o.ub.back();
    p.eps_init = o.eps_init;
    return p;
}

std::uint64_t require_seed(const Options& o) {
    if (!o.seed) throw ConfigError("--seed is required for this command");
    return *o.seed;
}

Instance require_instance(const Options& o) {
    if (o.instance.empty()) throw ConfigError("--instance is required");
    if (!fs::exists(o.instance)) throw ConfigError("instance file not found: " + o.instance);
    Instance inst = load_instance(o.instance);
    const auto problems = validate(inst);
    if (!problems.empty()) {
        std::string msg = "invalid instance:";
        for (const auto& p : problems) msg += " " + p + ";";
        throw ConfigError(msg);
    }
    return inst;
}

fs::path out_file(const Options& o, const std::string& name) {
    fs::create_directories(o.out);
    return fs::path(o.out) / name;
}

void write_json(const Options& o, const std::string& name, const json& j) {
    std::ofstream f(out_file(o, name));
    f << j.dump(2) << '\n';
}

json sS_to_json(const std::vector<SsEntry>& table) {
    json rows = json::array();
    for (std::size_t t = 0; t < table.size(); ++t) {
        const auto& e = table[t];
        json row{{"t", t + 1}};
        switch (e.kind) {
            case SsEntry::Kind::SS: row["s"] = e.s; row["S"] = e.S; break;
            case SsEntry::Kind::NoPurchase: row["kind"] = "no_purchase"; break;
            case SsEntry::Kind::Irregular: row["kind"] = "irregular"; break;
        }
        rows.push_back(row);
    }
    return rows;
}

json policy_summary(const Policy& pol) {
    return {{"cycle_cost", pol.cycle_cost},
            {"gain", pol.gain},
            {"iterations", pol.iterations},
            {"clamp_count", pol.clamp_count},
            {"sS", sS_to_json(extract_sS(pol))}};
}

int cmd_gen(const Options& o) {
    GenerateParams params;
    if (o.uncertainty == "H") params.uncertainty = GenerateParams::Uncertainty::High;
    else if (o.uncertainty != "L") throw ConfigError("--uncertainty must be L or H");
    const Instance inst = generate(require_seed(o), o.n, o.T, params);
    const auto path = out_file(o, "instance.json");
    save_instance(inst, path.string());
    std::cout << json{{"instance", path.string()}, {"customers", inst.num_customers()}}.dump() << '\n';
    return 0;
}

int cmd_clusters(const Options& o) {
    const Instance inst = require_instance(o);
    const ClusterPool pool = enumerate(inst, default_threads());
    std::ofstream f(out_file(o, "clusters.jsonl"));
    write_pool_jsonl(inst, pool, f);
    std::cout << json{{"clusters", pool.size()}}.dump() << '\n';
    return 0;
}

int cmd_solve(const Options& o) {
    const Instance inst = require_instance(o);
    const ClusterPool pool = enumerate(inst, default_threads());
    const Selection sel = solve(inst, pool, {o.eta1, o.eta2});
    json j = selection_to_json(inst, pool, sel);
    j["eta1"] = o.eta1;
    j["eta2"] = o.eta2;
    j["objective"] = sel.objective();
    write_json(o, "selection.json", j);
    std::cout << json{{"tactical_cost", sel.tactical_cost}, {"objective", sel.objective()}}.dump() << '\n';
    return 0;
}

int cmd_mdp(const Options& o) {
    const Instance inst = require_instance(o);
    const ClusterPool pool = enumerate(inst, default_threads());
    Evaluator ev(inst, pool, mdp_settings(o));
    const EvalRecord rec = ev(o.eta1, o.eta2);
    const auto pol = ev.policy(rec.cluster_ids);
    write_json(o, "policy.json", policy_to_json(*pol));
    std::ofstream csv(out_file(o, "sS.csv"));
    write_sS_csv(extract_sS(*pol), csv);
    json j = policy_summary(*pol);
    j["record"] = record_to_json(rec);
    std::cout << j.dump() << '\n';
    return 0;
}

SimReport run_simulation(const Evaluator& ev, const Selection& sel, const Policy& pol, const Options& o,
                         std::uint64_t seed) {
    SimOptions so;
    so.periods = o.periods;
    so.seed = seed;
    if (o.mode == "aggregate") {
        const auto outflow = build_outflow(sel, ev.instance(), o.step, o.tail_mass);
        return simulate_aggregate(pol, outflow, so);
    }
    if (o.mode == "full") return simulate_full(ev.instance(), ev.pool(), sel, pol, so);
    throw ConfigError("--mode must be aggregate or full");
}

int cmd_simulate(const Options& o) {
    const std::uint64_t seed = require_seed(o);
    const Instance inst = require_instance(o);
    const ClusterPool pool = enumerate(inst, default_threads());
    Evaluator ev(inst, pool, mdp_settings(o));
    const EvalRecord rec = ev(o.eta1, o.eta2);
    const auto pol = ev.policy(rec.cluster_ids);
    const SimReport report = run_simulation(ev, ev.selection(rec), *pol, o, seed);
    json j{{"mode", o.mode},
           {"seed", seed},
           {"record", record_to_json(rec)},
           {"mdp_cycle_cost", pol->cycle_cost},
           {"simulation", report_to_json(report)}};
    write_json(o, "simulation.json", j);
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_search(const Options& o) {
    const Instance inst = require_instance(o);
    const ClusterPool pool = enumerate(inst, default_threads());
    Evaluator ev(inst, pool, mdp_settings(o));
    const EvalRecord base = step_by_step(ev.fn());
    const SearchResult res = line_search(ev.fn(), search_params(o));
    const auto pol = ev.policy(res.best.cluster_ids);

    json history = json::array();
    for (const auto& r : res.history) history.push_back(record_to_json(r));
    json j{{"step_by_step", record_to_json(base)},
           {"best", record_to_json(res.best)},
           {"delta_percent", delta_percent(base, res.best)},
           {"iterations", res.history.size()},
           {"history", history},
           {"policy", policy_summary(*pol)},
           {"selection", selection_to_json(inst, pool, ev.selection(res.best))}};
    if (o.seed && !o.no_simulation) {
        const SimReport sim = run_simulation(ev, ev.selection(res.best), *pol, o, *o.seed);
        j["simulation"] = report_to_json(sim);
    }
    write_json(o, "search.json", j);
    std::ofstream csv(out_file(o, "history.csv"));
    write_records_csv(res.history, csv);
    std::cout << json{{"best_total", res.best.total},
                      {"step_by_step_total", base.total},
                      {"delta_percent", j["delta_percent"]},
                      {"sS", j["policy"]["sS"]}}
                     .dump()
              << '\n';
    return 0;
}

int cmd_grid(const Options& o) {
    const Instance inst = require_instance(o);
    const ClusterPool pool = enumerate(inst, default_threads());
    Evaluator ev(inst, pool, mdp_settings(o));
    const GridResult g = grid_search(ev.fn(), o.grid_eta1, o.grid_eta2, default_threads());
    json records = json::array();
    for (const auto& r : g.records) records.push_back(record_to_json(r));
    write_json(o, "grid.json",
               {{"eta1", o.grid_eta1}, {"eta2", o.grid_eta2}, {"best", record_to_json(g.best)}, {"records", records}});
    std::ofstream csv(out_file(o, "grid.csv"));
    write_records_csv(g.records, csv);
    std::cout << json{{"best_total", g.best.total}, {"eta1", g.best.eta1}, {"eta2", g.best.eta2}}.dump() << '\n';
    return 0;
}

int cmd_sweep(const Options& o) {
    if (o.which != "m_s" && o.which != "m_p" && o.which != "m_d") throw ConfigError("--which must be m_s, m_p or m_d");
    if (o.step_mult <= 0 || o.to < o.from || o.from < 0) throw ConfigError("bad sweep range");
    const Instance inst = require_instance(o);
    const ClusterPool pool = enumerate(inst, default_threads());
    const Selection base_sel = solve(inst, pool, {o.eta1, o.eta2});
    const MdpSettings settings = mdp_settings(o);

    struct Point {
        double m, tactical, purchasing;
    };
    auto evaluate_at = [&](double m) {
        const Instance scaled = scale(inst, o.which == "m_s" ? m : 1.0, o.which == "m_p" ? m : 1.0,
                                      o.which == "m_d" ? m : 1.0);
        // the tactical plan stays fixed: same customer sets and delivery days, repriced
        ClusterPool repriced;
        std::vector<std::size_t> ids;
        for (std::size_t r : base_sel.cluster_ids) {
            ids.push_back(repriced.size());
            repriced.push_back(price_cluster(scaled, pool[r].customers, pool[r].schedule.mask));
        }
        const Selection sel = make_selection(repriced, ids, scaled.T, {});
        const OutflowModel outflow = build_outflow(sel, scaled, settings.step, settings.tail_mass);
        const Policy pol = solve_mdp(make_model(scaled, outflow, settings), outflow, settings);
        return Point{m, sel.tactical_cost, pol.cycle_cost};
    };

    const Point ref = evaluate_at(1.0);
    std::vector<Point> points;
    const auto count = static_cast<long>(std::floor((o.to - o.from) / o.step_mult + 1e-9)) + 1;
    for (long k = 0; k < count; ++k) points.push_back(evaluate_at(o.from + double(k) * o.step_mult));

    std::ofstream csv(out_file(o, "sweep_" + o.which + ".csv"));
    csv << o.which << ",tactical,purchasing,total,purchasing_ratio,total_ratio\n" << std::setprecision(12);
    for (const auto& p : points) {
        const double total = p.tactical + p.purchasing;
        csv << p.m << ',' << p.tactical << ',' << p.purchasing << ',' << total << ','
            << p.purchasing / ref.purchasing << ',' << total / (ref.tactical + ref.purchasing) << '\n';
    }
    std::cout << json{{"points", points.size()}, {"reference_purchasing", ref.purchasing}}.dump() << '\n';
    return 0;
}

// Aggregates stored search outputs; no solver is run.
int cmd_report(const Options& o) {
    if (o.inputs.empty()) throw ConfigError("report needs one or more search.json files");
    std::vector<double> deltas;
    std::ofstream csv(out_file(o, "report.csv"));
    csv << "file,step_by_step_total,line_search_total,delta_percent,iterations\n" << std::setprecision(12);
    for (const auto& path : o.inputs) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read " + path);
        const json j = json::parse(in);
        const EvalRecord base = record_from_json(j.at("step_by_step"));
        const EvalRecord best = record_from_json(j.at("best"));
        const double d = delta_percent(base, best);
        deltas.push_back(d);
        csv << path << ',' << base.total << ',' << best.total << ',' << d << ',' << j.value("iterations", 0) << '\n';
    }
    double sum = 0.0;
    for (double d : deltas) sum += d;
    std::cout << json{{"instances", deltas.size()},
                      {"delta_percent_avg", sum / double(deltas.size())},
                      {"delta_percent_min", *std::min_element(deltas.begin(), deltas.end())},
                      {"delta_percent_max", *std::max_element(deltas.begin(), deltas.end())},
                      {"improved", std::count_if(deltas.begin(), deltas.end(), [](double d) { return d > 0; })}}
                     .dump()
              << '\n';
    return 0;
}

void error_exit_json(const std::string& type, const std::string& message) {
    std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic cyclic inventory routing: tactical schedules and purchasing policies"};
    app.set_config("--config", "", "TOML/INI file with option defaults");
    app.require_subcommand(1);
    Options o;

    auto add_instance = [&](CLI::App* c) {
        c->add_option("--instance", o.instance, "Instance JSON");
        c->add_option("--out", o.out, "Output directory");
    };
    auto add_mdp = [&](CLI::App* c) {
        c->add_option("--step", o.step, "Inventory grid step")->check(CLI::PositiveNumber);
        c->add_option("--tail-mass", o.tail_mass, "Outflow tail mass dropped");
        c->add_option("--epsilon", o.epsilon, "Value-iteration stopping span");
    };
    auto add_eta = [&](CLI::App* c) {
        c->add_option("--eta1", o.eta1, "Mean-profile penalty weight")->check(CLI::NonNegativeNumber);
        c->add_option("--eta2", o.eta2, "Variance-profile penalty weight")->check(CLI::NonNegativeNumber);
    };
    auto add_sim = [&](CLI::App* c) {
        c->add_option("--periods", o.periods, "Simulated periods")->check(CLI::PositiveNumber);
        c->add_option("--mode", o.mode, "aggregate or full")->check(CLI::IsMember({"aggregate", "full"}));
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed"); };

    auto* gen = app.add_subcommand("gen", "Generate a base-system instance");
    gen->add_option("--n", o.n, "Customers")->check(CLI::PositiveNumber);
    gen->add_option("--T", o.T, "Cycle length")->check(CLI::Range(1, 31));
    gen->add_option("--uncertainty", o.uncertainty, "Demand uncertainty level L or H");
    gen->add_option("--out", o.out, "Output directory");
    add_seed(gen);

    auto* clusters = app.add_subcommand("clusters", "Enumerate the feasible cluster pool");
    add_instance(clusters);

    auto* solve_cmd = app.add_subcommand("solve", "Solve the tactical set-partitioning model");
    add_instance(solve_cmd);
    add_eta(solve_cmd);

    auto* mdp = app.add_subcommand("mdp", "Solve the purchasing MDP for a tactical solution");
    add_instance(mdp);
    add_eta(mdp);
    add_mdp(mdp);

    auto* simulate = app.add_subcommand("simulate", "Simulate the purchasing policy");
    add_instance(simulate);
    add_eta(simulate);
    add_mdp(simulate);
    add_sim(simulate);
    add_seed(simulate);

    auto* search = app.add_subcommand("search", "Step-by-step baseline and line search");
    add_instance(search);
    add_mdp(search);
    add_sim(search);
    add_seed(search);
    search->add_option("--zeta", o.zeta, "Increments for eta1[,eta2]")->delimiter(',');
    search->add_option("--ub", o.ub, "Upper bounds for eta1[,eta2]")->delimiter(',');
    search->add_option("--eps-init", o.eps_init, "Initial penalty weights");
    search->add_flag("--no-simulation", o.no_simulation, "Skip simulating the best policy");

    auto* grid = app.add_subcommand("grid", "Grid search over penalty weights");
    add_instance(grid);
    add_mdp(grid);
    grid->add_option("--grid-eta1", o.grid_eta1, "eta1 values")->delimiter(',');
    grid->add_option("--grid-eta2", o.grid_eta2, "eta2 values")->delimiter(',');

    auto* sweep = app.add_subcommand("sweep", "Multiplier sweep on supply or demand uncertainty");
    add_instance(sweep);
    add_eta(sweep);
    add_mdp(sweep);
    sweep->add_option("--which", o.which, "m_s, m_p or m_d");
    sweep->add_option("--from", o.from, "First multiplier");
    sweep->add_option("--to", o.to, "Last multiplier");
    sweep->add_option("--step-mult", o.step_mult, "Multiplier increment");

    auto* report = app.add_subcommand("report", "Step-by-step vs. line search summary from stored runs");
    report->add_option("files", o.inputs, "search.json files");
    report->add_option("--out", o.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_exit_json("config", e.what());
        return 2;
    }

    try {
        if (*gen) return cmd_gen(o);
        if (*clusters) return cmd_clusters(o);
        if (*solve_cmd) return cmd_solve(o);
        if (*mdp) return cmd_mdp(o);
        if (*simulate) return cmd_simulate(o);
        if (*search) return cmd_search(o);
        if (*grid) return cmd_grid(o);
        if (*sweep) return cmd_sweep(o);
        if (*report) return cmd_report(o);
    } catch (const ConfigError& e) {
        error_exit_json("config", e.what());
        return 2;
    } catch (const InfeasibleError& e) {
        error_exit_json("infeasible", e.what());
        return 3;
    } catch (const ConvergenceError& e) {
        error_exit_json("convergence", e.what());
        return 4;
    } catch (const std::exception& e) {
        error_exit_json("error", e.what());
        return 1;
    }
    return 1;
}
