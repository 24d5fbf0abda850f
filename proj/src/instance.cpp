#include "scirp/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace scirp {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

bool in_open_unit(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

std::vector<std::string> validate(const Instance& inst) {
    std::vector<std::string> out;
    auto bad = [&](std::string msg) { out.push_back(std::move(msg)); };

    if (inst.T < 1) bad("T must be >= 1");
    if (!in_open_unit(inst.alpha)) bad("alpha must lie in (0, 1)");
    if (!in_open_unit(inst.gamma)) bad("gamma must lie in (0, 1)");
    if (inst.W < 0) bad("W must be >= 0");
    if (inst.w < 0) bad("w must be >= 0");
    if (inst.h < 0) bad("h must be >= 0");
    if (inst.e < 0) bad("e must be >= 0");
    if (!(inst.Q > 0)) bad("Q must be > 0");

    const auto& p = inst.producer;
    if (!p.supply.valid()) bad("producer supply must have finite mean and std >= 0");
    if (p.capacity <= 0) bad("producer capacity must be > 0");
    if (p.K1 < 0 || p.K2 < 0 || p.b1 < 0 || p.b2 < 0) bad("producer costs must be >= 0");
    if (p.b2 > p.b1) bad("sell price b2 exceeds buy price b1");

    if (inst.customers.empty()) bad("instance has no customers");
    std::set<int> ids;
    for (const auto& c : inst.customers) {
        const std::string who = "customer " + std::to_string(c.id);
        if (c.id < 1) bad(who + ": id must be >= 1");
        if (!ids.insert(c.id).second) bad(who + ": duplicate id");
        if (!c.demand.valid()) bad(who + ": demand must have finite mean and std >= 0");
        if (!(c.demand.mean > 0)) bad(who + ": mean demand must be > 0");
        if (!(c.capacity > 0)) bad(who + ": capacity U must be > 0");
        if (!c.demand.valid() || !in_open_unit(inst.alpha) || !in_open_unit(inst.gamma)) continue;

        const double load = c.demand.mean + normal_quantile(inst.gamma) * c.demand.std;
        if (load > inst.Q)
            bad(who + ": singleton cc2 infeasible (mu + z_gamma*sigma = " + fmt_num(load) +
                " > Q = " + fmt_num(inst.Q) + ")");
        const double s1 = std::floor(c.demand.mean + normal_quantile(inst.alpha) * c.demand.std + 0.5);
        if (s1 > c.capacity)
            bad(who + ": one-period base stock " + fmt_num(s1) + " exceeds capacity U = " +
                fmt_num(c.capacity));
    }

    if (!inst.has_distances()) {
        bad("distances missing: supply a matrix or coordinates for every node");
    } else {
        const std::size_t n = inst.customers.size() + 1;
        if (inst.distances.size() != n) {
            bad("distance matrix must be (N+1)x(N+1)");
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (inst.distances[i].size() != n) {
                    bad("distance matrix row " + std::to_string(i) + " has wrong length");
                    continue;
                }
                if (inst.distances[i][i] != 0.0) bad("distance matrix diagonal must be zero");
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = inst.distances[i][j];
                    if (!std::isfinite(d) || d < 0) bad("distance matrix entries must be finite and >= 0");
                    if (j < inst.distances.size() && inst.distances[j].size() == n && d != inst.distances[j][i])
                        bad("distance matrix must be symmetric (" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
                }
            }
        }
    }
    return out;
}

namespace {

void fill_euclidean(Instance& inst) {
    const std::size_t n = inst.customers.size() + 1;
    std::vector<std::pair<double, double>> xy(n);
    xy[0] = {inst.producer.x.value_or(5.0), inst.producer.y.value_or(5.0)};
    for (std::size_t k = 1; k < n; ++k) xy[k] = {*inst.customers[k - 1].x, *inst.customers[k - 1].y};
    inst.distances.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::hypot(xy[i].first - xy[j].first, xy[i].second - xy[j].second);
            inst.distances[i][j] = inst.distances[j][i] = d;
        }
}

}  // namespace

Instance generate(std::uint64_t seed, int n_customers, int T, const GenerateParams& params) {
    if (n_customers < 1) throw std::invalid_argument("generate: need at least one customer");
    if (T < 1) throw std::invalid_argument("generate: T must be >= 1");

    Instance inst;
    inst.T = T;
    inst.W = params.W.value_or(100.0);
    inst.w = params.w.value_or(20.0);
    inst.e = params.e.value_or(10.0);
    inst.Q = params.Q.value_or(1000.0);
    inst.h = params.h.value_or(0.05);
    inst.alpha = params.alpha.value_or(0.95);
    inst.gamma = params.gamma.value_or(0.9);
    const double U = params.U.value_or(1000.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, 10.0);
    std::uniform_real_distribution<double> mean_dist(100.0, 400.0);
    const bool high = params.uncertainty == GenerateParams::Uncertainty::High;
    std::uniform_real_distribution<double> cv_dist(high ? 0.02 : 0.025, high ? 0.1 : 0.05);

    double total_mean = 0.0;
    for (int i = 0; i < n_customers; ++i) {
        Customer c;
        c.id = i + 1;
        c.x = coord(rng);
        c.y = coord(rng);
        c.demand.mean = mean_dist(rng);
        c.demand.std = cv_dist(rng) * c.demand.mean;
        c.capacity = U;
        total_mean += c.demand.mean;
        inst.customers.push_back(c);
    }

    auto& p = inst.producer;
    p.x = 5.0;
    p.y = 5.0;
    p.supply = {total_mean, 0.15 * total_mean};
    p.capacity = params.producer_capacity.value_or(4500);
    p.K1 = params.K1.value_or(3000.0);
    p.K2 = params.K2.value_or(15000.0);
    p.b1 = params.b1.value_or(25.0);
    p.b2 = params.b2.value_or(2.0);

    fill_euclidean(inst);
    return inst;
}

Instance scale(const Instance& inst, double m_s, double m_p, double m_d) {
    if (m_s < 0 || m_p < 0 || m_d < 0) throw std::invalid_argument("scale: multipliers must be >= 0");
    Instance out = inst;
    out.producer.supply.mean *= m_s;
    out.producer.supply.std *= m_s;
    out.producer.supply.std *= m_p;
    for (auto& c : out.customers) c.demand.std *= m_d;
    return out;
}

Instance instance_from_json(const nlohmann::json& j) {
    Instance inst;
    inst.T = j.at("T").get<int>();
    inst.alpha = j.at("alpha").get<double>();
    inst.gamma = j.at("gamma").get<double>();
    inst.W = j.at("W").get<double>();
    inst.w = j.at("w").get<double>();
    inst.h = j.at("h").get<double>();
    inst.e = j.at("e").get<double>();
    inst.Q = j.at("Q").get<double>();

    const auto& jp = j.at("producer");
    auto& p = inst.producer;
    p.supply = {jp.at("mu").get<double>(), jp.at("sigma").get<double>()};
    p.capacity = jp.at("capacity").get<std::int64_t>();
    p.K1 = jp.at("K1").get<double>();
    p.K2 = jp.at("K2").get<double>();
    p.b1 = jp.at("b1").get<double>();
    p.b2 = jp.at("b2").get<double>();
    if (jp.contains("x") && !jp["x"].is_null()) p.x = jp["x"].get<double>();
    if (jp.contains("y") && !jp["y"].is_null()) p.y = jp["y"].get<double>();

    bool all_coords = true;
    for (const auto& jc : j.at("customers")) {
        Customer c;
        c.id = jc.at("id").get<int>();
        c.demand = {jc.at("mu").get<double>(), jc.at("sigma").get<double>()};
        c.capacity = jc.at("U").get<double>();
        if (jc.contains("x") && !jc["x"].is_null()) c.x = jc["x"].get<double>();
        if (jc.contains("y") && !jc["y"].is_null()) c.y = jc["y"].get<double>();
        all_coords = all_coords && c.x && c.y;
        inst.customers.push_back(c);
    }

    // an explicit matrix wins over coordinates
    if (j.contains("distances") && !j["distances"].is_null()) {
        inst.distances = j["distances"].get<std::vector<std::vector<double>>>();
    } else if (all_coords && !inst.customers.empty()) {
        fill_euclidean(inst);
    }
    return inst;
}

nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["T"] = inst.T;
    j["alpha"] = inst.alpha;
    j["gamma"] = inst.gamma;
    j["W"] = inst.W;
    j["w"] = inst.w;
    j["h"] = inst.h;
    j["e"] = inst.e;
    j["Q"] = inst.Q;
    const auto& p = inst.producer;
    j["producer"] = {{"mu", p.supply.mean}, {"sigma", p.supply.std}, {"capacity", p.capacity},
                     {"K1", p.K1},          {"K2", p.K2},            {"b1", p.b1},
                     {"b2", p.b2}};
    if (p.x) j["producer"]["x"] = *p.x;
    if (p.y) j["producer"]["y"] = *p.y;
    bool all_coords = true;
    j["customers"] = nlohmann::json::array();
    for (const auto& c : inst.customers) {
        nlohmann::json jc = {{"id", c.id}, {"mu", c.demand.mean}, {"sigma", c.demand.std}, {"U", c.capacity}};
        if (c.x) jc["x"] = *c.x;
        if (c.y) jc["y"] = *c.y;
        all_coords = all_coords && c.x && c.y;
        j["customers"].push_back(jc);
    }
    // coordinates regenerate the matrix on load
    if (inst.has_distances() && !all_coords) j["distances"] = inst.distances;
    else j["distances"] = nullptr;
    return j;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    return instance_from_json(nlohmann::json::parse(in));
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace scirp
