#include "scirp/setpart.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

namespace scirp {

namespace {

using Mask = std::uint64_t;

constexpr std::size_t kMaxCustomers = 64;
constexpr std::size_t kMaxCoverDp = 16;  // 3^n subset pairs
constexpr int kMaxPatternPeriods = 12;        // per-customer tables over period sets
constexpr std::size_t kIncumbentNodes = 200000;

Mask customer_mask(const Cluster& c) {
    Mask m = 0;
    for (int node : c.customers) m |= Mask{1} << (node - 1);
    return m;
}

double deviation_sum(const std::vector<double>& profile) {
    double avg = 0.0;
    for (double v : profile) avg += v;
    avg /= static_cast<double>(profile.size());
    double dev = 0.0;
    for (double v : profile) dev += std::abs(avg - v);
    return dev;
}

double penalty_of(const std::vector<double>& delta, const std::vector<double>& lambda, int T, const PenaltyParams& p) {
    double value = 0.0;
    if (p.eta1 != 0.0) value += p.eta1 / T * deviation_sum(delta);
    if (p.eta2 != 0.0) value += p.eta2 / T * deviation_sum(lambda);
    return value;
}

void check_coverage(const Instance& inst, const ClusterPool& pool) {
    const std::size_t n = inst.num_customers();
    if (n > kMaxCustomers) throw std::invalid_argument("set partitioning supports at most 64 customers");
    Mask covered = 0;
    for (const auto& c : pool) covered |= customer_mask(c);
    for (std::size_t i = 0; i < n; ++i)
        if (!(covered & (Mask{1} << i)))
            throw InfeasibleError("customer " + std::to_string(inst.customers[i].id) + " is not covered by any cluster");
}

}  // namespace

Selection make_selection(const ClusterPool& pool, std::vector<std::size_t> ids, int T, const PenaltyParams& p) {
    std::sort(ids.begin(), ids.end());
    Selection sel;
    sel.cluster_ids = std::move(ids);
    sel.delta_profile.assign(T, 0.0);
    sel.lambda_profile.assign(T, 0.0);
    for (std::size_t r : sel.cluster_ids) {
        const auto& c = pool.at(r);
        sel.tactical_cost += c.cost();
        for (int t = 0; t < T; ++t) {
            sel.delta_profile[t] += c.delta[t];
            sel.lambda_profile[t] += c.lambda[t];
        }
    }
    sel.penalty_value = penalty_of(sel.delta_profile, sel.lambda_profile, T, p);
    return sel;
}

double objective(const ClusterPool& pool, const Selection& sel, int T, const PenaltyParams& p) {
    return make_selection(pool, sel.cluster_ids, T, p).objective();
}

bool is_partition(const ClusterPool& pool, const std::vector<std::size_t>& ids, std::size_t n_customers) {
    Mask seen = 0;
    for (std::size_t r : ids) {
        const Mask m = customer_mask(pool.at(r));
        if (seen & m) return false;
        seen |= m;
    }
    const Mask all = n_customers == 64 ? ~Mask{0} : (Mask{1} << n_customers) - 1;
    return seen == all;
}

namespace {

class BranchAndBound {
public:
    BranchAndBound(const Instance& inst, const ClusterPool& pool, const PenaltyParams& p)
        : pool_(pool), p_(p), T_(inst.T), n_(inst.num_customers()) {
        masks_.reserve(pool.size());
        by_first_.resize(n_);
        split_.assign(n_, std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < pool.size(); ++r) {
            const auto& c = pool[r];
            masks_.push_back(customer_mask(c));
            by_first_[c.customers.front() - 1].push_back(r);
            const double share = c.cost() / double(c.customers.size());
            for (int node : c.customers) split_[node - 1] = std::min(split_[node - 1], share);
            for (double d : c.delta) delta_nonneg_ = delta_nonneg_ && d >= 0.0;
        }
        // cycle totals do not depend on the selection
        for (const auto& cust : inst.customers) {
            avg_delta_ += cust.demand.mean;
            avg_lambda_ += cust.demand.variance();
        }
        all_ = n_ == 64 ? ~Mask{0} : (Mask{1} << n_) - 1;
        if (n_ <= kMaxCoverDp) build_cover_table();
        penalized_ = p_.eta1 != 0.0 || p_.eta2 != 0.0;
        if (penalized_) prepare_penalized(inst);
    }

    Selection run() {
        delta_.assign(T_, 0.0);
        lambda_.assign(T_, 0.0);
        double remaining = 0.0;
        for (double s : split_) remaining += s;
        greedy_incumbent();
        if (!cover_.empty()) {
            partition_incumbent(cheapest_partition([](const Cluster&) { return true; }));
            if (penalized_) {
                const std::uint32_t every_day = (std::uint32_t{1} << T_) - 1;
                partition_incumbent(
                    cheapest_partition([&](const Cluster& c) { return c.schedule.mask == every_day; }));
            }
        }
        dfs(0, 0.0, remaining);
        if (best_ids_.empty() && n_ > 0) throw InfeasibleError("no partition of the customers exists in the pool");
        return make_selection(pool_, best_ids_, T_, p_);
    }

private:
    double tol(double v) const { return 1e-9 * std::max(1.0, std::abs(v)); }

    void prepare_penalized(const Instance& inst) {
        // heavy customers shape the profiles most; fixing them first leaves
        // light customers that cannot even out what is left
        containing_.resize(n_);
        for (std::size_t r = 0; r < pool_.size(); ++r)
            for (int node : pool_[r].customers) containing_[node - 1].push_back(r);
        for (auto& list : containing_)
            std::stable_sort(list.begin(), list.end(),
                             [&](auto a, auto b) { return pool_[a].cost() < pool_[b].cost(); });
        for (std::size_t i = 0; i < n_; ++i) branch_order_.push_back(i);
        std::stable_sort(branch_order_.begin(), branch_order_.end(), [&](auto a, auto b) {
            return inst.customers[a].demand.mean > inst.customers[b].demand.mean;
        });

        // each customer's own order profile per schedule it appears with
        options_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            std::vector<std::uint32_t> seen;
            for (std::size_t r : containing_[i]) {
                const Schedule& s = pool_[r].schedule;
                if (std::find(seen.begin(), seen.end(), s.mask) != seen.end()) continue;
                seen.push_back(s.mask);
                Profile pr{std::vector<double>(T_, 0.0), std::vector<double>(T_, 0.0)};
                for (std::size_t d = 0; d < s.deliveries(); ++d) {
                    const Gaussian q =
                        order_distribution(inst.customers[i].demand, s.next_gap[d], s.prev_gap[d], inst.alpha);
                    pr.delta[s.periods[d]] = q.mean;
                    pr.lambda[s.periods[d]] = q.variance();
                }
                options_[i].push_back(std::move(pr));
            }
        }
        if (T_ <= kMaxPatternPeriods) {
            const std::size_t patterns = std::size_t{1} << T_;
            for (int which = 0; which < 2; ++which) {
                auto& table = best_option_[which];
                table.assign(n_, std::vector<std::uint32_t>(patterns, 0));
                for (std::size_t i = 0; i < n_; ++i) {
                    std::vector<double> low(patterns, std::numeric_limits<double>::infinity());
                    for (std::uint32_t k = 0; k < options_[i].size(); ++k) {
                        const auto& v = which == 0 ? options_[i][k].delta : options_[i][k].lambda;
                        std::vector<double> sums(patterns, 0.0);
                        for (std::size_t w = 1; w < patterns; ++w) {
                            const int t = std::countr_zero(w);
                            sums[w] = sums[w & (w - 1)] + v[t];
                        }
                        for (std::size_t w = 0; w < patterns; ++w)
                            if (sums[w] < low[w]) {
                                low[w] = sums[w];
                                table[i][w] = k;
                            }
                    }
                }
            }
        }
    }

    struct Profile {
        std::vector<double> delta, lambda;
    };

    std::uint32_t cheapest_option(std::size_t i, std::uint32_t w, bool use_delta) const {
        if (!best_option_[use_delta ? 0 : 1].empty()) return best_option_[use_delta ? 0 : 1][i][w];
        std::uint32_t pick = 0;
        double low = std::numeric_limits<double>::infinity();
        for (std::uint32_t k = 0; k < options_[i].size(); ++k) {
            const auto& v = use_delta ? options_[i][k].delta : options_[i][k].lambda;
            double s = 0.0;
            for (int t = 0; t < T_; ++t)
                if (w >> t & 1u) s += v[t];
            if (s < low) {
                low = s;
                pick = k;
            }
        }
        return pick;
    }

    // The final profile y sums to T times the cycle average whatever the
    // selection, so sum|y - avg| = 2 sum (y - avg)+ >= 2 sum_{t in W} (y - avg)
    // for any period set W. Each open customer adds its own schedule's
    // profile, so the right side separates: every open customer takes its
    // lightest schedule on W. A few rounds refine W from the minimizer.
    double excess_bound(const std::vector<double>& cur, double avg, Mask open, bool use_delta) const {
        double best = 0.0;
        std::uint32_t w = 0;
        for (int t = 0; t < T_; ++t)
            if (cur[t] > avg) w |= 1u << t;
        double y[32];
        for (int round = 0; round < 4; ++round) {
            double g = 0.0;
            for (int t = 0; t < T_; ++t) {
                y[t] = cur[t] - avg;
                if (w >> t & 1u) g += y[t];
            }
            for (Mask m = open; m; m &= m - 1) {
                const auto i = static_cast<std::size_t>(std::countr_zero(m));
                const auto& opt = options_[i][cheapest_option(i, w, use_delta)];
                const auto& v = use_delta ? opt.delta : opt.lambda;
                for (int t = 0; t < T_; ++t) {
                    y[t] += v[t];
                    if (w >> t & 1u) g += v[t];
                }
            }
            best = std::max(best, g);
            std::uint32_t next = 0;
            for (int t = 0; t < T_; ++t)
                if (y[t] > 0.0) next |= 1u << t;
            if (next == w) break;
            w = next;
        }
        return best;
    }

    double penalty_bound(Mask covered) const {
        const Mask open = all_ & ~covered;
        double bound = 0.0;
        if (p_.eta1 != 0.0) bound += p_.eta1 / T_ * 2.0 * excess_bound(delta_, avg_delta_, open, true);
        if (p_.eta2 != 0.0) bound += p_.eta2 / T_ * 2.0 * excess_bound(lambda_, avg_lambda_, open, false);
        return bound * (1.0 - 1e-9);
    }

    // cover_[m]: cheapest exact cover of customer set m by pool clusters
    void build_cover_table() {
        const std::size_t size = std::size_t{1} << n_;
        std::vector<double> cheapest(size, std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < pool_.size(); ++r) cheapest[masks_[r]] = std::min(cheapest[masks_[r]], pool_[r].cost());
        cover_ = cover_table(cheapest).first;
    }

    // Exact-cover DP over customer subsets; also returns the block chosen
    // for each subset.
    std::pair<std::vector<double>, std::vector<Mask>> cover_table(const std::vector<double>& cheapest) const {
        const std::size_t size = cheapest.size();
        std::vector<double> cover(size, std::numeric_limits<double>::infinity());
        std::vector<Mask> arg(size, 0);
        cover[0] = 0.0;
        for (Mask m = 1; m < size; ++m) {
            const Mask low = m & (~m + 1);
            for (Mask sub = m; sub; sub = (sub - 1) & m) {
                if (!(sub & low) || cheapest[sub] == std::numeric_limits<double>::infinity()) continue;
                const double v = cheapest[sub] + cover[m ^ sub];
                if (v < cover[m]) {
                    cover[m] = v;
                    arg[m] = sub;
                }
            }
        }
        return {std::move(cover), std::move(arg)};
    }

    double remaining_bound(Mask covered, double split_rest) const {
        if (cover_.empty()) return std::max(0.0, split_rest);
        return cover_[all_ & ~covered] * (1.0 - 1e-12);
    }

    template <class Allowed>
    std::vector<Mask> cheapest_partition(Allowed allowed) const {
        const std::size_t size = std::size_t{1} << n_;
        std::vector<double> cheapest(size, std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < pool_.size(); ++r)
            if (allowed(pool_[r])) cheapest[masks_[r]] = std::min(cheapest[masks_[r]], pool_[r].cost());
        const auto [cover, arg] = cover_table(cheapest);
        std::vector<Mask> blocks;
        if (cover[all_] == std::numeric_limits<double>::infinity()) return blocks;
        for (Mask m = all_; m; m ^= arg[m]) blocks.push_back(arg[m]);
        return blocks;
    }

    void offer(const std::vector<std::size_t>& ids) {
        best_ = std::min(best_, make_selection(pool_, ids, T_, p_).objective());
    }

    void greedy_incumbent() {
        Mask covered = 0;
        std::vector<std::size_t> ids;
        while (covered != all_) {
            const auto first = static_cast<std::size_t>(std::countr_one(covered));
            std::size_t pick = pool_.size();
            for (std::size_t r : by_first_[first])
                if (!(masks_[r] & covered) && (pick == pool_.size() || pool_[r].cost() < pool_[pick].cost())) pick = r;
            if (pick == pool_.size()) return;
            ids.push_back(pick);
            covered |= masks_[pick];
        }
        offer(ids);
    }

    // Best schedules for a fixed partition, by a node-capped search.
    void partition_incumbent(const std::vector<Mask>& blocks) {
        if (blocks.empty()) return;
        std::vector<std::vector<std::size_t>> options;
        std::vector<double> cheapest;
        for (Mask b : blocks) {
            std::vector<std::size_t> same;
            for (std::size_t r : by_first_[std::countr_zero(b)])
                if (masks_[r] == b) same.push_back(r);
            std::stable_sort(same.begin(), same.end(), [&](auto a, auto c) { return pool_[a].cost() < pool_[c].cost(); });
            cheapest.push_back(pool_[same.front()].cost());
            options.push_back(std::move(same));
        }
        std::vector<std::size_t> ids;
        for (const auto& o : options) ids.push_back(o.front());
        offer(ids);
        if (!penalized_) return;

        std::vector<double> rest(blocks.size() + 1, 0.0);
        std::vector<Mask> open(blocks.size() + 1, 0);
        for (std::size_t k = blocks.size(); k-- > 0;) {
            rest[k] = rest[k + 1] + cheapest[k];
            open[k] = open[k + 1] | blocks[k];
        }
        std::size_t budget = kIncumbentNodes;
        auto search = [&](auto&& self, std::size_t k, double cost) -> void {
            if (budget == 0) return;
            --budget;
            if (k == blocks.size()) {
                offer(ids);
                return;
            }
            for (std::size_t r : options[k]) {
                const auto& c = pool_[r];
                if (cost + c.cost() + rest[k + 1] > best_) break;
                for (int t = 0; t < T_; ++t) {
                    delta_[t] += c.delta[t];
                    lambda_[t] += c.lambda[t];
                }
                ids[k] = r;
                if (cost + c.cost() + rest[k + 1] + penalty_bound(all_ & ~open[k + 1]) <= best_)
                    self(self, k + 1, cost + c.cost());
                for (int t = 0; t < T_; ++t) {
                    delta_[t] -= c.delta[t];
                    lambda_[t] -= c.lambda[t];
                }
            }
        };
        search(search, 0, 0.0);
    }

    // Smallest mask among the cyclic rotations of `mask`.
    bool is_min_rotation(std::uint32_t mask) const {
        const std::uint32_t full = (std::uint32_t{1} << T_) - 1;
        std::uint32_t r = mask;
        for (int k = 1; k < T_; ++k) {
            r = ((r >> 1) | ((r & 1u) << (T_ - 1))) & full;
            if (r < mask) return false;
        }
        return true;
    }

    void accept(double value) {
        if (!penalized_) {
            // leaves arrive in lexicographic order
            if (found_ ? value < best_ - tol(best_) : value <= best_ + tol(best_)) {
                best_ = value;
                best_ids_ = chosen_;
                found_ = true;
            }
            return;
        }
        auto ids = chosen_;
        std::sort(ids.begin(), ids.end());
        const bool better = value < best_ - tol(best_);
        const bool tie = value <= best_ + tol(best_);
        if (better || (tie && (!found_ || ids < best_ids_))) {
            best_ = std::min(best_, value);
            best_ids_ = std::move(ids);
            found_ = true;
        }
    }

    bool pruned(double bound) const {
        // with penalties ties are settled at the leaves, so only strictly
        // worse subtrees are cut
        if (penalized_) return bound > best_ + tol(best_);
        return found_ ? bound >= best_ - tol(best_) : bound > best_ + tol(best_);
    }

    void dfs(Mask covered, double cost, double remaining) {
        if (covered == all_) {
            accept(cost + penalty_of(delta_, lambda_, T_, p_));
            return;
        }
        std::size_t branch = 0;
        if (penalized_) {
            while (covered >> branch_order_[branch] & 1) ++branch;
            branch = branch_order_[branch];
        } else {
            branch = static_cast<std::size_t>(std::countr_one(covered));
        }
        const auto& children = penalized_ ? containing_[branch] : by_first_[branch];
        for (std::size_t r : children) {
            if (masks_[r] & covered) continue;
            const auto& c = pool_[r];
            // all costs are invariant under a common cyclic shift of every
            // schedule; the lexicographically first optimum has the cluster
            // of the first customer at its smallest rotation
            if ((masks_[r] & 1) && !is_min_rotation(c.schedule.mask)) continue;
            double rest = remaining;
            for (int node : c.customers) rest -= split_[node - 1];
            const double new_cost = cost + c.cost();
            const double bound = new_cost + remaining_bound(covered | masks_[r], rest);
            if (pruned(bound)) continue;
            for (int t = 0; t < T_; ++t) {
                delta_[t] += c.delta[t];
                lambda_[t] += c.lambda[t];
            }
            if (!penalized_ || !pruned(bound + penalty_bound(covered | masks_[r]))) {
                chosen_.push_back(r);
                dfs(covered | masks_[r], new_cost, rest);
                chosen_.pop_back();
            }
            for (int t = 0; t < T_; ++t) {
                delta_[t] -= c.delta[t];
                lambda_[t] -= c.lambda[t];
            }
        }
    }

    const ClusterPool& pool_;
    PenaltyParams p_;
    int T_;
    std::size_t n_;
    Mask all_ = 0;
    std::vector<Mask> masks_;
    std::vector<std::vector<std::size_t>> by_first_;
    std::vector<double> split_;
    std::vector<double> cover_;
    bool delta_nonneg_ = true;
    double avg_delta_ = 0.0, avg_lambda_ = 0.0;

    bool penalized_ = false;
    std::vector<std::vector<std::size_t>> containing_;
    std::vector<std::size_t> branch_order_;
    std::vector<std::vector<Profile>> options_;
    std::vector<std::vector<std::uint32_t>> best_option_[2];  // [delta|lambda][customer][period set]

    std::vector<double> delta_, lambda_;
    std::vector<std::size_t> chosen_;
    double best_ = std::numeric_limits<double>::infinity();
    bool found_ = false;
    std::vector<std::size_t> best_ids_;
};

}  // namespace

Selection solve(const Instance& inst, const ClusterPool& pool, const PenaltyParams& p) {
    if (p.eta1 < 0 || p.eta2 < 0) throw std::invalid_argument("solve: penalty weights must be >= 0");
    if (inst.num_customers() == 0) return make_selection(pool, {}, inst.T, p);
    check_coverage(inst, pool);
    return BranchAndBound(inst, pool, p).run();
}

Selection brute_force(const Instance& inst, const ClusterPool& pool, const PenaltyParams& p) {
    const std::size_t n = inst.num_customers();
    const int T = inst.T;
    if (n == 0) return make_selection(pool, {}, T, p);
    check_coverage(inst, pool);

    // clusters grouped by exact customer set, cheapest first
    std::map<Mask, std::vector<std::size_t>> by_set;
    for (std::size_t r = 0; r < pool.size(); ++r) by_set[customer_mask(pool[r])].push_back(r);
    for (auto& [set, ids] : by_set)
        std::stable_sort(ids.begin(), ids.end(), [&](auto a, auto b) { return pool[a].cost() < pool[b].cost(); });

    bool monotone = true;
    for (const auto& c : pool)
        for (double d : c.delta) monotone = monotone && d >= 0.0;
    double avg_delta = 0.0, avg_lambda = 0.0;
    for (const auto& c : inst.customers) {
        avg_delta += c.demand.mean;
        avg_lambda += c.demand.variance();
    }

    const Mask all = (Mask{1} << n) - 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_ids;
    std::vector<Mask> blocks;
    std::vector<std::size_t> chosen;
    std::vector<double> delta(T, 0.0), lambda(T, 0.0);

    // profiles only grow, so their excess over the cycle average is a
    // lower bound on half the final absolute deviation
    auto excess = [&] {
        double e = 0.0;
        if (monotone && p.eta1 != 0.0)
            for (double v : delta) e += 2.0 * p.eta1 / T * std::max(0.0, v - avg_delta);
        if (p.eta2 != 0.0)
            for (double v : lambda) e += 2.0 * p.eta2 / T * std::max(0.0, v - avg_lambda);
        return e * (1.0 - 1e-9);
    };

    // schedule choice for a fixed partition
    auto pick = [&](auto&& self, std::size_t b, double cost) -> void {
        if (b == blocks.size()) {
            const double value = cost + penalty_of(delta, lambda, T, p);
            if (value < best) {
                best = value;
                best_ids = chosen;
            }
            return;
        }
        double floor_rest = 0.0;
        for (std::size_t k = b + 1; k < blocks.size(); ++k) floor_rest += pool[by_set[blocks[k]].front()].cost();
        for (std::size_t r : by_set[blocks[b]]) {
            const auto& c = pool[r];
            if (cost + c.cost() + floor_rest >= best) break;
            for (int t = 0; t < T; ++t) {
                delta[t] += c.delta[t];
                lambda[t] += c.lambda[t];
            }
            if (cost + c.cost() + floor_rest + excess() < best) {
                chosen.push_back(r);
                self(self, b + 1, cost + c.cost());
                chosen.pop_back();
            }
            for (int t = 0; t < T; ++t) {
                delta[t] -= c.delta[t];
                lambda[t] -= c.lambda[t];
            }
        }
    };

    auto partition = [&](auto&& self, Mask covered) -> void {
        if (covered == all) {
            pick(pick, 0, 0.0);
            return;
        }
        const Mask low = Mask{1} << std::countr_one(covered);
        for (const auto& [set, ids] : by_set) {
            if (!(set & low) || (set & covered)) continue;
            blocks.push_back(set);
            self(self, covered | set);
            blocks.pop_back();
        }
    };
    partition(partition, 0);

    if (best_ids.empty()) throw InfeasibleError("no partition of the customers exists in the pool");
    return make_selection(pool, best_ids, T, p);
}

nlohmann::json selection_to_json(const Instance& inst, const ClusterPool& pool, const Selection& sel) {
    nlohmann::json j;
    j["clusters"] = nlohmann::json::array();
    for (std::size_t r : sel.cluster_ids) {
        auto jc = cluster_to_json(inst, pool[r]);
        jc["pool_index"] = r;
        j["clusters"].push_back(std::move(jc));
    }
    j["tactical_cost"] = sel.tactical_cost;
    j["penalty_value"] = sel.penalty_value;
    j["delta_profile"] = sel.delta_profile;
    j["lambda_profile"] = sel.lambda_profile;
    return j;
}

}  // namespace scirp
