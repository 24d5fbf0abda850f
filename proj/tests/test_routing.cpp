#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "scirp/routing.hpp"

using namespace scirp;

namespace {

Instance random_metric(std::mt19937_64& rng, std::size_t n, int max_len) {
    std::uniform_int_distribution<int> len(1, max_len);
    Instance inst;
    for (std::size_t i = 0; i < n; ++i) inst.customers.push_back({static_cast<int>(i + 1), {100, 10}, 1000, {}, {}});
    inst.distances.assign(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) inst.distances[i][j] = inst.distances[j][i] = len(rng);
    return inst;
}

// first minimum in next_permutation order is the lexicographic minimum
Route permutation_oracle(const Instance& inst, std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    Route best{{}, std::numeric_limits<double>::infinity()};
    do {
        double len = inst.distance(0, nodes.front());
        for (std::size_t k = 1; k < nodes.size(); ++k) len += inst.distance(nodes[k - 1], nodes[k]);
        len += inst.distance(nodes.back(), 0);
        if (len < best.length) best = {nodes, len};
    } while (std::next_permutation(nodes.begin(), nodes.end()));
    return best;
}

}  // namespace

TEST_CASE("subset DP equals permutation enumeration on random integer matrices") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = random_metric(rng, 10, trial % 2 ? 5 : 100);
        std::vector<int> all(10);
        for (int i = 0; i < 10; ++i) all[i] = i + 1;
        std::shuffle(all.begin(), all.end(), rng);
        const std::size_t size = 1 + trial % 8;
        std::vector<int> subset(all.begin(), all.begin() + static_cast<long>(size));
        const Route dp = shortest_route(inst, subset);
        const Route oracle = permutation_oracle(inst, subset);
        CHECK(dp.length == oracle.length);
        // small lengths make ties common; both pick the lexicographic minimum
        CHECK(dp.order == oracle.order);
    }
}

TEST_CASE("route length of fixed orders") {
    std::mt19937_64 rng(3);
    const Instance inst = random_metric(rng, 4, 50);
    const std::vector<int> order{3, 1, 4};
    CHECK(route_length(inst, order) ==
          inst.distance(0, 3) + inst.distance(3, 1) + inst.distance(1, 4) + inst.distance(4, 0));
    CHECK(route_length(inst, std::vector<int>{}) == 0.0);
    const std::vector<int> single{2};
    CHECK(shortest_route(inst, single).length == 2 * inst.distance(0, 2));
    CHECK(shortest_route(inst, std::vector<int>{}).order.empty());
}

TEST_CASE("appendix routes") {
    Instance inst;
    for (int i = 1; i <= 3; ++i) inst.customers.push_back({i, {100, 10}, 1000, {}, {}});
    inst.distances = {{0, 4, 5, 3}, {4, 0, 3, 6}, {5, 3, 0, 7}, {3, 6, 7, 0}};
    const std::vector<int> pair{2, 1};
    const Route r = shortest_route(inst, pair);
    CHECK(r.length == 12);
    CHECK(r.order == std::vector<int>{1, 2});
    const std::vector<int> all{1, 2, 3};
    CHECK(shortest_route(inst, all).length == 4 + 3 + 7 + 3);
}

TEST_CASE("oversized subsets are rejected") {
    std::mt19937_64 rng(1);
    const Instance inst = random_metric(rng, kMaxRouteSize + 1, 10);
    std::vector<int> all(kMaxRouteSize + 1);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i + 1);
    CHECK_THROWS_AS(shortest_route(inst, all), std::length_error);
}
