#include "scirp/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scirp {

double route_length(const Instance& inst, std::span<const int> order) {
    if (order.empty()) return 0.0;
    double len = inst.distance(0, order.front());
    for (std::size_t k = 1; k < order.size(); ++k) len += inst.distance(order[k - 1], order[k]);
    return len + inst.distance(order.back(), 0);
}

Route shortest_route(const Instance& inst, std::span<const int> subset) {
    if (subset.empty()) return {};
    if (subset.size() > kMaxRouteSize)
        throw std::length_error("shortest_route: cluster of " + std::to_string(subset.size()) +
                                " customers exceeds the limit of " + std::to_string(kMaxRouteSize));

    std::vector<int> nodes(subset.begin(), subset.end());
    std::sort(nodes.begin(), nodes.end());
    const std::size_t n = nodes.size();
    const std::size_t full = (std::size_t{1} << n) - 1;
    constexpr double inf = std::numeric_limits<double>::infinity();

    // tail[mask][j]: shortest path from node j through every node in mask, then home
    std::vector<double> tail((full + 1) * n, inf);
    auto at = [&](std::size_t mask, std::size_t j) -> double& { return tail[mask * n + j]; };
    for (std::size_t j = 0; j < n; ++j) at(0, j) = inst.distance(nodes[j], 0);
    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (std::size_t j = 0; j < n; ++j) {
            if (mask & (std::size_t{1} << j)) continue;
            double best = inf;
            for (std::size_t k = 0; k < n; ++k) {
                if (!(mask & (std::size_t{1} << k))) continue;
                best = std::min(best, inst.distance(nodes[j], nodes[k]) + at(mask & ~(std::size_t{1} << k), k));
            }
            at(mask, j) = best;
        }
    }

    auto close = [](double a, double b) { return a <= b + 1e-9 * std::max(1.0, std::abs(b)); };

    double opt = inf;
    for (std::size_t j = 0; j < n; ++j)
        opt = std::min(opt, inst.distance(0, nodes[j]) + at(full & ~(std::size_t{1} << j), j));

    // greedy reconstruction in ascending node order yields the lexicographic minimum
    Route route;
    std::size_t remaining = full;
    std::size_t current = n;  // n stands for the producer
    double to_go = opt;
    while (remaining) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!(remaining & (std::size_t{1} << k))) continue;
            const double leg = current == n ? inst.distance(0, nodes[k]) : inst.distance(nodes[current], nodes[k]);
            const std::size_t rest = remaining & ~(std::size_t{1} << k);
            if (close(leg + at(rest, k), to_go)) {
                route.order.push_back(nodes[k]);
                to_go = at(rest, k);
                remaining = rest;
                current = k;
                break;
            }
        }
    }
    route.length = route_length(inst, route.order);
    return route;
}

}  // namespace scirp
