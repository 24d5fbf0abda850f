#pragma once

#include <span>
#include <vector>

#include "scirp/instance.hpp"

namespace scirp {

/// Closed tour from the producer through `order` and back.
struct Route {
    std::vector<int> order;  // node indices (1-based customers)
    double length = 0.0;
};

inline constexpr std::size_t kMaxRouteSize = 12;

/// Exact shortest tour visiting every node of `subset` via a subset DP.
/// Ties resolve to the lexicographically smallest visiting order.
/// Throws std::length_error when the subset exceeds kMaxRouteSize.
Route shortest_route(const Instance& inst, std::span<const int> subset);

/// Tour length of a fixed visiting order.
double route_length(const Instance& inst, std::span<const int> order);

}  // namespace scirp
