#include "tieq/grid.hpp"

#include <cmath>
#include <string>

#include "tieq/errors.hpp"

namespace tieq {

ActionGrid build_action_grid(const std::vector<std::pair<double, double>>& bounds,
                             int per_dim_count, bool include_vertices,
                             std::size_t node_cap) {
    if (bounds.empty()) throw DegenerateBox("action box has no dimensions");
    if (per_dim_count < 2) throw Precondition("per-dimension node count must be >= 2");
    const int dims = static_cast<int>(bounds.size());

    double volume = 1.0;
    for (int m = 0; m < dims; ++m) {
        if (!(bounds[m].first < bounds[m].second))
            throw DegenerateBox("bound " + std::to_string(m) + " is empty or reversed");
        volume *= bounds[m].second - bounds[m].first;
    }

    std::size_t count = 1;
    for (int m = 0; m < dims; ++m) {
        count *= static_cast<std::size_t>(per_dim_count);
        if (count > node_cap)
            throw GridTooLarge("grid would exceed the node cap of " + std::to_string(node_cap));
    }

    // Per-dimension nodes and weights.
    std::vector<std::vector<double>> axis_nodes(dims), axis_weights(dims);
    for (int m = 0; m < dims; ++m) {
        const double a = bounds[m].first, b = bounds[m].second;
        const int n = per_dim_count;
        axis_nodes[m].resize(n);
        axis_weights[m].resize(n);
        if (include_vertices) {
            const double h = (b - a) / (n - 1);
            for (int j = 0; j < n; ++j) {
                axis_nodes[m][j] = (j == n - 1) ? b : a + j * h;
                axis_weights[m][j] = (j == 0 || j == n - 1) ? h / 2.0 : h;
            }
        } else {
            const double h = (b - a) / n;
            for (int j = 0; j < n; ++j) {
                axis_nodes[m][j] = a + (j + 0.5) * h;
                axis_weights[m][j] = h;
            }
        }
    }

    ActionGrid grid;
    grid.dims = dims;
    grid.per_dim = per_dim_count;
    grid.bounds = bounds;
    grid.includes_vertices = include_vertices;
    grid.volume = volume;
    grid.nodes.reserve(count);
    grid.weights.reserve(count);

    std::vector<int> idx(dims, 0);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> node(dims);
        double w = 1.0;
        for (int m = 0; m < dims; ++m) {
            node[m] = axis_nodes[m][idx[m]];
            w *= axis_weights[m][idx[m]];
        }
        grid.nodes.push_back(std::move(node));
        grid.weights.push_back(w);
        for (int m = dims - 1; m >= 0; --m) {
            if (++idx[m] < per_dim_count) break;
            idx[m] = 0;
        }
    }
    return grid;
}

double grid_mesh_width(const ActionGrid& grid) {
    double h = 0.0;
    for (int m = 0; m < grid.dims; ++m) {
        // Spacing is uniform per axis; recover it from the first node whose
        // m-th coordinate differs from node 0's.
        double step = grid.bounds[m].second - grid.bounds[m].first;
        const double first = grid.nodes[0][m];
        for (std::size_t k = 1; k < grid.size(); ++k) {
            if (grid.nodes[k][m] != first) {
                step = std::abs(grid.nodes[k][m] - first);
                break;
            }
        }
        h = std::max(h, step);
    }
    return h;
}

double grid_diameter(const ActionGrid& grid) {
    double s = 0.0;
    for (const auto& [a, b] : grid.bounds) s += (b - a) * (b - a);
    return std::sqrt(s);
}

std::size_t nearest_node(const ActionGrid& grid, const std::vector<double>& point) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double d = 0.0;
        for (int m = 0; m < grid.dims; ++m) {
            const double dx = grid.nodes[k][m] - point[m];
            d += dx * dx;
        }
        if (best_d < 0.0 || d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

} // namespace tieq
