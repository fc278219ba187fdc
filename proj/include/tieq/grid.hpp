#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace tieq {

// Quadrature discretization of a compact action box in R^dims.
// Nodes carry positive weights whose sum equals the box volume, so grid
// densities integrate with a plain weighted sum.
struct ActionGrid {
    int dims = 0;
    int per_dim = 0;                               // nodes per dimension
    std::vector<std::pair<double, double>> bounds; // per-dimension [a, b]
    std::vector<std::vector<double>> nodes;        // node index -> coordinates
    std::vector<double> weights;                   // node index -> quadrature weight
    double volume = 0.0;
    bool includes_vertices = false;

    std::size_t size() const { return nodes.size(); }
    double node_coord(std::size_t k, int dim) const { return nodes[k][dim]; }
};

// Midpoint tensor rule by default. With include_vertices the per-dimension
// rule is the trapezoid one, so box corners are exact nodes; weights stay
// positive and still sum to the volume.
ActionGrid build_action_grid(const std::vector<std::pair<double, double>>& bounds,
                             int per_dim_count,
                             bool include_vertices = false,
                             std::size_t node_cap = std::size_t(1) << 20);

// Largest per-dimension spacing between adjacent nodes.
double grid_mesh_width(const ActionGrid& grid);

// Box diameter (Euclidean).
double grid_diameter(const ActionGrid& grid);

// Index of the node closest to the given point.
std::size_t nearest_node(const ActionGrid& grid, const std::vector<double>& point);

} // namespace tieq
