#pragma once

#include <array>
#include <cstdint>

#include "mre/errors.hpp"

namespace mre {

using Index3 = std::array<int, 3>;

/// Uniform Cartesian grid over a rectangle (2D) or box (3D).
/// Nodes sit at cell corners, so each axis carries cells+1 nodes.
/// Node ordering is x-fastest: id = i + nx*(j + ny*k).
struct Grid {
    int dim = 2;
    Index3 cells = {1, 1, 1};
    std::array<double, 3> extent = {1.0, 1.0, 1.0};
    std::array<double, 3> h = {1.0, 1.0, 1.0};

    static Grid make(int dim, Index3 cells, std::array<double, 3> extent) {
        if (dim != 2 && dim != 3)
            throw DiscretizationError("grid dimension must be 2 or 3");
        Grid g;
        g.dim = dim;
        std::int64_t total = 1;
        for (int a = 0; a < 3; ++a) {
            if (a >= dim) {
                cells[a] = 1;
                extent[a] = 1.0;
            }
            if (cells[a] < 1)
                throw DiscretizationError("grid needs at least one cell per axis");
            if (!(extent[a] > 0.0))
                throw DiscretizationError("grid extent must be positive");
            g.cells[a] = cells[a];
            g.extent[a] = extent[a];
            g.h[a] = extent[a] / cells[a];
            if (a < dim) total *= cells[a] + 1;
        }
        if (total > (std::int64_t(1) << 31))
            throw DiscretizationError("grid node count exceeds addressable limit");
        return g;
    }

    static Grid square(int cells_per_axis, double side = 1.0) {
        return make(2, {cells_per_axis, cells_per_axis, 1}, {side, side, 1.0});
    }

    static Grid cube(int cells_per_axis, double side = 1.0) {
        return make(3, {cells_per_axis, cells_per_axis, cells_per_axis},
                    {side, side, side});
    }

    int nodes(int axis) const { return axis < dim ? cells[axis] + 1 : 1; }

    std::int64_t num_nodes() const {
        std::int64_t n = 1;
        for (int a = 0; a < dim; ++a) n *= nodes(a);
        return n;
    }

    std::int64_t id(const Index3& ix) const {
        std::int64_t n = ix[0];
        if (dim >= 2) n += std::int64_t(nodes(0)) * ix[1];
        if (dim >= 3) n += std::int64_t(nodes(0)) * nodes(1) * ix[2];
        return n;
    }

    Index3 node(std::int64_t id) const {
        Index3 ix = {0, 0, 0};
        ix[0] = int(id % nodes(0));
        id /= nodes(0);
        ix[1] = int(id % nodes(1));
        if (dim == 3) ix[2] = int(id / nodes(1));
        return ix;
    }

    std::array<double, 3> coords(const Index3& ix) const {
        return {ix[0] * h[0], ix[1] * h[1], dim == 3 ? ix[2] * h[2] : 0.0};
    }

    bool on_boundary(const Index3& ix) const {
        for (int a = 0; a < dim; ++a)
            if (ix[a] == 0 || ix[a] == cells[a]) return true;
        return false;
    }

    bool same_layout(const Grid& o) const {
        if (dim != o.dim) return false;
        for (int a = 0; a < dim; ++a)
            if (cells[a] != o.cells[a] || extent[a] != o.extent[a]) return false;
        return true;
    }

    /// Visit all nodes in id order.
    template <class F>
    void for_nodes(F&& f) const {
        const int nz = dim == 3 ? nodes(2) : 1;
        std::int64_t id = 0;
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < nodes(1); ++j)
                for (int i = 0; i < nodes(0); ++i) f(Index3{i, j, k}, id++);
    }
};

}  // namespace mre
