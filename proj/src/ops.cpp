#include "mre/ops.hpp"

#include <Eigen/SparseCore>
#include <cmath>

namespace mre::ops {

namespace {

std::int64_t stride_of(const Grid& g, int axis) {
    std::int64_t s = 1;
    for (int a = 0; a < axis; ++a) s *= g.nodes(a);
    return s;
}

void require_stencil_room(const Grid& g) {
    for (int a = 0; a < g.dim; ++a)
        if (g.nodes(a) < 3)
            throw DiscretizationError("differential stencils need at least 3 nodes per axis");
}

}  // namespace

std::vector<double> axis_derivative(const Grid& grid, const std::vector<double>& nodal, int axis) {
    require_stencil_room(grid);
    const std::int64_t n = grid.num_nodes();
    const std::int64_t s = stride_of(grid, axis);
    const int m = grid.nodes(axis);
    const double inv2h = 1.0 / (2.0 * grid.h[axis]);
    std::vector<double> out(static_cast<std::size_t>(n));
    grid.for_nodes([&](const Index3& ix, std::int64_t id) {
        const int i = ix[axis];
        double d;
        if (i == 0)
            d = (-3.0 * nodal[std::size_t(id)] + 4.0 * nodal[std::size_t(id + s)] - nodal[std::size_t(id + 2 * s)]) * inv2h;
        else if (i == m - 1)
            d = (3.0 * nodal[std::size_t(id)] - 4.0 * nodal[std::size_t(id - s)] + nodal[std::size_t(id - 2 * s)]) * inv2h;
        else
            d = (nodal[std::size_t(id + s)] - nodal[std::size_t(id - s)]) * inv2h;
        out[std::size_t(id)] = d;
    });
    return out;
}

SymTensorField sym_grad(const VectorField& u) {
    const Grid& g = u.grid;
    require_stencil_room(g);
    const std::int64_t n = g.num_nodes();
    SymTensorField s(g);
    // cache all partials d_b u_a
    std::vector<std::vector<double>> d(std::size_t(g.dim * g.dim));
    for (int a = 0; a < g.dim; ++a) {
        std::vector<double> comp(u.values.begin() + a * n, u.values.begin() + (a + 1) * n);
        for (int b = 0; b < g.dim; ++b) d[std::size_t(a * g.dim + b)] = axis_derivative(g, comp, b);
    }
    for (int a = 0; a < g.dim; ++a)
        for (int b = a; b < g.dim; ++b) {
            const int slot = SymTensorField::slot(g.dim, a, b);
            const auto& dab = d[std::size_t(a * g.dim + b)];
            const auto& dba = d[std::size_t(b * g.dim + a)];
            for (std::int64_t id = 0; id < n; ++id)
                s.comp(slot, id) = 0.5 * (dab[std::size_t(id)] + dba[std::size_t(id)]);
        }
    return s;
}

ScalarField divergence(const VectorField& u) {
    const Grid& g = u.grid;
    require_stencil_room(g);
    const std::int64_t n = g.num_nodes();
    ScalarField out(g);
    for (int a = 0; a < g.dim; ++a) {
        std::vector<double> comp(u.values.begin() + a * n, u.values.begin() + (a + 1) * n);
        auto da = axis_derivative(g, comp, a);
        for (std::int64_t id = 0; id < n; ++id) out.values[std::size_t(id)] += da[std::size_t(id)];
    }
    return out;
}

VectorField curl(const VectorField& u) {
    const Grid& g = u.grid;
    if (g.dim != 3) throw DiscretizationError("curl requires a 3D field");
    const std::int64_t n = g.num_nodes();
    auto comp = [&](int a) {
        return std::vector<double>(u.values.begin() + a * n, u.values.begin() + (a + 1) * n);
    };
    auto d = [&](int a, int b) { return axis_derivative(g, comp(a), b); };
    VectorField out(g);
    auto set = [&](int c, std::vector<double> plus, std::vector<double> minus) {
        for (std::int64_t id = 0; id < n; ++id)
            out.at(c, id) = plus[std::size_t(id)] - minus[std::size_t(id)];
    };
    set(0, d(2, 1), d(1, 2));
    set(1, d(0, 2), d(2, 0));
    set(2, d(1, 0), d(0, 1));
    return out;
}

ScalarField rot(const VectorField& u) {
    const Grid& g = u.grid;
    if (g.dim != 2) throw DiscretizationError("rot requires a 2D field");
    const std::int64_t n = g.num_nodes();
    auto comp = [&](int a) {
        return std::vector<double>(u.values.begin() + a * n, u.values.begin() + (a + 1) * n);
    };
    auto d21 = axis_derivative(g, comp(1), 0);
    auto d12 = axis_derivative(g, comp(0), 1);
    ScalarField out(g);
    for (std::int64_t id = 0; id < n; ++id)
        out.values[std::size_t(id)] = d21[std::size_t(id)] - d12[std::size_t(id)];
    return out;
}

SpMat deriv_matrix(const Grid& grid, int axis) {
    require_stencil_room(grid);
    const std::int64_t n = grid.num_nodes();
    const std::int64_t s = stride_of(grid, axis);
    const int m = grid.nodes(axis);
    const double inv2h = 1.0 / (2.0 * grid.h[axis]);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(3 * n));
    grid.for_nodes([&](const Index3& ix, std::int64_t id) {
        const int i = ix[axis];
        if (i == 0) {
            trips.emplace_back(id, id, -3.0 * inv2h);
            trips.emplace_back(id, id + s, 4.0 * inv2h);
            trips.emplace_back(id, id + 2 * s, -inv2h);
        } else if (i == m - 1) {
            trips.emplace_back(id, id, 3.0 * inv2h);
            trips.emplace_back(id, id - s, -4.0 * inv2h);
            trips.emplace_back(id, id - 2 * s, inv2h);
        } else {
            trips.emplace_back(id, id + s, inv2h);
            trips.emplace_back(id, id - s, -inv2h);
        }
    });
    SpMat d(n, n);
    d.setFromTriplets(trips.begin(), trips.end());
    return d;
}

std::vector<double> trap_weights(const Grid& grid) {
    double hd = 1.0;
    for (int a = 0; a < grid.dim; ++a) hd *= grid.h[a];
    std::vector<double> w(static_cast<std::size_t>(grid.num_nodes()));
    grid.for_nodes([&](const Index3& ix, std::int64_t id) {
        double f = hd;
        for (int a = 0; a < grid.dim; ++a)
            if (ix[a] == 0 || ix[a] == grid.cells[a]) f *= 0.5;
        w[std::size_t(id)] = f;
    });
    return w;
}

SpMat compact_laplacian(const Grid& grid) {
    const std::int64_t n = grid.num_nodes();
    std::vector<Eigen::Triplet<double>> trips;
    double hd = 1.0;
    for (int a = 0; a < grid.dim; ++a) hd *= grid.h[a];
    for (int axis = 0; axis < grid.dim; ++axis) {
        const std::int64_t s = stride_of(grid, axis);
        const double coeff_base = hd / (grid.h[axis] * grid.h[axis]);
        grid.for_nodes([&](const Index3& ix, std::int64_t id) {
            if (ix[axis] == grid.cells[axis]) return;  // faces: node -> node+s
            double wf = coeff_base;
            for (int a = 0; a < grid.dim; ++a) {
                if (a == axis) continue;
                if (ix[a] == 0 || ix[a] == grid.cells[a]) wf *= 0.5;
            }
            const std::int64_t j = id + s;
            trips.emplace_back(id, id, wf);
            trips.emplace_back(j, j, wf);
            trips.emplace_back(id, j, -wf);
            trips.emplace_back(j, id, -wf);
        });
    }
    SpMat l(n, n);
    l.setFromTriplets(trips.begin(), trips.end());
    return l;
}

double dot(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

namespace {

double weighted_sq(const Grid& g, const std::vector<double>& vals, int comps) {
    auto w = trap_weights(g);
    const std::int64_t n = g.num_nodes();
    double s = 0.0;
    for (int c = 0; c < comps; ++c)
        for (std::int64_t id = 0; id < n; ++id) {
            double v = vals[std::size_t(c * n + id)];
            s += w[std::size_t(id)] * v * v;
        }
    return s;
}

}  // namespace

double quad_l2_norm(const ScalarField& f) { return std::sqrt(weighted_sq(f.grid, f.values, 1)); }
double quad_l2_norm(const VectorField& f) { return std::sqrt(weighted_sq(f.grid, f.values, f.grid.dim)); }

double quad_h1_norm(const ScalarField& f) {
    double sq = weighted_sq(f.grid, f.values, 1);
    for (int a = 0; a < f.grid.dim; ++a)
        sq += weighted_sq(f.grid, axis_derivative(f.grid, f.values, a), 1);
    return std::sqrt(sq);
}

double quad_h1_norm(const VectorField& f) {
    const std::int64_t n = f.grid.num_nodes();
    double sq = weighted_sq(f.grid, f.values, f.grid.dim);
    for (int c = 0; c < f.grid.dim; ++c) {
        std::vector<double> comp(f.values.begin() + c * n, f.values.begin() + (c + 1) * n);
        for (int a = 0; a < f.grid.dim; ++a)
            sq += weighted_sq(f.grid, axis_derivative(f.grid, comp, a), 1);
    }
    return std::sqrt(sq);
}

namespace {

std::int64_t fine_id_for(const Grid& fine, const Grid& coarse, const Index3& cix, int factor) {
    Index3 fix = {cix[0] * factor, cix[1] * factor, coarse.dim == 3 ? cix[2] * factor : 0};
    return fine.id(fix);
}

int restriction_factor(const Grid& fine, const Grid& coarse) {
    if (fine.dim != coarse.dim)
        throw DiscretizationError("restriction requires matching dimensions");
    int factor = fine.cells[0] / coarse.cells[0];
    for (int a = 0; a < fine.dim; ++a) {
        if (coarse.cells[a] * factor != fine.cells[a] || fine.extent[a] != coarse.extent[a])
            throw DiscretizationError("fine grid is not an integer refinement of the coarse grid");
    }
    return factor;
}

}  // namespace

ScalarField restrict_to(const ScalarField& fine, const Grid& coarse) {
    int factor = restriction_factor(fine.grid, coarse);
    ScalarField out(coarse);
    coarse.for_nodes([&](const Index3& ix, std::int64_t id) {
        out.values[std::size_t(id)] = fine.values[std::size_t(fine_id_for(fine.grid, coarse, ix, factor))];
    });
    return out;
}

VectorField restrict_to(const VectorField& fine, const Grid& coarse) {
    int factor = restriction_factor(fine.grid, coarse);
    VectorField out(coarse);
    const std::int64_t nf = fine.grid.num_nodes();
    const std::int64_t nc = coarse.num_nodes();
    coarse.for_nodes([&](const Index3& ix, std::int64_t id) {
        std::int64_t fid = fine_id_for(fine.grid, coarse, ix, factor);
        for (int c = 0; c < coarse.dim; ++c)
            out.values[std::size_t(c * nc + id)] = fine.values[std::size_t(c * nf + fid)];
    });
    return out;
}

namespace {

double interior_sq(const Grid& g, const std::vector<double>& vals, int comps, int layer) {
    auto w = trap_weights(g);
    const std::int64_t n = g.num_nodes();
    double s = 0.0;
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        for (int a = 0; a < g.dim; ++a)
            if (ix[a] < layer || ix[a] > g.cells[a] - layer) return;
        for (int c = 0; c < comps; ++c) {
            double v = vals[std::size_t(c * n + id)];
            s += w[std::size_t(id)] * v * v;
        }
    });
    return s;
}

}  // namespace

double interior_l2_norm(const ScalarField& f, int layer) {
    return std::sqrt(interior_sq(f.grid, f.values, 1, layer));
}

double interior_l2_norm(const VectorField& f, int layer) {
    return std::sqrt(interior_sq(f.grid, f.values, f.grid.dim, layer));
}

}  // namespace mre::ops
