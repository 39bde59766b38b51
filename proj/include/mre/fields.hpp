#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mre/grid.hpp"

namespace mre {

namespace detail {
inline void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw DiscretizationError(std::string(what) + " contains non-finite values");
}
}  // namespace detail

/// One value per node.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(std::size_t(g.num_nodes()), fill) {}

    static ScalarField from(const Grid& g, const std::function<double(double, double, double)>& f) {
        ScalarField s(g);
        g.for_nodes([&](const Index3& ix, std::int64_t id) {
            auto x = g.coords(ix);
            s.values[std::size_t(id)] = f(x[0], x[1], x[2]);
        });
        return s;
    }

    double& operator[](std::int64_t id) { return values[std::size_t(id)]; }
    double operator[](std::int64_t id) const { return values[std::size_t(id)]; }
    double min() const;
    double max() const;
    void validate() const { detail::check_finite(values, "scalar field"); }
};

/// dim values per node, stored component-major: values[c*N + id].
struct VectorField {
    Grid grid;
    std::vector<double> values;

    VectorField() = default;
    explicit VectorField(const Grid& g, double fill = 0.0)
        : grid(g), values(std::size_t(g.num_nodes()) * g.dim, fill) {}

    using Fn = std::function<double(double, double, double)>;
    static VectorField from(const Grid& g, const std::vector<Fn>& comps) {
        VectorField u(g);
        const std::int64_t n = g.num_nodes();
        g.for_nodes([&](const Index3& ix, std::int64_t id) {
            auto x = g.coords(ix);
            for (int c = 0; c < g.dim; ++c)
                u.values[std::size_t(c * n + id)] = comps[std::size_t(c)](x[0], x[1], x[2]);
        });
        return u;
    }

    double& at(int comp, std::int64_t id) { return values[std::size_t(comp) * std::size_t(grid.num_nodes()) + std::size_t(id)]; }
    double at(int comp, std::int64_t id) const { return values[std::size_t(comp) * std::size_t(grid.num_nodes()) + std::size_t(id)]; }
    void validate() const { detail::check_finite(values, "vector field"); }
};

/// Symmetric d x d tensor per node, unique entries only.
/// 2D order: xx, yy, xy.  3D order: xx, yy, zz, xy, xz, yz.
struct SymTensorField {
    Grid grid;
    std::vector<double> values;

    SymTensorField() = default;
    explicit SymTensorField(const Grid& g, double fill = 0.0)
        : grid(g), values(std::size_t(g.num_nodes()) * n_comps(g.dim), fill) {}

    static int n_comps(int dim) { return dim * (dim + 1) / 2; }

    /// Storage slot for entry (a, b); a, b in [0, dim).
    static int slot(int dim, int a, int b) {
        if (a > b) std::swap(a, b);
        if (a == b) return a;
        if (dim == 2) return 2;           // xy
        return 2 + a + b;                  // xy->3, xz->4, yz->5
    }

    double& comp(int s, std::int64_t id) { return values[std::size_t(s) * std::size_t(grid.num_nodes()) + std::size_t(id)]; }
    double comp(int s, std::int64_t id) const { return values[std::size_t(s) * std::size_t(grid.num_nodes()) + std::size_t(id)]; }
    double entry(int a, int b, std::int64_t id) const { return comp(slot(grid.dim, a, b), id); }

    double trace(std::int64_t id) const {
        double t = 0.0;
        for (int a = 0; a < grid.dim; ++a) t += comp(a, id);
        return t;
    }

    /// Frobenius norm squared, off-diagonals counted twice.
    double frobenius_sq(std::int64_t id) const {
        double s = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            double d = comp(a, id);
            s += d * d;
        }
        for (int c = grid.dim; c < n_comps(grid.dim); ++c) {
            double d = comp(c, id);
            s += 2.0 * d * d;
        }
        return s;
    }

    void validate() const { detail::check_finite(values, "tensor field"); }
};

inline double ScalarField::min() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = v < m ? v : m;
    return m;
}

inline double ScalarField::max() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = v > m ? v : m;
    return m;
}

}  // namespace mre
