#include "mre/norms.hpp"

#include <algorithm>
#include <cmath>

#include "mre/certificates.hpp"
#include "mre/ops.hpp"

namespace mre {

namespace {

bool is_fractional(double s) { return s != std::floor(s); }

void check_trace(const Grid& g, const std::vector<double>& vals, int comps) {
    const std::int64_t n = g.num_nodes();
    double scale = 0.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    double btrace = 0.0;
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!g.on_boundary(ix)) return;
        for (int c = 0; c < comps; ++c)
            btrace = std::max(btrace, std::abs(vals[std::size_t(c * n + id)]));
    });
    if (btrace > 1e-10 * std::max(scale, 1e-300))
        throw NonzeroTrace("fractional-order norm requires a zero boundary trace");
}

/// DST-I along one axis of an interior-value array laid out x-fastest with
/// dims m[0..2]; scaling (2/n) folded in. n = m+1 is the cell count.
void dst_axis(std::vector<double>& a, const int m[3], int axis) {
    const int len = m[axis];
    const int n = len + 1;
    // sine matrix
    std::vector<double> sines(std::size_t(len) * len);
    for (int k = 0; k < len; ++k)
        for (int j = 0; j < len; ++j)
            sines[std::size_t(k) * len + j] = std::sin(M_PI * (j + 1) * (k + 1) / n) * 2.0 / n;
    int stride = 1;
    for (int t = 0; t < axis; ++t) stride *= m[t];
    int outer = 1;
    for (int t = axis + 1; t < 3; ++t) outer *= m[t];
    int inner = stride;
    std::vector<double> line(static_cast<std::size_t>(len));
    std::vector<double> out(static_cast<std::size_t>(len));
    for (int o = 0; o < outer; ++o)
        for (int i = 0; i < inner; ++i) {
            std::size_t base = std::size_t(o) * std::size_t(len) * inner + i;
            for (int j = 0; j < len; ++j) line[std::size_t(j)] = a[base + std::size_t(j) * inner];
            for (int k = 0; k < len; ++k) {
                double s = 0.0;
                const double* row = &sines[std::size_t(k) * len];
                for (int j = 0; j < len; ++j) s += row[j] * line[std::size_t(j)];
                out[std::size_t(k)] = s;
            }
            for (int k = 0; k < len; ++k) a[base + std::size_t(k) * inner] = out[std::size_t(k)];
        }
}

double h_s_sq_component(const Grid& g, const std::vector<double>& vals, int comp, double s) {
    const std::int64_t n = g.num_nodes();
    int m[3] = {1, 1, 1};
    for (int a = 0; a < g.dim; ++a) {
        if (g.cells[a] < 2)
            throw DiscretizationError("spectral norm needs at least 2 cells per axis");
        m[a] = g.cells[a] - 1;
    }
    std::vector<double> c(std::size_t(m[0]) * m[1] * m[2]);
    // gather interior values
    std::size_t w = 0;
    const int nz = g.dim == 3 ? m[2] : 1;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < m[1]; ++j)
            for (int i = 0; i < m[0]; ++i)
                c[w++] = vals[std::size_t(comp * n + g.id({i + 1, j + 1, g.dim == 3 ? k + 1 : 0}))];
    for (int a = 0; a < g.dim; ++a) dst_axis(c, m, a);

    double measure = 1.0;
    for (int a = 0; a < g.dim; ++a) measure *= g.extent[a] / 2.0;
    double acc = 0.0;
    w = 0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < m[1]; ++j)
            for (int i = 0; i < m[0]; ++i) {
                double lam = (i + 1.0) * (i + 1.0) / (g.extent[0] * g.extent[0]) +
                             (j + 1.0) * (j + 1.0) / (g.extent[1] * g.extent[1]);
                if (g.dim == 3) lam += (k + 1.0) * (k + 1.0) / (g.extent[2] * g.extent[2]);
                lam *= M_PI * M_PI;
                double ck = c[w++];
                acc += std::pow(1.0 + lam, s) * ck * ck;
            }
    return measure * acc;
}

double weighted_sq_impl(const Grid& g, const std::vector<double>& vals, int comps, int power,
                        const BoundaryWeight& bw, BaseNorm base, double cap) {
    const std::int64_t n = g.num_nodes();
    // weighted field, zero on boundary nodes (excluded from quadrature anyway)
    std::vector<double> wf(std::size_t(comps) * std::size_t(n), 0.0);
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (g.on_boundary(ix)) return;
        double r = std::pow(bw.rho.values[std::size_t(id)], power);
        for (int c = 0; c < comps; ++c)
            wf[std::size_t(c * n + id)] = r * vals[std::size_t(c * n + id)];
    });
    // cap check on the first interior layer
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        bool first_layer = false;
        for (int a = 0; a < g.dim; ++a)
            if (ix[a] == 1 || ix[a] == g.cells[a] - 1) first_layer = true;
        if (!first_layer || g.on_boundary(ix)) return;
        for (int c = 0; c < comps; ++c)
            if (std::abs(wf[std::size_t(c * n + id)]) > cap)
                throw UnboundedWeightedField("weighted field exceeds the cap near the boundary");
    });
    auto qw = ops::trap_weights(g);
    double acc = 0.0;
    auto add_sq = [&](const std::vector<double>& v, int c) {
        g.for_nodes([&](const Index3& ix, std::int64_t id) {
            if (g.on_boundary(ix)) return;
            double x = v[std::size_t(c * n + id)];
            acc += qw[std::size_t(id)] * x * x;
        });
    };
    for (int c = 0; c < comps; ++c) add_sq(wf, c);
    if (base == BaseNorm::H1) {
        for (int c = 0; c < comps; ++c) {
            std::vector<double> comp(wf.begin() + c * n, wf.begin() + (c + 1) * n);
            for (int a = 0; a < g.dim; ++a) {
                auto d = ops::axis_derivative(g, comp, a);
                g.for_nodes([&](const Index3& ix, std::int64_t id) {
                    if (g.on_boundary(ix)) return;
                    acc += qw[std::size_t(id)] * d[std::size_t(id)] * d[std::size_t(id)];
                });
            }
        }
    }
    return acc;
}

}  // namespace

BoundaryWeight make_boundary_weight(const Grid& grid) {
    const double q = 4.0;
    BoundaryWeight bw;
    bw.rho = ScalarField::from(grid, [&](double x, double y, double z) {
        double acc = 0.0;
        double xs[3] = {x, y, z};
        for (int a = 0; a < grid.dim; ++a) {
            double d = std::min(xs[a], grid.extent[a] - xs[a]);
            if (d <= 0.0) return 0.0;
            acc += std::pow(d, -q);
        }
        return std::pow(acc, -1.0 / q);
    });
    return bw;
}

double h_s_norm(const ScalarField& f, double s) {
    f.validate();
    if (is_fractional(s)) check_trace(f.grid, f.values, 1);
    return std::sqrt(h_s_sq_component(f.grid, f.values, 0, s));
}

double h_s_norm(const VectorField& f, double s) {
    f.validate();
    if (is_fractional(s)) check_trace(f.grid, f.values, f.grid.dim);
    double acc = 0.0;
    for (int c = 0; c < f.grid.dim; ++c) acc += h_s_sq_component(f.grid, f.values, c, s);
    return std::sqrt(acc);
}

double weighted_norm(const ScalarField& f, int power, const BoundaryWeight& w, BaseNorm base,
                     double cap) {
    if (!f.grid.same_layout(w.rho.grid)) throw DiscretizationError("weight grid mismatch");
    return std::sqrt(weighted_sq_impl(f.grid, f.values, 1, power, w, base, cap));
}

double weighted_norm(const VectorField& f, int power, const BoundaryWeight& w, BaseNorm base,
                     double cap) {
    if (!f.grid.same_layout(w.rho.grid)) throw DiscretizationError("weight grid mismatch");
    return std::sqrt(weighted_sq_impl(f.grid, f.values, f.grid.dim, power, w, base, cap));
}

StabilityResult stability_experiment(const std::vector<std::pair<ScalarField, ScalarField>>& pairs,
                                     const std::vector<VectorField>& excitations, double omega,
                                     const NormSpec& spec, const std::vector<double>& amplitudes,
                                     SolverConfig config) {
    spec.validate();
    if (pairs.empty()) throw DegenerateInput("no mu pairs given");
    if (excitations.empty()) throw DegenerateInput("no excitations given");
    const Grid& g = pairs.front().first.grid;
    const double s = spec.s;
    const double data_s = g.dim == 3 ? s + 1.0 : s;

    StabilityResult res;
    res.max_ratio = 0.0;
    res.min_ratio = std::numeric_limits<double>::infinity();
    int pid = 0;
    for (const auto& [mu1, mu2] : pairs) {
        StabilityRow row;
        row.pair_id = pid;
        row.amplitude = std::size_t(pid) < amplitudes.size() ? amplitudes[std::size_t(pid)] : 0.0;
        ++pid;

        std::vector<VectorField> u1s, u2s;
        for (const auto& f : excitations) {
            u1s.push_back(solve_stokes({g, mu1, omega, f, std::nullopt, config}).u);
            u2s.push_back(solve_stokes({g, mu2, omega, f, std::nullopt, config}).u);
        }
        if (g.dim == 2) {
            row.cert_pass = cert_2d(u1s[0], 1e-8).pass;
        } else {
            row.cert_pass = u1s.size() >= 2 && cert_3d(u1s[0], u1s[1], 1e-8, 256).pass;
        }

        ScalarField dmu(g);
        for (std::size_t i = 0; i < dmu.values.size(); ++i)
            dmu.values[i] = mu1.values[i] - mu2.values[i];
        row.lhs = h_s_norm(dmu, s);
        row.rhs = 0.0;
        for (std::size_t ch = 0; ch < u1s.size(); ++ch) {
            VectorField du(g);
            for (std::size_t i = 0; i < du.values.size(); ++i)
                du.values[i] = u1s[ch].values[i] - u2s[ch].values[i];
            row.rhs += h_s_norm(du, data_s);
        }
        double mu_scale = std::max(std::abs(mu1.max()), std::abs(mu1.min()));
        row.degenerate = row.lhs < 1e-12 * std::max(mu_scale, 1.0) && row.rhs < 1e-12;
        row.ratio = row.degenerate ? 0.0 : row.lhs / row.rhs;
        if (!row.degenerate) {
            res.max_ratio = std::max(res.max_ratio, row.ratio);
            res.min_ratio = std::min(res.min_ratio, row.ratio);
        }
        res.rows.push_back(row);
    }
    if (!std::isfinite(res.min_ratio)) res.min_ratio = 0.0;
    return res;
}

}  // namespace mre
