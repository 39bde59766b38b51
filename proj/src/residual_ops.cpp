#include "mre/residual_ops.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "mre/norms.hpp"
#include "mre/ops.hpp"

namespace mre {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

SpMat diag_of(const std::vector<double>& v) {
    SpMat m(Eigen::Index(v.size()), Eigen::Index(v.size()));
    m.reserve(Eigen::VectorXi::Constant(int(v.size()), 1));
    for (Eigen::Index i = 0; i < Eigen::Index(v.size()); ++i) m.insert(i, i) = v[std::size_t(i)];
    m.makeCompressed();
    return m;
}

/// v_a = 2 sum_b D_b diag(S_ab) mu, the divergence of the scaled strain.
std::vector<SpMat> tensor_divergence_rows(const Grid& g, const SymTensorField& s) {
    const std::int64_t n = g.num_nodes();
    std::vector<SpMat> dmats;
    for (int a = 0; a < g.dim; ++a) dmats.push_back(ops::deriv_matrix(g, a));
    std::vector<SpMat> rows;
    for (int a = 0; a < g.dim; ++a) {
        SpMat acc(n, n);
        for (int b = 0; b < g.dim; ++b) {
            std::vector<double> sab(static_cast<std::size_t>(n));
            int slot = SymTensorField::slot(g.dim, a, b);
            for (std::int64_t i = 0; i < n; ++i) sab[std::size_t(i)] = s.comp(slot, i);
            acc += SpMat(dmats[std::size_t(b)] * diag_of(sab));
        }
        rows.push_back(SpMat(2.0 * acc));
    }
    return rows;
}

/// Channel operator: N x N in 2D 're rotated divergence', 3N x N curl in 3D.
SpMat channel_operator(const VectorField& u1) {
    const Grid& g = u1.grid;
    const std::int64_t n = g.num_nodes();
    SymTensorField s = ops::sym_grad(u1);
    auto v = tensor_divergence_rows(g, s);
    std::vector<SpMat> dmats;
    for (int a = 0; a < g.dim; ++a) dmats.push_back(ops::deriv_matrix(g, a));
    if (g.dim == 2) return SpMat(dmats[0] * v[0]) - SpMat(dmats[1] * v[1]);
    std::vector<Trip> trips;
    auto put = [&](int row_block, const SpMat& m, double sgn) {
        for (int col = 0; col < m.outerSize(); ++col)
            for (SpMat::InnerIterator it(m, col); it; ++it)
                trips.emplace_back(row_block * n + it.row(), it.col(), sgn * it.value());
    };
    put(0, SpMat(dmats[1] * v[2]), 1.0);
    put(0, SpMat(dmats[2] * v[1]), -1.0);
    put(1, SpMat(dmats[2] * v[0]), 1.0);
    put(1, SpMat(dmats[0] * v[2]), -1.0);
    put(2, SpMat(dmats[0] * v[1]), 1.0);
    put(2, SpMat(dmats[1] * v[0]), -1.0);
    SpMat c(3 * n, n);
    c.setFromTriplets(trips.begin(), trips.end());
    return c;
}

LinearizedMap assemble_map(const VectorField& u1, const VectorField* u1t, double omega) {
    const Grid& g = u1.grid;
    LinearizedMap map;
    map.grid = g;
    map.omega = omega;
    map.channels = u1t ? 2 : 1;
    SpMat a = channel_operator(u1);
    if (u1t) {
        if (!u1t->grid.same_layout(g)) throw DiscretizationError("channel grid mismatch");
        SpMat b = channel_operator(*u1t);
        SpMat stacked(a.rows() + b.rows(), a.cols());
        std::vector<Trip> trips;
        for (int col = 0; col < a.outerSize(); ++col)
            for (SpMat::InnerIterator it(a, col); it; ++it)
                trips.emplace_back(it.row(), it.col(), it.value());
        for (int col = 0; col < b.outerSize(); ++col)
            for (SpMat::InnerIterator it(b, col); it; ++it)
                trips.emplace_back(a.rows() + it.row(), it.col(), it.value());
        stacked.setFromTriplets(trips.begin(), trips.end());
        map.op = stacked;
    } else {
        map.op = a;
    }

    double hbar = 0.0;
    for (int ax = 0; ax < g.dim; ++ax) hbar += g.h[ax];
    hbar /= g.dim;
    const double scale = hbar * hbar * hbar;
    const std::int64_t n = g.num_nodes();
    std::vector<Trip> trips;
    for (int col = 0; col < map.op.outerSize(); ++col)
        for (SpMat::InnerIterator it(map.op, col); it; ++it)
            trips.emplace_back(it.row(), it.col(), scale * it.value());
    Eigen::Index brow = map.op.rows();
    std::int64_t nb = 0;
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!g.on_boundary(ix)) return;
        trips.emplace_back(brow + nb, id, 1.0);
        ++nb;
    });
    map.augmented = SpMat(map.op.rows() + nb, n);
    map.augmented.setFromTriplets(trips.begin(), trips.end());
    return map;
}

std::vector<double> mat_apply(const SpMat& m, const std::vector<double>& x) {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), Eigen::Index(x.size()));
    Eigen::VectorXd y = m * v;
    return std::vector<double>(y.data(), y.data() + y.size());
}

/// g of the identity, rebuilt from the solution difference:
/// 2D: -omega^2 (d1 w1 - d2 w2) - A_w mu2 - (d1^2 - d2^2) q
/// 3D: -omega^2 curl w - A_w mu2 (per channel; curl kills the pressure).
std::vector<double> identity_rhs(const VectorField& w, const ScalarField& mu2, double omega,
                                 const ScalarField* q) {
    const Grid& g = w.grid;
    const std::int64_t n = g.num_nodes();
    SpMat aw = channel_operator(w);
    std::vector<double> out = mat_apply(aw, mu2.values);
    for (double& v : out) v = -v;
    if (g.dim == 2) {
        std::vector<double> w1(w.values.begin(), w.values.begin() + n);
        std::vector<double> w2(w.values.begin() + n, w.values.begin() + 2 * n);
        auto d1 = ops::axis_derivative(g, w1, 0);
        auto d2 = ops::axis_derivative(g, w2, 1);
        for (std::int64_t i = 0; i < n; ++i)
            out[std::size_t(i)] -= omega * omega * (d1[std::size_t(i)] - d2[std::size_t(i)]);
        if (q) {
            auto q1 = ops::axis_derivative(g, ops::axis_derivative(g, q->values, 0), 0);
            auto q2 = ops::axis_derivative(g, ops::axis_derivative(g, q->values, 1), 1);
            for (std::int64_t i = 0; i < n; ++i)
                out[std::size_t(i)] -= q1[std::size_t(i)] - q2[std::size_t(i)];
        }
    } else {
        VectorField cw = ops::curl(w);
        for (std::size_t i = 0; i < cw.values.size(); ++i)
            out[i] -= omega * omega * cw.values[i];
    }
    return out;
}

double interior_norm_rows(const Grid& g, const std::vector<double>& vals, int comps) {
    auto w = ops::trap_weights(g);
    const std::int64_t n = g.num_nodes();
    double acc = 0.0;
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        // the residual is certified on the central quarter of the domain: the
        // differenced solver fields carry a near-boundary error layer of
        // fixed physical width that third differences do not shrink
        for (int a = 0; a < g.dim; ++a) {
            const int layer = std::max(1, 3 * g.cells[a] / 8);
            if (ix[a] < layer || ix[a] > g.cells[a] - layer) return;
        }
        for (int c = 0; c < comps; ++c) {
            double v = vals[std::size_t(c * n + id)];
            acc += w[std::size_t(id)] * v * v;
        }
    });
    return std::sqrt(acc);
}

double residual_norm_at(const Grid& g, const ScalarField& mu1, const ScalarField& mu2,
                        const VectorField& bc, double omega, const SolverConfig& config) {
    StokesSolution s1 = solve_stokes({g, mu1, omega, bc, std::nullopt, config});
    StokesSolution s2 = solve_stokes({g, mu2, omega, bc, std::nullopt, config});
    VectorField w(g);
    for (std::size_t i = 0; i < w.values.size(); ++i)
        w.values[i] = s1.u.values[i] - s2.u.values[i];
    ScalarField q(g);
    for (std::size_t i = 0; i < q.values.size(); ++i)
        q.values[i] = s1.p.values[i] - s2.p.values[i];

    LinearizedMap map = make_linearized_map(s1.u, omega);
    ScalarField dmu(g);
    for (std::size_t i = 0; i < dmu.values.size(); ++i)
        dmu.values[i] = mu1.values[i] - mu2.values[i];
    std::vector<double> lhs = apply_A(map, dmu);
    std::vector<double> rhs = identity_rhs(w, mu2, omega, g.dim == 2 ? &q : nullptr);
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= rhs[i];
    return interior_norm_rows(g, lhs, g.dim == 2 ? 1 : 3);
}

}  // namespace

LinearizedMap make_linearized_map(const VectorField& u1, double omega) {
    return assemble_map(u1, nullptr, omega);
}

LinearizedMap make_linearized_map(const VectorField& u1, const VectorField& u1t, double omega) {
    if (u1.grid.dim != 3) throw DiscretizationError("two channels are a 3D construction");
    return assemble_map(u1, &u1t, omega);
}

std::vector<double> apply_A(const LinearizedMap& map, const ScalarField& mu) {
    if (!mu.grid.same_layout(map.grid)) throw DiscretizationError("mu grid mismatch");
    return mat_apply(map.op, mu.values);
}

IdentityStudy verify_identity(const ScalarField& mu1_fine, const ScalarField& mu2_fine,
                              const VectorField& bc_fine, double omega, SolverConfig config) {
    const Grid& gf = mu1_fine.grid;
    for (int a = 0; a < gf.dim; ++a)
        if (gf.cells[a] % 2 != 0 || gf.cells[a] < 8)
            throw DiscretizationError("identity study needs an even cell count >= 8");
    Index3 half = {gf.cells[0] / 2, gf.cells[1] / 2, gf.dim == 3 ? gf.cells[2] / 2 : 1};
    Grid gc = Grid::make(gf.dim, half, gf.extent);

    IdentityStudy study;
    study.fine_residual = residual_norm_at(gf, mu1_fine, mu2_fine, bc_fine, omega, config);
    study.coarse_residual =
        residual_norm_at(gc, ops::restrict_to(mu1_fine, gc), ops::restrict_to(mu2_fine, gc),
                         ops::restrict_to(bc_fine, gc), omega, config);
    study.order = std::log2(study.coarse_residual / study.fine_residual);
    return study;
}

double g_bound_probe(const VectorField& w, const ScalarField& mu2, double l, double omega) {
    if (l > 0.0) throw ConfigError("g bound probe expects a norm order l <= 0");
    const Grid& g = w.grid;
    if (!mu2.grid.same_layout(g)) throw DiscretizationError("mu grid mismatch");
    const double ws = g.dim == 2 ? l + 2.0 : l + 3.0;
    double scale = 0.0;
    for (double v : w.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw DegenerateInput("zero difference field");

    std::vector<double> gv = identity_rhs(w, mu2, omega, nullptr);
    double gnorm = 0.0;
    if (g.dim == 2) {
        ScalarField gs(g);
        gs.values.assign(gv.begin(), gv.end());
        gnorm = h_s_norm(gs, l);
    } else {
        VectorField gvec(g);
        gvec.values = gv;
        gnorm = h_s_norm(gvec, l);
    }
    double wn = h_s_norm(w, ws);
    if (wn == 0.0) throw DegenerateInput("zero difference field");
    return gnorm / wn;
}

KernelProbeResult kernel_probe(const LinearizedMap& map, int k, double threshold) {
    const Eigen::Index n = map.augmented.cols();
    if (k < 1 || Eigen::Index(k) > n) throw ConfigError("invalid singular-value count");
    SpMat m = SpMat(map.augmented.transpose()) * map.augmented;
    double tr = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) tr += m.coeff(i, i);
    const double shift = 1e-12 * tr / double(n) + 1e-300;
    SpMat ms = m;
    for (Eigen::Index i = 0; i < n; ++i) ms.coeffRef(i, i) += shift;
    ms.makeCompressed();
    Eigen::SimplicialLDLT<SpMat> ldlt(ms);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystem("kernel probe factorization failed");

    Eigen::MatrixXd x(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j)
            x(i, j) = std::sin(0.49 * double(i + 1) * double(j + 1) + 0.17 * double(j));
    for (int it = 0; it < 40; ++it) {
        x = ldlt.solve(x);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
        x = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    }
    Eigen::MatrixXd t = x.transpose() * (m.selfadjointView<Eigen::Lower>() * x);
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    if (es.info() != Eigen::Success) throw SingularSystem("kernel probe eigen extraction failed");

    KernelProbeResult res;
    res.threshold = threshold;
    for (int j = 0; j < k; ++j) res.sigmas.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[j])));
    std::sort(res.sigmas.begin(), res.sigmas.end());
    res.trivial = res.sigmas.front() > threshold * res.sigmas.back();
    return res;
}

}  // namespace mre
