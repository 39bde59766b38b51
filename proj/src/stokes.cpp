#include "mre/stokes.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace mre {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

struct EliminatedSystem {
    SpMat matrix;     // with identity rows/cols on constrained dofs
    SpMat coupling;   // original columns of constrained dofs (free rows only)
    double scale;     // diagonal value placed on constrained dofs
};

/// Symmetric Dirichlet elimination: constrained rows/cols are replaced by
/// scale*I; the removed columns are kept for the right-hand-side lift.
EliminatedSystem eliminate(const SpMat& k, const std::vector<char>& constrained, double scale) {
    std::vector<Trip> kept, coup;
    for (int col = 0; col < k.outerSize(); ++col)
        for (SpMat::InnerIterator it(k, col); it; ++it) {
            bool rc = constrained[std::size_t(it.row())];
            bool cc = constrained[std::size_t(it.col())];
            if (rc) continue;
            if (cc)
                coup.emplace_back(it.row(), it.col(), it.value());
            else
                kept.emplace_back(it.row(), it.col(), it.value());
        }
    for (Eigen::Index i = 0; i < k.rows(); ++i)
        if (constrained[std::size_t(i)]) kept.emplace_back(i, i, scale);
    EliminatedSystem out;
    out.matrix = SpMat(k.rows(), k.cols());
    out.matrix.setFromTriplets(kept.begin(), kept.end());
    out.coupling = SpMat(k.rows(), k.cols());
    out.coupling.setFromTriplets(coup.begin(), coup.end());
    out.scale = scale;
    return out;
}

double power_norm(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                  Eigen::Index n, int iters) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::sin(0.71 * double(i) + 0.3);
    v.normalize();
    double nrm = 0.0;
    for (int it = 0; it < iters; ++it) {
        v = apply(v);
        nrm = v.norm();
        if (nrm == 0.0) return 0.0;
        v /= nrm;
    }
    return nrm;
}

double lstsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(x.size());
    my /= double(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

void check_mu(const ScalarField& mu, double mu_min) {
    if (mu.min() < mu_min)
        throw ContrastViolation("shear modulus drops below the positivity floor");
    mu.validate();
}

double mean_h_sq(const Grid& g) {
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) s += g.h[a] * g.h[a];
    return s / g.dim;
}

}  // namespace

double boundary_flux(const VectorField& f) {
    const Grid& g = f.grid;
    double flux = 0.0;
    for (int axis = 0; axis < g.dim; ++axis)
        for (int side = 0; side < 2; ++side) {
            const double sign = side == 0 ? -1.0 : 1.0;
            g.for_nodes([&](const Index3& ix, std::int64_t id) {
                if (ix[axis] != (side == 0 ? 0 : g.cells[axis])) return;
                double w = 1.0;
                for (int a = 0; a < g.dim; ++a) {
                    if (a == axis) continue;
                    w *= g.h[a];
                    if (ix[a] == 0 || ix[a] == g.cells[a]) w *= 0.5;
                }
                flux += sign * w * f.at(axis, id);
            });
        }
    return flux;
}

StokesOperator::StokesOperator(const Grid& grid, const ScalarField& mu, double omega,
                               SolverConfig config)
    : grid_(grid), omega_(omega), config_(config) {
    if (!mu.grid.same_layout(grid)) throw DiscretizationError("mu grid mismatch");
    check_mu(mu, config_.mu_min);
    const std::int64_t n = grid.num_nodes();
    const int d = grid.dim;
    const Eigen::Index m = Eigen::Index((d + 1) * n + 1);
    weights_ = ops::trap_weights(grid);
    quad_ = build_quadrature_ops(grid);

    SpMat v = viscous_stiffness(quad_, mu.values);
    SpMat b = pressure_coupling(quad_);  // (d*N) x N, (p, div phi)
    SpMat lp = ops::compact_laplacian(grid);
    const double stab = config_.stab_alpha * mean_h_sq(grid);

    std::vector<Trip> trips;
    // momentum block: omega^2 W - V
    for (int col = 0; col < v.outerSize(); ++col)
        for (SpMat::InnerIterator it(v, col); it; ++it)
            trips.emplace_back(it.row(), it.col(), -it.value());
    for (int c = 0; c < d; ++c)
        for (std::int64_t i = 0; i < n; ++i)
            trips.emplace_back(c * n + i, c * n + i, omega * omega * weights_[std::size_t(i)]);
    // pressure coupling: A_up = -B, A_pu = -B^T
    for (int col = 0; col < b.outerSize(); ++col)
        for (SpMat::InnerIterator it(b, col); it; ++it) {
            trips.emplace_back(it.row(), d * n + it.col(), -it.value());
            trips.emplace_back(d * n + it.col(), it.row(), -it.value());
        }
    // pressure stabilization; sign matches the negated continuity row so the
    // Schur complement stays definite
    for (int col = 0; col < lp.outerSize(); ++col)
        for (SpMat::InnerIterator it(lp, col); it; ++it)
            trips.emplace_back(d * n + it.row(), d * n + it.col(), stab * it.value());
    // zero-mean multiplier
    for (std::int64_t i = 0; i < n; ++i) {
        trips.emplace_back(d * n + i, m - 1, -weights_[std::size_t(i)]);
        trips.emplace_back(m - 1, d * n + i, -weights_[std::size_t(i)]);
    }

    SpMat k(m, m);
    k.setFromTriplets(trips.begin(), trips.end());

    is_boundary_.assign(std::size_t(m), 0);
    grid.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!grid.on_boundary(ix)) return;
        for (int c = 0; c < d; ++c) is_boundary_[std::size_t(c * n + id)] = 1;
    });

    double wbar = 1.0;
    for (int a = 0; a < d; ++a) wbar *= grid.h[a];
    dirichlet_scale_ = wbar / mean_h_sq(grid);  // viscous-row scale
    auto sys = eliminate(k, is_boundary_, dirichlet_scale_);
    matrix_ = std::move(sys.matrix);
    coupling_ = std::move(sys.coupling);
    matrix_.makeCompressed();

    if (grid.dim == 3) {
        ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
        ldlt_->compute(matrix_);
        if (ldlt_->info() != Eigen::Success)
            throw SingularSystem("Stokes factorization failed");
    } else {
        lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
        lu_->compute(matrix_);
        if (lu_->info() != Eigen::Success)
            throw SingularSystem("Stokes factorization failed");
    }

    if (config_.check_condition) {
        double knorm = power_norm([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(matrix_ * x); }, m, 6);
        double kinv = power_norm([&](const Eigen::VectorXd& x) { return solve_system(x); }, m, 6);
        cond_estimate_ = knorm * kinv;
        if (!std::isfinite(cond_estimate_) || cond_estimate_ > config_.condition_cap)
            throw NearResonance("estimated condition number " + std::to_string(cond_estimate_) +
                                " exceeds cap; omega is near a discrete Stokes eigenvalue");
    }
}

Eigen::VectorXd StokesOperator::solve_system(const Eigen::VectorXd& rhs) const {
    if (lu_) {
        Eigen::VectorXd x = lu_->solve(rhs);
        if (lu_->info() != Eigen::Success) throw SingularSystem("Stokes solve failed");
        return x;
    }
    Eigen::VectorXd x = ldlt_->solve(rhs);
    if (ldlt_->info() != Eigen::Success) throw SingularSystem("Stokes solve failed");
    // the unpivoted symmetric factorization of this indefinite system loses a
    // few digits; two refinement sweeps recover them
    for (int sweep = 0; sweep < 2; ++sweep) {
        Eigen::VectorXd r = rhs - matrix_ * x;
        x += ldlt_->solve(r);
    }
    return x;
}

Eigen::VectorXd StokesOperator::assemble_rhs(const VectorField& bc, const VectorField* f) const {
    const std::int64_t n = grid_.num_nodes();
    const int d = grid_.dim;
    const Eigen::Index m = matrix_.rows();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    if (f) {
        if (!f->grid.same_layout(grid_)) throw DiscretizationError("body force grid mismatch");
        for (int c = 0; c < d; ++c)
            for (std::int64_t i = 0; i < n; ++i)
                if (!is_boundary_[std::size_t(c * n + i)])
                    rhs[c * n + i] = weights_[std::size_t(i)] * f->at(c, i);
    }
    // lift the Dirichlet values
    Eigen::VectorXd xb = Eigen::VectorXd::Zero(m);
    grid_.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!grid_.on_boundary(ix)) return;
        for (int c = 0; c < d; ++c) xb[c * n + id] = bc.at(c, id);
    });
    rhs -= coupling_ * xb;
    for (Eigen::Index i = 0; i < m; ++i)
        if (is_boundary_[std::size_t(i)]) rhs[i] = dirichlet_scale_ * xb[i];
    return rhs;
}

StokesSolution StokesOperator::solve(const VectorField& boundary_data,
                                     const VectorField* body_force) const {
    if (!boundary_data.grid.same_layout(grid_)) throw DiscretizationError("boundary data grid mismatch");
    double bscale = 0.0;
    grid_.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!grid_.on_boundary(ix)) return;
        for (int c = 0; c < grid_.dim; ++c) bscale += std::abs(boundary_data.at(c, id));
    });
    if (bscale > 0.0) {
        double defect = std::abs(boundary_flux(boundary_data));
        if (defect > config_.compat_tol * std::max(1.0, bscale))
            throw IncompatibleBoundaryData(
                "boundary data violates discrete incompressibility compatibility (flux defect " +
                std::to_string(defect) + ")");
    }

    Eigen::VectorXd rhs = assemble_rhs(boundary_data, body_force);
    Eigen::VectorXd x = solve_system(rhs);

    const std::int64_t n = grid_.num_nodes();
    const int d = grid_.dim;
    StokesSolution sol;
    sol.omega = omega_;
    sol.u = VectorField(grid_);
    sol.p = ScalarField(grid_);
    for (int c = 0; c < d; ++c)
        for (std::int64_t i = 0; i < n; ++i) sol.u.at(c, i) = x[c * n + i];
    grid_.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!grid_.on_boundary(ix)) return;
        for (int c = 0; c < d; ++c) sol.u.at(c, id) = boundary_data.at(c, id);
    });
    double wsum = 0.0, psum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        sol.p.values[std::size_t(i)] = x[d * n + i];
        wsum += weights_[std::size_t(i)];
        psum += weights_[std::size_t(i)] * x[d * n + i];
    }
    for (std::int64_t i = 0; i < n; ++i) sol.p.values[std::size_t(i)] -= psum / wsum;

    double rnorm = (matrix_ * x - rhs).norm();
    double bnorm = rhs.norm();
    sol.linear_residual = bnorm > 0 ? rnorm / bnorm : rnorm;
    sol.divergence_norm = ops::quad_l2_norm(ops::divergence(sol.u));
    sol.condition_estimate = cond_estimate_;
    sol.near_resonance = false;
    return sol;
}

StokesSolution StokesOperator::solve_adjoint(const VectorField& source) const {
    VectorField zero(grid_);
    return solve(zero, &source);
}

std::vector<double> StokesOperator::mu_pairing(const VectorField& u, const VectorField& v) const {
    if (!u.grid.same_layout(grid_) || !v.grid.same_layout(grid_))
        throw DiscretizationError("mu_pairing grid mismatch");
    return viscous_mu_pairing(quad_, u.values, v.values);
}

StokesSolution solve_stokes(const StokesProblem& prob) {
    StokesOperator op(prob.grid, prob.mu, prob.omega, prob.config);
    return op.solve(prob.boundary_data, prob.body_force ? &*prob.body_force : nullptr);
}

VectorField solve_elasticity(const ElasticityProblem& prob) {
    const Grid& g = prob.grid;
    if (!prob.mu.grid.same_layout(g) || !prob.lambda.grid.same_layout(g))
        throw DiscretizationError("coefficient grid mismatch");
    check_mu(prob.mu, prob.config.mu_min);
    if (prob.lambda.min() <= 0.0)
        throw ContrastViolation("lambda must be strictly positive");

    const std::int64_t n = g.num_nodes();
    const int d = g.dim;
    auto w = ops::trap_weights(g);
    QuadratureOperators q = build_quadrature_ops(g);
    SpMat v = viscous_stiffness(q, prob.mu.values);
    SpMat grad_div = grad_div_stiffness(q, prob.lambda.values);

    std::vector<Trip> trips;
    for (int col = 0; col < v.outerSize(); ++col)
        for (SpMat::InnerIterator it(v, col); it; ++it)
            trips.emplace_back(it.row(), it.col(), -it.value());
    for (int col = 0; col < grad_div.outerSize(); ++col)
        for (SpMat::InnerIterator it(grad_div, col); it; ++it)
            trips.emplace_back(it.row(), it.col(), -it.value());
    for (int c = 0; c < d; ++c)
        for (std::int64_t i = 0; i < n; ++i)
            trips.emplace_back(c * n + i, c * n + i, prob.omega * prob.omega * w[std::size_t(i)]);
    SpMat k(d * n, d * n);
    k.setFromTriplets(trips.begin(), trips.end());

    std::vector<char> constrained(std::size_t(d * n), 0);
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!g.on_boundary(ix)) return;
        for (int c = 0; c < d; ++c) constrained[std::size_t(c * n + id)] = 1;
    });
    double wbar = 1.0;
    for (int a = 0; a < d; ++a) wbar *= g.h[a];
    auto sys = eliminate(k, constrained, wbar / mean_h_sq(g));
    sys.matrix.makeCompressed();
    Eigen::SparseLU<SpMat> lu(sys.matrix);
    if (lu.info() != Eigen::Success) throw SingularSystem("elasticity factorization failed");

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d * n);
    if (prob.body_force)
        for (int c = 0; c < d; ++c)
            for (std::int64_t i = 0; i < n; ++i)
                if (!constrained[std::size_t(c * n + i)])
                    rhs[c * n + i] = w[std::size_t(i)] * prob.body_force->at(c, i);
    Eigen::VectorXd xb = Eigen::VectorXd::Zero(d * n);
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!g.on_boundary(ix)) return;
        for (int c = 0; c < d; ++c) xb[c * n + id] = prob.boundary_data.at(c, id);
    });
    rhs -= sys.coupling * xb;
    for (Eigen::Index i = 0; i < d * n; ++i)
        if (constrained[std::size_t(i)]) rhs[i] = sys.scale * xb[i];

    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw SingularSystem("elasticity solve failed");
    double rel = rhs.norm() > 0 ? (sys.matrix * x - rhs).norm() / rhs.norm() : (sys.matrix * x).norm();
    if (rel > 1e-8) throw SingularSystem("elasticity residual too large: " + std::to_string(rel));

    VectorField u(g);
    for (int c = 0; c < d; ++c)
        for (std::int64_t i = 0; i < n; ++i) u.at(c, i) = x[c * n + i];
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!g.on_boundary(ix)) return;
        for (int c = 0; c < d; ++c) u.at(c, id) = prob.boundary_data.at(c, id);
    });
    return u;
}

StokesLimitResult verify_stokes_limit(std::span<const double> lambdas, const ScalarField& mu,
                                      double omega, const VectorField& boundary_data,
                                      SolverConfig config) {
    if (lambdas.size() < 2)
        throw DegenerateInput("need at least two lambda values for a rate");
    std::vector<double> ls(lambdas.begin(), lambdas.end());
    std::sort(ls.begin(), ls.end());
    for (std::size_t i = 1; i < ls.size(); ++i)
        if (ls[i] == ls[i - 1])
            throw DegenerateInput("duplicate lambda values make the slope undefined");
    const double mu_max = mu.max();
    for (double l : ls)
        if (!(2.0 * mu_max < 3.0 * l))
            throw ConfigError("Stokes-limit regime requires 2*max(mu) < 3*min(lambda)");

    const Grid& g = mu.grid;
    StokesSolution stokes = solve_stokes({g, mu, omega, boundary_data, std::nullopt, config});

    auto gap_on = [&](const Grid& grid, const ScalarField& m, const VectorField& bc,
                      const VectorField& ustokes, double lambda) {
        ScalarField lam(grid, lambda);
        VectorField ul = solve_elasticity({grid, lam, m, omega, bc, std::nullopt, config});
        VectorField diff(grid);
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] = ul.values[i] - ustokes.values[i];
        return ops::quad_h1_norm(diff);
    };

    StokesLimitResult res;
    res.lambdas = ls;
    for (double l : ls) res.gaps.push_back(gap_on(g, mu, boundary_data, stokes.u, l));

    // Resolution estimate: repeat the best-resolved (smallest-lambda) gap on
    // the half grid. Its relative change under refinement serves as a
    // per-gap relative error estimate, applied to the smallest gap.
    if (g.cells[0] % 2 == 0 && g.cells[0] >= 8) {
        Index3 half = {g.cells[0] / 2, g.cells[1] / 2, g.dim == 3 ? g.cells[2] / 2 : 1};
        Grid gh = Grid::make(g.dim, half, g.extent);
        ScalarField mu_h = ops::restrict_to(mu, gh);
        VectorField bc_h = ops::restrict_to(boundary_data, gh);
        StokesSolution st_h = solve_stokes({gh, mu_h, omega, bc_h, std::nullopt, config});
        double gap_h = gap_on(gh, mu_h, bc_h, st_h.u, ls.front());
        double rel = std::abs(gap_h - res.gaps.front()) / std::max(res.gaps.front(), 1e-300);
        double min_gap = *std::min_element(res.gaps.begin(), res.gaps.end());
        res.discretization_error_estimate = rel * min_gap;
        if (min_gap < 10.0 * res.discretization_error_estimate)
            throw InsufficientResolution(
                "lambda gaps fall below 10x the discretization error estimate");
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        lx.push_back(std::log(ls[i]));
        ly.push_back(std::log(res.gaps[i]));
    }
    res.slope = lstsq_slope(lx, ly);
    res.low_confidence = ls.size() < 3;
    return res;
}

}  // namespace mre
