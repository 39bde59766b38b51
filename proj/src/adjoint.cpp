#include "mre/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "mre/norms.hpp"
#include "mre/ops.hpp"

namespace mre {

namespace {

double half_misfit(const Grid& g, const std::vector<double>& w, const VectorField& u,
                   const VectorField& um) {
    const std::int64_t n = g.num_nodes();
    double acc = 0.0;
    for (int c = 0; c < g.dim; ++c)
        for (std::int64_t i = 0; i < n; ++i) {
            double d = u.at(c, i) - um.at(c, i);
            acc += w[std::size_t(i)] * d * d;
        }
    return 0.5 * acc;
}

ScalarField clip_and_trace(const ScalarField& mu, const InverseProblem& ip) {
    ScalarField out = mu;
    for (double& v : out.values) v = std::clamp(v, ip.mu_lo, ip.mu_hi);
    ip.grid.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (ip.grid.on_boundary(ix))
            out.values[std::size_t(id)] = ip.mu_boundary.values[std::size_t(id)];
    });
    return out;
}

struct ForwardState {
    StokesOperator op;
    std::vector<VectorField> u;
    double j = 0.0;

    ForwardState(const ScalarField& mu, const InverseProblem& ip)
        : op(ip.grid, mu, ip.omega, ip.solver) {
        for (std::size_t ch = 0; ch < ip.boundary_data.size(); ++ch) {
            u.push_back(op.solve(ip.boundary_data[ch]).u);
            j += half_misfit(ip.grid, op.quad_weights(), u.back(), ip.measured[ch]);
        }
    }

    /// Exact discrete gradient field of J, zero on boundary nodes.
    ScalarField gradient(const InverseProblem& ip) const {
        const Grid& g = ip.grid;
        const std::int64_t n = g.num_nodes();
        std::vector<double> dual(std::size_t(n), 0.0);
        for (std::size_t ch = 0; ch < u.size(); ++ch) {
            VectorField res(g);
            for (std::size_t i = 0; i < res.values.size(); ++i)
                res.values[i] = u[ch].values[i] - ip.measured[ch].values[i];
            VectorField v = op.solve_adjoint(res).u;
            auto gch = op.mu_pairing(v, u[ch]);
            for (std::int64_t i = 0; i < n; ++i) dual[std::size_t(i)] += gch[std::size_t(i)];
        }
        ScalarField dj(g);
        const auto& w = op.quad_weights();
        g.for_nodes([&](const Index3& ix, std::int64_t id) {
            if (g.on_boundary(ix)) return;
            dj.values[std::size_t(id)] = dual[std::size_t(id)] / w[std::size_t(id)];
        });
        return dj;
    }
};

}  // namespace

void InverseProblem::validate() const {
    if (boundary_data.empty()) throw MissingData("inverse problem needs at least one measurement channel");
    if (boundary_data.size() != measured.size())
        throw MissingData("boundary data and measured channels must pair up");
    if (boundary_data.size() > 2) throw ConfigError("at most two measurement channels");
    if (!(mu_lo > 0.0)) throw ContrastViolation("mu lower bound must be positive");
    if (!(mu_lo < mu_hi)) throw ConfigError("mu bounds are inverted");
    if (!mu_boundary.grid.same_layout(grid)) throw DiscretizationError("mu trace grid mismatch");
    for (const auto& f : boundary_data)
        if (!f.grid.same_layout(grid)) throw DiscretizationError("boundary data grid mismatch");
    for (const auto& f : measured)
        if (!f.grid.same_layout(grid)) throw DiscretizationError("measured data grid mismatch");
}

double evaluate_J(const ScalarField& mu, const InverseProblem& ip) {
    ip.validate();
    if (mu.min() < ip.mu_lo || mu.max() > ip.mu_hi)
        throw ContrastViolation("mu leaves the admissible bounds");
    return ForwardState(mu, ip).j;
}

ScalarField gradient_J(const ScalarField& mu, const InverseProblem& ip) {
    ip.validate();
    ForwardState st(mu, ip);
    return st.gradient(ip);
}

ReconstructionTrace landweber_run(const InverseProblem& ip, const ScalarField& mu0, double sigma,
                                  int n_max, double stop_tol, int snapshot_stride) {
    ip.validate();
    if (!(sigma > 0.0)) throw ConfigError("step size must be positive");
    const double sigma0 = sigma;
    const double sigma_floor = sigma0 * 1e-8;

    ReconstructionTrace trace;
    ScalarField mu = clip_and_trace(mu0, ip);
    auto state = std::make_unique<ForwardState>(mu, ip);
    int accepted_streak = 0;

    auto record = [&](int n, double grad_norm) {
        IterationRecord rec;
        rec.n = n;
        rec.j = state->j;
        rec.sigma = sigma;
        rec.grad_norm = grad_norm;
        if (ip.mu_true) {
            ScalarField d(ip.grid);
            for (std::size_t i = 0; i < d.values.size(); ++i)
                d.values[i] = mu.values[i] - ip.mu_true->values[i];
            rec.err_l2 = ops::quad_l2_norm(d);
            rec.err_hs = h_s_norm(d, 0.5 + ip.epsilon);
        }
        trace.records.push_back(rec);
        if (snapshot_stride > 0 && n % snapshot_stride == 0) trace.snapshots.emplace_back(n, mu);
    };

    trace.status = RunStatus::MaxIterations;
    for (int n = 0; n < n_max; ++n) {
        ScalarField dj = state->gradient(ip);
        double gnorm = ops::quad_l2_norm(dj);
        record(n, gnorm);
        if (gnorm <= stop_tol) {
            trace.status = RunStatus::Converged;
            break;
        }
        bool stepped = false;
        while (!stepped) {
            ScalarField cand(ip.grid);
            for (std::size_t i = 0; i < cand.values.size(); ++i)
                cand.values[i] = mu.values[i] - sigma * dj.values[i];
            cand = clip_and_trace(cand, ip);
            auto cand_state = std::make_unique<ForwardState>(cand, ip);
            if (cand_state->j <= state->j) {
                mu = std::move(cand);
                state = std::move(cand_state);
                stepped = true;
                if (++accepted_streak >= 5) {
                    sigma = std::min(sigma * 1.2, sigma0);
                    accepted_streak = 0;
                }
            } else {
                sigma *= 0.5;
                accepted_streak = 0;
                if (sigma < sigma_floor) {
                    trace.status = RunStatus::Stalled;
                    break;
                }
            }
        }
        if (trace.status == RunStatus::Stalled) break;
    }
    trace.mu_final = mu;
    if (snapshot_stride > 0) trace.snapshots.emplace_back(int(trace.records.size()), mu);
    return trace;
}

}  // namespace mre
