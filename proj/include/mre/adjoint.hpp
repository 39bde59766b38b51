#pragma once

#include <optional>
#include <vector>

#include "mre/stokes.hpp"

namespace mre {

struct InverseProblem {
    Grid grid;
    double omega = 1.0;
    std::vector<VectorField> boundary_data;   ///< one channel in 2D, up to two in 3D
    std::vector<VectorField> measured;        ///< same length as boundary_data
    ScalarField mu_boundary;                  ///< field whose boundary trace is the known mu trace
    double mu_lo = 1e-3;
    double mu_hi = 1e3;
    SolverConfig solver;
    std::optional<ScalarField> mu_true;       ///< enables error-norm columns in the trace
    double epsilon = 0.01;                    ///< order of the H^{1/2+eps} error norm

    void validate() const;
};

struct IterationRecord {
    int n = 0;
    double j = 0.0;
    double sigma = 0.0;
    double grad_norm = 0.0;
    double err_l2 = -1.0;     ///< ||mu_n - mu_true||_L2, -1 when truth unknown
    double err_hs = -1.0;     ///< same in H^{1/2+eps}
};

enum class RunStatus { Converged, MaxIterations, Stalled };

struct ReconstructionTrace {
    std::vector<IterationRecord> records;
    std::vector<std::pair<int, ScalarField>> snapshots;
    ScalarField mu_final;
    RunStatus status = RunStatus::MaxIterations;
};

/// J(mu) = 1/2 sum_channels ||u(mu) - u_m||_L2^2 by trapezoid quadrature.
double evaluate_J(const ScalarField& mu, const InverseProblem& ip);

/// Nodal Frechet-derivative field of J: the exact discrete gradient of the
/// quadrature functional, converted from its dual vector by the quadrature
/// weights and zeroed on boundary nodes (the mu trace is fixed).
ScalarField gradient_J(const ScalarField& mu, const InverseProblem& ip);

/// Safeguarded Landweber iteration mu <- clip(mu - sigma * DJ) with the
/// boundary trace reimposed each step. sigma halves whenever J would
/// increase and recovers x1.2 after five accepted steps (capped at sigma0).
ReconstructionTrace landweber_run(const InverseProblem& ip, const ScalarField& mu0, double sigma,
                                  int n_max, double stop_tol, int snapshot_stride = 0);

}  // namespace mre
