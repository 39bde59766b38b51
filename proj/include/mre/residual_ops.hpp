#pragma once

#include <Eigen/SparseCore>
#include <optional>
#include <vector>

#include "mre/fields.hpp"
#include "mre/stokes.hpp"

namespace mre {

/// Linear action mu -> A_* mu built from a background velocity field:
/// (d1, -d2) . (2 div(mu grad^s u1)) in 2D, curl(2 div(mu grad^s u1)) per
/// channel in 3D. `augmented` appends Dirichlet trace rows for the boundary
/// mu nodes, with the operator block scaled by h^3 to balance the
/// third-order stencil growth.
struct LinearizedMap {
    Grid grid;
    double omega = 1.0;
    int channels = 1;
    Eigen::SparseMatrix<double> op;         ///< (channels * rows) x N
    Eigen::SparseMatrix<double> augmented;  ///< op (scaled) + boundary rows
};

LinearizedMap make_linearized_map(const VectorField& u1, double omega);
LinearizedMap make_linearized_map(const VectorField& u1, const VectorField& u1t, double omega);

/// A_* mu, stacked channel-major (2D: N values; 3D: 3N per channel).
std::vector<double> apply_A(const LinearizedMap& map, const ScalarField& mu);

struct IdentityStudy {
    double coarse_residual = 0.0;
    double fine_residual = 0.0;
    double order = 0.0;
};

/// Checks A_{u1}(mu1 - mu2) = g on the fine grid and its 2x coarsening,
/// where g is rebuilt from the solution difference w = u1 - u2 (and the
/// pressure difference in 2D). Residuals are interior norms over the central
/// quarter of the domain (a margin of three eighths excluded per side).
IdentityStudy verify_identity(const ScalarField& mu1_fine, const ScalarField& mu2_fine,
                              const VectorField& bc_fine, double omega, SolverConfig config = {});

/// ||g||_l / ||w||_{l+3} (2D: l+2) with g formed from w and mu2.
double g_bound_probe(const VectorField& w, const ScalarField& mu2, double l, double omega = 1.0);

struct KernelProbeResult {
    std::vector<double> sigmas;    ///< ascending smallest singular values
    double threshold = 1e-6;
    bool trivial = false;          ///< sigma_1 > threshold * sigma_k
};

/// Smallest k singular values of the augmented map via inverse iteration on
/// A^T A with Rayleigh-Ritz extraction.
KernelProbeResult kernel_probe(const LinearizedMap& map, int k, double threshold = 1e-6);

}  // namespace mre
