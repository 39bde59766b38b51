#pragma once

#include <vector>

#include "mre/fields.hpp"
#include "mre/stokes.hpp"

namespace mre {

struct NormSpec {
    double s = 0.5;          ///< Sobolev order, fractional and negative allowed
    int weight_power = 0;    ///< 0 or -2
    double epsilon = 0.01;

    void validate() const {
        if (std::abs(s) > 4.0) throw ConfigError("norm order |s| must be <= 4");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
    }
};

/// Smoothed distance-to-boundary weight: positive inside, zero on boundary
/// nodes, vanishing linearly at the walls. rho = (sum_a d_a^-4)^(-1/4).
struct BoundaryWeight {
    ScalarField rho;
};

BoundaryWeight make_boundary_weight(const Grid& grid);

/// Spectral H^s norm through the discrete sine transform of the interior
/// values: ||f||_s^2 = sum_k (1 + Lambda_k)^s |c_k|^2 * prod(L_a/2), with
/// Lambda_k the continuous Dirichlet Laplacian eigenvalues of the box.
/// Fractional s requires a (numerically) zero boundary trace.
double h_s_norm(const ScalarField& f, double s);
double h_s_norm(const VectorField& f, double s);

enum class BaseNorm { L2, H1 };

/// Quadrature norm of rho^power * f over nodes at least one cell away from
/// the boundary. Throws UnboundedWeightedField when the weighted values on
/// the first interior layer exceed `cap`.
double weighted_norm(const ScalarField& f, int power, const BoundaryWeight& w,
                     BaseNorm base = BaseNorm::L2, double cap = 1e8);
double weighted_norm(const VectorField& f, int power, const BoundaryWeight& w,
                     BaseNorm base = BaseNorm::L2, double cap = 1e8);

struct StabilityRow {
    int pair_id = 0;
    double amplitude = 0.0;   ///< caller-supplied label, e.g. bump contrast
    double lhs = 0.0;         ///< ||mu1 - mu2||_s
    double rhs = 0.0;         ///< sum of data-difference norms
    double ratio = 0.0;
    bool degenerate = false;  ///< both sides at round-off level
    bool cert_pass = false;   ///< ellipticity certificate on the background
};

struct StabilityResult {
    std::vector<StabilityRow> rows;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
};

/// Empirical stability-constant experiment: for each (mu1, mu2) pair solve
/// the forward problems per excitation channel and compare
/// ||mu1 - mu2||_s against the data-difference norms (order s in 2D,
/// s+1 in 3D, summed over channels).
StabilityResult stability_experiment(const std::vector<std::pair<ScalarField, ScalarField>>& pairs,
                                     const std::vector<VectorField>& excitations, double omega,
                                     const NormSpec& spec,
                                     const std::vector<double>& amplitudes = {},
                                     SolverConfig config = {});

}  // namespace mre
