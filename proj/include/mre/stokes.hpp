#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mre/assembly.hpp"
#include "mre/fields.hpp"
#include "mre/ops.hpp"

namespace mre {

struct SolverConfig {
    double stab_alpha = 1e-2;        ///< pressure stabilization, scaled by h^2
    double condition_cap = 1e12;     ///< NearResonance above this estimate
    bool check_condition = true;
    double compat_tol = 1e-12;       ///< discrete boundary-flux compatibility
    double mu_min = 1e-12;
};

struct StokesProblem {
    Grid grid;
    ScalarField mu;
    double omega = 1.0;
    VectorField boundary_data;                 ///< trace read at boundary nodes
    std::optional<VectorField> body_force;
    SolverConfig config;
};

struct ElasticityProblem {
    Grid grid;
    ScalarField lambda;
    ScalarField mu;
    double omega = 1.0;
    VectorField boundary_data;
    std::optional<VectorField> body_force;
    SolverConfig config;
};

struct StokesSolution {
    VectorField u;
    ScalarField p;
    double omega = 0.0;
    double linear_residual = 0.0;    ///< ||Kx-b|| / ||b||
    double divergence_norm = 0.0;    ///< L2 of the discrete divergence of u
    double condition_estimate = 0.0;
    bool near_resonance = false;
};

/// Assembled + factorized time-harmonic Stokes operator for fixed
/// (grid, mu, omega). The discrete system is symmetric: multilinear element
/// strains for the viscous block, equal-order pressure with compact-stencil
/// stabilization, and one Lagrange multiplier pinning the pressure mean.
/// Symmetry makes the adjoint solve the exact discrete adjoint.
class StokesOperator {
  public:
    StokesOperator(const Grid& grid, const ScalarField& mu, double omega,
                   SolverConfig config = {});

    /// Dirichlet data is read at boundary nodes of `boundary_data`;
    /// `body_force` enters the momentum balance on the right-hand side.
    StokesSolution solve(const VectorField& boundary_data,
                         const VectorField* body_force = nullptr) const;

    /// Adjoint problem of the inverse solver: homogeneous Dirichlet data,
    /// momentum source `source`. Identical operator by symmetry.
    StokesSolution solve_adjoint(const VectorField& source) const;

    const Grid& grid() const { return grid_; }
    double omega() const { return omega_; }
    double condition_estimate() const { return cond_estimate_; }
    const std::vector<double>& quad_weights() const { return weights_; }

    /// Nodal dual g with sum_i g_i dmu_i = 2 (dmu grad^s u, grad^s v), the
    /// mu-derivative of the viscous pairing of two velocity fields.
    std::vector<double> mu_pairing(const VectorField& u, const VectorField& v) const;

  private:
    Grid grid_;
    double omega_;
    SolverConfig config_;
    QuadratureOperators quad_;
    std::vector<double> weights_;
    std::vector<char> is_boundary_;
    Eigen::SparseMatrix<double> matrix_;     // after symmetric Dirichlet elimination
    Eigen::SparseMatrix<double> coupling_;   // column coupling of boundary u-dofs, for RHS lift
    // 2D systems are small enough for SparseLU; in 3D the fill-in exhausts
    // memory well before useful resolutions, so the symmetric factorization
    // is used there instead (the system is symmetric by construction).
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
    double cond_estimate_ = 0.0;
    double dirichlet_scale_ = 1.0;

    Eigen::VectorXd assemble_rhs(const VectorField& bc, const VectorField* f) const;
    Eigen::VectorXd solve_system(const Eigen::VectorXd& rhs) const;
};

StokesSolution solve_stokes(const StokesProblem& prob);
VectorField solve_elasticity(const ElasticityProblem& prob);

/// Discrete compatibility defect: trapezoid quadrature of F.n over the
/// boundary, one contribution per face (corner nodes weighted per face).
double boundary_flux(const VectorField& f);

struct StokesLimitResult {
    std::vector<double> lambdas;
    std::vector<double> gaps;          ///< H1 norms of u_lambda - u_stokes
    double slope = 0.0;                ///< least-squares d log(gap) / d log(lambda)
    bool low_confidence = false;       ///< fewer than three lambda values
    double discretization_error_estimate = 0.0;
};

/// Measures the rate at which elasticity solutions approach the Stokes
/// solution as lambda grows.
StokesLimitResult verify_stokes_limit(std::span<const double> lambdas,
                                      const ScalarField& mu, double omega,
                                      const VectorField& boundary_data,
                                      SolverConfig config = {});

}  // namespace mre
