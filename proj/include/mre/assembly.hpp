#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "mre/fields.hpp"

namespace mre {

/// Multilinear (Q1) element operators sampled at 2^d Gauss points per cell.
/// Strain rows are grouped component-major: row = comp * ngp + gp, with the
/// component order of SymTensorField.
struct QuadratureOperators {
    Eigen::SparseMatrix<double> strain;   ///< (ncomp*ngp) x (d*N)
    Eigen::SparseMatrix<double> div;      ///< ngp x (d*N)
    Eigen::SparseMatrix<double> interp;   ///< ngp x N, nodal -> Gauss values
    /// One-point (cell center) divergence and interpolation, used for the
    /// grad-div term so the Q1 space does not lock as lambda grows.
    Eigen::SparseMatrix<double> div_center;     ///< ncells x (d*N)
    Eigen::SparseMatrix<double> interp_center;  ///< ncells x N
    std::vector<double> weights;          ///< ngp quadrature weights
    std::vector<double> cell_volume;      ///< ncells center-rule weights
    std::vector<double> pair_weight;      ///< ncomp entries: 1 diagonal, 2 shear
    int ngp = 0;
    int ncomp = 0;
};

QuadratureOperators build_quadrature_ops(const Grid& grid);

/// Viscous stiffness 2 (mu grad^s u, grad^s phi): (d*N)^2, SPSD.
Eigen::SparseMatrix<double> viscous_stiffness(const QuadratureOperators& q,
                                              const std::vector<double>& mu_nodal);

/// Pressure coupling (p, div phi): (d*N) x N.
Eigen::SparseMatrix<double> pressure_coupling(const QuadratureOperators& q);

/// grad-div stiffness (lambda div u, div phi): (d*N)^2.
Eigen::SparseMatrix<double> grad_div_stiffness(const QuadratureOperators& q,
                                               const std::vector<double>& lambda_nodal);

/// Nodal dual vector g with sum_i g_i dmu_i = 2 (dmu grad^s u, grad^s v);
/// the mu-derivative of the viscous energy pairing.
std::vector<double> viscous_mu_pairing(const QuadratureOperators& q,
                                       const std::vector<double>& u_dofs,
                                       const std::vector<double>& v_dofs);

}  // namespace mre
