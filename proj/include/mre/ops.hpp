#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "mre/fields.hpp"

namespace mre::ops {

using SpMat = Eigen::SparseMatrix<double>;

/// Second-order first derivative along `axis`: centered in the interior,
/// one-sided three-point at the two boundary planes.
std::vector<double> axis_derivative(const Grid& grid, const std::vector<double>& nodal, int axis);

SymTensorField sym_grad(const VectorField& u);
ScalarField divergence(const VectorField& u);

/// 3D vector curl. Throws DiscretizationError for dim != 3.
VectorField curl(const VectorField& u);

/// 2D scalar rotation d1 u2 - d2 u1. Throws for dim != 2.
ScalarField rot(const VectorField& u);

/// N x N sparse matrix realizing axis_derivative.
SpMat deriv_matrix(const Grid& grid, int axis);

/// Trapezoidal quadrature weights, one per node (h^d times 1/2 per
/// boundary-coincident axis).
std::vector<double> trap_weights(const Grid& grid);

/// Compact (5/7-point) weak-form Laplacian sum_faces w_f (Df p)(Df q),
/// assembled from forward differences on cell edges. SPD up to the
/// constant null vector; used for pressure stabilization.
SpMat compact_laplacian(const Grid& grid);

double quad_l2_norm(const ScalarField& f);
double quad_l2_norm(const VectorField& f);
/// sqrt( ||f||_L2^2 + ||grad f||_L2^2 ) with stencil gradients.
double quad_h1_norm(const ScalarField& f);
double quad_h1_norm(const VectorField& f);

double dot(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b);

/// Pointwise restriction from a grid refined by an integer factor
/// (fine nodes coincide with coarse nodes at multiples of the factor).
ScalarField restrict_to(const ScalarField& fine, const Grid& coarse);
VectorField restrict_to(const VectorField& fine, const Grid& coarse);

/// L2 norm over interior nodes at least `layer` cells from the boundary.
double interior_l2_norm(const ScalarField& f, int layer);
double interior_l2_norm(const VectorField& f, int layer);

}  // namespace mre::ops
