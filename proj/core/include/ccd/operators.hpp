#pragma once

#include "ccd/linear_operator.hpp"

namespace ccd {

/// Dense matrix-vector product; the matrix is shared, not copied, between operator copies.
LinearOperator dense_operator(Matrix matrix, std::string name = "dense");

LinearOperator identity_operator(Index n);

/// First-order forward differences, (Bu)_i = u_{i+1} - u_i, mapping R^n to R^{n-1}.
LinearOperator diff1d(Index n);

/// Anisotropic 2D gradient on a row-major ny x nx grid.
///
/// Output holds all x-differences (ny*(nx-1), row-major) followed by all
/// y-differences (nx*(ny-1), row-major), so K = 2*nx*ny - nx - ny.
LinearOperator grad2d_aniso(Index nx, Index ny);

/// Midpoint-rule parameters shared by the two surface-displacement kernels.
struct KernelParams {
  double depth = 0.1;      ///< D, km
  double length = 2.0;     ///< A, km (segment length in 1D, half width in 2D)
  double scale = 1e-2;     ///< c
};

/// Vertical surface displacement from a line of dilatational sources at depth D.
///
/// Both model (xi) and data (z) live on uniform midpoint grids over [0, A];
/// entry(i, j) = c * D * dxi / (D^2 + (z_i - xi_j)^2)^{3/2}.
Matrix dilat1d_matrix(Index n_model, Index n_data, const KernelParams& params);
LinearOperator dilat1d_kernel(Index n_model, Index n_data, const KernelParams& params);

/// Surface displacement from a planar pressure distribution at depth D.
///
/// Model and data are n_side x n_side row-major grids on [-A, A]^2 (x along
/// columns); entry = c * D * dxi * deta / (D^2 + (x-xi)^2 + (y-eta)^2)^{3/2}.
Matrix reservoir2d_matrix(Index n_side, const KernelParams& params);
LinearOperator reservoir2d_kernel(Index n_side, const KernelParams& params);

}  // namespace ccd
