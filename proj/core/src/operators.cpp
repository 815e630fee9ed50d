#include "ccd/operators.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace ccd {

LinearOperator dense_operator(Matrix matrix, std::string name) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw ParameterError(name + ": matrix must have at least one row and one column");
  }
  if (!matrix.allFinite()) throw ParameterError(name + ": matrix has non-finite entries");
  auto shared = std::make_shared<const Matrix>(std::move(matrix));
  const Index rows = shared->rows();
  const Index cols = shared->cols();
  return LinearOperator(
      std::move(name), cols, rows, [shared](const Vector& x) -> Vector { return *shared * x; },
      [shared](const Vector& y) -> Vector { return shared->transpose() * y; });
}

LinearOperator identity_operator(Index n) {
  if (n < 1) throw ParameterError("identity: n must be >= 1");
  return LinearOperator(
      "identity", n, n, [](const Vector& x) { return x; }, [](const Vector& y) { return y; });
}

LinearOperator diff1d(Index n) {
  if (n < 2) throw ParameterError("diff1d: n must be >= 2, got " + std::to_string(n));
  auto forward = [n](const Vector& u) -> Vector {
    return u.tail(n - 1) - u.head(n - 1);
  };
  auto adjoint = [n](const Vector& z) -> Vector {
    Vector out = Vector::Zero(n);
    out.head(n - 1) -= z;
    out.tail(n - 1) += z;
    return out;
  };
  return LinearOperator("diff1d", n, n - 1, forward, adjoint);
}

LinearOperator grad2d_aniso(Index nx, Index ny) {
  if (nx < 2 || ny < 2) {
    throw ParameterError("grad2d_aniso: grid must be at least 2x2, got " + std::to_string(ny) +
                         "x" + std::to_string(nx));
  }
  const Index n = nx * ny;
  const Index n_dx = ny * (nx - 1);
  const Index n_dy = nx * (ny - 1);

  auto forward = [=](const Vector& u) -> Vector {
    Vector out(n_dx + n_dy);
    for (Index iy = 0; iy < ny; ++iy) {
      for (Index ix = 0; ix + 1 < nx; ++ix) {
        out[iy * (nx - 1) + ix] = u[iy * nx + ix + 1] - u[iy * nx + ix];
      }
    }
    for (Index iy = 0; iy + 1 < ny; ++iy) {
      for (Index ix = 0; ix < nx; ++ix) {
        out[n_dx + iy * nx + ix] = u[(iy + 1) * nx + ix] - u[iy * nx + ix];
      }
    }
    return out;
  };
  auto adjoint = [=](const Vector& z) -> Vector {
    Vector out = Vector::Zero(n);
    for (Index iy = 0; iy < ny; ++iy) {
      for (Index ix = 0; ix + 1 < nx; ++ix) {
        const double g = z[iy * (nx - 1) + ix];
        out[iy * nx + ix + 1] += g;
        out[iy * nx + ix] -= g;
      }
    }
    for (Index iy = 0; iy + 1 < ny; ++iy) {
      for (Index ix = 0; ix < nx; ++ix) {
        const double g = z[n_dx + iy * nx + ix];
        out[(iy + 1) * nx + ix] += g;
        out[iy * nx + ix] -= g;
      }
    }
    return out;
  };
  return LinearOperator("grad2d_aniso", n, n_dx + n_dy, forward, adjoint);
}

namespace {

void check_kernel_params(const KernelParams& p, const char* who) {
  if (!(p.depth > 0.0)) throw ParameterError(std::string(who) + ": depth must be positive");
  if (!(p.length > 0.0)) throw ParameterError(std::string(who) + ": length must be positive");
  if (!std::isfinite(p.scale)) throw ParameterError(std::string(who) + ": scale must be finite");
}

double point_response(double depth, double dist2) {
  const double r2 = depth * depth + dist2;
  return depth / (r2 * std::sqrt(r2));
}

}  // namespace

Matrix dilat1d_matrix(Index n_model, Index n_data, const KernelParams& params) {
  check_kernel_params(params, "dilat1d_kernel");
  if (n_model < 1 || n_data < 1) throw ParameterError("dilat1d_kernel: grid sizes must be >= 1");
  const double dxi = params.length / static_cast<double>(n_model);
  const double dz = params.length / static_cast<double>(n_data);
  Matrix k(n_data, n_model);
  for (Index j = 0; j < n_model; ++j) {
    const double xi = (static_cast<double>(j) + 0.5) * dxi;
    for (Index i = 0; i < n_data; ++i) {
      const double z = (static_cast<double>(i) + 0.5) * dz;
      k(i, j) = params.scale * dxi * point_response(params.depth, (z - xi) * (z - xi));
    }
  }
  return k;
}

LinearOperator dilat1d_kernel(Index n_model, Index n_data, const KernelParams& params) {
  return dense_operator(dilat1d_matrix(n_model, n_data, params), "dilat1d");
}

Matrix reservoir2d_matrix(Index n_side, const KernelParams& params) {
  check_kernel_params(params, "reservoir2d_kernel");
  if (n_side < 1) throw ParameterError("reservoir2d_kernel: n_side must be >= 1");
  const double h = 2.0 * params.length / static_cast<double>(n_side);
  const double weight = params.scale * h * h;
  // Translation invariance: tabulate the response once per index offset.
  const Index span = 2 * n_side - 1;
  Matrix table(span, span);
  for (Index dy = 0; dy < span; ++dy) {
    for (Index dx = 0; dx < span; ++dx) {
      const double ox = static_cast<double>(dx - (n_side - 1)) * h;
      const double oy = static_cast<double>(dy - (n_side - 1)) * h;
      table(dy, dx) = weight * point_response(params.depth, ox * ox + oy * oy);
    }
  }

  const Index n = n_side * n_side;
  Matrix k(n, n);
  for (Index sy = 0; sy < n_side; ++sy) {
    for (Index sx = 0; sx < n_side; ++sx) {
      const Index col = sy * n_side + sx;
      for (Index ry = 0; ry < n_side; ++ry) {
        for (Index rx = 0; rx < n_side; ++rx) {
          k(ry * n_side + rx, col) = table(ry - sy + n_side - 1, rx - sx + n_side - 1);
        }
      }
    }
  }
  return k;
}

LinearOperator reservoir2d_kernel(Index n_side, const KernelParams& params) {
  return dense_operator(reservoir2d_matrix(n_side, params), "reservoir2d");
}

}  // namespace ccd
