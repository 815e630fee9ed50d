#include "ccd/harness.hpp"

#include "ccd/krylov.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

namespace ccd {

namespace {

using Complex = std::complex<double>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// |k| / Nyquist for FFT bin j of an n-point transform.
double normalized_wavenumber(Index j, Index n) {
  const Index k = std::min(j, n - j);
  return static_cast<double>(k) / (0.5 * static_cast<double>(n));
}

void fft_rows(CMatrix& grid, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<std::size_t>(grid.cols()));
  std::vector<Complex> out;
  for (Index r = 0; r < grid.rows(); ++r) {
    for (Index c = 0; c < grid.cols(); ++c) in[static_cast<std::size_t>(c)] = grid(r, c);
    if (inverse) {
      fft.inv(out, in);
    } else {
      fft.fwd(out, in);
    }
    for (Index c = 0; c < grid.cols(); ++c) grid(r, c) = out[static_cast<std::size_t>(c)];
  }
}

void fft2(CMatrix& grid, bool inverse) {
  fft_rows(grid, inverse);
  if (grid.rows() > 1) {
    CMatrix t = grid.transpose();
    fft_rows(t, inverse);
    grid = t.transpose();
  }
}

double population_std(const Vector& x) {
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().mean());
}

}  // namespace

Vector make_noise(const GridShape& shape, const NoiseSpec& spec, const Vector& clean) {
  if (shape.nx < 1 || shape.ny < 1) throw ParameterError("noise: grid dimensions must be >= 1");
  if (clean.size() != shape.size()) throw_dimension_error("noise: clean signal", shape.size(), clean.size());
  if (!(spec.sigma_rel >= 0.0)) throw ParameterError("noise: sigma_rel must be >= 0");
  if (!(spec.mute_fraction >= 0.0)) throw ParameterError("noise: mute_fraction must be >= 0");
  const double amplitude = clean.cwiseAbs().maxCoeff();
  if (amplitude == 0.0) throw ParameterError("noise: clean signal is all zeros, amplitude undefined");

  const Index n = shape.size();
  if (spec.mute_fraction >= 1.0 || spec.sigma_rel == 0.0) return Vector::Zero(n);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector noise(n);
  for (Index i = 0; i < n; ++i) noise[i] = gauss(rng);

  if (spec.mute_fraction > 0.0) {
    CMatrix grid(shape.ny, shape.nx);
    for (Index i = 0; i < n; ++i) grid(i / shape.nx, i % shape.nx) = noise[i];
    fft2(grid, false);
    for (Index ky = 0; ky < shape.ny; ++ky) {
      const double wy = shape.is_2d() ? normalized_wavenumber(ky, shape.ny) : 0.0;
      for (Index kx = 0; kx < shape.nx; ++kx) {
        const double w = std::max(wy, normalized_wavenumber(kx, shape.nx));
        if (w < spec.mute_fraction) grid(ky, kx) = 0.0;
      }
    }
    fft2(grid, true);
    for (Index i = 0; i < n; ++i) noise[i] = grid(i / shape.nx, i % shape.nx).real();
  }

  const double std_now = population_std(noise);
  if (std_now == 0.0) return Vector::Zero(n);
  return noise * (spec.sigma_rel * amplitude / std_now);
}

Vector spikes_truth(Index n) {
  if (n < 16) throw ParameterError("spikes_truth: n must be >= 16");
  Vector u = Vector::Zero(n);
  for (std::size_t s = 0; s < 5; ++s) {
    const auto idx = static_cast<Index>(std::llround(kSpikePositions[s] * static_cast<double>(n)));
    u[idx] = kSpikeValues[s];
  }
  return u;
}

Vector blocky_truth(Index n_side) {
  if (n_side < 10) throw ParameterError("blocky_truth: n_side must be >= 10");
  struct Plateau {
    double row0, row1, col0, col1, value;
  };
  static constexpr Plateau kPlateaus[] = {
      {0.15, 0.45, 0.20, 0.55, 1.0},
      {0.55, 0.85, 0.15, 0.40, -0.6},
      {0.50, 0.80, 0.60, 0.85, 0.7},
  };
  const auto at = [n_side](double frac) {
    return static_cast<Index>(std::llround(frac * static_cast<double>(n_side)));
  };
  Vector u = Vector::Zero(n_side * n_side);
  for (const auto& p : kPlateaus) {
    for (Index r = at(p.row0); r < at(p.row1); ++r) {
      for (Index c = at(p.col0); c < at(p.col1); ++c) u[r * n_side + c] = p.value;
    }
  }
  return u;
}

double ConditionEstimate::normal() const {
  if (singular) return std::numeric_limits<double>::infinity();
  return lambda_max / lambda_min;
}

double ConditionEstimate::operator_ratio() const { return std::sqrt(normal()); }

namespace {

constexpr double kSingularRatio = 1e-14;
constexpr Index kLanczosMaxSteps = 3000;

// Extreme Ritz values of F^T F from Lanczos with full reorthogonalization.
// Runs until the smallest Ritz value settles or the Krylov space is exhausted.
std::pair<double, double> lanczos_extremes(const StackedOperator& f, Index max_steps) {
  const Index n = f.n_in();
  std::mt19937_64 rng(0xc0ffee);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix v(n, std::min(n, max_steps));
  Vector q(n);
  for (Index i = 0; i < n; ++i) q[i] = unit(rng);
  q.normalize();
  std::vector<double> alpha;
  std::vector<double> beta;
  double lo = 0.0;
  double hi = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < v.cols(); ++k) {
    v.col(k) = q;
    Vector w = f.apply_adjoint(f.apply(q));
    alpha.push_back(q.dot(w));
    for (int pass = 0; pass < 2; ++pass) w -= v.leftCols(k + 1) * (v.leftCols(k + 1).transpose() * w);
    const double b = w.norm();
    const bool exhausted = !(b > 1e-12 * std::abs(alpha.front()));
    if (exhausted || (k + 1) % 10 == 0 || k + 1 == v.cols()) {
      const Index m = k + 1;
      Vector diag = Eigen::Map<const Vector>(alpha.data(), m);
      Vector sub = m > 1 ? Vector(Eigen::Map<const Vector>(beta.data(), m - 1)) : Vector(0);
      Eigen::SelfAdjointEigenSolver<Matrix> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
      lo = tri.eigenvalues().minCoeff();
      hi = tri.eigenvalues().maxCoeff();
      if (exhausted || std::abs(lo - previous) <= 1e-9 * std::abs(hi)) break;
      previous = lo;
    }
    beta.push_back(b);
    q = w / b;
  }
  return {std::max(lo, 0.0), hi};
}

}  // namespace

ConditionEstimate estimate_condition(const StackedOperator& f_op, int n_power_iters) {
  if (n_power_iters < 10) throw ParameterError("estimate_condition: n_power_iters must be >= 10");
  ConditionEstimate est;

  if (f_op.n_in() <= kDenseConditionLimit) {
    const Matrix f = materialize(f_op.as_operator());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(f.transpose() * f, Eigen::EigenvaluesOnly);
    est.lambda_max = eig.eigenvalues().maxCoeff();
    est.lambda_min = std::max(eig.eigenvalues().minCoeff(), 0.0);
  } else {
    const auto [lo, hi] = lanczos_extremes(f_op, kLanczosMaxSteps);
    est.lambda_max = std::max(largest_gram_eigenvalue(f_op.as_operator(), n_power_iters), hi);
    est.lambda_min = lo;
  }
  est.singular = !(est.lambda_max > 0.0) || est.lambda_min <= kSingularRatio * est.lambda_max;
  return est;
}

double relative_error(const Vector& u, const Vector& truth) {
  if (u.size() != truth.size()) throw_dimension_error("relative_error", truth.size(), u.size());
  const double base = truth.norm();
  if (base == 0.0) throw ParameterError("relative_error: reference model is identically zero");
  return (u - truth).norm() / base;
}

}  // namespace ccd
