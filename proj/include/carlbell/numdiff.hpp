#pragma once

// Finite-difference helpers used by the concavity and degeneracy checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

namespace carlbell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Step used for every central difference: max(1e-5, 1e-5 |coordinate|).
inline double fd_step(double coordinate) { return std::max(1e-5, 1e-5 * std::abs(coordinate)); }

/// Central-difference Jacobian of a gradient field with per-coordinate steps, symmetrized.
template <int N, class Grad>
Eigen::Matrix<double, N, N> hessian_from_gradient(Grad&& grad, const Eigen::Matrix<double, N, 1>& x,
                                                  const Eigen::Matrix<double, N, 1>& steps) {
  Eigen::Matrix<double, N, N> h;
  for (int j = 0; j < N; ++j) {
    const double step = steps(j);
    Eigen::Matrix<double, N, 1> xp = x;
    Eigen::Matrix<double, N, 1> xm = x;
    xp(j) += step;
    xm(j) -= step;
    h.col(j) = (grad(xp) - grad(xm)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

/// Same with the default step fd_step(x_j) in every coordinate.
template <int N, class Grad>
Eigen::Matrix<double, N, N> hessian_from_gradient(Grad&& grad, const Eigen::Matrix<double, N, 1>& x) {
  return hessian_from_gradient<N>(std::forward<Grad>(grad), x, x.unaryExpr([](double c) { return fd_step(c); }).eval());
}

/// Central-difference gradient of a scalar field.
template <int N, class F>
Eigen::Matrix<double, N, 1> gradient_fd(F&& f, const Eigen::Matrix<double, N, 1>& x, double rel_step = 1e-6) {
  Eigen::Matrix<double, N, 1> g;
  for (int j = 0; j < N; ++j) {
    const double step = std::max(rel_step, rel_step * std::abs(x(j)));
    Eigen::Matrix<double, N, 1> xp = x;
    Eigen::Matrix<double, N, 1> xm = x;
    xp(j) += step;
    xm(j) -= step;
    g(j) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

/// Full second-order central differences of a scalar field (no analytic gradient available).
template <int N, class F>
Eigen::Matrix<double, N, N> hessian_fd_scalar(F&& f, const Eigen::Matrix<double, N, 1>& x, double rel_step = 1e-4) {
  Eigen::Matrix<double, N, N> h;
  const double f0 = f(x);
  for (int i = 0; i < N; ++i) {
    const double hi = std::max(rel_step, rel_step * std::abs(x(i)));
    Eigen::Matrix<double, N, 1> xp = x;
    Eigen::Matrix<double, N, 1> xm = x;
    xp(i) += hi;
    xm(i) -= hi;
    h(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (hi * hi);
    for (int j = i + 1; j < N; ++j) {
      const double hj = std::max(rel_step, rel_step * std::abs(x(j)));
      auto shifted = [&](double si, double sj) {
        Eigen::Matrix<double, N, 1> y = x;
        y(i) += si;
        y(j) += sj;
        return f(y);
      };
      const double v = (shifted(hi, hj) - shifted(hi, -hj) - shifted(-hi, hj) + shifted(-hi, -hj)) / (4.0 * hi * hj);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

template <int N>
Eigen::Matrix<double, N, 1> symmetric_eigenvalues(const Eigen::Matrix<double, N, N>& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace carlbell
