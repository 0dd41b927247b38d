#pragma once

// Small complex matrix kernel for one- and two-qubit operators.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>

#include "sepbell/config.hpp"

namespace sepbell {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Ket4 = Eigen::Vector4cd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Side { first, second };

namespace pauli {

inline Mat2 identity() { return Mat2::Identity(); }

inline Mat2 x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Mat2 y() {
  Mat2 m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

inline Mat2 z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

// sigma_0..sigma_3 = (1, x, y, z)
inline Mat2 sigma(int mu) {
  switch (mu) {
    case 0: return identity();
    case 1: return x();
    case 2: return y();
    default: return z();
  }
}

}  // namespace pauli

/// kron(a, b)(2i+k, 2j+l) = a(i,j) * b(k,l)
inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

/// max |M - M^dagger| entrywise.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending, eigenvectors in matching columns.
template <int N>
struct SymmetricEigen {
  std::array<double, N> values{};
  Eigen::Matrix<double, N, N> vectors;
  int sweeps = 0;
};

template <int N>
SymmetricEigen<N> jacobi_symmetric(Eigen::Matrix<double, N, N> a, int max_sweeps = 100) {
  using MatN = Eigen::Matrix<double, N, N>;
  MatN v = MatN::Identity();
  const double threshold = 1e-13 * std::max(1.0, a.norm());

  auto off_norm = [&a] {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() >= threshold; ++sweep) {
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < N; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < N; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (off_norm() >= threshold)
    throw Error(ErrorKind::NumericalFailure, "Jacobi eigensolver did not converge", off_norm());

  std::array<int, N> order;
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&a](int i, int j) { return a(i, i) < a(j, j); });

  SymmetricEigen<N> out;
  out.sweeps = sweep;
  for (int k = 0; k < N; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Spectrum of a Hermitian N x N matrix. `residual` is max ||Mv - lambda v||
/// over the reported pairs.
template <int N>
struct Spectrum {
  std::array<double, N> eigenvalues{};
  Eigen::Matrix<cplx, N, N> eigenvectors;
  double residual = 0.0;

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

/// Hermitian eigenproblem through the real symmetric embedding
/// [[Re, -Im], [Im, Re]], whose spectrum is that of M with every eigenvalue
/// doubled. Each embedded eigenvector (u, v) maps to the complex eigenvector
/// u + iv; within a degenerate cluster these images are linearly dependent,
/// so N independent ones are extracted by pivoted Gram-Schmidt.
template <int N>
Spectrum<N> hermitian_eigen(const Eigen::Matrix<cplx, N, N>& m, const Tolerances& tol = {}) {
  if (!m.allFinite()) throw Error(ErrorKind::NumericalFailure, "matrix has non-finite entries");
  const double defect = hermiticity_defect(m);
  if (defect > tol.hermiticity)
    throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian", defect);

  constexpr int M = 2 * N;
  Eigen::Matrix<double, M, M> embed;
  const Eigen::Matrix<double, N, N> re = m.real(), im = m.imag();
  embed << re, -im, im, re;
  embed = 0.5 * (embed + embed.transpose()).eval();

  const auto sym = jacobi_symmetric<M>(embed);

  using CVec = Eigen::Matrix<cplx, N, 1>;
  std::array<CVec, M> candidates;
  for (int k = 0; k < M; ++k) {
    for (int i = 0; i < N; ++i) candidates[k](i) = cplx(sym.vectors(i, k), sym.vectors(N + i, k));
  }

  std::array<bool, M> used{};
  std::array<CVec, N> accepted;
  for (int slot = 0; slot < N; ++slot) {
    int best = -1;
    double best_norm = -1.0;
    CVec best_vec;
    for (int k = 0; k < M; ++k) {
      if (used[k]) continue;
      CVec w = candidates[k];
      for (int j = 0; j < slot; ++j) w -= accepted[j].dot(w) * accepted[j];
      const double n = w.norm();
      if (n > best_norm) {
        best_norm = n;
        best = k;
        best_vec = w;
      }
    }
    used[best] = true;
    accepted[slot] = best_vec / best_norm;
  }

  std::array<std::pair<double, int>, N> rayleigh;
  for (int k = 0; k < N; ++k)
    rayleigh[k] = {accepted[k].dot(m * accepted[k]).real(), k};
  std::sort(rayleigh.begin(), rayleigh.end());

  Spectrum<N> out;
  for (int k = 0; k < N; ++k) {
    // Paired values of the embedding carry the eigenvalue twice; their mean
    // is the reported value.
    out.eigenvalues[k] = 0.5 * (sym.values[2 * k] + sym.values[2 * k + 1]);
    out.eigenvectors.col(k) = accepted[rayleigh[k].second];
  }
  for (int k = 0; k < N; ++k) {
    const CVec v = out.eigenvectors.col(k);
    out.residual = std::max(out.residual, (m * v - out.eigenvalues[k] * v).norm());
  }
  return out;
}

/// Transposes the chosen tensor factor: (ik|jl) -> (jk|il) for the first,
/// (ik|jl) -> (il|jk) for the second.
inline Mat4 partial_transpose(const Mat4& m, Side side) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          const int row = 2 * i + k, col = 2 * j + l;
          if (side == Side::first)
            out(2 * j + k, 2 * i + l) = m(row, col);
          else
            out(2 * i + l, 2 * j + k) = m(row, col);
        }
  return out;
}

/// Tr[rho obs] with the imaginary part kept as a diagnostic.
struct TraceProduct {
  double value = 0.0;
  double imag = 0.0;
};

inline TraceProduct trace_product(const Mat4& rho, const Mat4& obs) {
  const cplx t = (rho * obs).trace();
  return {t.real(), t.imag()};
}

inline double expectation(const Mat4& rho, const Mat4& obs, const Tolerances& tol = {}) {
  const double defect = hermiticity_defect(obs);
  if (defect > tol.hermiticity)
    throw Error(ErrorKind::NotHermitian, "observable is not Hermitian", defect);
  return trace_product(rho, obs).value;
}

}  // namespace sepbell
