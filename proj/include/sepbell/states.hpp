#pragma once

// Two-qubit states: validation, named families, Bloch (Pauli) form, the
// diagonal normal form of the correlation matrix and the Schmidt form of
// pure states.

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <string>

#include "sepbell/config.hpp"
#include "sepbell/qmat.hpp"

namespace sepbell {

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  static DensityMatrix validate(const Mat4& m, const Tolerances& tol = {}) {
    if (!m.allFinite()) throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");
    const double defect = hermiticity_defect(m);
    if (defect > tol.hermiticity) throw Error(ErrorKind::NotHermitian, "state matrix is not Hermitian", defect);
    const cplx tr = m.trace();
    const double trace_dev = std::abs(tr - 1.0);
    if (trace_dev > tol.trace) throw Error(ErrorKind::TraceNotOne, "trace differs from 1", trace_dev);
    const Mat4 h = 0.5 * (m + m.adjoint());
    const auto spec = hermitian_eigen<4>(h, tol);
    if (spec.min() < -tol.psd)
      throw Error(ErrorKind::NotPositive, "state has a negative eigenvalue", spec.min());
    return DensityMatrix(h);
  }

  const Mat4& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

 private:
  explicit DensityMatrix(const Mat4& m) : m_(m) {}
  Mat4 m_;
};

/// Normalized amplitudes a|uu> + b|ud> + c|du> + d|dd>.
class PureState {
 public:
  explicit PureState(const Ket4& amplitudes, const Tolerances& tol = {}) : psi_(amplitudes) {
    if (!psi_.allFinite()) throw Error(ErrorKind::NotNormalized, "amplitudes are not finite");
    const double dev = std::abs(psi_.squaredNorm() - 1.0);
    if (dev > tol.normalization) throw Error(ErrorKind::NotNormalized, "amplitudes are not normalized", dev);
  }

  static PureState normalized(const Ket4& amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::NotNormalized, "zero or non-finite vector");
    return PureState(amplitudes / n);
  }

  const Ket4& amplitudes() const { return psi_; }
  cplx a() const { return psi_(0); }
  cplx b() const { return psi_(1); }
  cplx c() const { return psi_(2); }
  cplx d() const { return psi_(3); }

  Mat4 projector() const { return psi_ * psi_.adjoint(); }
  DensityMatrix density(const Tolerances& tol = {}) const { return DensityMatrix::validate(projector(), tol); }

 private:
  Ket4 psi_;
};

namespace bell {

inline PureState singlet() {
  const double h = 1.0 / std::sqrt(2.0);
  return PureState(Ket4(0, h, -h, 0));
}
inline PureState psi_plus() {
  const double h = 1.0 / std::sqrt(2.0);
  return PureState(Ket4(0, h, h, 0));
}
inline PureState phi_plus() {
  const double h = 1.0 / std::sqrt(2.0);
  return PureState(Ket4(h, 0, 0, h));
}
inline PureState phi_minus() {
  const double h = 1.0 / std::sqrt(2.0);
  return PureState(Ket4(h, 0, 0, -h));
}

}  // namespace bell

inline PureState up_up() { return PureState(Ket4(1, 0, 0, 0)); }

inline DensityMatrix maximally_mixed() { return DensityMatrix::validate(Mat4::Identity() / 4.0); }

namespace detail {
inline void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::ParameterOutOfRange, std::string(what) + " must lie in [0, 1]", p);
}
}  // namespace detail

/// (1 - p)/4 * 1 + p |psi-><psi-|
inline DensityMatrix werner(double p) {
  detail::check_probability(p, "Werner weight p");
  return DensityMatrix::validate((1.0 - p) / 4.0 * Mat4::Identity() + p * bell::singlet().projector());
}

/// p |psi-><psi-| + (1 - p) (2/3 |uu><uu| + 1/3 |ud><ud|)
inline DensityMatrix noisy_singlet(double p) {
  detail::check_probability(p, "noisy-singlet weight p");
  Mat4 noise = Mat4::Zero();
  noise(0, 0) = 2.0 / 3.0;
  noise(1, 1) = 1.0 / 3.0;
  return DensityMatrix::validate(p * bell::singlet().projector() + (1.0 - p) * noise);
}

/// Bloch data: rho = 1/4 (1 + r.sigma x 1 + 1 x s.sigma + sum t_ij sigma_i x sigma_j)
struct PauliForm {
  Vec3 r = Vec3::Zero();
  Vec3 s = Vec3::Zero();
  Mat3 t = Mat3::Zero();
};

inline PauliForm pauli_decompose(const DensityMatrix& rho) {
  PauliForm f;
  const Mat4& m = rho.matrix();
  for (int i = 0; i < 3; ++i) {
    f.r(i) = trace_product(m, kron(pauli::sigma(i + 1), pauli::identity())).value;
    f.s(i) = trace_product(m, kron(pauli::identity(), pauli::sigma(i + 1))).value;
    for (int j = 0; j < 3; ++j) f.t(i, j) = trace_product(m, kron(pauli::sigma(i + 1), pauli::sigma(j + 1))).value;
  }
  return f;
}

inline Mat4 pauli_matrix(const PauliForm& f) {
  Mat4 m = kron(pauli::identity(), pauli::identity());
  for (int i = 0; i < 3; ++i) {
    m += f.r(i) * kron(pauli::sigma(i + 1), pauli::identity());
    m += f.s(i) * kron(pauli::identity(), pauli::sigma(i + 1));
    for (int j = 0; j < 3; ++j) m += f.t(i, j) * kron(pauli::sigma(i + 1), pauli::sigma(j + 1));
  }
  return m / 4.0;
}

/// Throws NotPositive when the Bloch data describes no state.
inline DensityMatrix pauli_compose(const PauliForm& f, const Tolerances& tol = {}) {
  return DensityMatrix::validate(pauli_matrix(f), tol);
}

/// rot_a * T * rot_b^T = diag(t), t sorted descending and nonnegative.
/// rot_a and rot_b are orthogonal but may be reflections; det_sign is the
/// sign of det T (+1 for singular T).
struct NormalForm {
  Vec3 t = Vec3::Zero();
  Mat3 rot_a = Mat3::Identity();
  Mat3 rot_b = Mat3::Identity();
  int det_sign = 1;
};

inline NormalForm normal_form(const Mat3& t) {
  Eigen::JacobiSVD<Mat3> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  NormalForm nf;
  nf.t = svd.singularValues();
  nf.rot_a = svd.matrixU().transpose();
  nf.rot_b = svd.matrixV().transpose();
  nf.det_sign = t.determinant() < 0.0 ? -1 : 1;
  return nf;
}

inline NormalForm normal_form(const PauliForm& f) { return normal_form(f.t); }

/// psi = (basis_a x basis_b)(r|ud> - s|du>), r >= s >= 0.
struct SchmidtForm {
  double r = 1.0;
  double s = 0.0;
  Mat2 basis_a = Mat2::Identity();
  Mat2 basis_b = Mat2::Identity();

  Ket4 reconstruct() const {
    const Ket4 canonical(0, r, -s, 0);
    return kron(basis_a, basis_b) * canonical;
  }
};

inline SchmidtForm schmidt(const PureState& psi) {
  Mat2 coeff;
  coeff << psi.a(), psi.b(), psi.c(), psi.d();
  Eigen::JacobiSVD<Mat2> svd(coeff, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat2 u = svd.matrixU();
  const Mat2 v = svd.matrixV();

  SchmidtForm out;
  out.r = svd.singularValues()(0);
  // s from the determinant keeps r*s = |ad - bc| to rounding.
  const double det = std::abs(psi.a() * psi.d() - psi.b() * psi.c());
  out.s = out.r > 0.0 ? det / out.r : 0.0;

  // coeff = U S V^dagger gives psi = sum_k S_k u_k x conj(v_k).
  const Eigen::Vector2cd g0 = v.col(0).conjugate();
  const Eigen::Vector2cd g1 = v.col(1).conjugate();
  out.basis_a = u;
  out.basis_b.col(0) = -g1;
  out.basis_b.col(1) = g0;
  return out;
}

}  // namespace sepbell
