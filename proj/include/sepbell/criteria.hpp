#pragma once

// Separability criteria evaluated on a state. Every test reports lhs, rhs,
// slack and the tolerance behind its verdict; "violated" certifies
// entanglement for all criteria except chsh/cirelson/quad, whose bounds hold
// for local models (chsh) or all states (cirelson, quad).

#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>

#include "sepbell/config.hpp"
#include "sepbell/frames.hpp"
#include "sepbell/qmat.hpp"
#include "sepbell/states.hpp"

namespace sepbell {

enum class Verdict { satisfied, violated };
enum class Relation { at_most, at_least };

inline std::string_view to_string(Verdict v) { return v == Verdict::violated ? "violated" : "satisfied"; }

struct CriterionReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs for "<=", lhs - rhs for ">="
  double tolerance = 0.0;
  Verdict verdict = Verdict::satisfied;
  Relation relation = Relation::at_most;
  std::string settings;
  std::string note;

  bool violated() const { return verdict == Verdict::violated; }
};

inline CriterionReport make_report(std::string name, double lhs, double rhs, double tolerance,
                                   Relation relation = Relation::at_most, std::string settings = {}) {
  CriterionReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.relation = relation;
  r.slack = relation == Relation::at_most ? rhs - lhs : lhs - rhs;
  r.tolerance = tolerance;
  r.verdict = r.slack < -tolerance ? Verdict::violated : Verdict::satisfied;
  r.settings = std::move(settings);
  return r;
}

inline std::string describe(const Vec3& v) {
  std::ostringstream os;
  os << std::setprecision(6) << '(' << v(0) << ' ' << v(1) << ' ' << v(2) << ')';
  return os.str();
}

inline std::string describe(const SpinTriple& t) {
  return describe(t.axis(0)) + describe(t.axis(1)) + describe(t.axis(2));
}

inline std::string describe(const SettingPair& s) { return "A=" + describe(s.a) + " B=" + describe(s.b); }

// ---------------------------------------------------------------------------
// Correlators

inline double correlation(const DensityMatrix& rho, const Vec3& a, const Vec3& b, const Tolerances& tol = {}) {
  return trace_product(rho.matrix(), kron(spin_operator(a, tol), spin_operator(b, tol))).value;
}

inline double mean_first(const DensityMatrix& rho, const Vec3& a, const Tolerances& tol = {}) {
  return trace_product(rho.matrix(), kron(spin_operator(a, tol), pauli::identity())).value;
}

inline double mean_second(const DensityMatrix& rho, const Vec3& b, const Tolerances& tol = {}) {
  return trace_product(rho.matrix(), kron(pauli::identity(), spin_operator(b, tol))).value;
}

inline double chsh_value(const DensityMatrix& rho, const Vec3& a, const Vec3& a1, const Vec3& b, const Vec3& b1,
                         const Tolerances& tol = {}) {
  return correlation(rho, a, b, tol) + correlation(rho, a, b1, tol) + correlation(rho, a1, b, tol) -
         correlation(rho, a1, b1, tol);
}

/// |<AB + AB' + A'B - A'B'>| <= 2. Orthogonality is not required.
inline CriterionReport chsh(const DensityMatrix& rho, const Vec3& a, const Vec3& a1, const Vec3& b, const Vec3& b1,
                            const Tolerances& tol = {}) {
  return make_report("chsh", std::abs(chsh_value(rho, a, a1, b, b1, tol)), 2.0, tol.verdict, Relation::at_most,
                     "a=" + describe(a) + " a'=" + describe(a1) + " b=" + describe(b) + " b'=" + describe(b1));
}

/// Same expression against the quantum bound 2 sqrt 2.
inline CriterionReport cirelson(const DensityMatrix& rho, const Vec3& a, const Vec3& a1, const Vec3& b,
                                const Vec3& b1, const Tolerances& tol = {}) {
  auto r = chsh(rho, a, a1, b, b1, tol);
  return make_report("cirelson", r.lhs, 2.0 * std::numbers::sqrt2, tol.verdict, Relation::at_most, r.settings);
}

/// <AB' + A'B>^2 + <AB - A'B'>^2, bounded by 4 for every state.
inline double quad_lhs(const DensityMatrix& rho, const Vec3& a, const Vec3& a1, const Vec3& b, const Vec3& b1,
                       const Tolerances& tol = {}) {
  const double y = correlation(rho, a, b1, tol) + correlation(rho, a1, b, tol);
  const double x = correlation(rho, a, b, tol) - correlation(rho, a1, b1, tol);
  return x * x + y * y;
}

inline CriterionReport quad(const DensityMatrix& rho, const Vec3& a, const Vec3& a1, const Vec3& b, const Vec3& b1,
                            const Tolerances& tol = {}) {
  return make_report("quad", quad_lhs(rho, a, a1, b, b1, tol), 4.0, tol.verdict, Relation::at_most,
                     "a=" + describe(a) + " a'=" + describe(a1) + " b=" + describe(b) + " b'=" + describe(b1));
}

/// quad_lhs(A, A', B, B') <= (1 - <A''>^2)(1 - <B''>^2) for separable states.
inline CriterionReport sep_bound_eq7(const DensityMatrix& rho, const SettingPair& s, const Tolerances& tol = {}) {
  const double lhs = quad_lhs(rho, s.a.axis(0), s.a.axis(1), s.b.axis(0), s.b.axis(1), tol);
  const double ma = mean_first(rho, s.a.axis(2), tol);
  const double mb = mean_second(rho, s.b.axis(2), tol);
  return make_report("eq7", lhs, (1.0 - ma * ma) * (1.0 - mb * mb), tol.verdict, Relation::at_most, describe(s));
}

/// CHSH on orthogonal settings against sqrt 2.
inline CriterionReport roy_check(const DensityMatrix& rho, const SettingPair& s, const Tolerances& tol = {}) {
  const double v = chsh_value(rho, s.a.axis(0), s.a.axis(1), s.b.axis(0), s.b.axis(1), tol);
  return make_report("roy", std::abs(v), std::numbers::sqrt2, tol.verdict, Relation::at_most, describe(s));
}

// ---------------------------------------------------------------------------
// Octet expectations and the four quadratic inequalities

struct OctetMeans {
  double i = 0, i_t = 0;
  double x = 0, x_t = 0;
  double y = 0, y_t = 0;
  double z = 0, z_t = 0;
};

inline OctetMeans octet_means(const DensityMatrix& rho, const SettingPair& s) {
  const auto o = eight_operators(s);
  const Mat4& m = rho.matrix();
  auto e = [&m](const Mat4& op) { return trace_product(m, op).value; };
  return {e(o.i), e(o.i_t), e(o.x), e(o.x_t), e(o.y), e(o.y_t), e(o.z), e(o.z_t)};
}

/// Same expectations from Bloch data: every octet mean is bilinear in
/// (r, s, T), which is what the frame optimizer evaluates.
inline OctetMeans octet_means(const PauliForm& f, const SettingPair& s) {
  const Vec3 a = s.a.axis(0), a1 = s.a.axis(1), a2 = s.a.axis(2);
  const Vec3 b = s.b.axis(0), b1 = s.b.axis(1), b2 = s.b.axis(2);
  const auto e = [&f](const Vec3& u, const Vec3& v) { return u.dot(f.t * v); };
  const double ab = e(a, b), a1b1 = e(a1, b1), a1b = e(a1, b), ab1 = e(a, b1), a2b2 = e(a2, b2);
  const double ma = f.r.dot(a2), mb = f.s.dot(b2);
  return {0.5 * (1.0 + a2b2), 0.5 * (1.0 - a2b2), 0.5 * (ab - a1b1), 0.5 * (ab + a1b1),
          0.5 * (a1b + ab1),  0.5 * (a1b - ab1),  0.5 * (ma + mb),    0.5 * (ma - mb)};
}

/// mixsep2_1: X^2 + Y^2  <= I~^2 - Z~^2   (informative for equal orientation)
/// mixsep2_2: X~^2 + Y~^2 <= I^2 - Z^2    (informative for equal orientation)
/// mixsep2_3: X^2 + Y^2  <= I^2 - Z^2     (informative for opposite orientation)
/// mixsep2_4: X~^2 + Y~^2 <= I~^2 - Z~^2  (informative for opposite orientation)
/// All four hold for separable states; the two marked trivial for a given
/// relative orientation hold for every state.
inline std::array<CriterionReport, 4> mixsep2_from_means(const OctetMeans& m, bool same_orientation,
                                                         const Tolerances& tol = {},
                                                         const std::string& settings = {}) {
  const double xy = m.x * m.x + m.y * m.y;
  const double xy_t = m.x_t * m.x_t + m.y_t * m.y_t;
  const double iz = m.i * m.i - m.z * m.z;
  const double iz_t = m.i_t * m.i_t - m.z_t * m.z_t;
  std::array<CriterionReport, 4> out{
      make_report("mixsep2_1", xy, iz_t, tol.verdict, Relation::at_most, settings),
      make_report("mixsep2_2", xy_t, iz, tol.verdict, Relation::at_most, settings),
      make_report("mixsep2_3", xy, iz, tol.verdict, Relation::at_most, settings),
      make_report("mixsep2_4", xy_t, iz_t, tol.verdict, Relation::at_most, settings),
  };
  for (int k = 0; k < 4; ++k) {
    const bool informative = (k < 2) == same_orientation;
    out[k].note = informative ? "informative" : "orientation-trivial";
  }
  return out;
}

inline std::array<CriterionReport, 4> mixsep2(const DensityMatrix& rho, const SettingPair& s,
                                              const Tolerances& tol = {}) {
  return mixsep2_from_means(octet_means(rho, s), s.same_orientation(), tol, describe(s));
}

/// Largest violation (lhs - rhs) among the four inequalities.
inline double mixsep2_max_violation(const OctetMeans& m) {
  const double xy = m.x * m.x + m.y * m.y;
  const double xy_t = m.x_t * m.x_t + m.y_t * m.y_t;
  const double iz = m.i * m.i - m.z * m.z;
  const double iz_t = m.i_t * m.i_t - m.z_t * m.z_t;
  return std::max(std::max(xy - iz_t, xy_t - iz), std::max(xy - iz, xy_t - iz_t));
}

// ---------------------------------------------------------------------------
// Ordering of the three right-hand sides

enum class BoundOrdering {
  tilde_lowest,    // C > 0: I~^2 - Z~^2 <= Q <= I^2 - Z^2
  untilde_lowest,  // C < 0: I^2 - Z^2 <= Q <= I~^2 - Z~^2
  degenerate,      // C = 0: all three coincide
};

/// With c = <A''B''>, u = <A''>, v = <B''> and C = c - uv:
///   (I^2 - Z^2) - Q   = C (2 + c + uv) / 4
///   (I~^2 - Z~^2) - Q = C (c + uv - 2) / 4
/// where Q = (1 - u^2)(1 - v^2) / 4, so sign(C) fixes the order.
struct RhsOrdering {
  double correlation = 0.0;
  double untilde = 0.0;  // I^2 - Z^2
  double quarter = 0.0;  // Q
  double tilde = 0.0;    // I~^2 - Z~^2
  BoundOrdering predicted = BoundOrdering::degenerate;

  bool consistent(double tol) const {
    switch (predicted) {
      case BoundOrdering::tilde_lowest: return tilde <= quarter + tol && quarter <= untilde + tol;
      case BoundOrdering::untilde_lowest: return untilde <= quarter + tol && quarter <= tilde + tol;
      case BoundOrdering::degenerate:
        return std::abs(untilde - quarter) <= tol && std::abs(tilde - quarter) <= tol;
    }
    return false;
  }
};

inline RhsOrdering ordering_eq18(const DensityMatrix& rho, const SettingPair& s, const Tolerances& tol = {}) {
  const double u = mean_first(rho, s.a.axis(2), tol);
  const double v = mean_second(rho, s.b.axis(2), tol);
  const double c = correlation(rho, s.a.axis(2), s.b.axis(2), tol);
  const auto m = octet_means(rho, s);
  RhsOrdering out;
  out.correlation = c - u * v;
  out.untilde = m.i * m.i - m.z * m.z;
  out.quarter = 0.25 * (1.0 - u * u) * (1.0 - v * v);
  out.tilde = m.i_t * m.i_t - m.z_t * m.z_t;
  if (out.correlation > tol.equality)
    out.predicted = BoundOrdering::tilde_lowest;
  else if (out.correlation < -tol.equality)
    out.predicted = BoundOrdering::untilde_lowest;
  else
    out.predicted = BoundOrdering::degenerate;
  return out;
}

// ---------------------------------------------------------------------------
// Fidelity with the phi+ family

/// F = (rho_00 + rho_33)/2 + |rho_03| <= 1/2. The maximum over the relative
/// phase is attained in closed form by |rho_03|.
inline CriterionReport fidelity(const DensityMatrix& rho, const Tolerances& tol = {}) {
  const double f = 0.5 * (rho(0, 0).real() + rho(3, 3).real()) + std::abs(rho(0, 3));
  auto r = make_report("fidelity", f, 0.5, tol.verdict);
  std::ostringstream os;
  os << std::setprecision(12) << "fid2_residual=" << 2.0 * std::abs(rho(0, 3)) - (rho(1, 1).real() + rho(2, 2).real());
  r.note = os.str();
  return r;
}

/// 2|rho_03| <= rho_11 + rho_22, the trace-one rewrite of the fidelity bound.
inline CriterionReport fid2(const DensityMatrix& rho, const Tolerances& tol = {}) {
  return make_report("fid2", 2.0 * std::abs(rho(0, 3)), rho(1, 1).real() + rho(2, 2).real(), tol.verdict);
}

// ---------------------------------------------------------------------------
// Local orthogonal observables

/// Four Hermitian single-qubit operators with Tr[G_k G_l] = delta_kl.
class LooBasis {
 public:
  static LooBasis from_operators(const std::array<Mat2, 4>& ops, const Tolerances& tol = {}) {
    double dev = 0.0;
    for (int k = 0; k < 4; ++k) {
      dev = std::max(dev, hermiticity_defect(ops[k]));
      for (int l = 0; l < 4; ++l) {
        const cplx g = (ops[k] * ops[l]).trace();
        dev = std::max(dev, std::abs(g - (k == l ? 1.0 : 0.0)));
      }
    }
    if (dev > tol.hermiticity) throw Error(ErrorKind::NotLooBasis, "operators are not trace-orthonormal", dev);
    return LooBasis(ops);
  }

  /// {A, A', A'', 1} / sqrt 2
  static LooBasis from_triple(const SpinTriple& t) {
    const double h = 1.0 / std::numbers::sqrt2;
    return LooBasis({h * t.op(0), h * t.op(1), h * t.op(2), h * pauli::identity()});
  }

  /// G_k = sum_mu o(k, mu) sigma_mu / sqrt 2 with sigma_0 = 1; o orthogonal.
  static LooBasis from_orthogonal(const Eigen::Matrix4d& o, const Tolerances& tol = {}) {
    std::array<Mat2, 4> ops;
    for (int k = 0; k < 4; ++k) {
      ops[k] = Mat2::Zero();
      for (int mu = 0; mu < 4; ++mu) ops[k] += o(k, mu) * pauli::sigma(mu);
      ops[k] /= std::numbers::sqrt2;
    }
    return from_operators(ops, tol);
  }

  const Mat2& operator[](int k) const { return ops_[k]; }

 private:
  explicit LooBasis(const std::array<Mat2, 4>& ops) : ops_(ops) {}
  std::array<Mat2, 4> ops_;
};

/// W = 1 - sum_k <G_k^A x G_k^B>; reported as lhs = sum, rhs = 1, so the
/// slack is the witness value.
inline CriterionReport loo_linear_witness(const DensityMatrix& rho, const LooBasis& a, const LooBasis& b,
                                          const Tolerances& tol = {}) {
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) sum += trace_product(rho.matrix(), kron(a[k], b[k])).value;
  return make_report("loo_linear", sum, 1.0, tol.verdict);
}

/// F = W - 1/2 sum_k <G_k^A x 1 - 1 x G_k^B>^2.
inline CriterionReport loo_nonlinear_witness(const DensityMatrix& rho, const LooBasis& a, const LooBasis& b,
                                             const Tolerances& tol = {}) {
  const auto linear = loo_linear_witness(rho, a, b, tol);
  double penalty = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double d = trace_product(rho.matrix(), kron(a[k], pauli::identity()) - kron(pauli::identity(), b[k])).value;
    penalty += d * d;
  }
  return make_report("loo_nonlinear", linear.lhs + 0.5 * penalty, 1.0, tol.verdict);
}

// ---------------------------------------------------------------------------
// Partial transpose

inline Spectrum<4> ppt_spectrum(const DensityMatrix& rho, const Tolerances& tol = {}) {
  return hermitian_eigen<4>(partial_transpose(rho.matrix(), Side::second), tol);
}

/// min eig(rho^PT) >= 0; a two-qubit state is separable iff this holds.
inline CriterionReport ppt(const DensityMatrix& rho, const Tolerances& tol = {}) {
  return make_report("ppt", ppt_spectrum(rho, tol).min(), 0.0, tol.verdict, Relation::at_least);
}

/// Bloch vector of a traceless Hermitian 2x2 operator.
inline Vec3 bloch_vector(const Mat2& m) {
  Vec3 v;
  for (int j = 0; j < 3; ++j) v(j) = 0.5 * (pauli::sigma(j + 1) * m).trace().real();
  return v;
}

/// Triple whose axes are the images of (x, y, z) under conjugation by u.
inline SpinTriple conjugated_pauli_triple(const Mat2& u) {
  Mat3 axes;
  for (int k = 0; k < 3; ++k) axes.row(k) = bloch_vector(u * pauli::sigma(k + 1) * u.adjoint()).transpose();
  return SpinTriple::from_matrix(axes, Tolerances{.orthonormal = 1e-9});
}

/// <Psi| rho^PT |Psi> evaluated directly and through the octet expansion
///   1/2 <I~> + (p - 1/2) <Z~> + sqrt(p(1-p)) <X>,
/// together with the lower bound 1/2 <I~> - 1/2 sqrt(<Z~>^2 + <X>^2).
/// The frames put A'' along the particle-1 Schmidt basis of Psi and B''
/// along the complex conjugate of the particle-2 Schmidt basis, so the
/// expansion refers to the same (computational-basis) partial transpose.
struct PptBound {
  double direct = 0.0;
  double expansion = 0.0;
  double lower_bound = 0.0;
  double weight = 0.0;  // p = r^2
  SettingPair frames;
  OctetMeans means;
};

inline PptBound appendix_c_bound(const DensityMatrix& rho, const PureState& psi) {
  const SchmidtForm sf = schmidt(psi);
  // psi = r e0 g0 + s e1 g1 with e = basis_a columns, g0 = basis_b.col(1),
  // g1 = -basis_b.col(0); relabel so psi = r|ud> + s|du> in local bases.
  Mat2 ua = sf.basis_a;
  Mat2 ub;
  ub.col(0) = -sf.basis_b.col(0);
  ub.col(1) = sf.basis_b.col(1);

  PptBound out;
  out.frames = SettingPair{conjugated_pauli_triple(ua), conjugated_pauli_triple(ub.conjugate())};
  out.weight = sf.r * sf.r;
  out.means = octet_means(rho, out.frames);

  const Ket4& v = psi.amplitudes();
  out.direct = v.dot(partial_transpose(rho.matrix(), Side::second) * v).real();
  const double p = out.weight;
  const auto& m = out.means;
  out.expansion = 0.5 * m.i_t + (p - 0.5) * m.z_t + std::sqrt(p * (1.0 - p)) * m.x;
  out.lower_bound = 0.5 * m.i_t - 0.5 * std::sqrt(m.z_t * m.z_t + m.x * m.x);
  return out;
}

}  // namespace sepbell
