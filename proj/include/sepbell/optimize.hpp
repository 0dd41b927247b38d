#pragma once

// Closed-form maxima over measurement settings, a derivative-free search
// over local frames, and the separability verdict built on it.

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sepbell/config.hpp"
#include "sepbell/criteria.hpp"
#include "sepbell/frames.hpp"
#include "sepbell/random.hpp"
#include "sepbell/states.hpp"

namespace sepbell {

/// 2 sqrt(t1^2 + t2^2) from the two largest singular values of T.
inline double chsh_max_analytic(const DensityMatrix& rho) {
  const auto nf = normal_form(pauli_decompose(rho));
  return 2.0 * std::hypot(nf.t(0), nf.t(1));
}

/// (t1 + t2)^2: maximum of quad_lhs over orthogonal setting pairs.
inline double quad_max_orthogonal_analytic(const DensityMatrix& rho) {
  const auto nf = normal_form(pauli_decompose(rho));
  return (nf.t(0) + nf.t(1)) * (nf.t(0) + nf.t(1));
}

struct GapClass {
  bool gap_member = false;
  double t11 = 0.0;
  double t22 = 0.0;

  /// Distance into the gap region: positive for members.
  double depth() const { return std::min(t11 + t22 - 1.0, 1.0 - t11 * t11 - t22 * t22); }
};

/// Entangled per the orthogonal quadratic bound (t11 + t22 > 1) yet inside
/// every CHSH inequality (t11^2 + t22^2 <= 1).
inline GapClass lhv_gap_classify(const DensityMatrix& rho, const Tolerances& tol = {}) {
  const auto nf = normal_form(pauli_decompose(rho));
  GapClass g;
  g.t11 = nf.t(0);
  g.t22 = nf.t(1);
  g.gap_member = g.t11 + g.t22 > 1.0 + tol.verdict && g.t11 * g.t11 + g.t22 * g.t22 <= 1.0 + tol.verdict;
  return g;
}

// ---------------------------------------------------------------------------
// Local search

struct OptimizeOptions {
  int restarts = 64;
  int max_evaluations = 2000;  // per restart
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  std::optional<double> stop_above;  // return as soon as a restart beats this
};

namespace detail {

struct LocalResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes f from x0 with a Nelder-Mead simplex followed by a coordinate
/// golden-section polish. Convergence: spread of simplex values <= tol.
template <typename F>
LocalResult minimize(F&& f, const Eigen::VectorXd& x0, double step, int max_evals, double tol) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  for (int i = 0; i < n; ++i) pts[i + 1](i) += step;
  for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<int> idx(n + 1);
  bool converged = false;
  while (evals < max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = idx.front(), worst = idx.back(), second = idx[n - 1];
    if (vals[worst] - vals[best] <= tol) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                       : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }

  const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  LocalResult out{pts[best], vals[best], evals, converged};

  // Golden-section polish along each coordinate.
  constexpr double phi = 0.6180339887498949;
  constexpr int golden_steps = 30;
  for (int i = 0; i < n && out.evaluations + golden_steps + 2 <= max_evals; ++i) {
    const double h = std::max(1e-3, 0.05 * std::abs(out.x(i)));
    auto along = [&](double t) {
      Eigen::VectorXd x = out.x;
      x(i) += t;
      ++out.evaluations;
      return f(x);
    };
    double lo = -h, hi = h;
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    double fc = along(c), fd = along(d);
    for (int k = 0; k < golden_steps; ++k) {
      if (fc < fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - phi * (hi - lo);
        fc = along(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + phi * (hi - lo);
        fd = along(d);
      }
    }
    const double t = fc < fd ? c : d;
    const double ft = std::min(fc, fd);
    if (ft < out.f) {
      out.x(i) += t;
      out.f = ft;
    }
  }
  return out;
}

inline Eigen::Quaterniond quaternion(const Eigen::VectorXd& x, int offset) {
  Eigen::Quaterniond q(x(offset), x(offset + 1), x(offset + 2), x(offset + 3));
  const double n = q.norm();
  if (!(n > 1e-12)) return Eigen::Quaterniond::Identity();
  return Eigen::Quaterniond(q.coeffs() / n);
}

inline Mat3 rotation(const Eigen::VectorXd& x, int offset) { return quaternion(x, offset).toRotationMatrix(); }

inline Vec3 direction(const Eigen::VectorXd& x, int offset) {
  Vec3 v(x(offset), x(offset + 1), x(offset + 2));
  const double n = v.norm();
  return n > 1e-12 ? Vec3(v / n) : Vec3::UnitZ();
}

/// Left and right multiplication by unit quaternions: x -> p x conj(q)
/// covers SO(4).
inline Eigen::Matrix4d so4(const Eigen::Quaterniond& p, const Eigen::Quaterniond& q) {
  const double a = p.w(), b = p.x(), c = p.y(), d = p.z();
  Eigen::Matrix4d left;
  left << a, -b, -c, -d,
          b,  a, -d,  c,
          c,  d,  a, -b,
          d, -c,  b,  a;
  const double e = q.w(), f = -q.x(), g = -q.y(), h = -q.z();
  Eigen::Matrix4d right;
  right << e, -f, -g, -h,
           f,  e,  h, -g,
           g, -h,  e,  f,
           h,  g, -f,  e;
  return left * right;
}

}  // namespace detail

enum class Objective { chsh, quad, mixsep2_slack, loo_linear };

inline std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::chsh: return "chsh";
    case Objective::quad: return "quad";
    case Objective::mixsep2_slack: return "mixsep2_slack";
    case Objective::loo_linear: return "loo_linear";
  }
  return "unknown";
}

/// `value` is the maximized quantity:
///   chsh           |CHSH| over four unit vectors (settings a, a', b, b')
///   quad           quad_lhs over orthogonal setting pairs (frames)
///   mixsep2_slack  largest lhs - rhs of the four quadratic inequalities (frames)
///   loo_linear     sum_k <G_k x H_k> over LOO pairs; the witness is 1 - value
///                  with G_k = sum_mu O(k, mu) sigma_mu / sqrt 2 on particle 1
///                  and H_k = sigma_k / sqrt 2 on particle 2 (O = loo_rotation)
struct OptimizationResult {
  Objective objective = Objective::chsh;
  double value = -std::numeric_limits<double>::infinity();
  SettingPair frames;
  std::array<Vec3, 4> settings{Vec3::UnitZ(), Vec3::UnitZ(), Vec3::UnitZ(), Vec3::UnitZ()};
  Eigen::Matrix4d loo_rotation = Eigen::Matrix4d::Identity();
  int evaluations = 0;
  int restarts = 0;
  int best_restart = -1;
  bool converged = false;
};

namespace detail {

struct Candidate {
  double value;
  Eigen::VectorXd x;
};

inline int parameter_count(Objective o) {
  switch (o) {
    case Objective::chsh: return 6;
    case Objective::quad: return 8;
    case Objective::mixsep2_slack: return 8;
    case Objective::loo_linear: return 8;
  }
  return 0;
}

/// Third axis sign for particle 2 in the mixsep2 search: both handedness
/// classes are tried at every point and the larger violation kept.
inline SettingPair frames_from(const Eigen::VectorXd& x, bool right_handed_b) {
  const Mat3 a = rotation(x, 0).transpose();
  Mat3 b = rotation(x, 4).transpose();
  if (!right_handed_b) b.row(2) *= -1.0;
  return {SpinTriple::from_matrix(a, Tolerances{.orthonormal = 1e-8}),
          SpinTriple::from_matrix(b, Tolerances{.orthonormal = 1e-8})};
}

/// Both components of O(4) are tried; the better one is returned.
inline Eigen::Matrix4d loo_from(const Eigen::VectorXd& x, const Eigen::Matrix4d& corr) {
  const Eigen::Matrix4d o = so4(quaternion(x, 0), quaternion(x, 4));
  Eigen::Matrix4d r = o;
  r.col(3) *= -1.0;
  return (o * corr).trace() >= (r * corr).trace() ? o : r;
}

/// Correlation tensor with identity terms: c(0,0) = 1, c(0,j) = s_j,
/// c(i,0) = r_i, c(i,j) = t_ij.
inline Eigen::Matrix4d full_correlation(const PauliForm& f) {
  Eigen::Matrix4d c;
  c(0, 0) = 1.0;
  c.block<1, 3>(0, 1) = f.s.transpose();
  c.block<3, 1>(1, 0) = f.r;
  c.block<3, 3>(1, 1) = f.t;
  return c;
}

inline double mixsep2_violation(const PauliForm& f, const Eigen::VectorXd& x) {
  const Mat3 ra = rotation(x, 0), rb = rotation(x, 4);
  Mat3 a = ra.transpose(), b = rb.transpose();
  double best = -std::numeric_limits<double>::infinity();
  for (int hb : {1, -1}) {
    b.row(2) = hb * rb.col(2).transpose();
    const Vec3 a0 = a.row(0), a1 = a.row(1), a2 = a.row(2);
    const Vec3 b0 = b.row(0), b1 = b.row(1), b2 = b.row(2);
    const auto e = [&f](const Vec3& u, const Vec3& v) { return u.dot(f.t * v); };
    const double ab = e(a0, b0), a1b1 = e(a1, b1), a1b = e(a1, b0), ab1 = e(a0, b1), a2b2 = e(a2, b2);
    const double ma = f.r.dot(a2), mb = f.s.dot(b2);
    const OctetMeans m{0.5 * (1.0 + a2b2), 0.5 * (1.0 - a2b2), 0.5 * (ab - a1b1), 0.5 * (ab + a1b1),
                       0.5 * (a1b + ab1),  0.5 * (a1b - ab1),  0.5 * (ma + mb),    0.5 * (ma - mb)};
    best = std::max(best, mixsep2_max_violation(m));
  }
  return best;
}

}  // namespace detail

/// Multi-start maximization of `objective` over local settings. Restart k
/// draws its start from mix_seed(seed, k); the best value wins, ties going
/// to the lower restart index. Throws BudgetExhausted (magnitude = best value)
/// when no restart converged.
inline OptimizationResult numeric_max(const DensityMatrix& rho, Objective objective,
                                      const OptimizeOptions& opts = {}) {
  if (opts.restarts < 1 || opts.max_evaluations < 1)
    throw Error(ErrorKind::ParameterOutOfRange, "optimizer budget must allow at least one evaluation");

  const PauliForm f = pauli_decompose(rho);
  const Eigen::Matrix4d corr = detail::full_correlation(f);

  auto value_of = [&](const Eigen::VectorXd& x) -> double {
    switch (objective) {
      case Objective::chsh: {
        const Vec3 a = detail::direction(x, 0), a1 = detail::direction(x, 3);
        return (f.t.transpose() * (a + a1)).norm() + (f.t.transpose() * (a - a1)).norm();
      }
      case Objective::quad: {
        const Mat3 ra = detail::rotation(x, 0), rb = detail::rotation(x, 4);
        const Vec3 a = ra.col(0), a1 = ra.col(1), b = rb.col(0), b1 = rb.col(1);
        const auto e = [&f](const Vec3& u, const Vec3& v) { return u.dot(f.t * v); };
        const double p = e(a, b1) + e(a1, b), q = e(a, b) - e(a1, b1);
        return p * p + q * q;
      }
      case Objective::mixsep2_slack: return detail::mixsep2_violation(f, x);
      case Objective::loo_linear: return 0.5 * (detail::loo_from(x, corr) * corr).trace();
    }
    return 0.0;
  };

  const int n = detail::parameter_count(objective);
  OptimizationResult out;
  out.objective = objective;
  Eigen::VectorXd best_x;
  for (int k = 0; k < opts.restarts; ++k) {
    StateSampler sampler(mix_seed(opts.seed, static_cast<std::uint64_t>(k)));
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0(i) = sampler.normal();
    auto local = detail::minimize([&](const Eigen::VectorXd& x) { return -value_of(x); }, x0, 0.5,
                                  opts.max_evaluations, opts.tolerance);
    out.evaluations += local.evaluations;
    out.restarts = k + 1;
    out.converged = out.converged || local.converged;
    if (-local.f > out.value) {
      out.value = -local.f;
      out.best_restart = k;
      best_x = local.x;
    }
    if (opts.stop_above && out.value > *opts.stop_above) break;
  }

  switch (objective) {
    case Objective::chsh: {
      const Vec3 a = detail::direction(best_x, 0), a1 = detail::direction(best_x, 3);
      const Vec3 u = f.t.transpose() * (a + a1), v = f.t.transpose() * (a - a1);
      out.settings = {a, a1, u.norm() > 1e-12 ? Vec3(u.normalized()) : Vec3::UnitZ(),
                      v.norm() > 1e-12 ? Vec3(v.normalized()) : Vec3::UnitX()};
      break;
    }
    case Objective::quad: out.frames = detail::frames_from(best_x, true); break;
    case Objective::mixsep2_slack: {
      const auto rh = detail::frames_from(best_x, true);
      const auto lh = detail::frames_from(best_x, false);
      const double vr = mixsep2_max_violation(octet_means(f, rh));
      const double vl = mixsep2_max_violation(octet_means(f, lh));
      out.frames = vr >= vl ? rh : lh;
      break;
    }
    case Objective::loo_linear: out.loo_rotation = detail::loo_from(best_x, corr); break;
  }

  const bool early = opts.stop_above && out.value > *opts.stop_above;
  if (!out.converged && !early)
    throw Error(ErrorKind::BudgetExhausted, "no restart converged within its evaluation budget", out.value);
  return out;
}

// ---------------------------------------------------------------------------
// Separability verdict

enum class Separability { separable, entangled, inconclusive };

inline std::string_view to_string(Separability s) {
  switch (s) {
    case Separability::separable: return "separable";
    case Separability::entangled: return "entangled";
    case Separability::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct NsVerdict {
  Separability verdict = Separability::inconclusive;
  double max_violation = 0.0;
  double ppt_min = 0.0;
  std::optional<OptimizationResult> search;
  std::string defect;  // set when the search and the PPT oracle disagree
};

/// Entangled once a frame pair violates one of the quadratic inequalities by
/// more than tol. Separable only when the search converged without a
/// violation and the partial transpose is positive. Anything else is
/// inconclusive with the reason in `defect`.
inline NsVerdict ns_verdict(const DensityMatrix& rho, OptimizeOptions opts = {}, const Tolerances& tol = {}) {
  NsVerdict out;
  out.ppt_min = ppt(rho, tol).lhs;
  const bool ppt_negative = out.ppt_min < -tol.verdict;
  opts.stop_above = tol.verdict;

  auto decide_violation = [&] {
    if (ppt_negative) {
      out.verdict = Separability::entangled;
    } else {
      out.verdict = Separability::inconclusive;
      out.defect = "quadratic violation on a state with positive partial transpose";
    }
    return out;
  };

  // Pauli frames of both orientations are cheap and often decisive.
  for (const auto& pair : {SettingPair{}, SettingPair{SpinTriple::pauli(), SpinTriple::from_matrix(-Mat3::Identity())}}) {
    const double v = mixsep2_max_violation(octet_means(rho, pair));
    if (v > tol.verdict) {
      OptimizationResult r;
      r.objective = Objective::mixsep2_slack;
      r.value = v;
      r.frames = pair;
      r.converged = true;
      out.search = r;
      out.max_violation = v;
      return decide_violation();
    }
  }

  try {
    out.search = numeric_max(rho, Objective::mixsep2_slack, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExhausted) throw;
    out.max_violation = e.magnitude();
    out.defect = "frame search did not converge";
    return out;
  }
  out.max_violation = out.search->value;
  if (out.max_violation > tol.verdict) return decide_violation();
  if (ppt_negative) {
    out.defect = "no violation found but the partial transpose is negative";
    return out;
  }
  out.verdict = Separability::separable;
  return out;
}

}  // namespace sepbell
