#pragma once

// Finite separability test for pure states: the orientation-informative
// quadratic inequalities at three fixed frame pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sepbell/config.hpp"
#include "sepbell/criteria.hpp"
#include "sepbell/frames.hpp"
#include "sepbell/states.hpp"

namespace sepbell {

enum class PureVerdict { separable, entangled };

inline std::string_view to_string(PureVerdict v) { return v == PureVerdict::separable ? "separable" : "entangled"; }

struct PureTestReport {
  std::vector<std::string> family;        // frame pair names, in evaluation order
  std::vector<CriterionReport> reports;   // "<pair>:mixsep2_k"
  std::array<double, 3> residuals{};      // residuals_prime
  std::array<double, 3> residuals_abg{};  // residuals_alpha_beta_gamma
  PureVerdict verdict = PureVerdict::separable;
  bool boundary = false;  // smallest slack within 10 tol of zero
  double schmidt_rs = 0.0;

  double min_slack() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) m = std::min(m, r.slack);
    return m;
  }
};

struct PureTestOptions {
  bool all_four = false;  // evaluate the orientation-trivial pair as well
  Tolerances tol{};
};

inline const std::vector<std::string>& prime_family() {
  static const std::vector<std::string> names{"alpha", "beta_prime", "gamma_prime"};
  return names;
}

inline const std::vector<std::string>& permutation_family() {
  static const std::vector<std::string> names{"alpha", "beta", "gamma"};
  return names;
}

/// | |ad| - |bc| |, | |(a+d)^2 - (b+c)^2| - |(a-d)^2 - (b-c)^2| |,
/// | |(b+c)^2 + (a-d)^2| - |(b-c)^2 + (a+d)^2| |
inline std::array<double, 3> residuals_alpha_beta_gamma(const PureState& psi) {
  const cplx a = psi.a(), b = psi.b(), c = psi.c(), d = psi.d();
  return {std::abs(std::abs(a * d) - std::abs(b * c)),
          std::abs(std::abs((a + d) * (a + d) - (b + c) * (b + c)) - std::abs((a - d) * (a - d) - (b - c) * (b - c))),
          std::abs(std::abs((b + c) * (b + c) + (a - d) * (a - d)) - std::abs((b - c) * (b - c) + (a + d) * (a + d)))};
}

/// | |ad| - |bc| |, | |(a+c)(b-d)| - |(a-c)(b+d)| |,
/// | |(a+ic)(b-id)| - |(a-ic)(b+id)| |
inline std::array<double, 3> residuals_prime(const PureState& psi) {
  const cplx a = psi.a(), b = psi.b(), c = psi.c(), d = psi.d();
  const cplx i(0, 1);
  return {std::abs(std::abs(a * d) - std::abs(b * c)),
          std::abs(std::abs((a + c) * (b - d)) - std::abs((a - c) * (b + d))),
          std::abs(std::abs((a + i * c) * (b - i * d)) - std::abs((a - i * c) * (b + i * d)))};
}

/// Quadratic inequalities of `family` (names from named_triples) on psi.
inline PureTestReport pure_family_test(const PureState& psi, const std::vector<std::string>& family,
                                       const PureTestOptions& opts = {}) {
  const auto pairs = named_triples();
  const auto rho = psi.density(opts.tol);
  PureTestReport out;
  out.family = family;
  for (const auto& name : family) {
    const auto it = pairs.find(name);
    if (it == pairs.end()) throw Error(ErrorKind::Schema, "unknown frame pair '" + name + "'");
    for (auto r : mixsep2(rho, it->second, opts.tol)) {
      if (!opts.all_four && r.note != "informative") continue;
      r.name = name + ":" + r.name;
      out.reports.push_back(std::move(r));
    }
  }
  out.residuals = residuals_prime(psi);
  out.residuals_abg = residuals_alpha_beta_gamma(psi);
  out.schmidt_rs = std::abs(psi.a() * psi.d() - psi.b() * psi.c());
  const double m = out.min_slack();
  out.verdict = m < -opts.tol.verdict ? PureVerdict::entangled : PureVerdict::separable;
  out.boundary = std::abs(m) <= 10.0 * opts.tol.verdict;
  return out;
}

/// Two informative inequalities at each of alpha, beta', gamma'.
inline PureTestReport six_inequality_test(const PureState& psi, const PureTestOptions& opts = {}) {
  return pure_family_test(psi, prime_family(), opts);
}

struct EquivalenceRecord {
  bool inequalities_hold = false;
  bool residuals_vanish = false;
  double min_slack = 0.0;
  double max_residual = 0.0;

  bool consistent() const { return inequalities_hold == residuals_vanish; }
};

/// The six inequalities hold exactly when every primed residual vanishes.
inline EquivalenceRecord residual_equivalence_check(const PureState& psi, double residual_tol = 1e-7,
                                                    const Tolerances& tol = {}) {
  const auto rep = six_inequality_test(psi, {.tol = tol});
  EquivalenceRecord e;
  e.min_slack = rep.min_slack();
  e.inequalities_hold = rep.verdict == PureVerdict::separable;
  e.max_residual = std::max({rep.residuals[0], rep.residuals[1], rep.residuals[2]});
  e.residuals_vanish = e.max_residual <= residual_tol;
  return e;
}

/// (i, -1, i, 1)/2: entangled, yet every alpha/beta/gamma residual vanishes.
inline PureState permutation_counterexample() {
  return PureState(Ket4(cplx(0, 0.5), -0.5, cplx(0, 0.5), 0.5));
}

}  // namespace sepbell
