#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sepbell/puretest.hpp"
#include "sepbell/random.hpp"

using namespace sepbell;
using Catch::Matchers::WithinAbs;

namespace {
PureState near_product(StateSampler& s, double rs) {
  // r s = rs with r^2 + s^2 = 1.
  const double sv = std::sqrt(0.5 * (1.0 - std::sqrt(1.0 - 4.0 * rs * rs)));
  const double rv = std::sqrt(1.0 - sv * sv);
  auto unitary = [&s] {
    const Eigen::Vector2cd u = s.qubit();
    Mat2 m;
    m.col(0) = u;
    m.col(1) = Eigen::Vector2cd(-std::conj(u(1)), std::conj(u(0)));
    return m;
  };
  const Ket4 v = kron(unitary(), unitary()) * Ket4(0, rv, -sv, 0);
  return PureState::normalized(v);
}
}  // namespace

TEST_CASE("Named pure states", "[puretest]") {
  const auto prod = six_inequality_test(up_up());
  CHECK(prod.verdict == PureVerdict::separable);
  CHECK(prod.reports.size() == 6);
  CHECK(prod.min_slack() >= -1e-15);
  for (double r : prod.residuals) CHECK(r == 0.0);
  for (double r : prod.residuals_abg) CHECK(r == 0.0);

  const auto s = six_inequality_test(bell::singlet());
  CHECK(s.verdict == PureVerdict::entangled);
  CHECK_THAT(s.schmidt_rs, WithinAbs(0.5, 1e-15));
  CHECK_THAT(residuals_alpha_beta_gamma(bell::singlet())[0], WithinAbs(0.5, 1e-15));
  CHECK_THAT(residuals_prime(bell::singlet())[0], WithinAbs(0.5, 1e-15));

  CHECK(six_inequality_test(up_up(), {.all_four = true}).reports.size() == 12);
  CHECK_THROWS_AS(pure_family_test(up_up(), {"delta"}), Error);
}

TEST_CASE("The permutation family misses an entangled state", "[puretest]") {
  const auto ce = permutation_counterexample();
  CHECK_THAT(ce.amplitudes().norm(), WithinAbs(1.0, 1e-15));
  for (double r : residuals_alpha_beta_gamma(ce)) CHECK_THAT(r, WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(ce.a() * ce.d() - ce.b() * ce.c()), WithinAbs(0.5, 1e-15));
  CHECK(pure_family_test(ce, permutation_family()).verdict == PureVerdict::separable);
  CHECK(six_inequality_test(ce).verdict == PureVerdict::entangled);
  CHECK_THAT(residuals_prime(ce)[1], WithinAbs(1.0, 1e-15));

  const auto eq = residual_equivalence_check(ce);
  CHECK_FALSE(eq.inequalities_hold);
  CHECK_FALSE(eq.residuals_vanish);
  CHECK(eq.consistent());

  // Rotating only particle 1 by 45 degrees leaves the gap open.
  const auto literal = literal_prime_pairs();
  for (const auto& [name, pair] : literal)
    for (const auto& r : mixsep2(ce.density(), pair)) CHECK_FALSE(r.violated());
}

TEST_CASE("Six inequalities decide pure-state separability", "[puretest][property]") {
  StateSampler s(83);
  for (int k = 0; k < 2000; ++k) {
    const auto psi = s.pure_uniform();
    const auto rep = six_inequality_test(psi);
    const bool entangled = oracle::concurrence(psi.amplitudes()) / 2.0 > 1e-9;
    CHECK((rep.verdict == PureVerdict::entangled) == entangled);
    CHECK(residual_equivalence_check(psi).consistent());
  }
}

TEST_CASE("Product states pass; near-product states still violate", "[puretest][property]") {
  StateSampler s(89);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector2cd a = s.qubit(), b = s.qubit();
    Ket4 v;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) v(2 * i + j) = a(i) * b(j);
    const PureState psi(v / v.norm());
    const auto rep = six_inequality_test(psi);
    CHECK(rep.verdict == PureVerdict::separable);
    CHECK(rep.min_slack() >= -1e-9);
    for (double r : rep.residuals) CHECK(r <= 1e-10);
  }
  for (double rs : {1e-5, 1e-4, 1e-3}) {
    for (int k = 0; k < 50; ++k) {
      const auto psi = near_product(s, rs);
      REQUIRE_THAT(std::abs(psi.a() * psi.d() - psi.b() * psi.c()), WithinAbs(rs, 1e-3 * rs));
      CHECK(six_inequality_test(psi).min_slack() < -1e-12 * rs * rs);
    }
  }
}

TEST_CASE("Global phase leaves the verdict unchanged", "[puretest][property]") {
  StateSampler s(97);
  for (int k = 0; k < 200; ++k) {
    const auto psi = s.pure_uniform();
    const double phase = 6.283185307179586 * s.uniform();
    const PureState rotated(psi.amplitudes() * std::polar(1.0, phase));
    const auto a = six_inequality_test(psi), b = six_inequality_test(rotated);
    CHECK(a.verdict == b.verdict);
    CHECK_THAT(a.min_slack(), WithinAbs(b.min_slack(), 1e-12));
  }
}
