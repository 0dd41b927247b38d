#include <catch_amalgamated.hpp>

#include <numbers>

#include "oracles.hpp"
#include "sepbell/criteria.hpp"
#include "sepbell/random.hpp"

using namespace sepbell;
using Catch::Matchers::WithinAbs;

namespace {
const Vec3 ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();

SettingPair random_pair(StateSampler& s) {
  const Mat3 ra = s.rotation(), rb = s.rotation();
  const bool flip_a = s.uniform() < 0.5, flip_b = s.uniform() < 0.5;
  return {SpinTriple::from_matrix(flip_a ? Mat3(-ra) : ra), SpinTriple::from_matrix(flip_b ? Mat3(-rb) : rb)};
}
}  // namespace

TEST_CASE("Reports compute slack and verdict from the relation", "[criteria]") {
  auto r = make_report("t", 2.5, 2.0, 1e-9);
  CHECK(r.violated());
  CHECK_THAT(r.slack, WithinAbs(-0.5, 1e-15));
  r = make_report("t", 2.0 + 1e-10, 2.0, 1e-9);
  CHECK_FALSE(r.violated());
  r = make_report("t", -0.1, 0.0, 1e-9, Relation::at_least);
  CHECK(r.violated());
  CHECK_THAT(r.slack, WithinAbs(-0.1, 1e-15));
}

TEST_CASE("Singlet reaches the quantum CHSH bound", "[criteria]") {
  const auto rho = bell::singlet().density();
  const double h = 1.0 / std::numbers::sqrt2;
  const Vec3 b = -h * (ez + ex), b1 = h * (ex - ez);
  const auto c = chsh(rho, ez, ex, b, b1);
  CHECK_THAT(c.lhs, WithinAbs(2.0 * std::numbers::sqrt2, 1e-12));
  CHECK(c.violated());
  CHECK_FALSE(cirelson(rho, ez, ex, b, b1).violated());
  CHECK_THROWS_AS(chsh(rho, 2.0 * ez, ex, b, b1), Error);
}

TEST_CASE("Quadratic Bell expression saturates 4 on the singlet", "[criteria]") {
  const auto rho = bell::singlet().density();
  const auto q = quad(rho, ex, ey, ex, -ey);
  CHECK_THAT(q.lhs, WithinAbs(4.0, 1e-12));
  CHECK_FALSE(q.violated());
}

TEST_CASE("Universal bounds hold on random states and settings", "[criteria][property]") {
  StateSampler s(31);
  for (int k = 0; k < 300; ++k) {
    const auto rho = s.mixed();
    const Vec3 a = s.unit_vector(), a1 = s.unit_vector(), b = s.unit_vector(), b1 = s.unit_vector();
    CHECK_FALSE(cirelson(rho, a, a1, b, b1).violated());
    CHECK_FALSE(quad(rho, a, a1, b, b1).violated());
    const auto pair = random_pair(s);
    // Only the informative pair of inequalities can fail.
    for (const auto& r : mixsep2(rho, pair))
      if (r.note == "orientation-trivial") CHECK_FALSE(r.violated());
    const auto ord = ordering_eq18(rho, pair);
    CHECK(ord.consistent(1e-12));
    CHECK_THAT(ord.untilde - ord.tilde, WithinAbs(ord.correlation, 1e-12));
  }
}

TEST_CASE("Separable states satisfy every separability criterion", "[criteria][property]") {
  StateSampler s(37);
  for (int k = 0; k < 300; ++k) {
    const auto rho = s.separable_mixture();
    const auto pair = random_pair(s);
    CHECK_FALSE(sep_bound_eq7(rho, pair).violated());
    CHECK_FALSE(roy_check(rho, pair).violated());
    for (const auto& r : mixsep2(rho, pair)) CHECK_FALSE(r.violated());
    CHECK_FALSE(fidelity(rho).violated());
    CHECK_FALSE(fid2(rho).violated());
    CHECK_FALSE(ppt(rho).violated());
    const auto ga = LooBasis::from_triple(pair.a), gb = LooBasis::from_triple(pair.b);
    CHECK_FALSE(loo_linear_witness(rho, ga, gb).violated());
    CHECK_FALSE(loo_nonlinear_witness(rho, ga, gb).violated());
    Eigen::Matrix4d o = Eigen::Matrix4d::Identity();
    o.topLeftCorner<3, 3>() = s.rotation();
    CHECK_FALSE(loo_linear_witness(rho, LooBasis::from_orthogonal(o), LooBasis::from_triple(pair.b)).violated());
  }
}

TEST_CASE("Bloch route reproduces the octet expectations", "[criteria][property]") {
  StateSampler s(41);
  for (int k = 0; k < 200; ++k) {
    const auto rho = s.mixed();
    const auto pair = random_pair(s);
    const auto m = octet_means(rho, pair);
    const auto f = octet_means(pauli_decompose(rho), pair);
    CHECK_THAT(m.i, WithinAbs(f.i, 1e-12));
    CHECK_THAT(m.i_t, WithinAbs(f.i_t, 1e-12));
    CHECK_THAT(m.x, WithinAbs(f.x, 1e-12));
    CHECK_THAT(m.x_t, WithinAbs(f.x_t, 1e-12));
    CHECK_THAT(m.y, WithinAbs(f.y, 1e-12));
    CHECK_THAT(m.y_t, WithinAbs(f.y_t, 1e-12));
    CHECK_THAT(m.z, WithinAbs(f.z, 1e-12));
    CHECK_THAT(m.z_t, WithinAbs(f.z_t, 1e-12));
  }
}

TEST_CASE("Pure states saturate the orientation-trivial inequality", "[criteria][property]") {
  StateSampler s(43);
  for (int k = 0; k < 200; ++k) {
    const auto psi = s.pure_uniform();
    SettingPair pair = random_pair(s);
    const auto reports = mixsep2(psi.density(), pair);
    const int trivial = pair.same_orientation() ? 2 : 0;
    CHECK_THAT(reports[trivial].slack, WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("Werner states violate the quadratic inequality above one third", "[criteria]") {
  const SettingPair pauli_pair;
  for (double p : {0.0, 0.2, 0.33, 0.34, 0.5, 1.0}) {
    const auto reports = mixsep2(werner(p), pauli_pair);
    CHECK_THAT(reports[1].lhs, WithinAbs(p * p, 1e-12));
    CHECK_THAT(reports[1].rhs, WithinAbs((1 - p) * (1 - p) / 4, 1e-12));
    CHECK(reports[1].violated() == (p > 1.0 / 3.0));
    CHECK(ppt(werner(p)).violated() == (p > 1.0 / 3.0));
  }
}

TEST_CASE("Fidelity criterion and its rewrite agree", "[criteria][property]") {
  CHECK(fidelity(bell::phi_plus().density()).violated());
  CHECK_THAT(fidelity(bell::phi_plus().density()).lhs, WithinAbs(1.0, 1e-14));
  StateSampler s(47);
  for (int k = 0; k < 300; ++k) {
    const auto rho = s.mixed();
    CHECK(fidelity(rho).violated() == fid2(rho).violated());
    CHECK_THAT(fidelity(rho).slack, WithinAbs(0.5 * fid2(rho).slack, 1e-12));
  }
}

TEST_CASE("LOO witnesses on the noisy singlet", "[criteria]") {
  const auto ref = loo_reference_pair();
  const auto ga = LooBasis::from_triple(ref.a), gb = LooBasis::from_triple(ref.b);
  for (double p : {0.0, 0.1, 0.25, 0.4, 0.7, 1.0}) {
    const auto rho = noisy_singlet(p);
    CHECK_THAT(loo_linear_witness(rho, ga, gb).slack, WithinAbs((4 - 10 * p) / 6, 1e-12));
    CHECK_THAT(loo_nonlinear_witness(rho, ga, gb).slack,
               WithinAbs((4 - 10 * p) / 6 - 4 * (1 - p) * (1 - p) / 9, 1e-12));
  }
  Eigen::Matrix4d bad = Eigen::Matrix4d::Identity();
  bad(0, 1) = 0.2;
  try {
    LooBasis::from_orthogonal(bad);
    FAIL("expected NotLooBasis");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotLooBasis);
  }
}

TEST_CASE("PPT agrees with the determinant test", "[criteria][property]") {
  std::mt19937_64 g(53);
  int entangled = 0;
  for (int k = 0; k < 300; ++k) {
    const auto m = oracle::random_density(g);
    const auto rho = DensityMatrix::validate(m);
    const auto r = ppt(rho);
    CHECK_THAT(r.lhs, WithinAbs(oracle::ppt_min_eigenvalue(m), 1e-10));
    if (std::abs(r.lhs) > 1e-8) CHECK(r.violated() == (oracle::ppt_determinant(m) < 0));
    entangled += r.violated();
  }
  CHECK(entangled > 0);
}

TEST_CASE("Projector expectation matches its octet expansion", "[criteria][property]") {
  StateSampler s(59);
  for (int k = 0; k < 300; ++k) {
    const auto rho = s.mixed();
    const auto psi = s.pure_uniform();
    const auto b = appendix_c_bound(rho, psi);
    CHECK_THAT(b.direct, WithinAbs(b.expansion, 1e-9));
    CHECK(b.lower_bound <= b.direct + 1e-12);
    CHECK(b.frames.a.handedness() == 1);
    CHECK(b.frames.b.handedness() == 1);
  }
}

TEST_CASE("Worked values on named states", "[criteria][examples]") {
  const auto singlet = bell::singlet().density();
  const auto mixed = maximally_mixed();
  const double h = 1.0 / std::numbers::sqrt2;

  CHECK_THAT(chsh(singlet, ex, ey, -h * (ex + ey), h * (ey - ex)).lhs, WithinAbs(2.0 * std::numbers::sqrt2, 1e-12));
  CHECK_THAT(chsh(mixed, ex, ey, ez, ex).lhs, WithinAbs(0.0, 1e-15));
  const auto upup = chsh(up_up().density(), ez, ez, ez, ez);
  CHECK_THAT(upup.lhs, WithinAbs(2.0, 1e-15));
  CHECK_FALSE(upup.violated());
  CHECK_THAT(quad_lhs(up_up().density(), ex, ey, ex, ey), WithinAbs(0.0, 1e-15));

  const SettingPair saturating{SpinTriple::pauli(), SpinTriple::from_axes(ex, -ey, -ez)};
  const auto e7 = sep_bound_eq7(singlet, saturating);
  CHECK_THAT(e7.lhs, WithinAbs(4.0, 1e-12));
  CHECK_THAT(e7.rhs, WithinAbs(1.0, 1e-12));
  CHECK(e7.violated());
  const auto e7p = sep_bound_eq7(up_up().density(), SettingPair{});
  CHECK_THAT(e7p.lhs, WithinAbs(0.0, 1e-15));
  CHECK_THAT(e7p.rhs, WithinAbs(0.0, 1e-15));
  CHECK_FALSE(e7p.violated());
  CHECK_THAT(roy_check(mixed, SettingPair{}).lhs, WithinAbs(0.0, 1e-15));

  const auto m = octet_means(werner(0.6), SettingPair{});
  CHECK_THAT(m.x_t, WithinAbs(-0.6, 1e-12));
  CHECK_THAT(m.i, WithinAbs(0.2, 1e-12));
  CHECK_THAT(m.i_t, WithinAbs(0.8, 1e-12));
  for (double v : {m.x, m.y, m.y_t, m.z, m.z_t}) CHECK_THAT(v, WithinAbs(0.0, 1e-12));

  const auto mm = octet_means(mixed, SettingPair{});
  CHECK_THAT(mm.i, WithinAbs(0.5, 1e-15));
  CHECK_THAT(mm.i_t, WithinAbs(0.5, 1e-15));

  const double p = 0.3;
  const auto ns = octet_means(noisy_singlet(p), loo_reference_pair());
  CHECK_THAT(ns.x_t, WithinAbs(p, 1e-12));
  CHECK_THAT(ns.z_t, WithinAbs(-2.0 * (1 - p) / 3, 1e-12));
  CHECK_THAT(ns.i_t, WithinAbs(2.0 * (1 - p) / 3, 1e-12));
  const auto loo = mixsep2(noisy_singlet(p), loo_reference_pair());
  CHECK_THAT(loo[3].lhs, WithinAbs(p * p, 1e-12));
  CHECK_THAT(loo[3].rhs, WithinAbs(0.0, 1e-12));
  CHECK(loo[3].violated());
  CHECK(loo[3].note == "informative");
  CHECK(loo[0].note == "orientation-trivial");

  const auto w5 = mixsep2(werner(0.5), SettingPair{});
  CHECK_THAT(w5[1].lhs, WithinAbs(0.25, 1e-12));
  CHECK_THAT(w5[1].rhs, WithinAbs(0.0625, 1e-12));

  const auto ord = ordering_eq18(werner(0.5), SettingPair{});
  CHECK_THAT(ord.correlation, WithinAbs(-0.5, 1e-12));
  CHECK(ord.predicted == BoundOrdering::untilde_lowest);
  CHECK_THAT(ord.untilde, WithinAbs(0.0625, 1e-12));
  CHECK_THAT(ord.quarter, WithinAbs(0.25, 1e-12));
  CHECK_THAT(ord.tilde, WithinAbs(0.5625, 1e-12));
  CHECK(ord.consistent(1e-12));
  const auto ord0 = ordering_eq18(up_up().density(), SettingPair{});
  CHECK(ord0.predicted == BoundOrdering::degenerate);
  CHECK(ord0.consistent(1e-12));

  CHECK_THAT(fidelity(werner(0.7)).lhs, WithinAbs(0.3 / 4, 1e-12));
  CHECK_THAT(fidelity(mixed).lhs, WithinAbs(0.25, 1e-15));

  const auto ga = LooBasis::from_triple(loo_reference_pair().a), gb = LooBasis::from_triple(SpinTriple::pauli());
  CHECK_THAT(loo_linear_witness(mixed, ga, gb).slack, WithinAbs(0.5, 1e-15));
  CHECK_THAT(loo_nonlinear_witness(mixed, ga, gb).slack, WithinAbs(0.5, 1e-15));
  CHECK_THAT(loo_linear_witness(noisy_singlet(0.4), ga, gb).slack, WithinAbs(0.0, 1e-12));
  CHECK_FALSE(loo_linear_witness(noisy_singlet(0.4), ga, gb).violated());
  CHECK_THAT(loo_nonlinear_witness(noisy_singlet(0.3), ga, gb).slack, WithinAbs(1.0 / 6 - 4 * 0.49 / 9, 1e-12));

  CHECK_THAT(ppt(bell::phi_plus().density()).lhs, WithinAbs(-0.5, 1e-12));
  CHECK(ppt(bell::phi_plus().density()).relation == Relation::at_least);
}

TEST_CASE("A fidelity violation implies a quadratic one", "[criteria][property]") {
  StateSampler s(61);
  int implied = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto rho = s.mixed();
    if (!fid2(rho).violated()) continue;
    ++implied;
    CHECK(mixsep2(rho, SettingPair{})[0].violated());
  }
  CHECK(implied > 0);
}

TEST_CASE("Separable states respect the projector lower bound", "[criteria][property]") {
  StateSampler s(67);
  for (int k = 0; k < 300; ++k) {
    const auto rho = s.separable_mixture();
    const auto b = appendix_c_bound(rho, s.pure_uniform());
    for (const auto& r : mixsep2(rho, b.frames)) CHECK_FALSE(r.violated());
    CHECK(b.lower_bound >= -1e-9);
  }
}
