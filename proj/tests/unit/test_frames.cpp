#include <catch_amalgamated.hpp>

#include "octet_algebra.hpp"
#include "sepbell/frames.hpp"
#include "sepbell/random.hpp"

using namespace sepbell;
using Catch::Matchers::WithinAbs;

namespace {
SpinTriple random_triple(StateSampler& s, bool right_handed) {
  const Mat3 r = s.rotation();
  return SpinTriple::from_matrix(right_handed ? r : Mat3(-r));
}
}  // namespace

TEST_CASE("Spin operators need unit directions", "[frames]") {
  CHECK_NOTHROW(spin_operator(Vec3(0, 0, 1)));
  try {
    spin_operator(Vec3(0, 0, 1.1));
    FAIL("expected NotUnit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotUnit);
    CHECK_THAT(e.magnitude(), WithinAbs(0.1, 1e-12));
  }
}

TEST_CASE("Triples validate orthonormality and record handedness", "[frames]") {
  CHECK(SpinTriple::pauli().handedness() == 1);
  CHECK(SpinTriple::from_matrix(-Mat3::Identity()).handedness() == -1);
  Mat3 skew = Mat3::Identity();
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(SpinTriple::from_matrix(skew), Error);
  CHECK(flip_orientation(SpinTriple::pauli()).handedness() == 1);

  const auto named = named_triples();
  CHECK(named.size() == 5);
  for (const auto& [name, pair] : named) {
    INFO(name);
    CHECK(pair.same_orientation());
    CHECK((pair.b.axes() * pair.b.axes().transpose() - Mat3::Identity()).norm() < 1e-12);
  }
  CHECK(named.at("alpha").a.handedness() == 1);
  CHECK(named.at("beta").a.handedness() == -1);
  CHECK(named.at("gamma").a.handedness() == 1);
  // Amended pairs: B'' along z.
  CHECK((named.at("beta_prime").b.axis(2) - Vec3::UnitZ()).norm() < 1e-12);
  CHECK((named.at("gamma_prime").b.axis(2) - Vec3::UnitZ()).norm() < 1e-12);
  CHECK((named.at("beta_prime").b.axis(0) + Vec3::UnitX()).norm() < 1e-12);
}

TEST_CASE("Right-handed triples obey [A, A'] = 2i A''", "[frames][property]") {
  StateSampler s(21);
  for (int k = 0; k < 100; ++k) {
    for (bool rh : {true, false}) {
      const auto t = random_triple(s, rh);
      const Mat2 c = t.op(0) * t.op(1) - t.op(1) * t.op(0);
      CHECK((c - cplx(0, 2.0 * t.handedness()) * t.op(2)).norm() < 1e-12);
    }
  }
}

TEST_CASE("Octet relations hold for every orientation", "[frames][property]") {
  StateSampler s(23);
  for (int k = 0; k < 100; ++k) {
    for (bool ra : {true, false})
      for (bool rb : {true, false}) {
        const SettingPair pair{random_triple(s, ra), random_triple(s, rb)};
        CHECK(algebra::octet_defect(pair) < 1e-12);
      }
  }
}

TEST_CASE("Flipping B exchanges every octet operator with its partner", "[frames]") {
  StateSampler s(29);
  const SettingPair pair{random_triple(s, true), random_triple(s, true)};
  const SettingPair flipped{pair.a, flip_orientation(pair.b)};
  const auto o = eight_operators(pair);
  const auto f = eight_operators(flipped);
  CHECK((o.i - f.i_t).norm() < 1e-12);
  CHECK((o.x - f.x_t).norm() < 1e-12);
  CHECK((o.y - f.y_t).norm() < 1e-12);
  CHECK((o.z - f.z_t).norm() < 1e-12);
}

TEST_CASE("Pauli octet in the computational basis", "[frames]") {
  const auto o = eight_operators(SettingPair{});
  // I projects on span{uu, dd}; X swaps uu and dd.
  CHECK(o.i(0, 0) == cplx(1));
  CHECK(o.i(3, 3) == cplx(1));
  CHECK(std::abs(o.i(1, 1)) < 1e-15);
  CHECK(std::abs(o.x(0, 3) - 1.0) < 1e-15);
  CHECK(std::abs(o.x_t(1, 2) - 1.0) < 1e-15);
  CHECK(std::abs(o.z(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(o.z_t(1, 1) - 1.0) < 1e-15);
}
