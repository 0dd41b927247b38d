#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "sepbell/qmat.hpp"

using namespace sepbell;
using Catch::Matchers::WithinAbs;

TEST_CASE("Pauli matrices satisfy the su(2) algebra", "[qmat]") {
  const Mat2 x = pauli::x(), y = pauli::y(), z = pauli::z();
  const cplx i(0, 1);
  CHECK((x * y - y * x - 2.0 * i * z).norm() < 1e-15);
  CHECK((y * z - z * y - 2.0 * i * x).norm() < 1e-15);
  CHECK((z * x - x * z - 2.0 * i * y).norm() < 1e-15);
  for (int mu = 1; mu < 4; ++mu) CHECK((pauli::sigma(mu) * pauli::sigma(mu) - pauli::identity()).norm() < 1e-15);
}

TEST_CASE("kron follows the (2i+k, 2j+l) layout", "[qmat]") {
  std::mt19937_64 g(1);
  std::normal_distribution<double> n;
  Mat2 a, b;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      a(i, j) = cplx(n(g), n(g));
      b(i, j) = cplx(n(g), n(g));
    }
  const Mat4 k = kron(a, b);
  CHECK(k(3, 0) == a(1, 0) * b(1, 0));
  CHECK(k(1, 2) == a(0, 1) * b(1, 0));
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      CHECK((kron(pauli::sigma(mu), pauli::sigma(nu)) - oracle::pauli_product(mu, nu)).norm() < 1e-15);
}

TEST_CASE("Jacobi handles a real symmetric matrix", "[qmat]") {
  Eigen::Matrix3d a;
  a << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const auto e = jacobi_symmetric<3>(a);
  CHECK_THAT(e.values[0], WithinAbs(2.0 - std::sqrt(2.0), 1e-13));
  CHECK_THAT(e.values[1], WithinAbs(2.0, 1e-13));
  CHECK_THAT(e.values[2], WithinAbs(2.0 + std::sqrt(2.0), 1e-13));
  CHECK((a * e.vectors - e.vectors * Eigen::Vector3d(e.values[0], e.values[1], e.values[2]).asDiagonal()).norm() <
        1e-12);
}

TEST_CASE("Hermitian spectra agree with an independent solver", "[qmat][property]") {
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat4 m = oracle::random_hermitian(g);
    const auto spec = hermitian_eigen<4>(m);
    const auto ref = oracle::eigenvalues(m);
    for (int k = 0; k < 4; ++k) CHECK_THAT(spec.eigenvalues[k], WithinAbs(ref(k), 1e-10));
    CHECK(spec.residual < 1e-10);
    const Mat4 v = spec.eigenvectors;
    CHECK((v.adjoint() * v - Mat4::Identity()).norm() < 1e-10);
  }
}

TEST_CASE("Degenerate spectra keep independent eigenvectors", "[qmat]") {
  const Mat4 id = Mat4::Identity();
  auto spec = hermitian_eigen<4>(id);
  for (double e : spec.eigenvalues) CHECK_THAT(e, WithinAbs(1.0, 1e-14));
  CHECK((spec.eigenvectors.adjoint() * spec.eigenvectors - id).norm() < 1e-12);

  // Singlet projector: eigenvalues 0, 0, 0, 1.
  Ket4 s(0, 1, -1, 0);
  s /= s.norm();
  spec = hermitian_eigen<4>(s * s.adjoint());
  CHECK_THAT(spec.min(), WithinAbs(0.0, 1e-14));
  CHECK_THAT(spec.max(), WithinAbs(1.0, 1e-14));
  CHECK(spec.residual < 1e-12);
}

TEST_CASE("Non-Hermitian input is rejected with its defect", "[qmat]") {
  Mat4 m = Mat4::Identity();
  m(0, 1) = 0.5;
  try {
    hermitian_eigen<4>(m);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
    CHECK_THAT(e.magnitude(), WithinAbs(0.5, 1e-15));
  }
  CHECK_THROWS_AS(expectation(Mat4::Identity() / 4.0, m), Error);
}

TEST_CASE("Partial transposes match index arithmetic", "[qmat][property]") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat4 m = oracle::random_hermitian(g);
    CHECK((partial_transpose(m, Side::second) - oracle::transpose_second(m)).norm() < 1e-14);
    // Full transpose = both partial transposes.
    CHECK((partial_transpose(partial_transpose(m, Side::first), Side::second) - m.transpose()).norm() < 1e-14);
    CHECK((partial_transpose(partial_transpose(m, Side::first), Side::first) - m).norm() < 1e-14);
  }
  // (A x B)^{T_B} = A x B^T
  const Mat2 y = pauli::y();
  CHECK((partial_transpose(kron(y, y), Side::second) - kron(y, y.transpose())).norm() < 1e-15);
}

TEST_CASE("Trace products report the imaginary residue", "[qmat]") {
  const Mat4 rho = Mat4::Identity() / 4.0;
  Mat4 obs = Mat4::Zero();
  obs(0, 0) = cplx(0, 1);
  const auto tp = trace_product(rho, obs);
  CHECK(tp.value == 0.0);
  CHECK_THAT(tp.imag, WithinAbs(0.25, 1e-15));
}
