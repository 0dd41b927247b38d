#pragma once

// Seeded samplers for oracle studies. One sampler per worker; samplers are
// not thread-safe.

#include <cstdint>
#include <random>

#include <Eigen/Geometry>

#include "sepbell/qmat.hpp"
#include "sepbell/states.hpp"

namespace sepbell {

/// splitmix64 finalizer, used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StateKind { pure_uniform, mixed_trace_metric, separable_mixture };

class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed) : engine_(seed) {}

  double normal() { return gauss_(engine_); }
  double uniform() { return unit_(engine_); }
  std::mt19937_64& engine() { return engine_; }

  /// Uniform on the unit sphere of C^4.
  PureState pure_uniform() {
    Ket4 v;
    for (int i = 0; i < 4; ++i) v(i) = cplx(normal(), normal());
    return PureState::normalized(v);
  }

  /// Qubit state uniform on the Bloch sphere.
  Eigen::Vector2cd qubit() {
    Eigen::Vector2cd v(cplx(normal(), normal()), cplx(normal(), normal()));
    return v / v.norm();
  }

  Vec3 unit_vector() {
    Vec3 v(normal(), normal(), normal());
    return v / v.norm();
  }

  /// Haar-random rotation via a uniform unit quaternion.
  Mat3 rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return q.toRotationMatrix();
  }

  /// G G^dagger / Tr with G complex Ginibre (Hilbert-Schmidt measure).
  DensityMatrix mixed() {
    Mat4 g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = cplx(normal(), normal());
    Mat4 rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::validate(0.5 * (rho + rho.adjoint()));
  }

  /// Convex mixture of 1..8 random pure product states.
  DensityMatrix separable_mixture() {
    std::uniform_int_distribution<int> count(1, 8);
    const int n = count(engine_);
    Mat4 rho = Mat4::Zero();
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double w = -std::log(1.0 - uniform());
      const Eigen::Vector2cd a = qubit(), b = qubit();
      Ket4 prod;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) prod(2 * i + j) = a(i) * b(j);
      rho += w * prod * prod.adjoint();
      total += w;
    }
    rho /= total;
    return DensityMatrix::validate(0.5 * (rho + rho.adjoint()));
  }

  DensityMatrix state(StateKind kind) {
    switch (kind) {
      case StateKind::pure_uniform: return pure_uniform().density();
      case StateKind::mixed_trace_metric: return mixed();
      case StateKind::separable_mixture: return separable_mixture();
    }
    return mixed();
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline DensityMatrix random_state(std::uint64_t seed, StateKind kind) { return StateSampler(seed).state(kind); }

inline PureState random_pure_state(std::uint64_t seed) { return StateSampler(seed).pure_uniform(); }

}  // namespace sepbell
