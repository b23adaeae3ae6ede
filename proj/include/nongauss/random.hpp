#pragma once

// Seeded random density matrices: rho = U diag(lambda) U^dag with U Haar
// distributed and lambda uniform on the probability simplex.

#include "nongauss/fock.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string_view>

namespace nongauss {

/// Named, reproducible random stream. Streams with different names or
/// indices are statistically independent for the same master seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::string_view name = {}, std::uint64_t index = 0) {
    const std::uint64_t h = fnv1a(name);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  std::mt19937_64 engine_;
};

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) moved into Q.
inline cmat haar_unitary(int dim, RandomStream& rng) {
  if (dim < 1) throw Error(ErrorKind::invalid_dimension, "unitary dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  cmat z(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) z(i, j) = cplx(normal(rng.engine()), normal(rng.engine()));
  Eigen::HouseholderQR<cmat> qr(z);
  cmat q = qr.householderQ();
  const cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    q.col(k) *= mag > 0.0 ? r(k, k) / mag : cplx(1.0);
  }
  return q;
}

/// Uniform point on the probability simplex (normalized exponentials).
inline rvec simplex_point(int dim, RandomStream& rng) {
  if (dim < 1) throw Error(ErrorKind::invalid_dimension, "simplex dimension must be positive");
  std::exponential_distribution<double> exponential(1.0);
  rvec x(dim);
  for (int k = 0; k < dim; ++k) x(k) = exponential(rng.engine());
  return x / x.sum();
}

inline constexpr int max_random_photon_number = 20;

/// Random state on the span of |0>, ..., |d>, stored at cutoff d + 1.
inline FockState random_state(int d, RandomStream& rng) {
  if (d < 0 || d > max_random_photon_number) {
    throw Error(ErrorKind::domain, "random-state photon number must lie in [0, 20]");
  }
  const int dim = d + 1;
  const cmat u = haar_unitary(dim, rng);
  const rvec lambda = simplex_point(dim, rng);
  cmat rho = u * lambda.cast<cplx>().asDiagonal() * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return FockState::from_matrix(ModeShape::single(dim), std::move(rho), {}, Validation::basic);
}

inline FockState random_state(int d, std::uint64_t seed) {
  RandomStream rng(seed, "random-state");
  return random_state(d, rng);
}

inline cmat haar_unitary(int dim, std::uint64_t seed) {
  RandomStream rng(seed, "haar");
  return haar_unitary(dim, rng);
}

inline rvec simplex_point(int dim, std::uint64_t seed) {
  RandomStream rng(seed, "simplex");
  return simplex_point(dim, rng);
}

}  // namespace nongauss
