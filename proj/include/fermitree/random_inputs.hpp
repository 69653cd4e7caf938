/// @file random_inputs.hpp
/// @brief Seeded random instances for the verification suites: antisymmetric
///        covariances, interaction kernels, skew matrices, Grassmann
///        interactions and sparse forms. One generator per suite, split
///        deterministically per instance index.

#pragma once

#include <random>

#include "fermitree/amplitude.hpp"
#include "fermitree/grassmann.hpp"

namespace fermitree {
namespace testing {

using Rng = std::mt19937_64;

/// Deterministic per-instance stream split from a suite seed.
inline Rng split_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(seed * 0x9e3779b97f4a7c15ull + index * 0x2545f4914f6cdd1dull + 1ull);
}

inline Complex random_unit(Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng)};
}

/// Antisymmetric covariance with entries O(scale).
grassmann::Covariance random_covariance(const Lattice& torus, int spins, Rng& rng,
                                        double scale = 1.0);

/// Antisymmetric interaction kernel supported on the momentum-conservation
/// shell, entries O(scale).
grassmann::InteractionKernel random_kernel(const Lattice& torus, int spins, int arity, Rng& rng,
                                           double scale = 1.0);

/// Complex skew-symmetric matrix with entries O(scale).
Eigen::MatrixXcd random_skew_matrix(int n, Rng& rng, double scale = 1.0);

/// Random even interaction polynomial: all strictly increasing monomials of
/// the given degree, coefficients O(scale).
grassmann::GrassmannPoly random_homogeneous_poly(int generators, int degree, Rng& rng,
                                                 double scale = 1.0);

exterior::Form random_form(Rng& rng, int universe, int degree, int terms);
exterior::Form random_one_form(Rng& rng, int universe);

/// Momentum-conserving external legs with random spins.
std::vector<amplitude::Leg> random_external_legs(const Lattice& torus, int spins, int count,
                                                 Rng& rng);

}  // namespace testing
}  // namespace fermitree
