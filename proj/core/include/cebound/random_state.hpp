#pragma once

#include <cstdint>
#include <random>
#include <variant>

#include "cebound/hermitian.hpp"

namespace cebound {

/// G G* / Tr(G G*) with G having iid standard complex Gaussian entries.
struct GinibreEnsemble {};

/// Ginibre draw reshaped toward the support boundary: Tr C = eps_q,
/// lambda_min(A) >= a0, and B scaled to the largest multiple that keeps the
/// state positive semidefinite.
struct BoundaryEnsemble {
  double a0 = 0.2;
  double eps_q = 0.05;
};

using Ensemble = std::variant<GinibreEnsemble, BoundaryEnsemble>;

/// Counter-based stream derivation (splitmix64 finalizer over seed and index),
/// so a trial's randomness does not depend on evaluation order.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// rows x cols matrix of iid standard complex Gaussians (E|z|^2 = 1).
[[nodiscard]] ComplexMatrix ginibre(Index rows, Index cols, std::mt19937_64& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
[[nodiscard]] ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng);

/// Random density matrix G G* / Tr(G G*).
[[nodiscard]] ComplexMatrix random_density(Index dim, std::mt19937_64& rng);

/// Deterministic per (dim_p, dim_q, seed, ensemble). Throws InfeasibleError for
/// a boundary ensemble with dim_p * a0 + eps_q > 1.
[[nodiscard]] BlockState random_block_state(Index dim_p, Index dim_q, std::uint64_t seed,
                                            const Ensemble& ensemble = GinibreEnsemble{});

} // namespace cebound
