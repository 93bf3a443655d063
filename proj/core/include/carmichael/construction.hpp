#pragma once

// End-to-end construction of Carmichael numbers in a residue class:
// pool of primes -> residue target -> subset product -> certificate.

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "carmichael/group_solver.hpp"
#include "carmichael/korselt.hpp"
#include "carmichael/nat.hpp"
#include "carmichael/pipeline.hpp"
#include "carmichael/smooth_sieve.hpp"

namespace carmichael {

/// Desk-scale overrides of the asymptotic sizes.
struct ConstructionCaps {
  std::optional<std::uint64_t> x_cap;
  std::uint64_t k_cap = 10'000;
  std::size_t pool_cap = 1'000;
};

struct ConstructionParams {
  std::uint64_t M = 1;
  std::uint64_t a = 1;
  Mode mode = Mode::erdos;

  // agp mode
  std::uint64_t y = 0;
  Rational theta{3, 2};
  Rational B{2, 5};
  std::set<std::uint64_t> excluded;
  CongruenceFilters filters;

  // erdos mode
  Nat lambda;

  ConstructionCaps caps;
  std::size_t min_factors = 3;
  std::size_t max_factors = kUnbounded;

  /// Throws DomainError on inconsistent parameters.
  void validate() const;
};

struct ConstructionState {
  Mode mode = Mode::erdos;

  // agp mode
  std::vector<std::uint64_t> Q;
  Nat L_prime;
  std::optional<Nat> x_faithful;  // nullopt when above the size limit
  long double ln_x_faithful = 0;
  std::uint64_t x_used = 0;
  Nat L;
  Factorization L_fact;
  KSearchResult k;

  // erdos mode
  Nat lambda;

  std::vector<PoolEntry> pool;
  bool pool_too_small = false;
};

struct ConstructionOutcome {
  ConstructionState state;
  std::optional<GroupSpec> group;
  std::optional<ResidueTarget> target;
  std::optional<GroupInvariants> invariants;  // agp mode only
  std::optional<IndexSubset> subset;
  std::optional<CarmichaelCertificate> certificate;
};

/// Runs the pipeline for `params`. A missing certificate means the search
/// completed without a solution; errors are reserved for infeasible or
/// over-capacity inputs.
ConstructionOutcome construct(const ConstructionParams& params, unsigned threads = 1,
                              const SolverOptions& solver = {});

}  // namespace carmichael
