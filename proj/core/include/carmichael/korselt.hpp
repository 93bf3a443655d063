#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "carmichael/arith.hpp"
#include "carmichael/nat.hpp"

namespace carmichael {

enum class Mode { agp, erdos, external };

std::string_view to_string(Mode mode);
/// Throws DomainError for unknown names.
Mode parse_mode(std::string_view name);

struct CertificateChecks {
  bool composite = false;
  bool squarefree = false;
  bool korselt = false;
  bool residue_class = false;
  bool probabilistic_primality_used = false;

  bool all_pass() const noexcept { return composite && squarefree && korselt && residue_class; }
  friend bool operator==(const CertificateChecks&, const CertificateChecks&) = default;
};

/// A checkable witness that n is a Carmichael number congruent to a mod M.
struct CarmichaelCertificate {
  Nat n;
  std::vector<Nat> prime_factors;  // ascending
  Mode mode = Mode::external;
  Nat shared_multiplier;           // k0 (agp), Lambda (erdos), 0 (external)
  Nat L;                           // 0 when unused
  std::uint64_t M = 1;
  std::uint64_t a = 0;
  CertificateChecks checks;

  friend bool operator==(const CarmichaelCertificate&, const CarmichaelCertificate&) = default;
};

/// Korselt's criterion: n composite, squarefree, and p - 1 | n - 1 for all p | n.
/// Throws DomainError if `f` does not multiply to n.
bool korselt_check(const Nat& n, const Factorization& f);

/// a^n = a (mod n). Requires n >= 2.
bool fermat_witness(const Nat& n, const Nat& a);

struct CarmichaelEntry {
  std::uint64_t n = 0;
  Factorization factors;
};

struct EnumerationOptions {
  std::size_t segment_length = std::size_t{1} << 20;
  unsigned threads = 1;
};

inline constexpr std::uint64_t kEnumerationCap = 1'000'000'000;

/// All Carmichael numbers n < limit, ascending. Throws CapacityError above
/// kEnumerationCap.
std::vector<CarmichaelEntry> enumerate_carmichael(std::uint64_t limit,
                                                  const EnumerationOptions& options = {});

/// Counts of Carmichael numbers below `limit` per residue class mod M.
struct CensusTable {
  std::uint64_t limit = 0;
  std::uint64_t modulus = 1;
  /// Every residue coprime to the modulus, including zero counts.
  std::map<std::uint64_t, std::uint64_t> counts;
  /// Carmichael numbers sharing a factor with the modulus.
  std::uint64_t other = 0;

  std::uint64_t total() const noexcept;
};

inline constexpr std::uint64_t kCensusModulusCap = 10'000'000;

/// Buckets Carmichael numbers below `limit` by residue mod `modulus`.
/// Modulus 1 yields the single bucket 0 holding the total.
CensusTable census(std::uint64_t limit, std::uint64_t modulus, const EnumerationOptions& options = {});
CensusTable census_of(std::span<const CarmichaelEntry> entries, std::uint64_t limit,
                      std::uint64_t modulus);

}  // namespace carmichael
