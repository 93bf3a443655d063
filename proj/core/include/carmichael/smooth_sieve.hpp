#pragma once

// Primes q whose shifted value q - 1 is y-smooth, filtered by the congruence
// q = -1 (mod 4 phi(M)), plus the counting function for such primes.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "carmichael/nat.hpp"

namespace carmichael {

/// Positive rational num/den in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  /// Accepts "3/2", "1.5" or "2".
  static Rational parse(std::string_view text);
  long double value() const noexcept { return static_cast<long double>(num) / den; }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& l, const Rational& r) {
    return static_cast<unsigned __int128>(l.num) * r.den < static_cast<unsigned __int128>(r.num) * l.den;
  }
};

inline constexpr std::uint64_t kSieveCapacity = 10'000'000'000ULL;

struct SmoothPrimeQuery {
  std::uint64_t y = 0;  // smoothness bound, >= 2
  Rational theta;       // strictly between 1 and 2
  std::uint64_t M = 1;

  /// Throws DomainError on a bad y or theta.
  void validate() const;
  /// ceil(y^theta / ln y)
  std::uint64_t window_low() const;
  /// floor(y^theta), exact.
  std::uint64_t window_high() const;
};

/// Sieve of Eratosthenes; all primes <= n.
std::vector<std::uint64_t> primes_up_to(std::uint64_t n);

/// Largest prime factor of n >= 1; P(1) = 1.
std::uint64_t largest_prime_factor(std::uint64_t n);
Nat largest_prime_factor(const Nat& n);

/// Largest prime factor of every integer in [lo, hi], computed by dividing
/// out base primes segment-wide.
class LargestPrimeFactorTable {
 public:
  LargestPrimeFactorTable(std::uint64_t lo, std::uint64_t hi);
  std::uint64_t operator()(std::uint64_t n) const { return values_[n - lo_]; }
  std::uint64_t lo() const noexcept { return lo_; }
  std::uint64_t hi() const noexcept { return hi_; }

 private:
  std::uint64_t lo_;
  std::uint64_t hi_;
  std::vector<std::uint64_t> values_;
};

struct BuildQStats {
  std::uint64_t window_low = 0;
  std::uint64_t window_high = 0;
  /// Primes dropped by the (phi(q)/2, phi(M)) = 1 filter applied for M > 2.
  std::size_t coprimality_rejections = 0;
};

/// Primes q in [window_low, window_high] with q coprime to M,
/// q = -1 (mod 4 phi(M)) and P(q - 1) <= y. Ascending.
std::vector<std::uint64_t> build_q(const SmoothPrimeQuery& query, BuildQStats* stats = nullptr);

/// Number of primes q < z with P(q - 1) <= v and q = b (mod d).
std::uint64_t count_smooth_primes(std::uint64_t z, std::uint64_t v, std::uint64_t d, std::uint64_t b);

}  // namespace carmichael
