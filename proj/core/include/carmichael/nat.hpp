#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace carmichael {

/// Arbitrary-precision nonnegative integer.
///
/// Thin value type over `mpz_class`; subtraction that would go negative
/// throws DomainError instead of wrapping.
class Nat {
 public:
  Nat() = default;
  Nat(std::uint64_t v);  // NOLINT(google-explicit-constructor)
  explicit Nat(const mpz_class& v);
  explicit Nat(mpz_class&& v);

  /// Parses a decimal string of digits only.
  static Nat parse(std::string_view decimal);

  const mpz_class& mpz() const noexcept { return value_; }
  mpz_srcptr get_mpz_t() const noexcept { return value_.get_mpz_t(); }

  bool is_zero() const noexcept { return sgn(value_) == 0; }
  bool is_one() const noexcept { return value_ == 1; }
  bool is_even() const noexcept { return mpz_even_p(value_.get_mpz_t()) != 0; }
  bool fits_u64() const noexcept;
  /// Throws CapacityError if the value does not fit.
  std::uint64_t to_u64() const;
  std::size_t bit_length() const noexcept;
  std::string to_string() const;

  Nat& operator+=(const Nat& rhs);
  Nat& operator-=(const Nat& rhs);
  Nat& operator*=(const Nat& rhs);
  Nat& operator/=(const Nat& rhs);
  Nat& operator%=(const Nat& rhs);

  friend Nat operator+(Nat lhs, const Nat& rhs) { return lhs += rhs; }
  friend Nat operator-(Nat lhs, const Nat& rhs) { return lhs -= rhs; }
  friend Nat operator*(Nat lhs, const Nat& rhs) { return lhs *= rhs; }
  friend Nat operator/(Nat lhs, const Nat& rhs) { return lhs /= rhs; }
  friend Nat operator%(Nat lhs, const Nat& rhs) { return lhs %= rhs; }

  friend bool operator==(const Nat& lhs, const Nat& rhs) noexcept {
    return cmp(lhs.value_, rhs.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const Nat& lhs, const Nat& rhs) noexcept {
    const int c = cmp(lhs.value_, rhs.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Nat& n);

 private:
  mpz_class value_{0};
};

Nat gcd(const Nat& a, const Nat& b);
Nat lcm(const Nat& a, const Nat& b);
/// Exact integer power.
Nat pow(const Nat& base, std::uint64_t exponent);
/// True iff `d` divides `n` (d = 0 divides only 0).
bool divides(const Nat& d, const Nat& n);

}  // namespace carmichael

template <>
struct std::hash<carmichael::Nat> {
  std::size_t operator()(const carmichael::Nat& n) const noexcept;
};
