#include "carmichael/nat.hpp"

#include <limits>
#include <ostream>

#include "carmichael/errors.hpp"

namespace carmichael {

Nat::Nat(std::uint64_t v) {
  static_assert(sizeof(unsigned long) == sizeof(std::uint64_t), "LP64 target expected");
  value_ = static_cast<unsigned long>(v);
}

Nat::Nat(const mpz_class& v) : value_(v) {
  if (sgn(value_) < 0) throw DomainError("Nat: negative value " + v.get_str());
}

Nat::Nat(mpz_class&& v) : value_(std::move(v)) {
  if (sgn(value_) < 0) throw DomainError("Nat: negative value " + value_.get_str());
}

Nat Nat::parse(std::string_view decimal) {
  if (decimal.empty()) throw DomainError("Nat: empty string");
  for (char c : decimal) {
    if (c < '0' || c > '9') {
      throw DomainError("Nat: not a nonnegative decimal integer: '" + std::string(decimal) + "'");
    }
  }
  return Nat(mpz_class(std::string(decimal), 10));
}

bool Nat::fits_u64() const noexcept { return mpz_fits_ulong_p(value_.get_mpz_t()) != 0; }

std::uint64_t Nat::to_u64() const {
  if (!fits_u64()) throw CapacityError("value " + to_string() + " exceeds 64 bits");
  return mpz_get_ui(value_.get_mpz_t());
}

std::size_t Nat::bit_length() const noexcept {
  return is_zero() ? 0 : mpz_sizeinbase(value_.get_mpz_t(), 2);
}

std::string Nat::to_string() const { return value_.get_str(10); }

Nat& Nat::operator+=(const Nat& rhs) {
  value_ += rhs.value_;
  return *this;
}

Nat& Nat::operator-=(const Nat& rhs) {
  if (value_ < rhs.value_) {
    throw DomainError("Nat: " + to_string() + " - " + rhs.to_string() + " is negative");
  }
  value_ -= rhs.value_;
  return *this;
}

Nat& Nat::operator*=(const Nat& rhs) {
  value_ *= rhs.value_;
  return *this;
}

Nat& Nat::operator/=(const Nat& rhs) {
  if (rhs.is_zero()) throw DomainError("Nat: division by zero");
  mpz_fdiv_q(value_.get_mpz_t(), value_.get_mpz_t(), rhs.value_.get_mpz_t());
  return *this;
}

Nat& Nat::operator%=(const Nat& rhs) {
  if (rhs.is_zero()) throw DomainError("Nat: modulo by zero");
  mpz_fdiv_r(value_.get_mpz_t(), value_.get_mpz_t(), rhs.value_.get_mpz_t());
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Nat& n) { return os << n.to_string(); }

Nat gcd(const Nat& a, const Nat& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return Nat(std::move(g));
}

Nat lcm(const Nat& a, const Nat& b) {
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return Nat(std::move(l));
}

Nat pow(const Nat& base, std::uint64_t exponent) {
  if (exponent > std::numeric_limits<unsigned long>::max()) {
    throw CapacityError("pow: exponent too large");
  }
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(exponent));
  return Nat(std::move(r));
}

bool divides(const Nat& d, const Nat& n) {
  if (d.is_zero()) return n.is_zero();
  return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0;
}

}  // namespace carmichael

std::size_t std::hash<carmichael::Nat>::operator()(const carmichael::Nat& n) const noexcept {
  std::size_t h = 0;
  const mpz_srcptr z = n.get_mpz_t();
  const std::size_t limbs = mpz_size(z);
  for (std::size_t i = 0; i < limbs; ++i) {
    h ^= std::hash<mp_limb_t>{}(mpz_getlimbn(z, i)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}
