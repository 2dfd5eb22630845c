#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mh {

using BigInt = mpz_class;

std::string to_decimal(const BigInt& x);
BigInt from_decimal(const std::string& s);

// Canonical residue in [0, m) for m >= 1.
std::int64_t residue(const BigInt& x, std::int64_t m);
std::int64_t residue(std::int64_t x, std::int64_t m);

// Narrowing with an overflow check; throws Error(Overflow).
std::int64_t to_int64(const BigInt& x);

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t m);
std::uint64_t euler_phi(std::uint64_t m);

BigInt mod_inverse(const BigInt& a, const BigInt& m);
std::int64_t mod_inverse(std::int64_t a, std::int64_t m);
std::int64_t pow_mod(std::int64_t base, std::uint64_t exp, std::int64_t m);

// 2^(phi(m)-2) mod m, the inverse of 4 for odd m.
std::int64_t half_pow_coeff(std::int64_t m);

bool is_quadratic_residue(const BigInt& n, std::int64_t m);

struct PrimalityResult {
  bool prime = false;
  bool probabilistic = false;
};

PrimalityResult is_probable_prime(const BigInt& x);
bool is_prime_u64(std::uint64_t x);

struct PrimePower {
  BigInt base;
  unsigned exponent = 0;
  bool probabilistic = false;
};

std::optional<PrimePower> is_prime_power(const BigInt& x);
std::optional<BigInt> is_perfect_square(const BigInt& x);

std::uint64_t multiplicative_order(const BigInt& a, std::uint64_t m);
bool is_primitive_root(const BigInt& a, std::uint64_t p);

BigInt repunit(const BigInt& q, std::uint64_t d);
BigInt binomial(std::uint64_t n, std::uint64_t k);

struct Condition1Witness {
  std::uint64_t p = 0;
  std::uint64_t delta = 0;
  BigInt q;
  std::uint64_t d = 0;
  BigInt r;
  PrimePower q_power;
  PrimePower r_power;
  bool probabilistic() const { return q_power.probabilistic || r_power.probabilistic; }
};

struct Condition1Report {
  Condition1Witness witness;  // fields filled as far as they could be computed
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Invariant names used in failure lists.
inline constexpr const char* kQOddPrimePower = "q_odd_prime_power";
inline constexpr const char* kQOneModP = "q_congruent_1_mod_p";
inline constexpr const char* kDeltaRange = "delta_in_range";
inline constexpr const char* kRPrimePower = "r_prime_power";
inline constexpr const char* kROneMod4 = "r_congruent_1_mod_4";

Condition1Report condition1_check(std::uint64_t p, const BigInt& q, std::uint64_t d);
Condition1Witness condition1_verify(std::uint64_t p, const BigInt& q, std::uint64_t d);

std::optional<Condition1Witness> condition1_search(std::uint64_t p, std::uint64_t delta,
                                                   std::uint64_t q_limit, std::uint64_t d_limit,
                                                   unsigned threads = 1);

}  // namespace mh
