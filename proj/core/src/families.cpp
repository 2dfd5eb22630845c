#include "mh/families.hpp"

#include <array>
#include <optional>

#include "mh/error.hpp"

namespace mh {

namespace {

BigInt big(std::uint64_t x) { return BigInt(static_cast<unsigned long>(x)); }

Family10Params family10_impl(const BigInt& q, std::uint64_t d, std::uint64_t e, std::optional<PrimePower> r_power) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "family 10 needs d >= 2");
  if (e < 1) throw Error(ErrorCode::InvalidArgument, "family 10 needs e >= 1");
  if (q < 2 || !is_prime_power(q)) throw Error(ErrorCode::InvalidArgument, to_decimal(q) + " is not a prime power");
  Family10Params f;
  f.q = q;
  f.d = d;
  f.e = e;
  f.r = repunit(q, d);
  BigInt re;
  mpz_pow_ui(re.get_mpz_t(), f.r.get_mpz_t(), e);
  BigInt re1;
  mpz_pow_ui(re1.get_mpz_t(), f.r.get_mpz_t(), e - 1);
  f.k = re;
  f.v = 1 + q * f.r * ((re - 1) / (f.r - 1));
  const BigInt num = re1 * (f.r - 1);
  f.q_divides = mpz_divisible_p(num.get_mpz_t(), q.get_mpz_t()) != 0;
  f.lambda = num / q;
  if (!r_power) r_power = is_prime_power(f.r);
  f.r_prime_power = r_power.has_value();
  f.r_probabilistic = r_power && r_power->probabilistic;
  return f;
}

void require_odd_prime(std::uint64_t p) {
  if (p < 3 || !is_prime_u64(p)) throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not an odd prime");
}

unsigned two_adic(std::uint64_t x) {
  unsigned t = 0;
  while (x % 2 == 0) x /= 2, ++t;
  return t;
}

// Condition-1 rows known for p = 11, as (delta, q, d).
constexpr std::array<std::array<std::uint64_t, 3>, 10> kP11Witnesses{{
    {1, 463, 397}, {2, 397, 13}, {3, 2663, 3}, {4, 67, 367}, {5, 23, 5},
    {6, 419, 17}, {7, 947, 7}, {8, 67, 19}, {9, 617, 317}, {10, 89, 109},
}};

Condition1Witness find_witness(std::uint64_t p, std::uint64_t delta, std::uint64_t q_limit, std::uint64_t d_limit) {
  if (p == 11)
    for (const auto& row : kP11Witnesses)
      if (row[0] == delta) return condition1_verify(p, big(row[1]), row[2]);
  auto w = condition1_search(p, delta, q_limit, d_limit);
  if (!w)
    throw Error(ErrorCode::ConstraintFailed, "no Condition-1 witness for p = " + std::to_string(p) +
                                                 ", delta = " + std::to_string(delta) + " within the limits");
  return *w;
}

Family10Choice finish(std::uint64_t p, std::uint64_t n_residue, const Condition1Witness& w, std::uint64_t e,
                      ParityConstraint parity, unsigned t) {
  Family10Choice c;
  c.p = p;
  c.n_residue = n_residue;
  c.witness = w;
  c.design = family10_impl(w.q, w.d, e, w.r_power);
  c.parity = parity;
  c.t = t;
  c.constraints = check_constraints_1_to_4(c.design.params(), p, big(n_residue), parity, t);
  return c;
}

}  // namespace

Family10Params family10_params(const BigInt& q, std::uint64_t d, std::uint64_t e) {
  return family10_impl(q, d, e, std::nullopt);
}

Family11Params family11_params(const BigInt& q, std::uint64_t e) {
  if (e < 1) throw Error(ErrorCode::InvalidArgument, "family 11 needs e >= 1");
  if (q < 3 || mpz_even_p(q.get_mpz_t()) || !is_prime_power(q))
    throw Error(ErrorCode::InvalidArgument, to_decimal(q) + " is not an odd prime power");
  Family11Params f;
  f.q = q;
  f.e = e;
  BigInt qe, qe1;
  mpz_pow_ui(qe.get_mpz_t(), q.get_mpz_t(), e);
  mpz_pow_ui(qe1.get_mpz_t(), q.get_mpz_t(), e - 1);
  f.k = qe;
  f.v = 1 + 2 * q * ((qe - 1) / (q - 1));
  f.lambda = qe1 * (q - 1) / 2;
  return f;
}

ConstraintReport check_constraints_1_to_4(const DesignParams& params, std::uint64_t p, const BigInt& n,
                                          ParityConstraint parity, unsigned t) {
  require_odd_prime(p);
  const auto m = static_cast<std::int64_t>(p);
  ConstraintReport r;
  switch (parity) {
    case ParityConstraint::ThreeMod4:
      r.parity = residue(params.v, 4) == 3;
      break;
    case ParityConstraint::Even:
      r.parity = residue(params.v, 2) == 0;
      break;
    case ParityConstraint::TwoAdic: {
      if (t > 60) throw Error(ErrorCode::InvalidArgument, "2-adic exponent too large");
      const std::int64_t mod = std::int64_t{1} << (t + 1);
      r.parity = residue(params.v, mod) == (1 + (std::int64_t{1} << t)) % mod;
      break;
    }
  }
  r.v_one_mod_p = residue(params.v, m) == 1 % m;
  r.k_one_mod_p = residue(params.k, m) == 1 % m;
  const BigInt target = BigInt(static_cast<long>(half_pow_coeff(m))) * (4 - n);
  r.lambda_ok = residue(params.lambda - target, m) == 0;
  return r;
}

GentechChoice gentech_choice(std::uint64_t p, std::uint64_t r) {
  require_odd_prime(p);
  if (p % 4 != 3) throw Error(ErrorCode::InvalidArgument, "gentech needs p = 3 (mod 4)");
  if (!is_primitive_root(2, p)) throw Error(ErrorCode::InvalidArgument, "2 is not a primitive root of " + std::to_string(p));
  r %= p;
  if (r == 0 || !is_quadratic_residue(big(r), static_cast<std::int64_t>(p)))
    throw Error(ErrorCode::InvalidArgument, std::to_string(r) + " is not a quadratic residue of " + std::to_string(p));
  GentechChoice c;
  c.p = p;
  c.r = r;
  c.n0 = 2 * (1 + r) % p;
  const auto pi = static_cast<std::int64_t>(p);
  for (c.i = 1; static_cast<std::uint64_t>(pow_mod(2, c.i + 2, pi)) != c.n0; ++c.i) {
  }
  const auto rinv = static_cast<std::uint64_t>(mod_inverse(static_cast<std::int64_t>(r), pi));
  std::uint64_t q = rinv;
  while (q < 3 || q == p || !is_prime_u64(q)) q += p;
  const std::uint64_t e = (q % p == 1) ? p : multiplicative_order(big(q), p);
  c.design = family11_params(big(q), e);
  c.constraints = check_constraints_1_to_4(c.design.params(), p, big(c.n0), ParityConstraint::ThreeMod4);
  return c;
}

Family10Choice three_mod_four_choice(std::uint64_t p, std::uint64_t n_residue, bool odd_size, std::uint64_t q_limit,
                                     std::uint64_t d_limit) {
  require_odd_prime(p);
  if (p % 4 != 3) throw Error(ErrorCode::InvalidArgument, "this choice needs p = 3 (mod 4)");
  n_residue %= p;
  if (n_residue == 0) throw Error(ErrorCode::InvalidArgument, "target residue must be a unit mod p");
  const auto pi = static_cast<std::int64_t>(p);
  if (odd_size && !is_quadratic_residue(big(n_residue), pi))
    throw Error(ErrorCode::ConstraintFailed, "odd sizes need n to be a quadratic residue");
  const auto delta = static_cast<std::uint64_t>(4 * mod_inverse(static_cast<std::int64_t>(n_residue), pi) % pi);
  const auto w = find_witness(p, delta, q_limit, d_limit);
  const bool r_one = residue(w.r, pi) == 1;
  if (odd_size) return finish(p, n_residue, w, r_one ? p : (p - 1) / 2, ParityConstraint::Even, 0);
  return finish(p, n_residue, w, r_one ? 2 * p : p - 1, ParityConstraint::ThreeMod4, 0);
}

Family10Choice one_mod_four_choice(std::uint64_t p, std::uint64_t n_residue, unsigned j, std::uint64_t q_limit,
                                   std::uint64_t d_limit) {
  require_odd_prime(p);
  if (p % 4 != 1) throw Error(ErrorCode::InvalidArgument, "this choice needs p = 1 (mod 4)");
  const unsigned i = two_adic(p - 1);
  if (j > i) throw Error(ErrorCode::InvalidArgument, "j must lie in [0, i]");
  n_residue %= p;
  if (n_residue == 0) throw Error(ErrorCode::InvalidArgument, "target residue must be a unit mod p");
  const auto pi = static_cast<std::int64_t>(p);
  const auto delta = static_cast<std::uint64_t>(4 * mod_inverse(static_cast<std::int64_t>(n_residue), pi) % pi);
  if (pow_mod(static_cast<std::int64_t>(delta), (p - 1) >> j, pi) != 1)
    throw Error(ErrorCode::ConstraintFailed, "4/n is not a 2^j-th power mod p");
  const auto w = find_witness(p, delta, q_limit, d_limit);
  const bool r_one = residue(w.r, pi) == 1;
  const std::uint64_t e = r_one ? p : multiplicative_order(w.r, p);
  // The 2-part of e is at most 2^(i-j); when r is a higher power it is smaller.
  return finish(p, n_residue, w, e, ParityConstraint::TwoAdic, two_adic(e));
}

}  // namespace mh
