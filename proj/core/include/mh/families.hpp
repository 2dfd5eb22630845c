#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mh/matrix.hpp"
#include "mh/numtheory.hpp"

namespace mh {

// Family-10 designs (1 + q r (r^e - 1)/(r - 1), r^e, r^(e-1)(r - 1)/q) with
// r = repunit(q, d). The exponent e is written m in the literature.
struct Family10Params {
  BigInt q;
  std::uint64_t d = 0;
  std::uint64_t e = 0;
  BigInt r;
  BigInt v, k, lambda;
  bool r_prime_power = false;
  bool r_probabilistic = false;
  bool q_divides = false;  // q | r^(e-1)(r - 1)
  bool valid() const { return r_prime_power && q_divides; }
  DesignParams params() const { return {v, k, lambda, 0}; }
};

// Family-11 designs (1 + 2q(q^e - 1)/(q - 1), q^e, q^(e-1)(q - 1)/2), q odd.
struct Family11Params {
  BigInt q;
  std::uint64_t e = 0;
  BigInt v, k, lambda;
  DesignParams params() const { return {v, k, lambda, 0}; }
};

Family10Params family10_params(const BigInt& q, std::uint64_t d, std::uint64_t e);
Family11Params family11_params(const BigInt& q, std::uint64_t e);

enum class ParityConstraint {
  ThreeMod4,  // v = 3 (mod 4)
  Even,       // v = 0 (mod 2)
  TwoAdic,    // v = 1 + 2^t (mod 2^(t+1))
};

struct ConstraintReport {
  bool parity = false;       // (1), the caller-selected variant
  bool v_one_mod_p = false;  // (2)
  bool k_one_mod_p = false;  // (3)
  bool lambda_ok = false;    // (4) lambda = 2^(phi(p)-2)(4 - n) (mod p)
  bool all() const { return parity && v_one_mod_p && k_one_mod_p && lambda_ok; }
};

ConstraintReport check_constraints_1_to_4(const DesignParams& params, std::uint64_t p, const BigInt& n,
                                          ParityConstraint parity, unsigned t = 0);

// Design choice for an odd prime p = 3 (mod 4) with 2 a primitive root and a
// quadratic residue r: family 11 with q = r^-1 (mod p) prime.
struct GentechChoice {
  std::uint64_t p = 0;
  std::uint64_t r = 0;
  std::uint64_t n0 = 0;  // 2(1 + r) mod p
  std::uint64_t i = 0;   // least i >= 1 with 2^(i+2) = n0 (mod p)
  Family11Params design;
  ConstraintReport constraints;
};
GentechChoice gentech_choice(std::uint64_t p, std::uint64_t r);

// Family-10 choice from a Condition-1 witness for p = 3 (mod 4), for sizes n = 4 delta^-1 (mod p).
struct Family10Choice {
  std::uint64_t p = 0;
  std::uint64_t n_residue = 0;
  Condition1Witness witness;
  Family10Params design;
  ParityConstraint parity = ParityConstraint::ThreeMod4;
  unsigned t = 0;
  ConstraintReport constraints;
};
Family10Choice three_mod_four_choice(std::uint64_t p, std::uint64_t n_residue, bool odd_size, std::uint64_t q_limit,
                                     std::uint64_t d_limit);

// Choice for p = 2^i + 1 (mod 2^(i+1)) with j in [0, i].
Family10Choice one_mod_four_choice(std::uint64_t p, std::uint64_t n_residue, unsigned j, std::uint64_t q_limit,
                                   std::uint64_t d_limit);

}  // namespace mh
