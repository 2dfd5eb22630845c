#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mh/numtheory.hpp"

namespace mh {

// Square bit matrix, rows packed into 64-bit words. Bits past the order are 0.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n) : n_(n), w_((n + 63) / 64), bits_(n * w_, 0) {}

  std::size_t order() const { return n_; }
  std::size_t words() const { return w_; }
  bool bit(std::size_t i, std::size_t j) const { return (bits_[i * w_ + j / 64] >> (j % 64)) & 1U; }
  void set_bit(std::size_t i, std::size_t j, bool v) {
    auto& w = bits_[i * w_ + j / 64];
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    w = v ? (w | mask) : (w & ~mask);
  }
  const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * w_; }
  std::uint64_t* row(std::size_t i) { return bits_.data() + i * w_; }
  std::uint64_t last_word_mask() const {
    return (n_ % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (n_ % 64)) - 1);
  }
  std::size_t bytes() const { return bits_.size() * sizeof(std::uint64_t); }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 protected:
  std::size_t n_ = 0;
  std::size_t w_ = 0;
  std::vector<std::uint64_t> bits_;
};

// +/-1 matrix; a set bit is a -1 entry, so the all-ones matrix is all zero words.
class SignMatrix : public BitMatrix {
 public:
  SignMatrix() = default;
  explicit SignMatrix(std::size_t n) : BitMatrix(n) {}

  static SignMatrix all_ones(std::size_t n);
  static SignMatrix j_minus_2i(std::size_t n);
  static SignMatrix from_entries(const std::vector<std::vector<int>>& entries);

  int at(std::size_t i, std::size_t j) const { return bit(i, j) ? -1 : 1; }
  void set(std::size_t i, std::size_t j, int v) { set_bit(i, j, v < 0); }
  bool negative(std::size_t i, std::size_t j) const { return bit(i, j); }

  // <r_i, r_j> = n - 2 popcount(r_i xor r_j)
  std::int64_t inner_product(std::size_t i, std::size_t j) const;
  void negate_row(std::size_t i);
  void negate_col(std::size_t j);
  bool is_normalized() const;
  std::vector<std::vector<int>> entries() const;

  friend bool operator==(const SignMatrix&, const SignMatrix&) = default;
};

// 0/1 matrix; a set bit is a 1 entry.
class IncidenceMatrix : public BitMatrix {
 public:
  IncidenceMatrix() = default;
  explicit IncidenceMatrix(std::size_t v) : BitMatrix(v) {}

  static IncidenceMatrix identity(std::size_t v);
  static IncidenceMatrix all_ones(std::size_t v);
  static IncidenceMatrix from_entries(const std::vector<std::vector<int>>& entries);

  int at(std::size_t i, std::size_t j) const { return bit(i, j) ? 1 : 0; }
  void set(std::size_t i, std::size_t j, int v) { set_bit(i, j, v != 0); }
  std::int64_t row_sum(std::size_t i) const;
  std::int64_t col_sum(std::size_t j) const;
  std::int64_t row_overlap(std::size_t i, std::size_t j) const;
  IncidenceMatrix complement() const;

  friend bool operator==(const IncidenceMatrix&, const IncidenceMatrix&) = default;
};

// (v, k, lambda; modulus). modulus 0 means exact integer parameters; otherwise
// k and lambda are compared as residues mod modulus.
struct DesignParams {
  BigInt v;
  BigInt k;
  BigInt lambda;
  std::int64_t modulus = 0;

  bool exact() const { return modulus == 0; }
  std::int64_t k_residue() const { return exact() ? to_int64(k) : residue(k, modulus); }
  std::int64_t lambda_residue() const { return exact() ? to_int64(lambda) : residue(lambda, modulus); }
  // The same design viewed modulo m (exact parameters reduced).
  DesignParams at_modulus(std::int64_t m) const;
  std::string to_string() const;

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

struct GramReport {
  std::int64_t modulus = 0;
  bool diagonal_ok = false;
  // residue of <r_i, r_j> (exact value when modulus is 0) -> number of pairs i < j
  std::map<std::int64_t, std::uint64_t> offdiag_residues;
  bool verdict = false;
};

// modulus 0 checks HH^T = nI exactly.
GramReport verify_mh(const SignMatrix& h, std::int64_t m);
bool verify_design(const IncidenceMatrix& d, const DesignParams& params);

SignMatrix normalize(const SignMatrix& h);

// gcd(m1 m2, n1 m2, n2 m1) with 0 meaning exact.
std::int64_t kronecker_modulus(const BigInt& n1, std::int64_t m1, const BigInt& n2, std::int64_t m2);
SignMatrix kronecker_product(const SignMatrix& a, const SignMatrix& b);
std::pair<SignMatrix, std::int64_t> kronecker(const SignMatrix& h1, std::int64_t m1, const SignMatrix& h2,
                                              std::int64_t m2);

// Parameters D(H) must have for an MH(n, m) with gcd(n, m) = 1.
DesignParams core_design_params(const BigInt& n, std::int64_t m);
std::pair<IncidenceMatrix, DesignParams> core_to_design(const SignMatrix& h, std::int64_t m);

IncidenceMatrix direct_sum(const IncidenceMatrix& d1, const DesignParams& p1, const IncidenceMatrix& d2,
                           const DesignParams& p2);
bool dsum_check(const DesignParams& p1, const DesignParams& p2);
SignMatrix design_to_mh(const IncidenceMatrix& d);

std::int64_t det_squared_mod(const SignMatrix& h, std::int64_t m);
BigInt determinant(const SignMatrix& h);

// Text formats: header "n m" then n rows over "+-"; header "v k lambda m" then rows over "01".
void write_sign_matrix(std::ostream& os, const SignMatrix& h, std::int64_t m);
std::pair<SignMatrix, std::int64_t> read_sign_matrix(std::istream& is);
std::string sign_matrix_text(const SignMatrix& h, std::int64_t m);
void write_design(std::ostream& os, const IncidenceMatrix& d, const DesignParams& params);
std::pair<IncidenceMatrix, DesignParams> read_design(std::istream& is);

}  // namespace mh
