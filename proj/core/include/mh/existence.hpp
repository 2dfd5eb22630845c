#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "mh/recipe.hpp"
#include "mh/search.hpp"

namespace mh {

using BigRational = mpq_class;

enum class Status { Exists, NotExists, Unknown };

enum class Reason {
  GcdBound,
  QuadNonResidue,
  SmallOddDelta,
  SmallEvenRealHadamard,
  Constructed,
  SearchFound,
  SearchExhausted,
  ThresholdNotMet,
  NoKnownConstruction,
};

const char* to_string(Status s);
const char* to_string(Reason r);

struct RowCounts {
  BigInt alpha_count;  // d
  BigInt beta_count;   // n - 1 - d
  BigRational a;          // (n - m)/4
  BigRational c_minus_b;  // (n - m)(n - m - 1)/(4m)
};

struct SmallCaseReport {
  std::int64_t n = 0;
  std::int64_t m = 0;
  BigInt delta;
  std::optional<BigInt> sqrt_delta;
  std::optional<BigRational> d_plus;
  std::optional<BigRational> d_minus;
  bool admissible = false;
  std::optional<RowCounts> row_profile;
};

// Each returns a human-readable explanation when the condition rules MH(n, m) out.
std::optional<std::string> check_gcd_bound(const BigInt& n, std::int64_t m);
std::optional<std::string> check_quadratic_residue(const BigInt& n, std::int64_t m);
// Requires m odd and n even; other inputs give no conclusion.
std::optional<std::string> small_even_reduction(const BigInt& n, std::int64_t m);

BigInt small_case_delta(std::int64_t n, std::int64_t m);
// Throws NotApplicable unless n is odd, n < 3m, gcd(n, m) = 1 and m is odd.
SmallCaseReport small_case_test(std::int64_t n, std::int64_t m);
// m^2 + (m+1)^2 is a perfect square. Throws InvalidArgument unless m is odd and >= 3.
bool special_case_2m_plus_1(std::int64_t m);

// n is even or a square mod p, for odd prime p; nullopt otherwise.
std::optional<bool> conjecture_prediction(const BigInt& n, std::int64_t m);

struct DecideOptions {
  std::size_t search_cap = 0;  // largest n handed to the search fallback; 0 turns it off
  std::size_t materialize_cap = kDefaultMaterializeCap;
  unsigned search_threads = 1;
};

using Certificate = std::variant<RecipePtr, SignMatrix>;

struct Verdict {
  BigInt n;
  std::int64_t m = 0;
  Status status = Status::Unknown;
  Reason reason = Reason::NoKnownConstruction;
  std::string detail;
  std::optional<std::string> threshold_note;
  std::optional<Certificate> certificate;
  // "materialized" (built and checked entrywise) or "parametric" (check_recipe only)
  std::optional<std::string> certificate_check;
  std::optional<bool> conjecture_prediction;
  std::optional<SmallCaseReport> small_case;
};

Verdict decide(const BigInt& n, std::int64_t m, const DecideOptions& options = {});

std::string verdict_to_json(const Verdict& v, int indent = -1);
std::string small_case_to_json(const SmallCaseReport& r, int indent = -1);
std::string to_string(const BigRational& q);

}  // namespace mh
