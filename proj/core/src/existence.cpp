#include "mh/existence.hpp"

#include <numeric>

#include <json.hpp>

#include "mh/error.hpp"
#include "mh/planner.hpp"

namespace mh {

namespace {

using nlohmann::json;

std::string nstr(const BigInt& n) { return to_decimal(n); }

bool nonneg_integer(const BigRational& q) { return q.get_den() == 1 && q.get_num() >= 0; }

Verdict base_verdict(const BigInt& n, std::int64_t m) {
  Verdict v;
  v.n = n;
  v.m = m;
  v.conjecture_prediction = conjecture_prediction(n, m);
  return v;
}

Verdict refuted(Verdict v, Reason reason, std::string detail) {
  v.status = Status::NotExists;
  v.reason = reason;
  v.detail = std::move(detail);
  return v;
}

bool modulus_covers(const BigInt& modulus, std::int64_t m) { return modulus == 0 || residue(modulus, m) == 0; }

std::optional<Verdict> from_plan(Verdict v, const DecideOptions& opt, PlanResult& plan) {
  if (!plan) return std::nullopt;
  const RecipePtr& r = plan.recipe;
  if (!modulus_covers(r->modulus, v.m))
    throw Error(ErrorCode::InternalError, "planner recipe has modulus " + nstr(r->modulus) + ", not a multiple of " +
                                              std::to_string(v.m));
  if (r->order != v.n) throw Error(ErrorCode::InternalError, "planner recipe has the wrong order");
  if (r->materializable && fits_cap(*r, opt.materialize_cap)) {
    const SignMatrix h = materialize(r, opt.materialize_cap);
    if (!verify_mh(h, v.m).verdict)
      throw Error(ErrorCode::InternalError, "materialized certificate fails at modulus " + std::to_string(v.m));
    v.certificate_check = "materialized";
  } else {
    const auto check = check_recipe(r);
    if (!check.ok) throw Error(ErrorCode::InternalError, "planner recipe fails its parameter check");
    v.certificate_check = "parametric";
  }
  v.status = Status::Exists;
  v.reason = Reason::Constructed;
  v.detail = plan.note;
  v.certificate = r;
  return v;
}

std::optional<Verdict> from_search(Verdict v, const DecideOptions& opt) {
  if (opt.search_cap == 0 || v.n > static_cast<unsigned long>(opt.search_cap)) return std::nullopt;
  const auto n = static_cast<std::size_t>(v.n.get_ui());
  search::SearchProblem p;
  p.n = n;
  p.m = v.m;
  p.goal = search::Goal::First;
  p.threads = opt.search_threads;
  const auto ni = static_cast<std::int64_t>(n);
  const bool restricted_ok = v.m % 2 == 1 && ni % 2 == 1 && ni < 3 * v.m && std::gcd(ni, v.m) == 1;
  if (restricted_ok && n <= p.max_restricted)
    p.mode = search::Mode::Restricted;
  else if (n <= p.max_generic)
    p.mode = search::Mode::Generic;
  else
    return std::nullopt;
  search::SearchOutcome out;
  try {
    out = search::run(p);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::LimitExceeded) return std::nullopt;
    throw;
  }
  const std::string what = std::string(search::to_string(p.mode)) + " search over " +
                           std::to_string(out.candidate_row_count) + " candidate rows";
  if (out.found) {
    v.status = Status::Exists;
    v.reason = Reason::SearchFound;
    v.detail = what;
    v.certificate = *out.found;
    v.certificate_check = "materialized";
    return v;
  }
  if (out.exhausted) return refuted(std::move(v), Reason::SearchExhausted, what + " exhausted");
  return std::nullopt;
}

json rational_json(const BigRational& q) { return to_string(q); }

json certificate_json(const Certificate& c, std::int64_t m) {
  if (const auto* r = std::get_if<RecipePtr>(&c)) return {{"kind", "recipe"}, {"recipe", json::parse(recipe_to_json(*r))}};
  const auto& h = std::get<SignMatrix>(c);
  json rows = json::array();
  for (std::size_t i = 0; i < h.order(); ++i) {
    std::string s(h.order(), '+');
    for (std::size_t j = 0; j < h.order(); ++j)
      if (h.negative(i, j)) s[j] = '-';
    rows.push_back(s);
  }
  return {{"kind", "matrix"}, {"order", std::to_string(h.order())}, {"modulus", m}, {"rows", rows}};
}

json small_case_object(const SmallCaseReport& r) {
  json j{{"n", r.n}, {"m", r.m}, {"delta", nstr(r.delta)}, {"admissible", r.admissible}};
  if (r.sqrt_delta) j["sqrt_delta"] = nstr(*r.sqrt_delta);
  if (r.d_plus) j["d_plus"] = rational_json(*r.d_plus);
  if (r.d_minus) j["d_minus"] = rational_json(*r.d_minus);
  if (r.row_profile)
    j["row_profile"] = {{"alpha_count", nstr(r.row_profile->alpha_count)},
                        {"beta_count", nstr(r.row_profile->beta_count)},
                        {"a", rational_json(r.row_profile->a)},
                        {"c_minus_b", rational_json(r.row_profile->c_minus_b)}};
  return j;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Exists:
      return "Exists";
    case Status::NotExists:
      return "NotExists";
    case Status::Unknown:
      return "Unknown";
  }
  return "?";
}

const char* to_string(Reason r) {
  switch (r) {
    case Reason::GcdBound:
      return "GcdBound";
    case Reason::QuadNonResidue:
      return "QuadNonResidue";
    case Reason::SmallOddDelta:
      return "SmallOddDelta";
    case Reason::SmallEvenRealHadamard:
      return "SmallEvenRealHadamard";
    case Reason::Constructed:
      return "Constructed";
    case Reason::SearchFound:
      return "SearchFound";
    case Reason::SearchExhausted:
      return "SearchExhausted";
    case Reason::ThresholdNotMet:
      return "ThresholdNotMet";
    case Reason::NoKnownConstruction:
      return "NoKnownConstruction";
  }
  return "?";
}

std::string to_string(const BigRational& q) {
  return q.get_den() == 1 ? nstr(q.get_num()) : nstr(q.get_num()) + "/" + nstr(q.get_den());
}

std::optional<std::string> check_gcd_bound(const BigInt& n, std::int64_t m) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "the gcd bound needs n >= 3");
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
  const std::int64_t g = std::gcd(m, std::int64_t{4});
  if (residue(n, g) != 0) return "gcd(m, 4) = " + std::to_string(g) + " does not divide " + nstr(n);
  if (residue(n, 2) == 1 && residue(n, m) != 0) {
    // m is odd here, since an even m would have failed the divisibility test
    const std::int64_t r = residue(BigInt(static_cast<long>(half_pow_coeff(m))) * n, m);
    if (n < 4 * r)
      return "r = " + std::to_string(r) + " (n/4 mod m) and 4r = " + std::to_string(4 * r) + " > " + nstr(n);
  }
  return std::nullopt;
}

std::optional<std::string> check_quadratic_residue(const BigInt& n, std::int64_t m) {
  if (residue(n, 2) == 0) return std::nullopt;
  BigInt g;
  const BigInt mb(static_cast<long>(m));
  mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), mb.get_mpz_t());
  if (g != 1) return std::nullopt;
  if (is_quadratic_residue(n, m)) return std::nullopt;
  return nstr(n) + " is odd, prime to " + std::to_string(m) + " and not a square mod " + std::to_string(m);
}

std::optional<std::string> small_even_reduction(const BigInt& n, std::int64_t m) {
  if (m % 2 == 0 || residue(n, 2) != 0) return std::nullopt;
  if (n >= 2 * m || n <= 2 || residue(n, 4) == 0) return std::nullopt;
  return "n < 2m forces every off-diagonal inner product to 0, and no real Hadamard matrix of order " + nstr(n) +
         " exists";
}

BigInt small_case_delta(std::int64_t n0, std::int64_t m0) {
  const BigInt n(static_cast<long>(n0));
  const BigInt m(static_cast<long>(m0));
  const BigInt m2 = m * m;
  return 36 * m2 * m2 + m2 * m * (4 - 28 * n) + m2 * (5 * n * n - 2 * n + 1) + 2 * m * n * (n * n - 1) +
         (n - 1) * (n - 1) * n * n;
}

SmallCaseReport small_case_test(std::int64_t n, std::int64_t m) {
  if (n < 3 || m < 3 || n % 2 == 0 || m % 2 == 0 || n >= 3 * m || std::gcd(n, m) != 1)
    throw Error(ErrorCode::NotApplicable, "the small odd test needs n odd, m odd, n < 3m and gcd(n, m) = 1");
  SmallCaseReport r;
  r.n = n;
  r.m = m;
  r.delta = small_case_delta(n, m);
  r.sqrt_delta = is_perfect_square(r.delta);
  if (r.sqrt_delta) {
    const BigInt nb(static_cast<long>(n));
    const BigInt mb(static_cast<long>(m));
    const BigInt base = 14 * mb * mb - mb * nb - mb - nb * nb + nb;
    BigRational plus(base + *r.sqrt_delta, 8 * mb);
    BigRational minus(base - *r.sqrt_delta, 8 * mb);
    plus.canonicalize();
    minus.canonicalize();
    r.d_plus = plus;
    r.d_minus = minus;
    std::optional<BigInt> d;
    if (nonneg_integer(minus)) d = minus.get_num();
    if (nonneg_integer(plus) && (!d || plus.get_num() < *d)) d = plus.get_num();
    r.admissible = d.has_value();
    if (d) {
      RowCounts rc;
      rc.alpha_count = *d;
      rc.beta_count = nb - 1 - *d;
      rc.a = BigRational(nb - mb, 4);
      rc.a.canonicalize();
      rc.c_minus_b = BigRational((nb - mb) * (nb - mb - 1), 4 * mb);
      rc.c_minus_b.canonicalize();
      r.row_profile = rc;
    }
  }
  return r;
}

bool special_case_2m_plus_1(std::int64_t m) {
  if (m < 3 || m % 2 == 0) throw Error(ErrorCode::InvalidArgument, "m must be odd and at least 3");
  const BigInt mb(static_cast<long>(m));
  return is_perfect_square(mb * mb + (mb + 1) * (mb + 1)).has_value();
}

std::optional<bool> conjecture_prediction(const BigInt& n, std::int64_t m) {
  if (m < 3 || !is_prime_u64(static_cast<std::uint64_t>(m))) return std::nullopt;
  return residue(n, 2) == 0 || residue(n, m) == 0 || is_quadratic_residue(n, m);
}

Verdict decide(const BigInt& n, std::int64_t m, const DecideOptions& opt) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "decide needs n >= 3");
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "decide needs m >= 2");
  Verdict v = base_verdict(n, m);

  if (auto why = check_quadratic_residue(n, m)) return refuted(std::move(v), Reason::QuadNonResidue, *why);
  if (auto why = check_gcd_bound(n, m)) return refuted(std::move(v), Reason::GcdBound, *why);
  if (auto why = small_even_reduction(n, m)) return refuted(std::move(v), Reason::SmallEvenRealHadamard, *why);
  // The counting behind the Delta test only closes up at n = 2m + 1; elsewhere J - 2I
  // already contradicts it (n = m + 4).
  if (m % 2 == 1 && n == 2 * m + 1) {
    auto report = small_case_test(2 * m + 1, m);
    const bool admissible = report.admissible;
    v.small_case = std::move(report);
    if (!admissible)
      return refuted(std::move(v), Reason::SmallOddDelta,
                     "Delta = " + nstr(v.small_case->delta) + " gives no admissible alpha-column count");
  }

  auto plan = plan_explained(n, m);
  if (auto got = from_plan(v, opt, plan)) return *got;
  if (auto got = from_search(v, opt)) return *got;

  v.status = Status::Unknown;
  v.detail = plan.note;
  if (plan.below_threshold) {
    v.reason = Reason::ThresholdNotMet;
    v.threshold_note = plan.note;
  } else {
    v.reason = Reason::NoKnownConstruction;
  }
  return v;
}

std::string verdict_to_json(const Verdict& v, int indent) {
  json j{{"n", nstr(v.n)}, {"m", v.m}, {"status", to_string(v.status)}, {"reason", to_string(v.reason)}};
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (v.threshold_note) j["threshold_note"] = *v.threshold_note;
  if (v.certificate) j["certificate"] = certificate_json(*v.certificate, v.m);
  if (v.certificate_check) j["certificate_check"] = *v.certificate_check;
  if (v.conjecture_prediction) j["conjecture_prediction"] = *v.conjecture_prediction;
  if (v.small_case) j["small_case"] = small_case_object(*v.small_case);
  return j.dump(indent);
}

std::string small_case_to_json(const SmallCaseReport& r, int indent) { return small_case_object(r).dump(indent); }

}  // namespace mh
