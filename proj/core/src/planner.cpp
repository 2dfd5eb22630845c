#include "mh/planner.hpp"

#include <array>
#include <numeric>

#include "mh/error.hpp"
#include "mh/families.hpp"

namespace mh {

namespace rc = recipe;

namespace {

const char* const kFamily12 = "family12_52480_5832_648";
const char* const kMenon = "menon_36_15_6";

std::int64_t mod(const BigInt& n, std::int64_t m) { return residue(n, m); }

PlanResult none(std::string note) { return {nullptr, std::move(note)}; }
PlanResult below(std::string note) { return {nullptr, std::move(note), true}; }
PlanResult found(RecipePtr r, std::string note) { return {std::move(r), std::move(note)}; }

std::string nstr(const BigInt& n) { return to_decimal(n); }

// MH(14k + 43, 7): core of a doubled J - 2I of order 7k + 4 plus the Menon design.
RecipePtr menon_chain(const BigInt& n) {
  if (n < 43 || mod(n, 14) != 1) return nullptr;
  const BigInt k = (n - 43) / 14;
  return rc::direct_sum_with_design(rc::doubled(rc::j_minus_2i(7 * k + 4)), rc::catalog_design(kMenon), 7);
}

// The m = 5 case. n = 1 (mod 5) sizes start from three seeds and grow by 15 and 20.
PlanResult plan5(const BigInt& n) {
  const auto r10 = mod(n, 10);
  if (r10 == 3 || r10 == 7) return none(nstr(n) + " is odd and not a quadratic residue of 5");
  if (r10 == 8) return found(rc::doubled(rc::j_minus_2i(n / 2)), "doubled J - 2I");
  if (r10 == 2) {
    const BigInt l = (n - 12) / 10;
    return found(rc::iterate(rc::paley_hadamard(11), rc::catalog_design("paley_11_6_3"), l.get_ui(), 5),
                 "Paley order 12 iterated with (11,6,3)");
  }
  // r10 is 1 or 6
  if (n == 6) return none("no MH(6,5) exists");
  if (n == 11) return none("no MH(11,5) exists");
  struct Seed {
    std::int64_t order;
    RecipePtr (*make)();
  };
  const std::array<Seed, 3> seeds{{
      {16, [] { return rc::doubled(rc::doubled(rc::j_minus_2i(4))); }},
      {21, [] { return rc::design_matrix(rc::catalog_design("pg2_4_21_5_1")); }},
      {26, [] { return rc::two_circulant(rc::catalog_design("pg2_3_13_4_1"), rc::catalog_design("trivial_13_1_0")); }},
  }};
  // Fewest iteration steps, then the smaller seed. With 3a + 4c = t, the most
  // 20-point steps is the largest c <= t/4 with c = t (mod 3).
  std::optional<std::tuple<BigInt, std::size_t, BigInt, BigInt>> best;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const BigInt rest = n - seeds[s].order;
    if (rest < 0 || mod(rest, 5) != 0) continue;
    const BigInt t = rest / 5;
    const BigInt q4 = t / 4;
    const BigInt c = q4 - mod(q4 - t, 3);
    if (c < 0) continue;
    const BigInt a = (t - 4 * c) / 3;
    if (!best || a + c < std::get<0>(*best)) best = std::tuple{a + c, s, a, c};
  }
  if (!best) return none("no seed reaches " + nstr(n));
  const auto& [steps, s, a, c] = *best;
  if (!a.fits_ulong_p() || !c.fits_ulong_p()) return none("order too large for iteration counts");
  RecipePtr r = seeds[s].make();
  r = rc::iterate(r, rc::catalog_design("ds_16_6_2_z4z4"), a.get_ui(), 5);
  r = rc::iterate(r, rc::catalog_design("pg2_4c_21_16_12"), c.get_ui(), 5);
  return found(r, "seed of order " + std::to_string(seeds[s].order) + " iterated with (16,6,2) and (21,16,12)");
}

RecipePtr build_10mod14(const BigInt& n) {
  const BigInt big_step = family11_params(23, 3).v - 1;
  const BigInt small_step = family11_params(9, 3).v - 1;
  for (std::uint64_t b = 0; b <= 1; ++b)
    for (std::uint64_t a = 0; a <= 2; ++a) {
      const BigInt rest = n - 24 - big_step * static_cast<unsigned long>(a) - small_step * static_cast<unsigned long>(b);
      if (rest < 0 || mod(rest, 84) != 0) continue;
      auto inner = m7_build_2mod7(7 * (rest / 84) + 2);
      if (!inner) return nullptr;
      RecipePtr r = rc::kron(inner, rc::paley_hadamard(11));
      r = rc::iterate(r, rc::family11(23, 3), a, 7);
      return rc::iterate(r, rc::family11(9, 3), b, 7);
    }
  return nullptr;
}

PlanResult plan7(const BigInt& n) {
  const auto r7 = mod(n, 7);
  const auto r14 = mod(n, 14);
  const bool odd = r14 % 2 == 1;
  if (odd && (r7 == 3 || r7 == 5 || r7 == 6)) return none(nstr(n) + " is odd and not a quadratic residue of 7");
  if (r14 == 8) return found(rc::doubled(rc::j_minus_2i(n / 2)), "doubled J - 2I");
  if (r14 == 1) {
    if (n < 43) return below(nstr(n) + " = 1 (mod 14) is below 43, the first size of the Menon chain");
    return found(menon_chain(n), "Menon chain, base of order " + nstr(n - 35));
  }
  if (r7 == 2) {
    if (n < kThreshold2Mod7) return below(nstr(n) + " = 2 (mod 7) is below the class threshold 52565");
    auto r = m7_build_2mod7(n);
    if (!r) return none("2 (mod 7) chain cannot reach " + nstr(n));
    return found(r, "2 (mod 7) chain");
  }
  if (r14 == 6) {
    if (n < kThreshold6Mod14) return below(nstr(n) + " = 6 (mod 14) is below the class threshold 398");
    const BigInt s = (n - 48) / 14;
    const std::uint64_t l = static_cast<std::uint64_t>(5 * mod(s, 6) % 6);
    return found(m7_chain_6mod14((n - 48 - 70 * static_cast<unsigned long>(l)) / 84, l),
                 "Kronecker with Paley 12, iterated with (71,15,3)");
  }
  if (r14 == 10) {
    if (n < kThreshold10Mod14) return below(nstr(n) + " = 10 (mod 14) is below the class threshold 683294");
    auto r = build_10mod14(n);
    if (!r) return none("10 (mod 14) chain cannot reach " + nstr(n));
    return found(r, "Kronecker with Paley 12, iterated with family-11 designs");
  }
  // r14 == 12
  if (n < threshold_12mod14()) return below(nstr(n) + " = 12 (mod 14) is below the class threshold " +
                                           nstr(threshold_12mod14()));
  if (mod(n, 28) == 12) {
    auto r = m7_build_12mod28(n);
    if (!r) return none("12 (mod 28) chain cannot reach " + nstr(n));
    return found(r, "Kronecker with Paley 20, iterated with (2185,729,243)");
  }
  const auto d = rc::family10(29, 5, 6);
  const BigInt n0 = n - d->order + 1;
  auto base = n0 >= 3 ? m7_build_12mod28(n0) : nullptr;
  if (!base)
    return none("26 (mod 28): base of order " + nstr(n0) + " for the family-10 (q, d, e) = (29, 5, 6) design is not constructible");
  return found(rc::direct_sum_with_design(base, d, 7), "12 (mod 28) chain plus the family-10 (29, 5, 6) design");
}

PlanResult plan_generic(const BigInt& n, std::int64_t m) {
  if (mod(n, 2) != 0) return none("no construction known for odd " + nstr(n) + " at m = " + std::to_string(m));
  const BigInt half = n / 2;
  if (half < 3) return none("no construction known for " + nstr(n));
  const std::int64_t sub_m = m / std::gcd(m, std::int64_t{2});
  auto sub = plan_explained(half, sub_m);
  if (!sub) {
    auto r = none("no construction for " + nstr(n) + ": half order has none (" + sub.note + ")");
    r.below_threshold = sub.below_threshold;
    return r;
  }
  return found(rc::doubled(sub.recipe), "doubled MH(" + nstr(half) + "," + std::to_string(sub_m) + ")");
}

}  // namespace

BigInt threshold_12mod14() { return from_decimal("4481157543653329008412788039740507382"); }

RecipePtr m7_chain_6mod14(const BigInt& k, std::uint64_t l) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "k must be non-negative");
  auto base = rc::kron(rc::j_minus_2i(7 * k + 4), rc::paley_hadamard(11));
  return rc::iterate(base, rc::catalog_design("ds_71_15_3"), l, 7);
}

RecipePtr m7_build_2mod7(const BigInt& n) {
  const auto r28 = mod(n, 28);
  if (r28 == 16) return rc::doubled(rc::doubled(rc::j_minus_2i((n - 16) / 4 + 4)));
  if (r28 == 2) {
    if (n < 86) return nullptr;
    return rc::doubled(menon_chain(n / 2));
  }
  if (r28 == 23 || r28 == 9) {
    const auto d = rc::catalog_design(kFamily12);
    const BigInt base_order = n - d->order + 1;
    auto base = base_order >= 3 ? m7_build_2mod7(base_order) : nullptr;
    if (!base) return nullptr;
    return rc::direct_sum_with_design(base, d, 7);
  }
  return nullptr;
}

RecipePtr m7_build_12mod28(const BigInt& n) {
  if (mod(n, 28) != 12) return nullptr;
  const BigInt step = family10_params(2, 2, 6).v - 1;
  for (std::uint64_t l = 0; l <= 4; ++l) {
    const BigInt rest = n - 40 - step * static_cast<unsigned long>(l);
    if (rest < 0 || mod(rest, 140) != 0) continue;
    auto inner = m7_build_2mod7(7 * (rest / 140) + 2);
    if (!inner) return nullptr;
    return rc::iterate(rc::kron(inner, rc::paley_hadamard(19)), rc::family10(2, 2, 6), l, 7);
  }
  return nullptr;
}

PlanResult plan_explained(const BigInt& n, std::int64_t m) {
  if (n < 3) return none("n must be at least 3");
  if (m < 2) return none("m must be at least 2");
  if (mod(n, m) == 0) return found(rc::all_ones(n), "n = 0 (mod m)");
  if (mod(n - 4, m) == 0) return found(rc::j_minus_2i(n), "n = 4 (mod m)");
  if (m == 5) return plan5(n);
  if (m == 7) return plan7(n);
  return plan_generic(n, m);
}

std::optional<RecipePtr> plan(const BigInt& n, std::int64_t m) {
  auto r = plan_explained(n, m);
  if (!r) return std::nullopt;
  return r.recipe;
}

}  // namespace mh
