#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mh/recipe.hpp"

namespace mh {

// Class thresholds for m = 7 above which every size in the class is constructed.
inline constexpr std::int64_t kThreshold2Mod7 = 52565;
inline constexpr std::int64_t kThreshold6Mod14 = 398;
inline constexpr std::int64_t kThreshold10Mod14 = 683294;
// The quoted bound for n = 12 (mod 14), about 4.48e36.
BigInt threshold_12mod14();

struct PlanResult {
  RecipePtr recipe;  // null when no construction applies
  std::string note;  // why not, or which chain was used
  bool below_threshold = false;  // no recipe because n is under a class cutoff
  explicit operator bool() const { return recipe != nullptr; }
};

PlanResult plan_explained(const BigInt& n, std::int64_t m);
std::optional<RecipePtr> plan(const BigInt& n, std::int64_t m);

// The 6 (mod 14) chain for m = 7: Iterate(Kron(JMinus2I(7k+4), Paley(11)), (71,15,3), l),
// of order 84k + 48 + 70l. Usable below the class threshold.
RecipePtr m7_chain_6mod14(const BigInt& k, std::uint64_t l);

// Builders for m = 7 with no threshold applied; null when the chain cannot reach n.
RecipePtr m7_build_2mod7(const BigInt& n);
RecipePtr m7_build_12mod28(const BigInt& n);

}  // namespace mh
