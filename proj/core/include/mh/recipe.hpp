#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mh/matrix.hpp"

namespace mh {

enum class NodeKind {
  // matrix seeds
  AllOnes,
  JMinus2I,
  PaleyHadamard,
  // design seeds
  CatalogDesign,
  PaleyDesign,
  Family10,
  Family11,
  // design -> matrix
  DesignMatrix,
  TwoCirculant,
  // combinators
  Kron,
  Double,
  DirectSumWithDesign,
  Iterate,
};

const char* node_name(NodeKind kind);
NodeKind node_from_name(const std::string& name);

// Integer arguments that fit comfortably are stored as int64; names and big
// integers as strings.
using RecipeArg = std::variant<std::int64_t, std::string>;

struct Recipe;
using RecipePtr = std::shared_ptr<const Recipe>;

struct Recipe {
  NodeKind kind{};
  std::vector<RecipeArg> args;
  std::vector<RecipePtr> children;
  BigInt order;
  // Modulus at which the node is an MH (0 = exact). Design nodes carry 0.
  // Unbounded: J - 2I of a 37-digit order has a 37-digit modulus.
  BigInt modulus;
  // Exact parameters of design-valued nodes.
  std::optional<DesignParams> design;
  // False if any node below needs a design that cannot be built explicitly.
  bool materializable = true;

  bool is_design() const { return design.has_value(); }
  std::size_t depth() const;
  std::size_t node_count() const;
};

namespace recipe {

RecipePtr all_ones(const BigInt& n);
RecipePtr j_minus_2i(const BigInt& n);
RecipePtr paley_hadamard(std::uint64_t q);
RecipePtr catalog_design(const std::string& name);
RecipePtr paley_design(std::uint64_t q);
RecipePtr family10(const BigInt& q, std::uint64_t d, std::uint64_t e);
RecipePtr family11(const BigInt& q, std::uint64_t e);
RecipePtr design_matrix(const RecipePtr& design);
RecipePtr two_circulant(const RecipePtr& a, const RecipePtr& b);
RecipePtr kron(const RecipePtr& a, const RecipePtr& b);
RecipePtr doubled(const RecipePtr& r);
// 2(D(H) + D) - J for H built by `base`, valid modulo m.
RecipePtr direct_sum_with_design(const RecipePtr& base, const RecipePtr& design, std::int64_t m);
// l rounds of direct_sum_with_design; l = 0 returns `base` after checking the constraints.
RecipePtr iterate(const RecipePtr& base, const RecipePtr& design, std::uint64_t l, std::int64_t m);

}  // namespace recipe

// Iteration constraints of `design` against an MH(n, m): v = 1, k = 1 and
// lambda = 2^(phi(m)-2)(4 - n) (mod m). Returns the first failure, if any.
std::optional<std::string> iterate_constraint_failure(const BigInt& n, std::int64_t m, const DesignParams& design);

inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 20;  // bytes

std::size_t materialized_bytes(const BigInt& order);
bool fits_cap(const Recipe& r, std::size_t size_cap);

// Builds the matrix bottom-up and verifies every node at its modulus.
SignMatrix materialize(const RecipePtr& r, std::size_t size_cap = kDefaultMaterializeCap);
std::pair<IncidenceMatrix, DesignParams> materialize_design(const RecipePtr& r);

struct RecipeCheck {
  bool ok = false;
  std::vector<std::string> issues;
};

// Parameter-level certificate check: rebuilds the tree from its arguments,
// re-deriving every order, modulus and congruence constraint.
RecipeCheck check_recipe(const RecipePtr& r);

std::string recipe_to_json(const RecipePtr& r, int indent = -1);
RecipePtr recipe_from_json(const std::string& text);
std::string recipe_to_string(const RecipePtr& r);

}  // namespace mh
