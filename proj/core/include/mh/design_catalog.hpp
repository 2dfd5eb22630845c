#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mh/matrix.hpp"

namespace mh {

// Finite abelian group Z_{n1} x ... x Z_{nr}; elements are indexed in mixed radix
// with the last factor varying fastest.
struct AbelianGroup {
  std::vector<std::uint32_t> factors;

  std::uint32_t order() const;
  std::vector<std::uint32_t> coords(std::uint32_t index) const;
  std::uint32_t index(const std::vector<std::uint32_t>& coords) const;
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const;
  std::string to_string() const;

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
};

// Development of S: row x has a 1 in column y iff y - x lies in S.
IncidenceMatrix develop(const AbelianGroup& g, const std::vector<std::uint32_t>& subset);

bool is_difference_set(const AbelianGroup& g, const std::vector<std::uint32_t>& subset, std::uint32_t lambda);

struct DifferenceSetResult {
  std::vector<std::uint32_t> subset;  // element indices, sorted, containing 0
  IncidenceMatrix incidence;
};

// Exhaustive backtracking for |G| <= 40.
std::optional<DifferenceSetResult> find_difference_set(const AbelianGroup& g, std::uint32_t k, std::uint32_t lambda);

struct CatalogEntry {
  std::string name;
  DesignParams params;  // exact (modulus 0)
  bool materializable = false;
  AbelianGroup group;                   // materializable entries only
  std::vector<std::uint32_t> elements;  // element indices
  std::string source;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);
std::pair<IncidenceMatrix, DesignParams> catalog_design(const std::string& name);

// Paley constructions.
SignMatrix paley_hadamard(std::uint64_t q);
std::pair<IncidenceMatrix, DesignParams> paley_design(std::uint64_t q);

}  // namespace mh
