#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mh/matrix.hpp"

namespace mh::search {

enum class Mode { Generic, Restricted };
enum class Goal { First, Count, Exhaust };

const char* to_string(Mode m);
const char* to_string(Goal g);
Mode mode_from_string(const std::string& s);
Goal goal_from_string(const std::string& s);

inline constexpr std::size_t kDefaultMaxRestricted = 24;
inline constexpr std::size_t kDefaultMaxGeneric = 10;
// Adjacency is a dense bitset, so this bounds memory at about 128 MiB.
inline constexpr std::size_t kMaxCandidates = 32768;

struct SearchProblem {
  std::size_t n = 0;
  std::int64_t m = 0;
  Mode mode = Mode::Generic;
  Goal goal = Goal::First;
  bool symmetry = true;
  unsigned threads = 1;
  std::size_t max_restricted = kDefaultMaxRestricted;
  std::size_t max_generic = kDefaultMaxGeneric;
};

struct SubtreeRecord {
  std::size_t first_row = 0;  // candidate index of the second matrix row
  std::uint64_t nodes = 0;
  std::uint64_t solutions = 0;
  bool exhausted = false;  // false when skipped or cut short after a witness
};

struct SearchLog {
  std::uint64_t candidate_digest = 0;  // FNV-1a over the candidate rows
  std::vector<SubtreeRecord> subtrees;
  std::string witness_text;
  std::string to_string(const SearchProblem& p, std::size_t candidates) const;
};

struct SearchOutcome {
  std::optional<SignMatrix> found;
  bool exhausted = false;
  std::uint64_t nodes_visited = 0;
  std::size_t candidate_row_count = 0;
  std::uint64_t solutions = 0;  // meaningful for Count and Exhaust
  SearchLog log;
};

// Throws InvalidArgument when the mode preconditions fail.
void validate(const SearchProblem& p);

// Rows are bit-packed with bit j set for a -1 in column j; column 0 is always +1.
std::vector<std::uint64_t> candidate_rows(std::size_t n, std::int64_t m, Mode mode);

SearchOutcome run(const SearchProblem& p);

// Counting quantities behind the restricted-mode analysis of a normalized witness.
struct RowProfile {
  std::size_t alpha_rows = 0;
  std::size_t beta_rows = 0;
  std::size_t alpha_cols = 0;
  std::size_t beta_cols = 0;
  // for each alpha-row, the number of alpha-columns among its negative columns
  std::vector<std::size_t> alpha_designations;
  std::optional<std::size_t> expected_a;  // (n - m)/4 when integral
  bool consistent() const;
};

RowProfile row_profile(const SignMatrix& h, std::int64_t m);

}  // namespace mh::search
