#include "mh/search.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "mh/error.hpp"

namespace mh::search {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::uint64_t fnv1a(const std::vector<std::uint64_t>& rows) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto r : rows)
    for (int b = 0; b < 8; ++b) {
      h ^= (r >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  return h;
}

bool compatible(std::uint64_t a, std::uint64_t b, std::size_t n, std::int64_t m, Mode mode) {
  const auto ip = static_cast<std::int64_t>(n) - 2 * std::popcount(a ^ b);
  if (mode == Mode::Restricted) return ip == m || ip == -m;
  return residue(ip, m) == 0;
}

struct Graph {
  std::size_t size = 0;
  std::size_t words = 0;
  std::vector<std::uint64_t> adj;  // size * words
  bool loops = false;              // a row may repeat (m | n in generic mode)

  const std::uint64_t* row(std::size_t i) const { return adj.data() + i * words; }
};

Graph build_graph(const std::vector<std::uint64_t>& cand, std::size_t n, std::int64_t m, Mode mode) {
  Graph g;
  g.size = cand.size();
  g.words = (g.size + 63) / 64;
  g.adj.assign(g.size * g.words, 0);
  g.loops = mode == Mode::Generic && residue(static_cast<std::int64_t>(n), m) == 0;
  for (std::size_t i = 0; i < g.size; ++i) {
    if (g.loops) g.adj[i * g.words + i / 64] |= std::uint64_t{1} << (i % 64);
    for (std::size_t j = i + 1; j < g.size; ++j)
      if (compatible(cand[i], cand[j], n, m, mode)) {
        g.adj[i * g.words + j / 64] |= std::uint64_t{1} << (j % 64);
        g.adj[j * g.words + i / 64] |= std::uint64_t{1} << (i % 64);
      }
  }
  return g;
}

// DFS over one first-level subtree.
class Worker {
 public:
  Worker(const Graph& g, const SearchProblem& p, const std::atomic<std::size_t>& best)
      : g_(g), p_(p), best_(best), need_(p.n - 1), levels_(p.n, std::vector<std::uint64_t>(g.words)) {}

  SubtreeRecord run(std::size_t v0, std::vector<std::size_t>* witness) {
    SubtreeRecord rec;
    rec.first_row = v0;
    nodes_ = 0;
    solutions_ = 0;
    stop_ = false;
    first_ = v0;
    witness_ = witness;
    path_.assign(1, v0);
    std::copy_n(g_.row(v0), g_.words, levels_[1].begin());
    descend(1, v0);
    rec.nodes = nodes_;
    rec.solutions = solutions_;
    rec.exhausted = !stop_;
    return rec;
  }

 private:
  bool cancelled() const { return p_.goal == Goal::First && best_.load(std::memory_order_relaxed) < first_; }

  // path_ holds depth rows; levels_[depth] is the set of rows compatible with all of them.
  void descend(std::size_t depth, std::size_t last) {
    ++nodes_;
    if (depth == need_) {
      ++solutions_;
      if (witness_->empty()) *witness_ = path_;
      if (p_.goal == Goal::First) stop_ = true;
      return;
    }
    if (cancelled()) {
      stop_ = true;
      return;
    }
    const auto& cur = levels_[depth];
    const std::size_t lo = p_.symmetry ? last : 0;
    if (p_.symmetry && !g_.loops) {
      std::size_t avail = 0;
      for (std::size_t w = lo / 64; w < g_.words; ++w) {
        std::uint64_t x = cur[w];
        if (w == lo / 64) x &= ~std::uint64_t{0} << (lo % 64);
        avail += std::popcount(x);
      }
      if (avail < need_ - depth) return;
    }
    for (std::size_t w = lo / 64; w < g_.words && !stop_; ++w) {
      std::uint64_t x = cur[w];
      if (w == lo / 64) x &= ~std::uint64_t{0} << (lo % 64);
      while (x && !stop_) {
        const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(x));
        x &= x - 1;
        auto& next = levels_[depth + 1];
        const auto* a = g_.row(v);
        for (std::size_t t = 0; t < g_.words; ++t) next[t] = cur[t] & a[t];
        path_.push_back(v);
        descend(depth + 1, v);
        path_.pop_back();
      }
    }
  }

  const Graph& g_;
  const SearchProblem& p_;
  const std::atomic<std::size_t>& best_;
  std::size_t need_;
  std::vector<std::vector<std::uint64_t>> levels_;
  std::vector<std::size_t> path_;
  std::vector<std::size_t>* witness_ = nullptr;
  std::size_t first_ = 0;
  std::uint64_t nodes_ = 0;
  std::uint64_t solutions_ = 0;
  bool stop_ = false;
};

}  // namespace

const char* to_string(Mode m) { return m == Mode::Generic ? "generic" : "restricted"; }

const char* to_string(Goal g) {
  switch (g) {
    case Goal::First:
      return "first";
    case Goal::Count:
      return "count";
    case Goal::Exhaust:
      return "exhaust";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "generic") return Mode::Generic;
  if (s == "restricted") return Mode::Restricted;
  throw Error(ErrorCode::InvalidArgument, "unknown search mode '" + s + "'");
}

Goal goal_from_string(const std::string& s) {
  if (s == "first") return Goal::First;
  if (s == "count") return Goal::Count;
  if (s == "exhaust") return Goal::Exhaust;
  throw Error(ErrorCode::InvalidArgument, "unknown search goal '" + s + "'");
}

void validate(const SearchProblem& p) {
  if (p.n < 3) throw Error(ErrorCode::InvalidArgument, "search needs n >= 3");
  if (p.m < 2) throw Error(ErrorCode::InvalidArgument, "search needs m >= 2");
  if (p.n > 63) throw Error(ErrorCode::LimitExceeded, "rows must fit one machine word");
  if (p.mode == Mode::Restricted) {
    const auto n = static_cast<std::int64_t>(p.n);
    if (p.m % 2 == 0 || n % 2 == 0 || n >= 3 * p.m || std::gcd(n, p.m) != 1)
      throw Error(ErrorCode::InvalidArgument, "restricted mode needs m and n odd, n < 3m and gcd(n, m) = 1");
  }
}

std::vector<std::uint64_t> candidate_rows(std::size_t n, std::int64_t m, Mode mode) {
  validate({.n = n, .m = m, .mode = mode});
  if (n > 32) throw Error(ErrorCode::LimitExceeded, "candidate enumeration is limited to n <= 32");
  const auto ni = static_cast<std::int64_t>(n);
  std::vector<std::uint64_t> out;
  const std::uint64_t limit = std::uint64_t{1} << (n - 1);
  for (std::uint64_t x = 0; x < limit; ++x) {
    const std::uint64_t row = x << 1;
    const auto neg = static_cast<std::int64_t>(std::popcount(row));
    const bool keep = mode == Mode::Restricted ? (neg == (ni - m) / 2 || neg == (ni + m) / 2)
                                               : residue(ni - 2 * neg, m) == 0;
    if (keep) out.push_back(row);
  }
  return out;
}

SearchOutcome run(const SearchProblem& p) {
  validate(p);
  const std::size_t cap = p.mode == Mode::Restricted ? p.max_restricted : p.max_generic;
  if (p.n > cap)
    throw Error(ErrorCode::LimitExceeded, "n = " + std::to_string(p.n) + " exceeds the " + to_string(p.mode) +
                                              " search limit " + std::to_string(cap));
  const auto cand = candidate_rows(p.n, p.m, p.mode);
  if (cand.size() > kMaxCandidates)
    throw Error(ErrorCode::LimitExceeded, std::to_string(cand.size()) + " candidate rows exceed the adjacency limit");

  SearchOutcome out;
  out.candidate_row_count = cand.size();
  out.log.candidate_digest = fnv1a(cand);
  const Graph g = build_graph(cand, p.n, p.m, p.mode);

  std::atomic<std::size_t> best{kNone};
  std::atomic<std::size_t> next{0};
  std::vector<SubtreeRecord> records(g.size);
  std::vector<std::vector<std::size_t>> witnesses(g.size);
  for (std::size_t i = 0; i < g.size; ++i) records[i].first_row = i;

  auto work = [&] {
    Worker w(g, p, best);
    for (std::size_t v0; (v0 = next.fetch_add(1)) < g.size;) {
      if (p.goal == Goal::First && best.load() < v0) continue;
      records[v0] = w.run(v0, &witnesses[v0]);
      if (p.goal == Goal::First && !witnesses[v0].empty()) {
        auto cur = best.load();
        while (v0 < cur && !best.compare_exchange_weak(cur, v0)) {
        }
      }
    }
  };
  const unsigned threads = std::max(1U, p.threads);
  if (threads == 1 || g.size < 2) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  std::size_t winner = kNone;
  bool all_done = true;
  for (std::size_t i = 0; i < g.size; ++i) {
    out.nodes_visited += records[i].nodes;
    out.solutions += records[i].solutions;
    if (winner == kNone && !witnesses[i].empty()) winner = i;
    if (!records[i].exhausted) all_done = false;
  }
  // A First search that found a witness stopped early by design.
  out.exhausted = all_done && !(p.goal == Goal::First && winner != kNone);
  out.log.subtrees = std::move(records);

  if (winner != kNone) {
    SignMatrix h(p.n);
    const auto& path = witnesses[winner];
    for (std::size_t r = 0; r < path.size(); ++r)
      for (std::size_t c = 0; c < p.n; ++c)
        if ((cand[path[r]] >> c) & 1U) h.set_bit(r + 1, c, true);
    if (!verify_mh(h, p.m).verdict) throw Error(ErrorCode::InternalError, "search produced an invalid witness");
    out.log.witness_text = sign_matrix_text(h, p.m);
    out.found = std::move(h);
  }
  if (p.goal == Goal::First && out.found) out.solutions = 1;
  return out;
}

std::string SearchLog::to_string(const SearchProblem& p, std::size_t candidates) const {
  std::ostringstream os;
  os << "search " << p.n << ' ' << p.m << ' ' << search::to_string(p.mode) << ' ' << search::to_string(p.goal)
     << (p.symmetry ? " ordered" : " unordered") << '\n';
  os << "candidates " << candidates << " digest " << std::hex << candidate_digest << std::dec << '\n';
  for (const auto& s : subtrees)
    os << "subtree " << s.first_row << " nodes " << s.nodes << " solutions " << s.solutions << ' '
       << (s.exhausted ? "exhausted" : "cut") << '\n';
  if (witness_text.empty())
    os << "witness none\n";
  else
    os << "witness\n" << witness_text;
  return os.str();
}

bool RowProfile::consistent() const {
  if (alpha_designations.empty()) return true;
  if (!expected_a) return false;
  return std::all_of(alpha_designations.begin(), alpha_designations.end(),
                     [&](std::size_t a) { return a == *expected_a; });
}

RowProfile row_profile(const SignMatrix& h0, std::int64_t m) {
  const SignMatrix h = h0.is_normalized() ? h0 : normalize(h0);
  const auto n = static_cast<std::int64_t>(h.order());
  const std::int64_t alpha = (n - m) / 2;
  const std::int64_t beta = (n + m) / 2;
  RowProfile rp;
  if ((n - m) % 4 == 0 && n >= m) rp.expected_a = static_cast<std::size_t>((n - m) / 4);
  std::vector<bool> alpha_col(h.order(), false);
  for (std::size_t j = 1; j < h.order(); ++j) {
    std::int64_t neg = 0;
    for (std::size_t i = 0; i < h.order(); ++i) neg += h.negative(i, j);
    if (neg == alpha) {
      alpha_col[j] = true;
      ++rp.alpha_cols;
    } else if (neg == beta) {
      ++rp.beta_cols;
    }
  }
  for (std::size_t i = 1; i < h.order(); ++i) {
    std::int64_t neg = 0;
    for (std::size_t j = 0; j < h.order(); ++j) neg += h.negative(i, j);
    if (neg == alpha) {
      ++rp.alpha_rows;
      std::size_t a = 0;
      for (std::size_t j = 1; j < h.order(); ++j) a += h.negative(i, j) && alpha_col[j];
      rp.alpha_designations.push_back(a);
    } else if (neg == beta) {
      ++rp.beta_rows;
    }
  }
  return rp;
}

}  // namespace mh::search
