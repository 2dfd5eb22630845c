#include "mh/design_catalog.hpp"

#include <algorithm>
#include <json.hpp>
#include <string_view>

#include "mh/error.hpp"

namespace mh {

namespace detail {
extern const std::string_view kCatalogJson;
}

std::uint32_t AbelianGroup::order() const {
  std::uint32_t n = 1;
  for (auto f : factors) n *= f;
  return n;
}

std::vector<std::uint32_t> AbelianGroup::coords(std::uint32_t index) const {
  std::vector<std::uint32_t> c(factors.size());
  for (std::size_t t = factors.size(); t-- > 0;) {
    c[t] = index % factors[t];
    index /= factors[t];
  }
  return c;
}

std::uint32_t AbelianGroup::index(const std::vector<std::uint32_t>& c) const {
  if (c.size() != factors.size()) throw Error(ErrorCode::DimensionMismatch, "coordinate count does not match group");
  std::uint32_t x = 0;
  for (std::size_t t = 0; t < factors.size(); ++t) {
    if (c[t] >= factors[t]) throw Error(ErrorCode::InvalidArgument, "coordinate out of range");
    x = x * factors[t] + c[t];
  }
  return x;
}

std::uint32_t AbelianGroup::add(std::uint32_t a, std::uint32_t b) const {
  auto ca = coords(a), cb = coords(b);
  for (std::size_t t = 0; t < factors.size(); ++t) ca[t] = (ca[t] + cb[t]) % factors[t];
  return index(ca);
}

std::uint32_t AbelianGroup::sub(std::uint32_t a, std::uint32_t b) const {
  auto ca = coords(a), cb = coords(b);
  for (std::size_t t = 0; t < factors.size(); ++t) ca[t] = (ca[t] + factors[t] - cb[t]) % factors[t];
  return index(ca);
}

std::string AbelianGroup::to_string() const {
  std::string s;
  for (std::size_t t = 0; t < factors.size(); ++t) s += (t ? " x Z" : "Z") + std::to_string(factors[t]);
  return s;
}

namespace {

// Full subtraction table; groups here are small.
std::vector<std::uint32_t> sub_table(const AbelianGroup& g) {
  const std::uint32_t v = g.order();
  std::vector<std::uint32_t> t(std::size_t{v} * v);
  for (std::uint32_t a = 0; a < v; ++a)
    for (std::uint32_t b = 0; b < v; ++b) t[std::size_t{a} * v + b] = g.sub(a, b);
  return t;
}

void check_group(const AbelianGroup& g) {
  if (g.factors.empty()) throw Error(ErrorCode::InvalidArgument, "group has no factors");
  for (auto f : g.factors)
    if (f < 1) throw Error(ErrorCode::InvalidArgument, "group factor must be positive");
}

}  // namespace

IncidenceMatrix develop(const AbelianGroup& g, const std::vector<std::uint32_t>& subset) {
  check_group(g);
  const std::uint32_t v = g.order();
  std::vector<bool> in(v, false);
  for (auto s : subset) {
    if (s >= v) throw Error(ErrorCode::InvalidArgument, "subset element outside the group");
    in[s] = true;
  }
  IncidenceMatrix d(v);
  for (std::uint32_t x = 0; x < v; ++x)
    for (std::uint32_t y = 0; y < v; ++y)
      if (in[g.sub(y, x)]) d.set_bit(x, y, true);
  return d;
}

bool is_difference_set(const AbelianGroup& g, const std::vector<std::uint32_t>& subset, std::uint32_t lambda) {
  check_group(g);
  const std::uint32_t v = g.order();
  std::vector<std::uint32_t> count(v, 0);
  for (auto a : subset)
    for (auto b : subset)
      if (a != b) ++count[g.sub(a, b)];
  for (std::uint32_t x = 1; x < v; ++x)
    if (count[x] != lambda) return false;
  return true;
}

std::optional<DifferenceSetResult> find_difference_set(const AbelianGroup& g, std::uint32_t k, std::uint32_t lambda) {
  check_group(g);
  const std::uint32_t v = g.order();
  if (v > 40) throw Error(ErrorCode::InvalidArgument, "exhaustive difference-set search needs |G| <= 40");
  if (std::uint64_t{k} * (k - 1) != std::uint64_t{lambda} * (v - 1) || k == 0 || k > v)
    throw Error(ErrorCode::InvalidArgument, "parameters violate k(k-1) = lambda(v-1)");

  const auto table = sub_table(g);
  auto diff = [&](std::uint32_t a, std::uint32_t b) { return table[std::size_t{a} * v + b]; };
  std::vector<std::uint32_t> count(v, 0), chosen{0};
  chosen.reserve(k);

  // Translate so 0 is in the set; extend in increasing index order.
  auto rec = [&](auto&& self, std::uint32_t next) -> bool {
    if (chosen.size() == k) return true;
    if (v - next < k - chosen.size()) return false;
    for (std::uint32_t x = next; x < v; ++x) {
      bool ok = true;
      std::size_t done = 0;
      for (; done < chosen.size(); ++done) {
        const auto y = chosen[done];
        auto& c1 = count[diff(x, y)];
        auto& c2 = count[diff(y, x)];
        ++c1;
        ++c2;
        if (c1 > lambda || c2 > lambda) {
          ++done;
          ok = false;
          break;
        }
      }
      if (ok) {
        chosen.push_back(x);
        if (self(self, x + 1)) return true;
        chosen.pop_back();
      }
      for (std::size_t t = 0; t < done; ++t) {
        --count[diff(x, chosen[t])];
        --count[diff(chosen[t], x)];
      }
    }
    return false;
  };
  if (k == 1) {
    if (v != 1 && lambda != 0) return std::nullopt;
  } else if (!rec(rec, 1)) {
    return std::nullopt;
  }
  if (!is_difference_set(g, chosen, lambda)) throw Error(ErrorCode::InternalError, "difference-set search returned a bad set");
  DifferenceSetResult r{chosen, develop(g, chosen)};
  return r;
}

namespace {

std::vector<CatalogEntry> load_catalog() {
  std::vector<CatalogEntry> out;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(detail::kCatalogJson);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InternalError, std::string("bundled catalog is not valid JSON: ") + e.what());
  }
  for (const auto& j : doc.at("designs")) {
    CatalogEntry e;
    e.name = j.at("name").get<std::string>();
    e.params = DesignParams{BigInt(j.at("v").get<long>()), BigInt(j.at("k").get<long>()),
                            BigInt(j.at("lambda").get<long>()), 0};
    e.source = j.value("source", "");
    const auto& p = e.params;
    if (p.k * (p.k - 1) != p.lambda * (p.v - 1))
      throw Error(ErrorCode::InternalError, "catalog entry " + e.name + " violates k(k-1) = lambda(v-1)");
    if (j.contains("group")) {
      e.group.factors = j.at("group").get<std::vector<std::uint32_t>>();
      for (const auto& el : j.at("elements")) {
        if (el.is_array())
          e.elements.push_back(e.group.index(el.get<std::vector<std::uint32_t>>()));
        else
          e.elements.push_back(e.group.index({el.get<std::uint32_t>()}));
      }
      std::sort(e.elements.begin(), e.elements.end());
      e.materializable = true;
      if (e.group.order() != p.v || e.elements.size() != p.k.get_ui() || !verify_design(develop(e.group, e.elements), p))
        throw Error(ErrorCode::InternalError, "catalog entry " + e.name + " failed verification");
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = load_catalog();
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw Error(ErrorCode::UnknownName, "no catalog design named '" + name + "'");
}

std::pair<IncidenceMatrix, DesignParams> catalog_design(const std::string& name) {
  const auto& e = catalog_entry(name);
  if (!e.materializable)
    throw Error(ErrorCode::NotMaterializable, "catalog design " + name + " is bundled as parameters only");
  auto d = develop(e.group, e.elements);
  if (!verify_design(d, e.params)) throw Error(ErrorCode::VerificationFailed, "catalog design " + name + " is corrupt");
  return {std::move(d), e.params};
}

namespace {

// GF(p^k) with elements as base-p digit vectors, constant term first.
class FiniteField {
 public:
  FiniteField(std::uint32_t p, unsigned k) : p_(p), k_(k) {
    q_ = 1;
    for (unsigned t = 0; t < k; ++t) q_ *= p;
    if (k > 1) find_modulus();
  }
  std::uint32_t order() const { return q_; }

  std::vector<std::uint32_t> digits(std::uint32_t x) const {
    std::vector<std::uint32_t> d(k_);
    for (unsigned t = 0; t < k_; ++t, x /= p_) d[t] = x % p_;
    return d;
  }
  std::uint32_t pack(const std::vector<std::uint32_t>& d) const {
    std::uint32_t x = 0;
    for (unsigned t = k_; t-- > 0;) x = x * p_ + d[t];
    return x;
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (k_ == 1) return static_cast<std::uint32_t>(std::uint64_t{a} * b % p_);
    return pack(reduce(poly_mul(digits(a), digits(b))));
  }

 private:
  std::vector<std::uint32_t> poly_mul(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) const {
    std::vector<std::uint32_t> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p_;
    return c;
  }
  // Reduce modulo the monic modulus x^k + m_{k-1} x^{k-1} + ... + m_0.
  std::vector<std::uint32_t> reduce(std::vector<std::uint32_t> c) const {
    for (std::size_t deg = c.size(); deg-- > k_;) {
      const std::uint32_t lead = c[deg];
      if (!lead) continue;
      c[deg] = 0;
      for (unsigned t = 0; t < k_; ++t) c[deg - k_ + t] = (c[deg - k_ + t] + (p_ - lead) * mod_[t]) % p_;
    }
    c.resize(k_);
    return c;
  }
  // First monic modulus whose quotient ring has no zero divisors.
  void find_modulus() {
    std::vector<std::uint32_t> m(k_, 0);
    for (std::uint32_t code = 0;; ++code) {
      std::uint32_t c = code;
      for (unsigned t = 0; t < k_; ++t, c /= p_) m[t] = c % p_;
      if (c) throw Error(ErrorCode::InternalError, "no irreducible polynomial found");
      if (m[0] == 0) continue;
      mod_ = m;
      if (no_zero_divisors()) return;
    }
  }
  bool no_zero_divisors() const {
    for (std::uint32_t a = 1; a < q_; ++a)
      for (std::uint32_t b = a; b < q_; ++b)
        if (mul(a, b) == 0) return false;
    return true;
  }

  std::uint32_t p_;
  unsigned k_;
  std::uint32_t q_ = 0;
  std::vector<std::uint32_t> mod_;
};

void check_paley_q(std::uint64_t q, bool prime_only) {
  if (q % 4 != 3) throw Error(ErrorCode::InvalidArgument, "Paley construction needs q = 3 (mod 4)");
  auto pp = is_prime_power(BigInt(static_cast<unsigned long>(q)));
  if (!pp) throw Error(ErrorCode::InvalidArgument, std::to_string(q) + " is not a prime power");
  if (prime_only && pp->exponent != 1) throw Error(ErrorCode::InvalidArgument, std::to_string(q) + " is not prime");
  if (q > 4096) throw Error(ErrorCode::InvalidArgument, "Paley order too large");
}

// chi over Z_q for prime q: +1 residue, -1 nonresidue, 0 at zero.
std::vector<int> prime_character(std::uint64_t q) {
  std::vector<int> chi(q, -1);
  chi[0] = 0;
  for (std::uint64_t x = 1; x < q; ++x) chi[x * x % q] = 1;
  return chi;
}

}  // namespace

SignMatrix paley_hadamard(std::uint64_t q) {
  check_paley_q(q, true);
  const auto chi = prime_character(q);
  const std::size_t n = q + 1;
  SignMatrix h(n);
  for (std::size_t i = 1; i < n; ++i) {
    h.set(i, 0, -1);
    for (std::size_t j = 1; j < n; ++j)
      if (i != j) h.set(i, j, chi[(j + q - i) % q]);
  }
  if (!verify_mh(h, 0).verdict) throw Error(ErrorCode::InternalError, "Paley matrix failed verification");
  return h;
}

std::pair<IncidenceMatrix, DesignParams> paley_design(std::uint64_t q) {
  check_paley_q(q, false);
  const auto pp = *is_prime_power(BigInt(static_cast<unsigned long>(q)));
  const auto p = static_cast<std::uint32_t>(pp.base.get_ui());
  FiniteField f(p, pp.exponent);
  AbelianGroup g{std::vector<std::uint32_t>(pp.exponent, p)};
  // Group index uses the last coordinate fastest; field packing uses the
  // constant term as the lowest digit, so reverse.
  auto to_group = [&](std::uint32_t x) {
    auto d = f.digits(x);
    std::reverse(d.begin(), d.end());
    return g.index(d);
  };
  std::vector<bool> sq(q, false);
  for (std::uint32_t x = 1; x < q; ++x) sq[to_group(f.mul(x, x))] = true;
  std::vector<std::uint32_t> subset;
  for (std::uint32_t x = 0; x < q; ++x)
    if (sq[x]) subset.push_back(x);
  DesignParams params{BigInt(static_cast<unsigned long>(q)), BigInt(static_cast<unsigned long>((q - 1) / 2)),
                      BigInt(static_cast<unsigned long>((q - 3) / 4)), 0};
  auto d = develop(g, subset);
  if (!verify_design(d, params)) throw Error(ErrorCode::InternalError, "Paley design failed verification");
  return {std::move(d), params};
}

}  // namespace mh
