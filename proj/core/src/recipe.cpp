#include "mh/recipe.hpp"

#include <algorithm>
#include <array>
#include <json.hpp>

#include "mh/design_catalog.hpp"
#include "mh/error.hpp"
#include "mh/families.hpp"

namespace mh {

namespace {

using json = nlohmann::json;

constexpr std::array<std::pair<NodeKind, const char*>, 13> kNames{{
    {NodeKind::AllOnes, "AllOnes"},
    {NodeKind::JMinus2I, "JMinus2I"},
    {NodeKind::PaleyHadamard, "PaleyHadamard"},
    {NodeKind::CatalogDesign, "CatalogDesign"},
    {NodeKind::PaleyDesign, "PaleyDesign"},
    {NodeKind::Family10, "Family10"},
    {NodeKind::Family11, "Family11"},
    {NodeKind::DesignMatrix, "DesignMatrix"},
    {NodeKind::TwoCirculant, "TwoCirculant"},
    {NodeKind::Kron, "Kron"},
    {NodeKind::Double, "Double"},
    {NodeKind::DirectSumWithDesign, "DirectSumWithDesign"},
    {NodeKind::Iterate, "Iterate"},
}};

RecipeArg big_arg(const BigInt& x) {
  if (x.fits_slong_p()) return static_cast<std::int64_t>(x.get_si());
  return to_decimal(x);
}

BigInt arg_big(const RecipeArg& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return BigInt(static_cast<long>(*i));
  return from_decimal(std::get<std::string>(a));
}

std::int64_t arg_int(const RecipeArg& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return *i;
  return to_int64(from_decimal(std::get<std::string>(a)));
}

std::uint64_t arg_u64(const RecipeArg& a, const char* what) {
  const auto v = arg_int(a);
  if (v < 0) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

const std::string& arg_str(const RecipeArg& a) {
  if (const auto* s = std::get_if<std::string>(&a)) return *s;
  throw Error(ErrorCode::InvalidArgument, "expected a name argument");
}

BigInt babs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }
BigInt big(std::uint64_t x) { return BigInt(static_cast<unsigned long>(x)); }

RecipePtr make(NodeKind kind, std::vector<RecipeArg> args, std::vector<RecipePtr> children, BigInt order,
               BigInt modulus, std::optional<DesignParams> design = std::nullopt, bool own_materializable = true) {
  auto r = std::make_shared<Recipe>();
  r->kind = kind;
  r->args = std::move(args);
  r->children = std::move(children);
  r->order = std::move(order);
  r->modulus = std::move(modulus);
  r->design = std::move(design);
  r->materializable = own_materializable;
  for (const auto& c : r->children) r->materializable = r->materializable && c->materializable;
  return r;
}

void need_matrix(const RecipePtr& r, const char* where) {
  if (!r) throw Error(ErrorCode::InvalidArgument, std::string(where) + ": null recipe");
  if (r->is_design()) throw Error(ErrorCode::InvalidArgument, std::string(where) + ": expected a matrix node");
}

void need_design(const RecipePtr& r, const char* where) {
  if (!r) throw Error(ErrorCode::InvalidArgument, std::string(where) + ": null recipe");
  if (!r->is_design()) throw Error(ErrorCode::InvalidArgument, std::string(where) + ": expected a design node");
}

bool divides(std::int64_t m, const BigInt& modulus) { return modulus == 0 || residue(modulus, m) == 0; }

// Checks shared by one direct-sum step: base is an MH(n, m) with gcd(n, m) = 1
// and the pair of parameter sets passes the direct-sum congruences.
void check_dsum_step(const RecipePtr& base, const RecipePtr& design, std::int64_t m) {
  if (m < 3) throw Error(ErrorCode::InvalidArgument, "direct sum with a design needs m >= 3");
  if (!divides(m, base->modulus))
    throw Error(ErrorCode::ModulusMismatch,
                "base is an MH at modulus " + to_decimal(base->modulus) + ", not a multiple of " + std::to_string(m));
  DesignParams core;
  try {
    core = core_design_params(base->order, m);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConstraintFailed, e.what());
  }
  if (design->design->v < 2) throw Error(ErrorCode::ConstraintFailed, "design must have v >= 2");
  if (!dsum_check(core, design->design->at_modulus(m)))
    throw Error(ErrorCode::ConstraintFailed, "core " + core.to_string() + " and design " +
                                                 design->design->at_modulus(m).to_string() +
                                                 " fail the direct-sum congruences");
}

std::optional<AbelianGroup> design_group(const RecipePtr& d) {
  if (d->kind == NodeKind::CatalogDesign) {
    const auto& e = catalog_entry(arg_str(d->args.at(0)));
    if (e.materializable) return e.group;
  } else if (d->kind == NodeKind::PaleyDesign) {
    const auto q = arg_u64(d->args.at(0), "q");
    const auto pp = *is_prime_power(big(q));
    return AbelianGroup{std::vector<std::uint32_t>(pp.exponent, static_cast<std::uint32_t>(pp.base.get_ui()))};
  }
  return std::nullopt;
}

}  // namespace

const char* node_name(NodeKind kind) {
  for (const auto& [k, n] : kNames)
    if (k == kind) return n;
  return "?";
}

NodeKind node_from_name(const std::string& name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  throw Error(ErrorCode::UnknownName, "unknown recipe node '" + name + "'");
}

std::size_t Recipe::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c->depth());
  return d + 1;
}

std::size_t Recipe::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c->node_count();
  return n;
}

namespace recipe {

RecipePtr all_ones(const BigInt& n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "order must be positive");
  return make(NodeKind::AllOnes, {big_arg(n)}, {}, n, n);
}

RecipePtr j_minus_2i(const BigInt& n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "order must be positive");
  return make(NodeKind::JMinus2I, {big_arg(n)}, {}, n, babs(n - 4));
}

RecipePtr paley_hadamard(std::uint64_t q) {
  if (q % 4 != 3 || !is_prime_u64(q)) throw Error(ErrorCode::InvalidArgument, "Paley Hadamard needs a prime q = 3 (mod 4)");
  return make(NodeKind::PaleyHadamard, {static_cast<std::int64_t>(q)}, {}, big(q + 1), 0);
}

RecipePtr catalog_design(const std::string& name) {
  const auto& e = catalog_entry(name);
  return make(NodeKind::CatalogDesign, {name}, {}, e.params.v, 0, e.params, e.materializable);
}

RecipePtr paley_design(std::uint64_t q) {
  auto pp = is_prime_power(big(q));
  if (q % 4 != 3 || !pp) throw Error(ErrorCode::InvalidArgument, "Paley design needs a prime power q = 3 (mod 4)");
  DesignParams p{big(q), big((q - 1) / 2), big((q - 3) / 4), 0};
  return make(NodeKind::PaleyDesign, {static_cast<std::int64_t>(q)}, {}, p.v, 0, p);
}

RecipePtr family10(const BigInt& q, std::uint64_t d, std::uint64_t e) {
  const auto f = family10_params(q, d, e);
  if (!f.valid())
    throw Error(ErrorCode::ConstraintFailed, "family 10 with q = " + to_decimal(q) + ", d = " + std::to_string(d) +
                                                 " has r not a prime power or q not dividing lambda");
  return make(NodeKind::Family10, {big_arg(q), static_cast<std::int64_t>(d), static_cast<std::int64_t>(e)}, {}, f.v, 0,
              f.params(), false);
}

RecipePtr family11(const BigInt& q, std::uint64_t e) {
  const auto f = family11_params(q, e);
  return make(NodeKind::Family11, {big_arg(q), static_cast<std::int64_t>(e)}, {}, f.v, 0, f.params(), false);
}

RecipePtr design_matrix(const RecipePtr& design) {
  need_design(design, "DesignMatrix");
  const auto& p = *design->design;
  return make(NodeKind::DesignMatrix, {}, {design}, p.v, babs(p.v - 4 * (p.k - p.lambda)));
}

RecipePtr two_circulant(const RecipePtr& a, const RecipePtr& b) {
  need_design(a, "TwoCirculant");
  need_design(b, "TwoCirculant");
  const auto ga = design_group(a), gb = design_group(b);
  if (!ga || !gb) throw Error(ErrorCode::ConstraintFailed, "TwoCirculant needs group-developed designs");
  if (!(*ga == *gb))
    throw Error(ErrorCode::ConstraintFailed, "TwoCirculant needs both designs over the same group, got " +
                                                 ga->to_string() + " and " + gb->to_string());
  const auto& pa = *a->design;
  const auto& pb = *b->design;
  const BigInt s = pa.k - pa.lambda + pb.k - pb.lambda;
  return make(NodeKind::TwoCirculant, {}, {a, b}, 2 * pa.v, babs(2 * pa.v - 4 * s));
}

RecipePtr kron(const RecipePtr& a, const RecipePtr& b) {
  need_matrix(a, "Kron");
  need_matrix(b, "Kron");
  BigInt g;
  mpz_gcd(g.get_mpz_t(), BigInt(a->modulus * b->modulus).get_mpz_t(), BigInt(a->order * b->modulus).get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), BigInt(b->order * a->modulus).get_mpz_t());
  return make(NodeKind::Kron, {}, {a, b}, a->order * b->order, g);
}

RecipePtr doubled(const RecipePtr& r) {
  need_matrix(r, "Double");
  return make(NodeKind::Double, {}, {r}, 2 * r->order, 2 * r->modulus);
}

RecipePtr direct_sum_with_design(const RecipePtr& base, const RecipePtr& design, std::int64_t m) {
  need_matrix(base, "DirectSumWithDesign");
  need_design(design, "DirectSumWithDesign");
  check_dsum_step(base, design, m);
  return make(NodeKind::DirectSumWithDesign, {m}, {base, design}, base->order - 1 + design->design->v, m);
}

RecipePtr iterate(const RecipePtr& base, const RecipePtr& design, std::uint64_t l, std::int64_t m) {
  need_matrix(base, "Iterate");
  need_design(design, "Iterate");
  if (m < 3) throw Error(ErrorCode::InvalidArgument, "Iterate needs m >= 3");
  if (auto why = iterate_constraint_failure(base->order, m, *design->design))
    throw Error(ErrorCode::ConstraintFailed, "Iterate: " + *why);
  check_dsum_step(base, design, m);
  if (l == 0) return base;
  return make(NodeKind::Iterate, {static_cast<std::int64_t>(l), m}, {base, design},
              base->order + big(l) * (design->design->v - 1), m);
}

}  // namespace recipe

std::optional<std::string> iterate_constraint_failure(const BigInt& n, std::int64_t m, const DesignParams& d) {
  if (m < 3 || m % 2 == 0) return "the iteration constraints need an odd modulus >= 3";
  if (residue(d.v, m) != 1) return "v = " + to_decimal(d.v) + " is not 1 mod " + std::to_string(m);
  if (residue(d.k, m) != 1) return "k = " + to_decimal(d.k) + " is not 1 mod " + std::to_string(m);
  const BigInt target = BigInt(static_cast<long>(half_pow_coeff(m))) * (4 - n);
  if (residue(d.lambda - target, m) != 0)
    return "lambda = " + to_decimal(d.lambda) + " is not " + std::to_string(residue(target, m)) + " mod " +
           std::to_string(m);
  return std::nullopt;
}

std::size_t materialized_bytes(const BigInt& order) {
  if (order < 0 || !order.fits_ulong_p()) return SIZE_MAX;
  const unsigned long n = order.get_ui();
  if (n > (std::size_t{1} << 26)) return SIZE_MAX;
  return static_cast<std::size_t>(n) * ((n + 63) / 64) * sizeof(std::uint64_t);
}

bool fits_cap(const Recipe& r, std::size_t size_cap) { return materialized_bytes(r.order) <= size_cap; }

namespace {

SignMatrix build(const RecipePtr& r);

SignMatrix checked(SignMatrix h, const RecipePtr& r) {
  if (h.order() != r->order) throw Error(ErrorCode::InternalError, std::string(node_name(r->kind)) + " built the wrong order");
  if (!verify_mh(h, to_int64(r->modulus)).verdict)
    throw Error(ErrorCode::InternalError, std::string(node_name(r->kind)) + " node of order " + to_decimal(r->order) +
                                              " failed verification at modulus " + to_decimal(r->modulus));
  return h;
}

SignMatrix dsum_step(const SignMatrix& h, const RecipePtr& design, std::int64_t m) {
  auto [d1, p1] = core_to_design(normalize(h), m);
  auto [d2, p2] = materialize_design(design);
  return design_to_mh(direct_sum(d1, p1, d2, p2.at_modulus(m)));
}

// 2D - J: a 1 entry becomes +1.
SignMatrix group_matrix(const IncidenceMatrix& d) { return design_to_mh(d); }

SignMatrix build(const RecipePtr& r) {
  switch (r->kind) {
    case NodeKind::AllOnes:
      return checked(SignMatrix::all_ones(r->order.get_ui()), r);
    case NodeKind::JMinus2I:
      return checked(SignMatrix::j_minus_2i(r->order.get_ui()), r);
    case NodeKind::PaleyHadamard:
      return checked(mh::paley_hadamard(arg_u64(r->args.at(0), "q")), r);
    case NodeKind::DesignMatrix:
      return checked(group_matrix(materialize_design(r->children[0]).first), r);
    case NodeKind::TwoCirculant: {
      const auto a = group_matrix(materialize_design(r->children[0]).first);
      const auto b = group_matrix(materialize_design(r->children[1]).first);
      const std::size_t v = a.order();
      SignMatrix h(2 * v);
      for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j) {
          h.set(i, j, a.at(i, j));
          h.set(i, v + j, b.at(i, j));
          h.set(v + i, j, -b.at(j, i));
          h.set(v + i, v + j, a.at(j, i));
        }
      return checked(std::move(h), r);
    }
    case NodeKind::Kron:
      return checked(kronecker_product(build(r->children[0]), build(r->children[1])), r);
    case NodeKind::Double: {
      const auto c = build(r->children[0]);
      const std::size_t n = c.order();
      SignMatrix h(2 * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const int x = c.at(i, j);
          h.set(i, j, x);
          h.set(i, n + j, x);
          h.set(n + i, j, x);
          h.set(n + i, n + j, -x);
        }
      return checked(std::move(h), r);
    }
    case NodeKind::DirectSumWithDesign:
      return checked(dsum_step(build(r->children[0]), r->children[1], arg_int(r->args.at(0))), r);
    case NodeKind::Iterate: {
      const auto l = arg_u64(r->args.at(0), "l");
      const auto m = arg_int(r->args.at(1));
      auto h = build(r->children[0]);
      for (std::uint64_t t = 0; t < l; ++t) {
        h = dsum_step(h, r->children[1], m);
        if (!verify_mh(h, m).verdict) throw Error(ErrorCode::InternalError, "Iterate round failed verification");
      }
      return checked(std::move(h), r);
    }
    default:
      throw Error(ErrorCode::InvalidArgument, std::string(node_name(r->kind)) + " is a design node");
  }
}

}  // namespace

SignMatrix materialize(const RecipePtr& r, std::size_t size_cap) {
  need_matrix(r, "materialize");
  if (!fits_cap(*r, size_cap))
    throw Error(ErrorCode::CapExceeded, "order " + to_decimal(r->order) + " exceeds the materialization cap of " +
                                            std::to_string(size_cap) + " bytes");
  if (!r->materializable)
    throw Error(ErrorCode::NotMaterializable, "recipe of order " + to_decimal(r->order) +
                                                  " uses a design with no explicit incidence matrix");
  return build(r);
}

std::pair<IncidenceMatrix, DesignParams> materialize_design(const RecipePtr& r) {
  need_design(r, "materialize_design");
  switch (r->kind) {
    case NodeKind::CatalogDesign:
      return mh::catalog_design(arg_str(r->args.at(0)));
    case NodeKind::PaleyDesign:
      return mh::paley_design(arg_u64(r->args.at(0), "q"));
    default:
      throw Error(ErrorCode::NotMaterializable,
                  std::string(node_name(r->kind)) + " design of order " + to_decimal(r->order) + " is parameter-only");
  }
}

namespace {

// Replays one node through the public constructors.
RecipePtr construct(NodeKind kind, const std::vector<RecipeArg>& a, const std::vector<RecipePtr>& c) {
  auto want = [&](std::size_t na, std::size_t nc) {
    if (a.size() != na || c.size() != nc)
      throw Error(ErrorCode::InvalidArgument, std::string(node_name(kind)) + " needs " + std::to_string(na) +
                                                  " args and " + std::to_string(nc) + " children");
  };
  switch (kind) {
    case NodeKind::AllOnes:
      want(1, 0);
      return recipe::all_ones(arg_big(a[0]));
    case NodeKind::JMinus2I:
      want(1, 0);
      return recipe::j_minus_2i(arg_big(a[0]));
    case NodeKind::PaleyHadamard:
      want(1, 0);
      return recipe::paley_hadamard(arg_u64(a[0], "q"));
    case NodeKind::CatalogDesign:
      want(1, 0);
      return recipe::catalog_design(arg_str(a[0]));
    case NodeKind::PaleyDesign:
      want(1, 0);
      return recipe::paley_design(arg_u64(a[0], "q"));
    case NodeKind::Family10:
      want(3, 0);
      return recipe::family10(arg_big(a[0]), arg_u64(a[1], "d"), arg_u64(a[2], "e"));
    case NodeKind::Family11:
      want(2, 0);
      return recipe::family11(arg_big(a[0]), arg_u64(a[1], "e"));
    case NodeKind::DesignMatrix:
      want(0, 1);
      return recipe::design_matrix(c[0]);
    case NodeKind::TwoCirculant:
      want(0, 2);
      return recipe::two_circulant(c[0], c[1]);
    case NodeKind::Kron:
      want(0, 2);
      return recipe::kron(c[0], c[1]);
    case NodeKind::Double:
      want(0, 1);
      return recipe::doubled(c[0]);
    case NodeKind::DirectSumWithDesign:
      want(1, 2);
      return recipe::direct_sum_with_design(c[0], c[1], arg_int(a[0]));
    case NodeKind::Iterate: {
      want(2, 2);
      const auto l = arg_u64(a[0], "l");
      if (l == 0) throw Error(ErrorCode::InvalidArgument, "an Iterate node needs l >= 1");
      return recipe::iterate(c[0], c[1], l, arg_int(a[1]));
    }
  }
  throw Error(ErrorCode::InternalError, "unhandled node kind");
}

RecipePtr rebuild(const RecipePtr& r, const std::string& path, std::vector<std::string>& issues) {
  std::vector<RecipePtr> kids;
  bool kids_ok = true;
  for (std::size_t i = 0; i < r->children.size(); ++i) {
    auto k = rebuild(r->children[i], path + "/" + std::to_string(i), issues);
    if (!k) kids_ok = false;
    kids.push_back(std::move(k));
  }
  if (!kids_ok) return nullptr;
  RecipePtr fresh;
  try {
    fresh = construct(r->kind, r->args, kids);
  } catch (const Error& e) {
    issues.push_back(path + " " + node_name(r->kind) + ": " + e.what());
    return nullptr;
  }
  const std::string at = path + " " + node_name(r->kind) + ": ";
  if (fresh->order != r->order) issues.push_back(at + "order " + to_decimal(r->order) + " should be " + to_decimal(fresh->order));
  if (fresh->modulus != r->modulus)
    issues.push_back(at + "modulus " + to_decimal(r->modulus) + " should be " + to_decimal(fresh->modulus));
  if (fresh->design != r->design) issues.push_back(at + "design parameters differ");
  if (fresh->materializable != r->materializable) issues.push_back(at + "materializable flag differs");
  return fresh;
}

json to_json(const RecipePtr& r) {
  json args = json::array();
  for (const auto& a : r->args) {
    if (const auto* i = std::get_if<std::int64_t>(&a))
      args.push_back(*i);
    else
      args.push_back(std::get<std::string>(a));
  }
  json kids = json::array();
  for (const auto& c : r->children) kids.push_back(to_json(c));
  json j;
  j["node"] = node_name(r->kind);
  j["args"] = std::move(args);
  j["order"] = to_decimal(r->order);
  if (r->modulus.fits_slong_p())
    j["modulus"] = static_cast<std::int64_t>(r->modulus.get_si());
  else
    j["modulus"] = to_decimal(r->modulus);
  j["children"] = std::move(kids);
  return j;
}

RecipePtr from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "recipe node must be an object");
  for (const char* key : {"node", "args", "order", "modulus", "children"})
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("recipe node lacks '") + key + "'");
  if (!j["node"].is_string() || !j["args"].is_array() || !j["children"].is_array() || !j["order"].is_string())
    throw Error(ErrorCode::ParseError, "recipe node has a field of the wrong type");
  const NodeKind kind = node_from_name(j["node"].get<std::string>());
  std::vector<RecipeArg> args;
  for (const auto& a : j["args"]) {
    if (a.is_number_integer())
      args.emplace_back(a.get<std::int64_t>());
    else if (a.is_string())
      args.emplace_back(a.get<std::string>());
    else
      throw Error(ErrorCode::ParseError, "recipe args must be integers or strings");
  }
  std::vector<RecipePtr> kids;
  for (const auto& c : j["children"]) kids.push_back(from_json(c));
  const BigInt order = from_decimal(j["order"].get<std::string>());
  BigInt modulus;
  if (j["modulus"].is_number_integer())
    modulus = BigInt(static_cast<long>(j["modulus"].get<std::int64_t>()));
  else if (j["modulus"].is_string())
    modulus = from_decimal(j["modulus"].get<std::string>());
  else
    throw Error(ErrorCode::ParseError, "modulus must be an integer");
  auto r = construct(kind, args, kids);
  if (r->order != order || r->modulus != modulus)
    throw Error(ErrorCode::VerificationFailed, std::string(node_name(kind)) + " declares (" + to_decimal(order) + ", " +
                                                   to_decimal(modulus) + ") but computes (" + to_decimal(r->order) +
                                                   ", " + to_decimal(r->modulus) + ")");
  return r;
}

void to_text(const RecipePtr& r, std::string& out) {
  out += node_name(r->kind);
  if (!r->args.empty()) {
    out += '[';
    for (std::size_t i = 0; i < r->args.size(); ++i) {
      if (i) out += ',';
      if (const auto* n = std::get_if<std::int64_t>(&r->args[i]))
        out += std::to_string(*n);
      else
        out += std::get<std::string>(r->args[i]);
    }
    out += ']';
  }
  if (!r->children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < r->children.size(); ++i) {
      if (i) out += ", ";
      to_text(r->children[i], out);
    }
    out += ')';
  }
}

}  // namespace

RecipeCheck check_recipe(const RecipePtr& r) {
  RecipeCheck c;
  if (!r) {
    c.issues.push_back("null recipe");
    return c;
  }
  rebuild(r, "", c.issues);
  c.ok = c.issues.empty();
  return c;
}

std::string recipe_to_json(const RecipePtr& r, int indent) { return to_json(r).dump(indent); }

RecipePtr recipe_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("recipe JSON: ") + e.what());
  }
  return from_json(j);
}

std::string recipe_to_string(const RecipePtr& r) {
  std::string s;
  to_text(r, s);
  return s;
}

}  // namespace mh
