#include <doctest.h>

#include <mh/design_catalog.hpp>
#include <mh/error.hpp>
#include <mh/families.hpp>
#include <mh/planner.hpp>
#include <mh/recipe.hpp>

#include <functional>
#include <random>
#include <set>

#include "oracles.hpp"

using mh::BigInt;
using mh::DesignParams;
using mh::RecipePtr;
namespace rc = mh::recipe;

namespace {

DesignParams exact(long v, long k, long l) { return {v, k, l, 0}; }

bool throws_code(mh::ErrorCode code, auto&& fn) {
  try {
    fn();
  } catch (const mh::Error& e) {
    return e.code() == code;
  }
  return false;
}

// Does x -> t x + s (t a unit) map a onto b inside Z_v?
bool cyclic_equivalent(std::vector<std::uint32_t> a, std::vector<std::uint32_t> b, std::uint32_t v) {
  std::set<std::uint32_t> target(b.begin(), b.end());
  for (std::uint32_t t = 1; t < v; ++t) {
    if (std::gcd(t, v) != 1) continue;
    for (std::uint32_t s = 0; s < v; ++s) {
      std::set<std::uint32_t> img;
      for (auto x : a) img.insert((t * x + s) % v);
      if (img == target) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("paley_hadamard") {
  auto h12 = mh::paley_hadamard(11);
  CHECK(h12.order() == 12);
  CHECK(oracle::is_mh(h12.entries(), 0));
  auto h20 = mh::paley_hadamard(19);
  CHECK(h20.order() == 20);
  CHECK(mh::verify_mh(h20, 0).verdict);
  CHECK(oracle::is_mh(h20.entries(), 0));
  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [] { mh::paley_hadamard(13); }));
  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [] { mh::paley_hadamard(15); }));
  for (std::uint64_t q : {3ULL, 7ULL, 23ULL, 31ULL, 43ULL}) CHECK(mh::verify_mh(mh::paley_hadamard(q), 0).verdict);
}

TEST_CASE("paley_design") {
  auto [d7, p7] = mh::paley_design(7);
  CHECK(p7 == exact(7, 3, 1));
  CHECK(mh::verify_design(d7, p7));
  auto [d11, p11] = mh::paley_design(11);
  CHECK(p11 == exact(11, 5, 2));
  CHECK(mh::verify_design(d11, p11));
  auto [d27, p27] = mh::paley_design(27);  // needs GF(27)
  CHECK(p27 == exact(27, 13, 6));
  CHECK(mh::verify_design(d27, p27));
  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [] { mh::paley_design(9); }));
  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [] { mh::paley_design(15); }));
}

TEST_CASE("catalog") {
  auto [menon, pm] = mh::catalog_design("menon_36_15_6");
  CHECK(menon.order() == 36);
  CHECK(pm == exact(36, 15, 6));
  CHECK(mh::verify_design(menon, pm.at_modulus(7)));
  CHECK(mh::verify_design(menon, pm));
  const auto& e71 = mh::catalog_entry("ds_71_15_3");
  CHECK(e71.params == exact(71, 15, 3));
  CHECK_FALSE(e71.materializable);
  CHECK(throws_code(mh::ErrorCode::NotMaterializable, [] { mh::catalog_design("ds_71_15_3"); }));
  CHECK(throws_code(mh::ErrorCode::UnknownName, [] { mh::catalog_entry("nosuch"); }));
  // Every materializable entry is re-verified against the naive Gram.
  for (const auto& e : mh::catalog()) {
    const BigInt& v = e.params.v, &k = e.params.k, &l = e.params.lambda;
    CHECK(k * (k - 1) == l * (v - 1));
    if (!e.materializable) continue;
    auto [d, p] = mh::catalog_design(e.name);
    auto g = oracle::gram([&] {
      oracle::Mat m(d.order(), std::vector<int>(d.order()));
      for (std::size_t i = 0; i < d.order(); ++i)
        for (std::size_t j = 0; j < d.order(); ++j) m[i][j] = d.at(i, j);
      return m;
    }());
    for (std::size_t i = 0; i < d.order(); ++i)
      for (std::size_t j = 0; j < d.order(); ++j) CHECK(g[i][j] == (i == j ? k.get_si() : l.get_si()));
  }
}

TEST_CASE("find_difference_set") {
  mh::AbelianGroup z7{{7}};
  auto f = mh::find_difference_set(z7, 3, 1);
  REQUIRE(f);
  CHECK(mh::verify_design(f->incidence, exact(7, 3, 1)));
  CHECK(cyclic_equivalent(f->subset, mh::catalog_entry("fano_7_3_1").elements, 7));

  mh::AbelianGroup z11{{11}};
  auto q = mh::find_difference_set(z11, 5, 2);
  REQUIRE(q);
  CHECK(mh::verify_design(q->incidence, exact(11, 5, 2)));
  CHECK(cyclic_equivalent(q->subset, mh::catalog_entry("paley_11_5_2").elements, 11));

  mh::AbelianGroup z66{{6, 6}};
  auto m = mh::find_difference_set(z66, 15, 6);
  REQUIRE(m);
  CHECK(mh::verify_design(m->incidence, exact(36, 15, 6)));
  CHECK(mh::verify_design(m->incidence, mh::catalog_entry("menon_36_15_6").params));

  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [&] { mh::find_difference_set(z7, 3, 2); }));
  CHECK(mh::find_difference_set(mh::AbelianGroup{{2, 2, 2, 2}}, 6, 2));
  CHECK_FALSE(mh::find_difference_set(mh::AbelianGroup{{16}}, 6, 2));  // none in Z16
  CHECK(mh::find_difference_set(mh::AbelianGroup{{21}}, 5, 1));
}

TEST_CASE("family parameter regressions") {
  auto a = mh::family10_params(2, 2, 6);
  CHECK(a.r == 3);
  CHECK(a.v == 2185);
  CHECK(a.k == 729);
  CHECK(a.lambda == 243);
  CHECK(a.valid());
  auto b = mh::family11_params(23, 3);
  CHECK(b.v == 25439);
  CHECK(b.k == 12167);
  CHECK(b.lambda == 5819);
  auto c = mh::family11_params(9, 3);
  CHECK(c.v == 1639);
  CHECK(c.k == 729);
  CHECK(c.lambda == 324);
  // Nontrivial symmetric-design identity k(k-1) = lambda(v-1) for both families.
  for (auto [q, d, e] : {std::tuple{2, 2, 6}, {3, 3, 2}, {29, 5, 6}, {4, 3, 5}}) {
    auto f = mh::family10_params(q, d, e);
    CHECK(f.k * (f.k - 1) == f.lambda * (f.v - 1));
  }
  for (auto [q, e] : {std::pair{23, 3}, {9, 3}, {3, 7}, {5, 1}}) {
    auto f = mh::family11_params(q, e);
    CHECK(f.k * (f.k - 1) == f.lambda * (f.v - 1));
  }
  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [] { mh::family11_params(8, 3); }));
  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [] { mh::family10_params(6, 2, 2); }));
}

TEST_CASE("giant family-10 design") {
  auto g = mh::family10_params(29, 5, 6);
  CHECK(g.r == 732541);
  CHECK(g.r_prime_power);
  CHECK(mh::to_decimal(g.v).size() == 37);
  CHECK(mh::to_decimal(g.v) == "4481157543653329008412788039760691035");
  CHECK(mh::residue(g.v, 4) == 3);
  CHECK(mh::residue(g.v, 7) == 1);
  CHECK(mh::residue(g.v, 28) == 15);
}

TEST_CASE("check_constraints_1_to_4") {
  auto g = mh::family10_params(29, 5, 6);
  auto r = mh::check_constraints_1_to_4(g.params(), 7, 12, mh::ParityConstraint::ThreeMod4);
  CHECK(r.parity);
  CHECK(r.v_one_mod_p);
  CHECK(r.k_one_mod_p);
  CHECK(r.lambda_ok);
  auto f = mh::family11_params(9, 3);
  auto s = mh::check_constraints_1_to_4(f.params(), 7, 10, mh::ParityConstraint::ThreeMod4);
  CHECK(mh::residue(f.lambda, 7) == 2);
  CHECK(s.lambda_ok);
  CHECK(s.v_one_mod_p);
  auto t = mh::check_constraints_1_to_4(exact(13, 4, 1), 3, 1, mh::ParityConstraint::ThreeMod4);
  CHECK_FALSE(t.parity);  // 13 = 1 (mod 4)
  auto u = mh::check_constraints_1_to_4(exact(13, 4, 1), 3, 1, mh::ParityConstraint::TwoAdic, 2);
  CHECK(u.parity == (13 % 8 == 5));
}

TEST_CASE("design choices for the p = 11 constructions") {
  auto c = mh::gentech_choice(11, 3);  // 3 is a quadratic residue of 11
  CHECK(c.n0 == 8);
  CHECK(c.constraints.all());
  CHECK(oracle::powmod(2, c.i + 2, 11) == 8);
  for (std::uint64_t r : {1ULL, 3ULL, 4ULL, 5ULL, 9ULL}) CHECK(mh::gentech_choice(11, r).constraints.all());
  CHECK(throws_code(mh::ErrorCode::InvalidArgument, [] { mh::gentech_choice(11, 2); }));
  for (std::uint64_t n = 1; n < 11; ++n) {
    auto even = mh::three_mod_four_choice(11, n, false, 3000, 400);
    CHECK(even.constraints.all());
  }
  for (std::uint64_t n : {1ULL, 3ULL, 4ULL, 5ULL, 9ULL}) {
    auto odd = mh::three_mod_four_choice(11, n, true, 3000, 400);
    CHECK(odd.constraints.all());
  }
}

TEST_CASE("p = 1 (mod 4) choice") {
  // p = 5: i = 2. 2 is a primitive root of 5. Condition 1 rows exist for small delta.
  for (unsigned j = 0; j <= 2; ++j) {
    for (std::uint64_t n = 1; n < 5; ++n) {
      std::uint64_t r = 4 * mh::mod_inverse(static_cast<std::int64_t>(n), 5) % 5;
      bool power = oracle::powmod(static_cast<std::int64_t>(r), 4 >> j, 5) == 1;
      if (!power) {
        CHECK(throws_code(mh::ErrorCode::ConstraintFailed, [&] { mh::one_mod_four_choice(5, n, j, 2000, 200); }));
        continue;
      }
      auto c = mh::one_mod_four_choice(5, n, j, 2000, 200);
      CHECK(c.constraints.all());
      CHECK(c.t <= 2 - j);
    }
  }
}

TEST_CASE("recipe nodes compute order and modulus") {
  auto j = rc::all_ones(7);
  CHECK(j->order == 7);
  CHECK(j->modulus == 7);
  auto jm = rc::j_minus_2i(11);
  CHECK(jm->modulus == 7);
  auto d = rc::doubled(jm);
  CHECK(d->order == 22);
  CHECK(d->modulus == 14);
  auto k = rc::kron(rc::j_minus_2i(4), rc::paley_hadamard(11));
  CHECK(k->order == 48);
  CHECK(k->modulus == 0);
  auto dm = rc::design_matrix(rc::catalog_design("pg2_4_21_5_1"));
  CHECK(dm->order == 21);
  CHECK(dm->modulus == 5);
  auto tc = rc::two_circulant(rc::catalog_design("pg2_3_13_4_1"), rc::catalog_design("trivial_13_1_0"));
  CHECK(tc->order == 26);
  CHECK(tc->modulus == 10);
  CHECK(throws_code(mh::ErrorCode::ConstraintFailed,
                    [] { rc::two_circulant(rc::catalog_design("fano_7_3_1"), rc::catalog_design("pg2_3_13_4_1")); }));
}

TEST_CASE("iterate") {
  auto base = rc::kron(rc::j_minus_2i(4), rc::paley_hadamard(11));  // MH(48, 0)
  auto ds = rc::catalog_design("ds_71_15_3");
  for (std::uint64_t l = 1; l <= 5; ++l) {
    auto it = rc::iterate(base, ds, l, 7);
    CHECK(it->order == 48 + 70 * l);
    CHECK(it->modulus == 7);
    CHECK_FALSE(it->materializable);
    CHECK(mh::check_recipe(it).ok);
  }
  CHECK(rc::iterate(base, ds, 0, 7) == base);
  CHECK(throws_code(mh::ErrorCode::ConstraintFailed, [&] { rc::iterate(rc::j_minus_2i(11), ds, 1, 7); }));

  // Materialized chains: orders grow by v - 1 and every stage verifies.
  auto p12 = rc::paley_hadamard(11);
  auto d11 = rc::catalog_design("paley_11_6_3");
  for (std::uint64_t l = 0; l <= 3; ++l) {
    auto it = rc::iterate(p12, d11, l, 5);
    CHECK(it->order == 12 + 10 * l);
    auto h = mh::materialize(it);
    CHECK(h.order() == 12 + 10 * l);
    CHECK(mh::verify_mh(h, 5).verdict);
  }
  auto s16 = rc::doubled(rc::doubled(rc::j_minus_2i(4)));
  for (std::uint64_t l = 0; l <= 3; ++l) {
    auto it = rc::iterate(s16, rc::catalog_design("ds_16_6_2_z4z4"), l, 5);
    auto h = mh::materialize(it);
    CHECK(h.order() == 16 + 15 * l);
    CHECK(mh::verify_mh(h, 5).verdict);
  }
}

TEST_CASE("menon chain bookkeeping") {
  for (long k = 0; k <= 10; ++k) {
    auto base = rc::doubled(rc::j_minus_2i(7 * k + 4));
    CHECK(base->order == 14 * k + 8);
    auto r = rc::direct_sum_with_design(base, rc::catalog_design("menon_36_15_6"), 7);
    CHECK(r->order == 14 * k + 43);
    auto h = mh::materialize(r);
    CHECK(mh::verify_mh(h, 7).verdict);
    CHECK(oracle::is_mh(h.entries(), 7));
  }
}

TEST_CASE("plan examples") {
  auto p57 = mh::plan(57, 7);
  REQUIRE(p57);
  const RecipePtr& r = *p57;
  CHECK(r->kind == mh::NodeKind::DirectSumWithDesign);
  CHECK(r->children[0]->kind == mh::NodeKind::Double);
  CHECK(r->children[0]->children[0]->kind == mh::NodeKind::JMinus2I);
  CHECK(r->children[0]->children[0]->order == 11);
  CHECK(std::get<std::string>(r->children[1]->args[0]) == "menon_36_15_6");
  CHECK(mh::verify_mh(mh::materialize(r), 7).verdict);

  auto p20 = mh::plan(20, 5);
  REQUIRE(p20);
  CHECK((*p20)->kind == mh::NodeKind::AllOnes);

  CHECK_FALSE(mh::plan(118, 7));  // below the 398 threshold of its class
  auto chain = mh::m7_chain_6mod14(0, 1);
  CHECK(chain->order == 118);
  CHECK(chain->modulus == 7);
  CHECK(chain->kind == mh::NodeKind::Iterate);
  CHECK(mh::check_recipe(chain).ok);

  CHECK_FALSE(mh::plan(15, 7));
  CHECK_FALSE(mh::plan(29, 7));
  CHECK(mh::plan(398, 7));
}

TEST_CASE("plan output always materializes and verifies" * doctest::timeout(120)) {
  for (std::int64_t m = 2; m <= 12; ++m) {
    for (long n = 3; n <= 200; ++n) {
      auto pr = mh::plan_explained(n, m);
      if (!pr) continue;
      const auto& r = pr.recipe;
      CHECK(r->order == n);
      CHECK((r->modulus == 0 || r->modulus % m == 0));
      REQUIRE(r->materializable);
      auto h = mh::materialize(r);
      CHECK(h.order() == static_cast<std::size_t>(n));
      CHECK(mh::verify_mh(h, mh::to_int64(r->modulus)).verdict);
      CHECK(mh::verify_mh(h, m).verdict);
      CHECK(mh::check_recipe(r).ok);
    }
  }
}

TEST_CASE("m = 7 thresholds") {
  CHECK_FALSE(mh::plan(52565 - 7, 7));
  CHECK_FALSE(mh::plan(52565 - 7 * 13, 7));
  for (long n = 52565; n < 52565 + 28 * 3; ++n)
    if (n % 7 == 2) CHECK(mh::plan(n, 7));
  for (long n = 398; n < 398 + 84 * 2; n += 14) CHECK(mh::plan(n, 7));
  CHECK_FALSE(mh::plan(398 - 14 * 3, 7));
  for (long n = 683294; n < 683294 + 84 * 4; n += 14) {
    auto p = mh::plan(n, 7);
    REQUIRE(p);
    CHECK((*p)->order == n);
    CHECK(mh::check_recipe(*p).ok);
  }
  CHECK_FALSE(mh::plan(683294 - 14, 7));
  const BigInt b = mh::threshold_12mod14();
  CHECK(mh::to_decimal(b) == "4481157543653329008412788039740507382");
  CHECK(mh::residue(b, 14) == 8);
  CHECK_FALSE(mh::plan(b - 14 * 1000 + 4, 7));  // 12 (mod 14), below the bound
  // n = 12 (mod 28) above the bound: Kron-and-iterate chain.
  BigInt n12 = b + ((12 - mh::residue(b, 28)) + 28) % 28;
  auto p12 = mh::plan(n12, 7);
  REQUIRE(p12);
  CHECK((*p12)->order == n12);
  CHECK(mh::check_recipe(*p12).ok);
  // n = 26 (mod 28) directly above the bound needs a base of negative size.
  BigInt n26 = b + ((26 - mh::residue(b, 28)) + 28) % 28;
  CHECK_FALSE(mh::plan(n26, 7));
  auto v = mh::family10_params(29, 5, 6).v;
  BigInt n26ok = v - 1 + 320 + 28 * 40000;
  auto p26 = mh::plan(n26ok, 7);
  REQUIRE(p26);
  CHECK((*p26)->order == n26ok);
  CHECK(mh::check_recipe(*p26).ok);
}

TEST_CASE("materialize cap and giant recipes") {
  auto base = rc::kron(rc::doubled(rc::doubled(rc::j_minus_2i(4))), rc::paley_hadamard(19));
  CHECK(base->order == 320);
  auto giant = rc::direct_sum_with_design(base, rc::family10(29, 5, 6), 7);
  CHECK(mh::to_decimal(giant->order).size() == 37);
  try {
    mh::materialize(giant);
    FAIL("expected CapExceeded");
  } catch (const mh::Error& e) {
    CHECK(e.code() == mh::ErrorCode::CapExceeded);
    CHECK(std::string(e.what()).find(mh::to_decimal(giant->order)) != std::string::npos);
  }
  CHECK(throws_code(mh::ErrorCode::CapExceeded, [] { mh::materialize(rc::all_ones(5000), 1000); }));
  CHECK(throws_code(mh::ErrorCode::NotMaterializable, [] { mh::materialize(mh::m7_chain_6mod14(0, 1)); }));
}

TEST_CASE("recipe JSON round trip") {
  std::vector<RecipePtr> rs = {*mh::plan(57, 7), *mh::plan(398, 7), mh::m7_chain_6mod14(3, 2),
                               *mh::plan(26, 5), *mh::plan(683294, 7)};
  for (const auto& r : rs) {
    auto text = mh::recipe_to_json(r);
    auto back = mh::recipe_from_json(text);
    CHECK(mh::recipe_to_json(back) == text);
    CHECK(back->order == r->order);
    CHECK(back->modulus == r->modulus);
  }
  CHECK(throws_code(mh::ErrorCode::ParseError, [] { mh::recipe_from_json("{\"node\": 3}"); }));
  CHECK(throws_code(mh::ErrorCode::UnknownName,
                    [] { mh::recipe_from_json(R"({"node":"Nope","args":[],"order":"3","modulus":0,"children":[]})"); }));
}

TEST_CASE("direct sum biconditional on designs") {
  struct D {
    mh::IncidenceMatrix m;
    DesignParams p;
  };
  std::vector<D> pool;
  for (const auto& e : mh::catalog()) {
    if (!e.materializable || e.params.v > 40) continue;
    auto [d, p] = mh::catalog_design(e.name);
    pool.push_back({d, p});
    DesignParams cp{p.v, p.v - p.k, p.v - 2 * p.k + p.lambda, 0};
    pool.push_back({d.complement(), cp});
  }
  for (long v = 2; v <= 8; ++v) {
    pool.push_back({mh::IncidenceMatrix::identity(v), exact(v, 1, 0)});
    pool.push_back({mh::IncidenceMatrix::all_ones(v), exact(v, v, v)});
    pool.push_back({mh::IncidenceMatrix(v), exact(v, 0, 0)});
  }
  int yes = 0, no = 0;
  for (std::int64_t m = 2; m <= 13; ++m)
    for (const auto& a : pool)
      for (const auto& b : pool) {
        if (a.p.v + b.p.v > 60) continue;
        auto pa = a.p.at_modulus(m), pb = b.p.at_modulus(m);
        bool predicted = mh::dsum_check(pa, pb);
        bool actual = mh::verify_mh(mh::design_to_mh(mh::direct_sum(a.m, pa, b.m, pb)), m).verdict;
        CHECK(predicted == actual);
        (predicted ? yes : no)++;
      }
  CHECK(yes >= 100);
  CHECK(no >= 100);
}

TEST_CASE("random recipes: predicted order and modulus match the built matrix") {
  std::mt19937_64 rng(20261014);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  std::function<RecipePtr(int)> gen = [&](int depth) -> RecipePtr {
    const int kind = depth <= 0 ? pick(4) : pick(7);
    switch (kind) {
      case 0: return rc::all_ones(2 + pick(30));
      case 1: return rc::j_minus_2i(1 + pick(30));
      case 2: return rc::paley_hadamard(std::vector<std::uint64_t>{3, 7, 11, 19, 23}[pick(5)]);
      case 3: return rc::design_matrix(rc::catalog_design(std::vector<std::string>{
                  "fano_7_3_1", "paley_11_5_2", "pg2_4_21_5_1", "ds_15_7_3", "menon_36_15_6"}[pick(5)]));
      case 4: return rc::doubled(gen(depth - 1));
      default: return rc::kron(gen(depth - 1), gen(depth - 1));
    }
  };
  int tested = 0;
  while (tested < 150) {
    auto r = gen(3);
    if (r->order > 1000) continue;
    auto h = mh::materialize(r);
    REQUIRE(h.order() == r->order.get_ui());
    CHECK(mh::verify_mh(h, mh::to_int64(r->modulus)).verdict);
    if (r->order <= 200) CHECK(oracle::is_mh(h.entries(), mh::to_int64(r->modulus)));
    ++tested;
  }
}
