// mhtool: command line front end for the modular Hadamard toolkit.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "mh/error.hpp"
#include "mh/existence.hpp"
#include "mh/families.hpp"
#include "mh/planner.hpp"
#include "mh/recipe.hpp"
#include "mh/search.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 10;
constexpr int kExitError = 11;
constexpr int kExitInternal = 12;

struct Config {
  bool json_out = false;
  unsigned threads = 1;
  std::size_t search_cap = 10;
  std::size_t materialize_cap = mh::kDefaultMaterializeCap;
  std::uint64_t q_limit = 3000;
  std::uint64_t d_limit = 400;
};

std::size_t env_size(const char* name, std::size_t fallback) {
  const char* s = std::getenv(name);
  if (!s || !*s) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    throw CLI::ValidationError(std::string(name) + " must be a non-negative integer");
  }
}

mh::BigInt parse_big(const std::string& s) {
  try {
    return mh::from_decimal(s);
  } catch (const mh::Error&) {
    throw CLI::ValidationError("'" + s + "' is not a decimal integer");
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream f(path);
  if (!f) throw mh::Error(mh::ErrorCode::ParseError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(f), {}};
}

void emit(const Config& c, const json& j, const std::string& text) {
  if (c.json_out)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

json gram_json(const mh::GramReport& g) {
  json res = json::object();
  for (const auto& [r, count] : g.offdiag_residues) res[std::to_string(r)] = count;
  return {{"modulus", g.modulus}, {"diagonal_ok", g.diagonal_ok}, {"offdiag_residues", res}, {"verdict", g.verdict}};
}

std::string header_of(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  return {};
}

int count_tokens(const std::string& line) {
  std::istringstream is(line);
  int n = 0;
  for (std::string t; is >> t;) ++n;
  return n;
}

// ---- commands -----------------------------------------------------------

int cmd_decide(const Config& c, const std::string& n_text, std::int64_t m) {
  mh::DecideOptions opt;
  opt.search_cap = c.search_cap;
  opt.materialize_cap = c.materialize_cap;
  opt.search_threads = c.threads;
  const auto v = mh::decide(parse_big(n_text), m, opt);
  std::ostringstream os;
  os << "MH(" << mh::to_decimal(v.n) << "," << m << "): " << mh::to_string(v.status) << " ("
     << mh::to_string(v.reason) << ")\n";
  if (!v.detail.empty()) os << "  " << v.detail << '\n';
  if (v.certificate) {
    if (const auto* r = std::get_if<mh::RecipePtr>(&*v.certificate))
      os << "  certificate: " << mh::recipe_to_string(*r) << '\n';
    else
      os << "  certificate: matrix from search\n";
    os << "  checked: " << *v.certificate_check << '\n';
  }
  if (v.conjecture_prediction) os << "  conjecture predicts " << (*v.conjecture_prediction ? "Exists" : "NotExists") << '\n';
  emit(c, json::parse(mh::verdict_to_json(v)), os.str());
  switch (v.status) {
    case mh::Status::Exists:
      return 0;
    case mh::Status::NotExists:
      return 1;
    case mh::Status::Unknown:
      return 2;
  }
  return kExitInternal;
}

int cmd_construct(const Config& c, const std::string& n_text, std::int64_t m, bool recipe_only) {
  const auto plan = mh::plan_explained(parse_big(n_text), m);
  if (!plan) {
    std::cerr << "no construction: " << plan.note << '\n';
    return 2;
  }
  const auto& r = plan.recipe;
  const bool build = !recipe_only && !c.json_out && r->materializable && mh::fits_cap(*r, c.materialize_cap);
  if (!build) {
    if (!c.json_out && !recipe_only) std::cerr << "order too large to materialize; writing the recipe\n";
    std::cout << mh::recipe_to_json(r, 2) << '\n';
    return 0;
  }
  const auto h = mh::materialize(r, c.materialize_cap);
  if (!mh::verify_mh(h, m).verdict) throw mh::Error(mh::ErrorCode::InternalError, "constructed matrix fails");
  mh::write_sign_matrix(std::cout, h, m);
  return 0;
}

int verify_recipe_text(const Config& c, const std::string& text, std::optional<std::int64_t> m) {
  const auto r = mh::recipe_from_json(text);
  const auto check = mh::check_recipe(r);
  bool ok = check.ok;
  std::optional<mh::GramReport> gram;
  const std::int64_t mod = m.value_or(r->modulus.fits_slong_p() ? r->modulus.get_si() : 0);
  if (m && r->modulus != 0 && mh::residue(r->modulus, *m) != 0) ok = false;
  if (ok && !r->is_design() && r->materializable && mh::fits_cap(*r, c.materialize_cap)) {
    gram = mh::verify_mh(mh::materialize(r, c.materialize_cap), mod);
    ok = gram->verdict;
  }
  json j{{"kind", "recipe"}, {"ok", ok}, {"issues", check.issues}, {"order", mh::to_decimal(r->order)},
         {"modulus", mh::to_decimal(r->modulus)}, {"check", gram ? "materialized" : "parametric"}};
  if (gram) j["gram"] = gram_json(*gram);
  std::ostringstream os;
  os << "recipe " << mh::recipe_to_string(r) << "\n" << (ok ? "OK" : "FAIL") << " (" << j["check"].get<std::string>()
     << ")\n";
  for (const auto& i : check.issues) os << "  " << i << '\n';
  emit(c, j, os.str());
  return ok ? 0 : 1;
}

int verify_design_text(const Config& c, const std::string& text) {
  std::istringstream is(text);
  const auto [d, params] = mh::read_design(is);
  const bool ok = mh::verify_design(d, params);
  json j{{"kind", "design"},
         {"v", mh::to_decimal(params.v)},
         {"k", mh::to_decimal(params.k)},
         {"lambda", mh::to_decimal(params.lambda)},
         {"modulus", params.modulus},
         {"ok", ok}};
  emit(c, j, params.to_string() + (ok ? " OK\n" : " FAIL\n"));
  return ok ? 0 : 1;
}

int cmd_verify(const Config& c, const std::string& path, std::optional<std::int64_t> m) {
  const std::string text = read_input(path);
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '{') return verify_recipe_text(c, text, m);
  if (count_tokens(header_of(text)) == 4) return verify_design_text(c, text);
  std::istringstream is(text);
  const auto [h, file_m] = mh::read_sign_matrix(is);
  const std::int64_t mod = m.value_or(file_m);
  const auto g = mh::verify_mh(h, mod);
  json j = gram_json(g);
  j["kind"] = "matrix";
  j["order"] = std::to_string(h.order());
  std::ostringstream os;
  os << "MH(" << h.order() << "," << mod << ") " << (g.verdict ? "OK" : "FAIL") << '\n';
  if (!g.diagonal_ok) os << "  diagonal is not n (mod m)\n";
  for (const auto& [r, count] : g.offdiag_residues) os << "  off-diagonal " << r << ": " << count << " pairs\n";
  emit(c, j, os.str());
  return g.verdict ? 0 : 1;
}

int cmd_verify_design(const Config& c, const std::string& path) { return verify_design_text(c, read_input(path)); }

int cmd_search(const Config& c, std::size_t n, std::int64_t m, const std::string& mode, const std::string& goal,
               bool no_symmetry, bool show_log) {
  mh::search::SearchProblem p;
  p.n = n;
  p.m = m;
  p.mode = mh::search::mode_from_string(mode);
  p.goal = mh::search::goal_from_string(goal);
  p.symmetry = !no_symmetry;
  p.threads = c.threads;
  const auto out = mh::search::run(p);
  json j{{"n", std::to_string(n)},
         {"m", m},
         {"mode", mode},
         {"goal", goal},
         {"symmetry", p.symmetry},
         {"candidate_rows", out.candidate_row_count},
         {"nodes_visited", out.nodes_visited},
         {"exhausted", out.exhausted},
         {"found", out.found.has_value()},
         {"candidate_digest", out.log.candidate_digest}};
  if (p.goal != mh::search::Goal::First) j["solutions"] = out.solutions;
  if (out.found) j["witness"] = out.log.witness_text;
  std::ostringstream os;
  if (show_log) {
    os << out.log.to_string(p, out.candidate_row_count);
  } else {
    os << out.candidate_row_count << " candidate rows, " << out.nodes_visited << " nodes, "
       << (out.found ? "witness found" : "no witness") << (out.exhausted ? ", exhausted" : "") << '\n';
    if (p.goal != mh::search::Goal::First) os << out.solutions << " solutions\n";
    if (out.found) os << out.log.witness_text;
  }
  emit(c, j, os.str());
  if (out.found) return 0;
  return out.exhausted ? 1 : 2;
}

int cmd_nonexist(const Config& c, const std::string& n_text, std::int64_t m) {
  const auto n = parse_big(n_text);
  if (n < 3 || m < 2) throw mh::Error(mh::ErrorCode::InvalidArgument, "need n >= 3 and m >= 2");
  json tests = json::array();
  std::ostringstream os;
  bool refuted = false;
  auto add = [&](const char* name, const std::optional<std::string>& why) {
    tests.push_back({{"test", name}, {"fires", why.has_value()}, {"detail", why.value_or("")}});
    os << name << ": " << (why ? "rules it out, " + *why : std::string("passes")) << '\n';
    refuted = refuted || why.has_value();
  };
  add("QuadNonResidue", mh::check_quadratic_residue(n, m));
  add("GcdBound", mh::check_gcd_bound(n, m));
  add("SmallEvenRealHadamard", mh::small_even_reduction(n, m));
  json j{{"n", mh::to_decimal(n)}, {"m", m}};
  try {
    const auto r = mh::small_case_test(mh::to_int64(n), m);
    const bool applied = n == 2 * m + 1;
    auto sc = json::parse(mh::small_case_to_json(r));
    sc["applied"] = applied;
    j["small_case"] = sc;
    os << "Delta = " << mh::to_decimal(r.delta) << ", " << (r.sqrt_delta ? "a perfect square" : "not a perfect square")
       << ", verdict " << (r.admissible ? "admissible" : "inadmissible");
    if (!applied) os << " (not used: the count only holds at n = 2m + 1)";
    os << '\n';
    if (applied && !r.admissible) refuted = true;
  } catch (const mh::Error& e) {
    if (e.code() != mh::ErrorCode::NotApplicable && e.code() != mh::ErrorCode::Overflow) throw;
    os << "Delta test: not applicable\n";
  }
  j["tests"] = tests;
  j["refuted"] = refuted;
  emit(c, j, os.str());
  return refuted ? 1 : 2;
}

int cmd_condition1(const Config& c, std::uint64_t p, std::optional<std::uint64_t> delta) {
  json rows = json::array();
  std::ostringstream os;
  os << "delta q d r_digits r_mod_4 probabilistic\n";
  bool all = true;
  const std::uint64_t lo = delta.value_or(1);
  const std::uint64_t hi = delta.value_or(p - 1);
  for (std::uint64_t dl = lo; dl <= hi; ++dl) {
    const auto w = mh::condition1_search(p, dl, c.q_limit, c.d_limit, c.threads);
    if (!w) {
      all = false;
      rows.push_back({{"delta", dl}, {"found", false}});
      os << dl << " none\n";
      continue;
    }
    const std::string r = mh::to_decimal(w->r);
    rows.push_back({{"delta", dl},
                    {"found", true},
                    {"q", mh::to_decimal(w->q)},
                    {"d", w->d},
                    {"r", r},
                    {"r_mod_4", mh::residue(w->r, 4)},
                    {"probabilistic", w->probabilistic()}});
    os << dl << ' ' << mh::to_decimal(w->q) << ' ' << w->d << ' ' << r.size() << ' ' << mh::residue(w->r, 4) << ' '
       << (w->probabilistic() ? "yes" : "no") << '\n';
  }
  emit(c, json{{"p", p}, {"q_limit", c.q_limit}, {"d_limit", c.d_limit}, {"witnesses", rows}}, os.str());
  return all ? 0 : 2;
}

mh::ParityConstraint parity_from(const std::string& s) {
  if (s == "three-mod-4") return mh::ParityConstraint::ThreeMod4;
  if (s == "even") return mh::ParityConstraint::Even;
  if (s == "two-adic") return mh::ParityConstraint::TwoAdic;
  throw CLI::ValidationError("parity must be three-mod-4, even or two-adic");
}

int cmd_design_params(const Config& c, const std::string& family, const std::string& q_text, std::uint64_t d,
                      std::uint64_t e, std::optional<std::uint64_t> p, std::optional<std::string> n_text,
                      const std::string& parity, unsigned t) {
  const auto q = parse_big(q_text);
  mh::DesignParams params;
  json j{{"family", family}, {"q", q_text}, {"e", e}};
  if (family == "family10") {
    const auto f = mh::family10_params(q, d, e);
    params = f.params();
    j["d"] = d;
    j["r"] = mh::to_decimal(f.r);
    j["r_prime_power"] = f.r_prime_power;
  } else if (family == "family11") {
    params = mh::family11_params(q, e).params();
  } else {
    throw CLI::ValidationError("family must be family10 or family11");
  }
  j["v"] = mh::to_decimal(params.v);
  j["k"] = mh::to_decimal(params.k);
  j["lambda"] = mh::to_decimal(params.lambda);
  std::ostringstream os;
  os << "(" << j["v"].get<std::string>() << ", " << j["k"].get<std::string>() << ", " << j["lambda"].get<std::string>()
     << ")\n";
  int rc = 0;
  if (p) {
    if (!n_text) throw CLI::ValidationError("--p needs --n");
    const auto rep = mh::check_constraints_1_to_4(params, *p, parse_big(*n_text), parity_from(parity), t);
    j["constraints"] = {{"parity", rep.parity},
                        {"v_one_mod_p", rep.v_one_mod_p},
                        {"k_one_mod_p", rep.k_one_mod_p},
                        {"lambda_ok", rep.lambda_ok},
                        {"all", rep.all()}};
    os << "constraints at p = " << *p << ": parity " << rep.parity << ", v " << rep.v_one_mod_p << ", k "
       << rep.k_one_mod_p << ", lambda " << rep.lambda_ok << '\n';
    rc = rep.all() ? 0 : 1;
  }
  emit(c, j, os.str());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular Hadamard matrices: decide, construct, verify and search"};
  app.require_subcommand(1);
  Config cfg;
  try {
    cfg.search_cap = env_size("MHTOOL_SEARCH_CAP", cfg.search_cap);
    cfg.materialize_cap = env_size("MHTOOL_MATERIALIZE_CAP", cfg.materialize_cap);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }
  app.add_flag("--json", cfg.json_out, "JSON output");
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--search-cap", cfg.search_cap, "largest n for the search fallback (0 disables)");
  app.add_option("--materialize-cap", cfg.materialize_cap, "largest matrix in bytes to build")
      ->check(CLI::PositiveNumber);
  app.add_option("--q-limit", cfg.q_limit, "Condition-1 search bound on q")->check(CLI::PositiveNumber);
  app.add_option("--d-limit", cfg.d_limit, "Condition-1 search bound on d")->check(CLI::PositiveNumber);

  std::string n_text;
  std::int64_t m = 0;
  std::function<int()> run;

  auto* decide = app.add_subcommand("decide", "decide whether an MH(n, m) exists");
  decide->add_option("n", n_text)->required();
  decide->add_option("m", m)->required()->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  decide->callback([&] { run = [&] { return cmd_decide(cfg, n_text, m); }; });

  bool recipe_only = false;
  auto* construct = app.add_subcommand("construct", "print a certified MH(n, m)");
  construct->add_option("n", n_text)->required();
  construct->add_option("m", m)->required()->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  construct->add_flag("--recipe", recipe_only, "print the recipe JSON instead of the matrix");
  construct->callback([&] { run = [&] { return cmd_construct(cfg, n_text, m, recipe_only); }; });

  std::string path;
  std::optional<std::int64_t> modulus;
  auto* verify = app.add_subcommand("verify", "verify a matrix, design or recipe file (- for stdin)");
  verify->add_option("file", path)->required();
  verify->add_option("--modulus,-m", modulus, "override the modulus in the file")->check(CLI::NonNegativeNumber);
  verify->callback([&] { run = [&] { return cmd_verify(cfg, path, modulus); }; });

  auto* verify_design = app.add_subcommand("verify-design", "verify a design file");
  verify_design->add_option("file", path)->required();
  verify_design->callback([&] { run = [&] { return cmd_verify_design(cfg, path); }; });

  std::size_t search_n = 0;
  std::string mode = "generic", goal = "first";
  bool no_symmetry = false, show_log = false;
  auto* search = app.add_subcommand("search", "exhaustive search for small MH(n, m)");
  search->add_option("n", search_n)->required();
  search->add_option("m", m)->required()->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  search->add_option("--mode", mode)->check(CLI::IsMember({"generic", "restricted"}));
  search->add_option("--goal", goal)->check(CLI::IsMember({"first", "count", "exhaust"}));
  search->add_flag("--no-symmetry", no_symmetry, "explore every row order");
  search->add_flag("--log", show_log, "print the full search log");
  search->callback(
      [&] { run = [&] { return cmd_search(cfg, search_n, m, mode, goal, no_symmetry, show_log); }; });

  auto* nonexist = app.add_subcommand("nonexist", "run the necessary conditions");
  nonexist->add_option("n", n_text)->required();
  nonexist->add_option("m", m)->required()->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 40));
  nonexist->callback([&] { run = [&] { return cmd_nonexist(cfg, n_text, m); }; });

  std::uint64_t p = 0;
  std::optional<std::uint64_t> delta;
  auto* cond1 = app.add_subcommand("condition1", "search Condition-1 witnesses for a prime p");
  cond1->add_option("p", p)->required();
  cond1->add_option("--delta", delta);
  cond1->callback([&] { run = [&] { return cmd_condition1(cfg, p, delta); }; });

  std::string family, q_text;
  std::uint64_t d = 2, e = 1;
  unsigned t = 0;
  std::optional<std::uint64_t> dp;
  std::optional<std::string> dn;
  std::string parity = "three-mod-4";
  auto* dparams = app.add_subcommand("design-params", "parameters of the family-10 and family-11 designs");
  dparams->add_option("family", family)->required()->check(CLI::IsMember({"family10", "family11"}));
  dparams->add_option("--q", q_text)->required();
  dparams->add_option("--d", d);
  dparams->add_option("--e", e)->required();
  dparams->add_option("--p", dp, "check the iteration constraints at this prime");
  dparams->add_option("--n", dn, "target order for the lambda constraint");
  dparams->add_option("--parity", parity)->check(CLI::IsMember({"three-mod-4", "even", "two-adic"}));
  dparams->add_option("--t", t, "2-adic exponent");
  dparams->callback([&] { run = [&] { return cmd_design_params(cfg, family, q_text, d, e, dp, dn, parity, t); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    return run();
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const mh::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == mh::ErrorCode::InternalError ? kExitInternal : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}
