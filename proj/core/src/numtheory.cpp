#include "mh/numtheory.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numeric>
#include <thread>

#include "mh/error.hpp"

namespace mh {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

std::string to_decimal(const BigInt& x) { return x.get_str(10); }

BigInt from_decimal(const std::string& s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) throw Error(ErrorCode::ParseError, "empty integer '" + s + "'");
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') throw Error(ErrorCode::ParseError, "not a decimal integer '" + s + "'");
  BigInt x;
  x.set_str(s[0] == '+' ? s.substr(1) : s, 10);
  return x;
}

std::int64_t residue(const BigInt& x, std::int64_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "modulus must be positive");
  return static_cast<std::int64_t>(mpz_fdiv_ui(x.get_mpz_t(), static_cast<unsigned long>(m)));
}

std::int64_t residue(std::int64_t x, std::int64_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "modulus must be positive");
  std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

std::int64_t to_int64(const BigInt& x) {
  if (!x.fits_slong_p()) throw Error(ErrorCode::Overflow, to_decimal(x) + " does not fit in 64 bits");
  return x.get_si();
}

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

constexpr u64 kSmallPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool strong_probable_prime(u64 n, u64 a) {
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  u64 x = powmod(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

u64 rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
    u64 x = 2, y = 2, d = 1;
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  u64 d = rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

std::vector<unsigned long> sieve(unsigned long limit) {
  std::vector<bool> comp(limit + 1, false);
  std::vector<unsigned long> ps;
  for (unsigned long i = 2; i <= limit; ++i) {
    if (comp[i]) continue;
    ps.push_back(i);
    for (unsigned long j = i * i; j <= limit; j += i) comp[j] = true;
  }
  return ps;
}

const std::vector<unsigned long>& trial_primes() {
  static const std::vector<unsigned long> ps = sieve(2000);
  return ps;
}

bool big_strong_probable_prime(const BigInt& n, const BigInt& a) {
  BigInt nm1 = n - 1;
  BigInt d = nm1;
  mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  BigInt x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == nm1) return true;
  for (mp_bitcnt_t i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == nm1) return true;
    if (x == 1) return false;
  }
  return false;
}

}  // namespace

bool is_prime_u64(u64 x) {
  if (x < 2) return false;
  for (u64 p : kSmallPrimes) {
    if (x == p) return true;
    if (x % p == 0) return false;
  }
  for (u64 a : kSmallPrimes)
    if (!strong_probable_prime(x, a)) return false;
  return true;
}

std::vector<std::pair<u64, unsigned>> factorize(u64 m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "cannot factor 0");
  std::vector<u64> fs;
  factor_into(m, fs);
  std::sort(fs.begin(), fs.end());
  std::vector<std::pair<u64, unsigned>> out;
  for (u64 p : fs) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

u64 euler_phi(u64 m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "phi(0) is undefined");
  u64 r = m;
  for (auto [p, e] : factorize(m)) r = r / p * (p - 1);
  return r;
}

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
  BigInt x;
  if (mpz_invert(x.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error(ErrorCode::NotInvertible, to_decimal(a) + " has no inverse mod " + to_decimal(m));
  if (x < 0) x += m;
  return x;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
  return mod_inverse(BigInt(static_cast<long>(a)), BigInt(static_cast<long>(m))).get_si();
}

std::int64_t pow_mod(std::int64_t base, u64 exp, std::int64_t m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "modulus must be positive");
  return static_cast<std::int64_t>(powmod(static_cast<u64>(residue(base, m)), exp, static_cast<u64>(m)));
}

std::int64_t half_pow_coeff(std::int64_t m) {
  if (m < 3 || m % 2 == 0) throw Error(ErrorCode::InvalidArgument, "half_pow_coeff needs odd m >= 3");
  return pow_mod(2, euler_phi(static_cast<u64>(m)) - 2, m);
}

bool is_quadratic_residue(const BigInt& n, std::int64_t m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
  const std::int64_t a = residue(n, m);
  if (std::gcd(a, m) != 1)
    throw Error(ErrorCode::NotCoprime, "gcd(" + to_decimal(n) + ", " + std::to_string(m) + ") != 1");
  // Units: a square mod p^e (p odd) iff a square mod p; for 2^e the classical 1, 4, 8 rule.
  for (auto [p, e] : factorize(static_cast<u64>(m))) {
    if (p == 2) {
      if (e == 2 && a % 4 != 1) return false;
      if (e >= 3 && a % 8 != 1) return false;
    } else if (powmod(static_cast<u64>(a) % p, (p - 1) / 2, p) != 1) {
      return false;
    }
  }
  return true;
}

PrimalityResult is_probable_prime(const BigInt& x) {
  if (x < 2) return {false, false};
  if (x.fits_ulong_p()) return {is_prime_u64(x.get_ui()), false};
  for (unsigned long p : trial_primes())
    if (mpz_divisible_ui_p(x.get_mpz_t(), p)) return {false, false};
  if (!big_strong_probable_prime(x, 2)) return {false, false};
  // 63 further rounds with fixed-seed random bases: error below 4^-64.
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(0x9e3779b97f4a7c15UL);
  BigInt span = x - 3;
  for (int i = 0; i < 63; ++i) {
    BigInt a = rng.get_z_range(span) + 2;
    if (!big_strong_probable_prime(x, a)) return {false, false};
  }
  return {true, true};
}

std::optional<PrimePower> is_prime_power(const BigInt& x) {
  if (x < 2) throw Error(ErrorCode::InvalidArgument, "is_prime_power needs x >= 2");
  for (unsigned long p : trial_primes()) {
    if (!mpz_divisible_ui_p(x.get_mpz_t(), p)) continue;
    BigInt y = x;
    unsigned e = 0;
    while (mpz_divisible_ui_p(y.get_mpz_t(), p)) {
      mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
      ++e;
    }
    if (y != 1) return std::nullopt;
    return PrimePower{BigInt(p), e, false};
  }
  if (auto pr = is_probable_prime(x); pr.prime) return PrimePower{x, 1, pr.probabilistic};
  if (!mpz_perfect_power_p(x.get_mpz_t())) return std::nullopt;
  const std::size_t bits = mpz_sizeinbase(x.get_mpz_t(), 2);
  for (unsigned long e : trial_primes()) {
    if (e > bits) break;
    BigInt y;
    if (mpz_root(y.get_mpz_t(), x.get_mpz_t(), e) == 0) continue;
    auto inner = is_prime_power(y);
    if (!inner) return std::nullopt;
    inner->exponent *= static_cast<unsigned>(e);
    return inner;
  }
  return std::nullopt;
}

std::optional<BigInt> is_perfect_square(const BigInt& x) {
  if (x < 0) return std::nullopt;
  BigInt root, rem;
  mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), x.get_mpz_t());
  if (rem != 0) return std::nullopt;
  return root;
}

u64 multiplicative_order(const BigInt& a, u64 m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "modulus must be at least 2");
  const u64 x = mpz_fdiv_ui(a.get_mpz_t(), m);
  if (std::gcd(x, m) != 1) throw Error(ErrorCode::NotCoprime, "element is not a unit");
  u64 ord = euler_phi(m);
  for (auto [f, e] : factorize(ord)) {
    (void)e;
    while (ord % f == 0 && powmod(x, ord / f, m) == 1) ord /= f;
  }
  return ord;
}

bool is_primitive_root(const BigInt& a, u64 p) {
  if (p < 3 || !is_prime_u64(p)) throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not an odd prime");
  return multiplicative_order(a, p) == p - 1;
}

BigInt repunit(const BigInt& q, u64 d) {
  if (q < 2) throw Error(ErrorCode::InvalidArgument, "repunit base must be >= 2");
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "repunit length must be >= 1");
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), q.get_mpz_t(), d);
  r -= 1;
  BigInt qm1 = q - 1;
  mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), qm1.get_mpz_t());
  return r;
}

BigInt binomial(u64 n, u64 k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

namespace {

void require_odd_prime(u64 p) {
  if (p < 3 || !is_prime_u64(p)) throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not an odd prime");
}

// Cheap necessary conditions on r = repunit(q, d). False means r fails
// "r = 1 mod 4" or is provably not a prime power.
bool repunit_prefilter(u64 q, u64 d) {
  if (d < 2) return false;  // r = 1
  const u64 r4 = (q % 4 == 1) ? d % 4 : (d % 2 == 1 ? 1 : 0);
  if (r4 != 1) return false;
  auto fs = factorize(d);
  const u64 a = fs.front().first;
  if (a == d) return true;
  BigInt r = repunit(q, d);
  BigInt g = repunit(q, a);
  BigInt rest = r / g;
  BigInt c;
  mpz_gcd(c.get_mpz_t(), g.get_mpz_t(), rest.get_mpz_t());
  return c != 1;  // coprime nontrivial factors cannot both be powers of one prime
}

}  // namespace

Condition1Report condition1_check(u64 p, const BigInt& q, u64 d) {
  require_odd_prime(p);
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  Condition1Report rep;
  auto& w = rep.witness;
  w.p = p;
  w.q = q;
  w.d = d;
  w.delta = d % p;

  bool q_ok = q >= 3 && mpz_odd_p(q.get_mpz_t());
  if (q_ok) {
    auto pp = is_prime_power(q);
    q_ok = pp.has_value();
    if (pp) w.q_power = *pp;
  }
  if (!q_ok) rep.failures.emplace_back(kQOddPrimePower);
  if (q < 2 || residue(q, static_cast<std::int64_t>(p)) != 1) rep.failures.emplace_back(kQOneModP);
  if (w.delta == 0) rep.failures.emplace_back(kDeltaRange);

  if (q >= 2) {
    w.r = repunit(q, d);
    bool r_ok = w.r >= 2;
    if (r_ok) {
      auto pp = is_prime_power(w.r);
      r_ok = pp.has_value();
      if (pp) w.r_power = *pp;
    }
    if (!r_ok) rep.failures.emplace_back(kRPrimePower);
    if (residue(w.r, 4) != 1) rep.failures.emplace_back(kROneMod4);
  } else {
    rep.failures.emplace_back(kRPrimePower);
    rep.failures.emplace_back(kROneMod4);
  }
  return rep;
}

Condition1Witness condition1_verify(u64 p, const BigInt& q, u64 d) {
  auto rep = condition1_check(p, q, d);
  if (!rep.ok()) throw Condition1Error(rep.failures);
  return rep.witness;
}

std::optional<Condition1Witness> condition1_search(u64 p, u64 delta, u64 q_limit, u64 d_limit,
                                                   unsigned threads) {
  require_odd_prime(p);
  if (delta < 1 || delta >= p) throw Error(ErrorCode::InvalidArgument, "delta must lie in [1, p)");

  std::vector<std::pair<u64, u64>> cands;
  for (u64 q = p + 1; q <= q_limit; q += p) {
    if (q % 2 == 0 || !is_prime_power(q)) continue;
    for (u64 d = delta; d <= d_limit; d += p)
      if (repunit_prefilter(q, d)) cands.emplace_back(q, d);
  }

  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::atomic<std::size_t> best{none};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cands.size() || i > best.load()) return;
      if (!condition1_check(p, cands[i].first, cands[i].second).ok()) continue;
      std::size_t cur = best.load();
      while (i < cur && !best.compare_exchange_weak(cur, i)) {
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (best.load() == none) return std::nullopt;
  const auto [q, d] = cands[best.load()];
  return condition1_verify(p, q, d);
}

}  // namespace mh
