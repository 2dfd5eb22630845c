#include "mh/matrix.hpp"

#include <bit>
#include <cctype>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mh/error.hpp"

namespace mh {

namespace {

std::int64_t popcount_xor(const std::uint64_t* a, const std::uint64_t* b, std::size_t w) {
  std::int64_t c = 0;
  for (std::size_t t = 0; t < w; ++t) c += std::popcount(a[t] ^ b[t]);
  return c;
}

std::int64_t popcount_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t w) {
  std::int64_t c = 0;
  for (std::size_t t = 0; t < w; ++t) c += std::popcount(a[t] & b[t]);
  return c;
}

bool congruent(std::int64_t a, std::int64_t b, std::int64_t m) {
  return m == 0 ? a == b : residue(a - b, m) == 0;
}

bool congruent(const BigInt& a, const BigInt& b, std::int64_t m) {
  return m == 0 ? a == b : residue(a - b, m) == 0;
}

void check_square(const std::vector<std::vector<int>>& e) {
  for (const auto& r : e)
    if (r.size() != e.size()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
}

}  // namespace

SignMatrix SignMatrix::all_ones(std::size_t n) { return SignMatrix(n); }

SignMatrix SignMatrix::j_minus_2i(std::size_t n) {
  SignMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) h.set_bit(i, i, true);
  return h;
}

SignMatrix SignMatrix::from_entries(const std::vector<std::vector<int>>& e) {
  check_square(e);
  SignMatrix h(e.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[i][j] != 1 && e[i][j] != -1) throw Error(ErrorCode::InvalidArgument, "sign matrix entry is not +-1");
      h.set(i, j, e[i][j]);
    }
  return h;
}

std::int64_t SignMatrix::inner_product(std::size_t i, std::size_t j) const {
  return static_cast<std::int64_t>(n_) - 2 * popcount_xor(row(i), row(j), w_);
}

void SignMatrix::negate_row(std::size_t i) {
  auto* r = row(i);
  for (std::size_t t = 0; t < w_; ++t) r[t] = ~r[t];
  if (w_) r[w_ - 1] &= last_word_mask();
}

void SignMatrix::negate_col(std::size_t j) {
  for (std::size_t i = 0; i < n_; ++i) set_bit(i, j, !bit(i, j));
}

bool SignMatrix::is_normalized() const {
  for (std::size_t t = 0; t < w_; ++t)
    if (row(0)[t]) return false;
  for (std::size_t i = 0; i < n_; ++i)
    if (bit(i, 0)) return false;
  return true;
}

std::vector<std::vector<int>> SignMatrix::entries() const {
  std::vector<std::vector<int>> e(n_, std::vector<int>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) e[i][j] = at(i, j);
  return e;
}

IncidenceMatrix IncidenceMatrix::identity(std::size_t v) {
  IncidenceMatrix d(v);
  for (std::size_t i = 0; i < v; ++i) d.set_bit(i, i, true);
  return d;
}

IncidenceMatrix IncidenceMatrix::all_ones(std::size_t v) { return IncidenceMatrix(v).complement(); }

IncidenceMatrix IncidenceMatrix::from_entries(const std::vector<std::vector<int>>& e) {
  check_square(e);
  IncidenceMatrix d(e.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[i][j] != 0 && e[i][j] != 1) throw Error(ErrorCode::InvalidArgument, "incidence entry is not 0/1");
      d.set(i, j, e[i][j]);
    }
  return d;
}

std::int64_t IncidenceMatrix::row_sum(std::size_t i) const { return popcount_and(row(i), row(i), w_); }

std::int64_t IncidenceMatrix::col_sum(std::size_t j) const {
  std::int64_t c = 0;
  for (std::size_t i = 0; i < n_; ++i) c += bit(i, j);
  return c;
}

std::int64_t IncidenceMatrix::row_overlap(std::size_t i, std::size_t j) const {
  return popcount_and(row(i), row(j), w_);
}

IncidenceMatrix IncidenceMatrix::complement() const {
  IncidenceMatrix c(*this);
  for (std::size_t i = 0; i < n_; ++i) {
    auto* r = c.row(i);
    for (std::size_t t = 0; t < w_; ++t) r[t] = ~r[t];
    if (w_) r[w_ - 1] &= last_word_mask();
  }
  return c;
}

DesignParams DesignParams::at_modulus(std::int64_t m) const {
  if (m == modulus) return *this;
  if (m == 0 || (modulus != 0 && residue(modulus, m) != 0))
    throw Error(ErrorCode::ModulusMismatch, "cannot view " + to_string() + " modulo " + std::to_string(m));
  return DesignParams{v, BigInt(static_cast<long>(residue(k, m))), BigInt(static_cast<long>(residue(lambda, m))), m};
}

std::string DesignParams::to_string() const {
  std::string s = "(" + to_decimal(v) + "," + to_decimal(k) + "," + to_decimal(lambda);
  if (modulus != 0) s += ";" + std::to_string(modulus);
  return s + ")";
}

GramReport verify_mh(const SignMatrix& h, std::int64_t m) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "negative modulus");
  const std::size_t n = h.order();
  const auto ni = static_cast<std::int64_t>(n);
  GramReport rep;
  rep.modulus = m;
  rep.diagonal_ok = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!congruent(h.inner_product(i, i), ni, m)) rep.diagonal_ok = false;
  std::vector<std::uint64_t> counts(2 * n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) ++counts[static_cast<std::size_t>(h.inner_product(i, j) + ni)];
  bool off_ok = true;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (!counts[t]) continue;
    const std::int64_t ip = static_cast<std::int64_t>(t) - ni;
    const std::int64_t key = m == 0 ? ip : residue(ip, m);
    rep.offdiag_residues[key] += counts[t];
    if (key != 0) off_ok = false;
  }
  rep.verdict = rep.diagonal_ok && off_ok;
  return rep;
}

bool verify_design(const IncidenceMatrix& d, const DesignParams& p) {
  if (p.v != static_cast<unsigned long>(d.order()))
    throw Error(ErrorCode::DimensionMismatch,
                "design order " + std::to_string(d.order()) + " does not match v = " + to_decimal(p.v));
  const std::int64_t m = p.modulus;
  const std::size_t v = d.order();
  for (std::size_t i = 0; i < v; ++i) {
    if (!congruent(BigInt(static_cast<long>(d.row_sum(i))), p.k, m)) return false;
    if (!congruent(BigInt(static_cast<long>(d.col_sum(i))), p.k, m)) return false;
  }
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      if (!congruent(BigInt(static_cast<long>(d.row_overlap(i, j))), p.lambda, m)) return false;
  return true;
}

SignMatrix normalize(const SignMatrix& h) {
  SignMatrix out(h);
  const std::size_t n = h.order(), w = h.words();
  if (n == 0) return out;
  std::vector<std::uint64_t> first(h.row(0), h.row(0) + w);
  for (std::size_t i = 0; i < n; ++i) {
    auto* r = out.row(i);
    for (std::size_t t = 0; t < w; ++t) r[t] ^= first[t];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (out.bit(i, 0)) out.negate_row(i);
  return out;
}

std::int64_t kronecker_modulus(const BigInt& n1, std::int64_t m1, const BigInt& n2, std::int64_t m2) {
  if (m1 < 0 || m2 < 0) throw Error(ErrorCode::InvalidArgument, "negative modulus");
  BigInt a = BigInt(static_cast<long>(m1)) * m2;
  BigInt b = n1 * m2;
  BigInt c = n2 * m1;
  BigInt g = gcd(gcd(a, b), c);
  return to_int64(g);
}

SignMatrix kronecker_product(const SignMatrix& a, const SignMatrix& b) {
  const std::size_t n1 = a.order(), n2 = b.order();
  SignMatrix k(n1 * n2);
  for (std::size_t i1 = 0; i1 < n1; ++i1)
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      const std::size_t r = i1 * n2 + i2;
      for (std::size_t j1 = 0; j1 < n1; ++j1) {
        const bool flip = a.bit(i1, j1);
        for (std::size_t j2 = 0; j2 < n2; ++j2) k.set_bit(r, j1 * n2 + j2, flip != b.bit(i2, j2));
      }
    }
  return k;
}

std::pair<SignMatrix, std::int64_t> kronecker(const SignMatrix& h1, std::int64_t m1, const SignMatrix& h2,
                                              std::int64_t m2) {
  if (!verify_mh(h1, m1).verdict) throw Error(ErrorCode::VerificationFailed, "first factor is not an MH at its modulus");
  if (!verify_mh(h2, m2).verdict)
    throw Error(ErrorCode::VerificationFailed, "second factor is not an MH at its modulus");
  const std::int64_t m = kronecker_modulus(static_cast<unsigned long>(h1.order()), m1,
                                           static_cast<unsigned long>(h2.order()), m2);
  SignMatrix k = kronecker_product(h1, h2);
  if (!verify_mh(k, m).verdict) throw Error(ErrorCode::InternalError, "Kronecker product failed verification");
  return {std::move(k), m};
}

DesignParams core_design_params(const BigInt& n, std::int64_t m) {
  if (m < 3) throw Error(ErrorCode::NotApplicable, "core design needs m >= 3");
  if (n < 3) throw Error(ErrorCode::NotApplicable, "core design needs n >= 3");
  const BigInt nm = m;
  BigInt g = gcd(n, nm);
  if (g != 1) throw Error(ErrorCode::NotApplicable, "core design needs gcd(n, m) = 1");
  const std::int64_t c = pow_mod(2, euler_phi(static_cast<std::uint64_t>(m)) - 2, m);
  const std::int64_t k = residue(BigInt(static_cast<long>(2 * c)) * (n - 2), m);
  const std::int64_t l = residue(BigInt(static_cast<long>(c)) * (n - 4), m);
  return DesignParams{n - 1, BigInt(static_cast<long>(k)), BigInt(static_cast<long>(l)), m};
}

std::pair<IncidenceMatrix, DesignParams> core_to_design(const SignMatrix& h, std::int64_t m) {
  const std::size_t n = h.order();
  DesignParams p = core_design_params(static_cast<unsigned long>(n), m);
  if (!h.is_normalized()) throw Error(ErrorCode::NotApplicable, "core design needs a normalized matrix");
  if (!verify_mh(h, m).verdict)
    throw Error(ErrorCode::VerificationFailed, "input is not an MH(" + std::to_string(n) + "," + std::to_string(m) + ")");
  IncidenceMatrix d(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) d.set_bit(i - 1, j - 1, !h.bit(i, j));
  if (!verify_design(d, p)) throw Error(ErrorCode::InternalError, "core design failed verification");
  return {std::move(d), p};
}

IncidenceMatrix direct_sum(const IncidenceMatrix& d1, const DesignParams& p1, const IncidenceMatrix& d2,
                           const DesignParams& p2) {
  if (p1.modulus != p2.modulus) throw Error(ErrorCode::ModulusMismatch, "direct sum needs equal moduli");
  if (p1.v != static_cast<unsigned long>(d1.order()) || p2.v != static_cast<unsigned long>(d2.order()))
    throw Error(ErrorCode::DimensionMismatch, "design order does not match its parameters");
  const std::size_t v1 = d1.order(), v2 = d2.order();
  IncidenceMatrix s(v1 + v2);
  for (std::size_t i = 0; i < v1 + v2; ++i)
    for (std::size_t j = 0; j < v1 + v2; ++j) {
      bool b;
      if (i < v1 && j < v1)
        b = d1.bit(i, j);
      else if (i >= v1 && j >= v1)
        b = d2.bit(i - v1, j - v1);
      else
        b = true;
      s.set_bit(i, j, b);
    }
  return s;
}

bool dsum_check(const DesignParams& p1, const DesignParams& p2) {
  if (p1.modulus != p2.modulus) throw Error(ErrorCode::ModulusMismatch, "dsum_check needs equal moduli");
  const std::int64_t m = p1.modulus;
  const BigInt a = p1.v + p2.v;
  const BigInt b = 4 * (p1.k - p1.lambda);
  const BigInt c = 4 * (p2.k - p2.lambda);
  const BigInt d = 2 * (p1.k + p2.k);
  return congruent(a, b, m) && congruent(a, c, m) && congruent(a, d, m);
}

SignMatrix design_to_mh(const IncidenceMatrix& d) {
  const std::size_t n = d.order(), w = d.words();
  SignMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* src = d.row(i);
    auto* dst = h.row(i);
    for (std::size_t t = 0; t < w; ++t) dst[t] = ~src[t];
    if (w) dst[w - 1] &= h.last_word_mask();
  }
  return h;
}

BigInt determinant(const SignMatrix& h) {
  const std::size_t n = h.order();
  if (n == 0) return 1;
  std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = h.at(i, j);
  // Bareiss fraction-free elimination.
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

std::int64_t det_squared_mod(const SignMatrix& h, std::int64_t m) {
  if (h.order() > 20) throw Error(ErrorCode::OrderTooLarge, "det_squared_mod supports n <= 20");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "modulus must be positive");
  BigInt d = determinant(h);
  return residue(d * d, m);
}

namespace {

std::vector<std::string> content_lines(std::istream& is) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    std::string t;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (!t.empty()) out.push_back(line);
  }
  return out;
}

std::vector<BigInt> header_ints(const std::string& line, std::size_t count) {
  std::istringstream ss(line);
  std::vector<BigInt> out;
  std::string tok;
  while (ss >> tok) out.push_back(from_decimal(tok));
  if (out.size() != count)
    throw Error(ErrorCode::ParseError, "header must have " + std::to_string(count) + " integers: '" + line + "'");
  return out;
}

std::string squeeze(const std::string& line) {
  std::string t;
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  return t;
}

template <class M>
M read_rows(const std::vector<std::string>& lines, std::size_t n, char zero, char one) {
  if (lines.size() != n + 1)
    throw Error(ErrorCode::ParseError,
                "expected " + std::to_string(n) + " rows, found " + std::to_string(lines.size() - 1));
  M mat(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = squeeze(lines[i + 1]);
    if (row.size() != n)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                                             " entries, expected " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] != zero && row[j] != one)
        throw Error(ErrorCode::ParseError, std::string("unexpected character '") + row[j] + "' in row " +
                                               std::to_string(i + 1));
      mat.set_bit(i, j, row[j] == one);
    }
  }
  return mat;
}

std::size_t order_from(const BigInt& n) {
  if (n < 1 || n > 1000000) throw Error(ErrorCode::ParseError, "matrix order out of range: " + to_decimal(n));
  return n.get_ui();
}

std::int64_t modulus_from(const BigInt& m) {
  if (m < 0) throw Error(ErrorCode::ParseError, "negative modulus");
  return to_int64(m);
}

}  // namespace

void write_sign_matrix(std::ostream& os, const SignMatrix& h, std::int64_t m) {
  const std::size_t n = h.order();
  os << n << ' ' << m << '\n';
  std::string row(n, '+');
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = h.bit(i, j) ? '-' : '+';
    os << row << '\n';
  }
}

std::string sign_matrix_text(const SignMatrix& h, std::int64_t m) {
  std::ostringstream ss;
  write_sign_matrix(ss, h, m);
  return ss.str();
}

std::pair<SignMatrix, std::int64_t> read_sign_matrix(std::istream& is) {
  auto lines = content_lines(is);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty input");
  auto hdr = header_ints(lines[0], 2);
  const std::size_t n = order_from(hdr[0]);
  const std::int64_t m = modulus_from(hdr[1]);
  return {read_rows<SignMatrix>(lines, n, '+', '-'), m};
}

void write_design(std::ostream& os, const IncidenceMatrix& d, const DesignParams& p) {
  const std::size_t v = d.order();
  os << to_decimal(p.v) << ' ' << to_decimal(p.k) << ' ' << to_decimal(p.lambda) << ' ' << p.modulus << '\n';
  std::string row(v, '0');
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t j = 0; j < v; ++j) row[j] = d.bit(i, j) ? '1' : '0';
    os << row << '\n';
  }
}

std::pair<IncidenceMatrix, DesignParams> read_design(std::istream& is) {
  auto lines = content_lines(is);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty input");
  auto hdr = header_ints(lines[0], 4);
  const std::size_t v = order_from(hdr[0]);
  DesignParams p{hdr[0], hdr[1], hdr[2], modulus_from(hdr[3])};
  return {read_rows<IncidenceMatrix>(lines, v, '0', '1'), p};
}

}  // namespace mh
