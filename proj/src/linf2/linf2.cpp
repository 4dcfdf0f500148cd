#include "synss/linf2.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <utility>

namespace synss {

namespace {
std::atomic<size_t> g_budget{size_t(2) << 30};

uint32_t inv_mod(uint32_t a, int p) {
  int64_t t = 0, nt = 1, r = p, nr = a % p;
  while (nr) {
    int64_t q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw std::domain_error("not invertible mod p");
  return static_cast<uint32_t>((t % p + p) % p);
}
}  // namespace

void set_memory_budget(size_t bytes) { g_budget = bytes; }
size_t memory_budget() { return g_budget; }
void charge_memory(size_t bytes, const char* what) {
  if (bytes > g_budget)
    throw ResourceError(std::string(what) + " needs " + std::to_string(bytes) + " bytes, budget is " +
                        std::to_string(static_cast<size_t>(g_budget)));
}

// ---------------------------------------------------------------- MatrixFp

MatrixFp::MatrixFp(int p, size_t rows, size_t cols) : p_(p), rows_(rows), cols_(cols) {
  if (p == 2) {
    words_ = (cols + 63) / 64;
    charge_memory(rows * words_ * 8, "F_2 matrix");
    bits_.assign(rows * words_, 0);
  } else {
    charge_memory(rows * cols * 4, "F_p matrix");
    vals_.assign(rows * cols, 0);
  }
}

MatrixFp MatrixFp::identity(int p, size_t n) {
  MatrixFp m(p, n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

uint32_t MatrixFp::get(size_t r, size_t c) const {
  if (p_ == 2) return (bits_[r * words_ + c / 64] >> (c % 64)) & 1u;
  return vals_[r * cols_ + c];
}

void MatrixFp::set(size_t r, size_t c, uint32_t v) {
  if (p_ == 2) {
    uint64_t mask = uint64_t(1) << (c % 64);
    uint64_t& w = bits_[r * words_ + c / 64];
    w = (v & 1) ? (w | mask) : (w & ~mask);
  } else {
    vals_[r * cols_ + c] = v % p_;
  }
}

void MatrixFp::add_to(size_t r, size_t c, uint32_t v) {
  if (p_ == 2) {
    if (v & 1) bits_[r * words_ + c / 64] ^= uint64_t(1) << (c % 64);
  } else {
    uint32_t& x = vals_[r * cols_ + c];
    x = (x + v % p_) % p_;
  }
}

std::vector<uint32_t> MatrixFp::apply(const std::vector<uint32_t>& v) const {
  std::vector<uint32_t> out(rows_, 0);
  for (size_t r = 0; r < rows_; ++r) {
    uint64_t s = 0;
    for (size_t c = 0; c < cols_; ++c) s += static_cast<uint64_t>(get(r, c)) * v[c];
    out[r] = static_cast<uint32_t>(s % p_);
  }
  return out;
}

MatrixFp MatrixFp::transpose() const {
  MatrixFp t(p_, cols_, rows_);
  for (size_t r = 0; r < rows_; ++r)
    for (size_t c = 0; c < cols_; ++c)
      if (uint32_t v = get(r, c)) t.set(c, r, v);
  return t;
}

MatrixFp MatrixFp::operator*(const MatrixFp& o) const {
  if (cols_ != o.rows_ || p_ != o.p_) throw std::invalid_argument("matrix shape mismatch");
  MatrixFp m(p_, rows_, o.cols_);
  for (size_t r = 0; r < rows_; ++r)
    for (size_t k = 0; k < cols_; ++k) {
      uint32_t a = get(r, k);
      if (!a) continue;
      if (p_ == 2) {
        for (size_t w = 0; w < o.words_; ++w) m.bits_[r * m.words_ + w] ^= o.bits_[k * o.words_ + w];
      } else {
        for (size_t c = 0; c < o.cols_; ++c) m.add_to(r, c, a * o.get(k, c));
      }
    }
  return m;
}

bool MatrixFp::is_zero() const {
  if (p_ == 2) return std::all_of(bits_.begin(), bits_.end(), [](uint64_t w) { return w == 0; });
  return std::all_of(vals_.begin(), vals_.end(), [](uint32_t w) { return w == 0; });
}

std::vector<size_t> MatrixFp::rref() {
  std::vector<size_t> pivots;
  size_t row = 0;
  for (size_t c = 0; c < cols_ && row < rows_; ++c) {
    size_t piv = rows_;
    for (size_t r = row; r < rows_; ++r)
      if (get(r, c)) { piv = r; break; }
    if (piv == rows_) continue;
    if (p_ == 2) {
      if (piv != row)
        std::swap_ranges(bits_.begin() + piv * words_, bits_.begin() + (piv + 1) * words_, bits_.begin() + row * words_);
      const uint64_t* pr = &bits_[row * words_];
      size_t w0 = c / 64;
      uint64_t mask = uint64_t(1) << (c % 64);
      for (size_t r = 0; r < rows_; ++r) {
        if (r == row) continue;
        uint64_t* q = &bits_[r * words_];
        if (q[w0] & mask)
          for (size_t w = w0; w < words_; ++w) q[w] ^= pr[w];
      }
    } else {
      if (piv != row)
        std::swap_ranges(vals_.begin() + piv * cols_, vals_.begin() + (piv + 1) * cols_, vals_.begin() + row * cols_);
      uint32_t* pr = &vals_[row * cols_];
      uint32_t inv = inv_mod(pr[c], p_);
      for (size_t k = c; k < cols_; ++k) pr[k] = static_cast<uint32_t>(uint64_t(pr[k]) * inv % p_);
      for (size_t r = 0; r < rows_; ++r) {
        if (r == row) continue;
        uint32_t* q = &vals_[r * cols_];
        uint32_t f = q[c];
        if (!f) continue;
        for (size_t k = c; k < cols_; ++k) q[k] = static_cast<uint32_t>((q[k] + uint64_t(p_ - f) * pr[k]) % p_);
      }
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

RankKernel rank_kernel(const MatrixFp& m) {
  MatrixFp r = m;
  auto piv = r.rref();
  RankKernel out;
  out.rank = piv.size();
  std::vector<char> is_piv(m.cols(), 0);
  for (auto c : piv) is_piv[c] = 1;
  for (size_t f = 0; f < m.cols(); ++f) {
    if (is_piv[f]) continue;
    std::vector<uint32_t> v(m.cols(), 0);
    v[f] = 1;
    for (size_t i = 0; i < piv.size(); ++i) {
      uint32_t x = r.get(i, f);
      v[piv[i]] = x ? static_cast<uint32_t>(m.prime() - x) % m.prime() : 0;
    }
    out.kernel.push_back(std::move(v));
  }
  return out;
}

size_t rank(const MatrixFp& m) {
  MatrixFp r = m;
  return r.rref().size();
}

std::optional<std::vector<uint32_t>> solve(const MatrixFp& m, const std::vector<uint32_t>& b) {
  MatrixFp a(m.prime(), m.rows(), m.cols() + 1);
  for (size_t r = 0; r < m.rows(); ++r) {
    for (size_t c = 0; c < m.cols(); ++c)
      if (uint32_t v = m.get(r, c)) a.set(r, c, v);
    a.set(r, m.cols(), b[r]);
  }
  auto piv = a.rref();
  std::vector<uint32_t> w(m.cols(), 0);
  for (size_t i = 0; i < piv.size(); ++i) {
    if (piv[i] == m.cols()) return std::nullopt;
    w[piv[i]] = a.get(i, m.cols());
  }
  return w;
}

namespace {

// Incremental echelon basis over F_p.
struct Echelon {
  int p;
  std::vector<std::vector<uint32_t>> rows;
  std::vector<size_t> piv;
  bool insert(std::vector<uint32_t> v) {
    for (size_t i = 0; i < rows.size(); ++i) {
      uint32_t f = v[piv[i]];
      if (!f) continue;
      for (size_t k = 0; k < v.size(); ++k) v[k] = static_cast<uint32_t>((v[k] + uint64_t(p - f) * rows[i][k]) % p);
    }
    size_t c = 0;
    while (c < v.size() && !v[c]) ++c;
    if (c == v.size()) return false;
    uint32_t inv = inv_mod(v[c], p);
    for (auto& x : v) x = static_cast<uint32_t>(uint64_t(x) * inv % p);
    for (auto& r : rows) {
      uint32_t f = r[c];
      if (!f) continue;
      for (size_t k = 0; k < v.size(); ++k) r[k] = static_cast<uint32_t>((r[k] + uint64_t(p - f) * v[k]) % p);
    }
    rows.push_back(std::move(v));
    piv.push_back(c);
    return true;
  }
};

}  // namespace

std::vector<std::vector<uint32_t>> quotient_reps(int p, const std::vector<std::vector<uint32_t>>& sub,
                                                 const std::vector<std::vector<uint32_t>>& space) {
  Echelon e{p, {}, {}};
  for (auto& v : sub) e.insert(v);
  std::vector<std::vector<uint32_t>> reps;
  for (auto& v : space)
    if (e.insert(v)) reps.push_back(v);
  return reps;
}

size_t naive_rank(int p, std::vector<std::vector<uint32_t>> rows) {
  size_t rank = 0;
  size_t cols = rows.empty() ? 0 : rows[0].size();
  for (size_t c = 0; c < cols && rank < rows.size(); ++c) {
    size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] % p == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    uint32_t inv = inv_mod(rows[rank][c] % p, p);
    for (size_t r = rank + 1; r < rows.size(); ++r) {
      uint64_t f = uint64_t(rows[r][c] % p) * inv % p;
      if (!f) continue;
      for (size_t k = 0; k < cols; ++k)
        rows[r][k] = static_cast<uint32_t>((rows[r][k] % p + (p - f) * (rows[rank][k] % p)) % p);
    }
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------- sparse F_2

size_t sparse_rank(const SparseF2& m) {
  std::vector<int64_t> owner(m.rows, -1);
  std::vector<std::vector<uint32_t>> red(m.cols.size());
  size_t rank = 0;
  std::vector<uint32_t> tmp;
  for (size_t j = 0; j < m.cols.size(); ++j) {
    std::vector<uint32_t> col = m.cols[j];
    while (!col.empty() && owner[col.back()] >= 0) {
      const auto& o = red[owner[col.back()]];
      tmp.clear();
      std::set_symmetric_difference(col.begin(), col.end(), o.begin(), o.end(), std::back_inserter(tmp));
      col.swap(tmp);
    }
    if (!col.empty()) {
      owner[col.back()] = static_cast<int64_t>(j);
      red[j] = std::move(col);
      ++rank;
    }
  }
  return rank;
}

// ---------------------------------------------------------------- Z/p^T

ZpkRing::ZpkRing(int p_, int T_) : p(p_), T(T_), mod(1) {
  for (int i = 0; i < T; ++i) {
    if (mod > (uint64_t(1) << 62) / static_cast<uint64_t>(p)) throw ResourceError("p^T exceeds 2^63");
    mod *= p;
  }
}

int ZpkRing::val(uint64_t a) const {
  if (a == 0) return T;
  int v = 0;
  while (a % p == 0) { a /= p; ++v; }
  return v;
}

uint64_t ZpkRing::unit_inverse(uint64_t a) const {
  __int128 t = 0, nt = 1, r = mod, nr = a;
  while (nr) {
    __int128 q = r / nr;
    __int128 x = t - q * nt; t = nt; nt = x;
    x = r - q * nr; r = nr; nr = x;
  }
  if (r != 1) throw std::domain_error("not a unit in Z/p^T");
  if (t < 0) t += mod;
  return static_cast<uint64_t>(t);
}

uint64_t ZpkRing::pow_p(int k) const {
  if (k >= T) return 0;
  uint64_t r = 1;
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

ZVec ZpkMatrix::apply(const ZpkRing& R, const ZVec& v) const {
  ZVec out(rows, 0);
  for (size_t r = 0; r < rows; ++r) {
    unsigned __int128 s = 0;
    const uint64_t* row = &a[r * cols];
    for (size_t c = 0; c < cols; ++c)
      if (row[c] && v[c]) s = (s + static_cast<unsigned __int128>(row[c]) * v[c]) % R.mod;
    out[r] = static_cast<uint64_t>(s);
  }
  return out;
}

ZpkModule ZpkModule::span(const ZpkRing& R, size_t n, std::vector<ZVec> gens) {
  ZpkModule m(R, n);
  m.howell(std::move(gens));
  return m;
}

void ZpkModule::howell(std::vector<ZVec> pool) {
  rows_.clear();
  piv_.clear();
  std::erase_if(pool, [](const ZVec& v) { return std::all_of(v.begin(), v.end(), [](uint64_t x) { return x == 0; }); });
  for (size_t c = 0; c < n_ && !pool.empty(); ++c) {
    int best = R_.T;
    size_t bi = pool.size();
    for (size_t i = 0; i < pool.size(); ++i) {
      int v = R_.val(pool[i][c]);
      if (v < best) { best = v; bi = i; }
    }
    if (bi == pool.size()) continue;
    ZVec pr = std::move(pool[bi]);
    pool.erase(pool.begin() + static_cast<long>(bi));
    uint64_t pv = R_.pow_p(best);
    uint64_t inv = R_.unit_inverse(pr[c] / pv);
    for (auto& x : pr) x = R_.mul(x, inv);
    pr[c] = pv;
    for (auto& q : pool) {
      if (!q[c]) continue;
      uint64_t f = q[c] / pv;
      for (size_t k = c; k < n_; ++k) q[k] = R_.sub(q[k], R_.mul(f, pr[k]));
    }
    if (best > 0) {
      ZVec extra(n_);
      uint64_t m = R_.pow_p(R_.T - best);
      bool nz = false;
      for (size_t k = 0; k < n_; ++k) { extra[k] = R_.mul(m, pr[k]); nz |= extra[k] != 0; }
      if (nz) pool.push_back(std::move(extra));
    }
    std::erase_if(pool, [](const ZVec& v) { return std::all_of(v.begin(), v.end(), [](uint64_t x) { return x == 0; }); });
    rows_.push_back(std::move(pr));
    piv_.push_back(c);
  }
  // Reduce entries above each pivot to canonical representatives.
  for (size_t i = 0; i < rows_.size(); ++i) {
    size_t c = piv_[i];
    uint64_t pv = rows_[i][c];
    for (size_t k = 0; k < i; ++k) {
      uint64_t f = rows_[k][c] / pv;
      if (!f) continue;
      for (size_t j = c; j < n_; ++j) rows_[k][j] = R_.sub(rows_[k][j], R_.mul(f, rows_[i][j]));
    }
  }
}

int ZpkModule::length() const {
  int l = 0;
  for (size_t i = 0; i < rows_.size(); ++i) l += R_.T - R_.val(rows_[i][piv_[i]]);
  return l;
}

ZVec ZpkModule::reduce(ZVec x) const {
  for (size_t i = 0; i < rows_.size(); ++i) {
    size_t c = piv_[i];
    uint64_t f = x[c] / rows_[i][c];
    if (!f) continue;
    for (size_t j = c; j < n_; ++j) x[j] = R_.sub(x[j], R_.mul(f, rows_[i][j]));
  }
  return x;
}

bool ZpkModule::contains(const ZVec& x) const {
  ZVec r = reduce(x);
  return std::all_of(r.begin(), r.end(), [](uint64_t v) { return v == 0; });
}

ZpkModule ZpkModule::operator+(const ZpkModule& o) const {
  std::vector<ZVec> g = rows_;
  g.insert(g.end(), o.rows_.begin(), o.rows_.end());
  return span(R_, n_, std::move(g));
}

ZpkModule ZpkModule::image(const ZpkMatrix& d) const {
  std::vector<ZVec> g;
  for (auto& r : rows_) g.push_back(d.apply(R_, r));
  return span(R_, d.rows, std::move(g));
}

ZpkModule kernel_mod(const ZpkRing& R, const ZpkMatrix& N, const std::vector<int>& s) {
  const size_t m = N.rows, n = N.cols;
  std::vector<ZVec> gens(n, ZVec(m + n, 0));
  for (size_t i = 0; i < m; ++i) {
    int si = std::min(s[i], R.T);
    if (si <= 0) continue;
    uint64_t scale = R.pow_p(R.T - si);
    for (size_t j = 0; j < n; ++j) gens[j][i] = R.mul(scale, N.at(i, j));
  }
  for (size_t j = 0; j < n; ++j) gens[j][m + j] = 1;
  ZpkModule h = ZpkModule::span(R, m + n, std::move(gens));
  std::vector<ZVec> ker;
  for (auto& r : h.rows()) {
    bool top_zero = std::all_of(r.begin(), r.begin() + static_cast<long>(m), [](uint64_t v) { return v == 0; });
    if (top_zero) ker.emplace_back(r.begin() + static_cast<long>(m), r.end());
  }
  return ZpkModule::span(R, n, std::move(ker));
}

// ---------------------------------------------------------------- MatrixLoc

MatrixLoc::MatrixLoc(int p, size_t rows, size_t cols) : p_(p), rows_(rows), cols_(cols) {
  charge_memory(rows * cols * sizeof(Coefficient), "Z_(p) matrix");
  a_.assign(rows * cols, Coefficient(0));
}

void MatrixLoc::set(size_t r, size_t c, const Coefficient& v) {
  if (!v.is_p_integral(p_)) throw IntegralityError("entry " + v.str() + " is not in Z_(p)");
  a_[r * cols_ + c] = v;
}

MatrixLoc::Elimination MatrixLoc::eliminate() const {
  std::vector<Coefficient> a = a_;
  auto at = [&](size_t r, size_t c) -> Coefficient& { return a[r * cols_ + c]; };
  Elimination e;
  size_t k = 0;
  for (; k < std::min(rows_, cols_); ++k) {
    int best = INT32_MAX;
    size_t br = 0, bc = 0;
    for (size_t r = k; r < rows_ && best > 0; ++r)
      for (size_t c = k; c < cols_; ++c) {
        int v = at(r, c).valuation(p_);
        if (v < best) { best = v; br = r; bc = c; if (v == 0) break; }
      }
    if (best == INT32_MAX) break;
    if (best > 0) e.unit_pivot_missing = true;
    for (size_t c = 0; c < cols_; ++c) std::swap(at(k, c), at(br, c));
    for (size_t r = 0; r < rows_; ++r) std::swap(at(r, k), at(r, bc));
    Coefficient piv = at(k, k);
    for (size_t r = k + 1; r < rows_; ++r) {
      if (at(r, k).is_zero()) continue;
      Coefficient f = at(r, k) / piv;  // p-integral: valuation(piv) is minimal
      for (size_t c = k; c < cols_; ++c) at(r, c) = at(r, c) - f * at(k, c);
    }
    for (size_t c = k + 1; c < cols_; ++c) {
      if (at(k, c).is_zero()) continue;
      Coefficient f = at(k, c) / piv;
      for (size_t r = k; r < rows_; ++r) at(r, c) = at(r, c) - f * at(r, k);
    }
    e.pivot_valuations.push_back(best);
    if (best == 0) ++e.unit_rank;
  }
  return e;
}

ZpkMatrix MatrixLoc::to_zpk(const ZpkRing& R) const {
  ZpkMatrix m(rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) m.a[i] = R.from(a_[i]);
  return m;
}

}  // namespace synss
