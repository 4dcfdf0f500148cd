// Minimal resolution of F_2 over the mod 2 Steenrod algebra in the Milnor
// basis. Test oracle only: shares no code with the cobar machinery.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Milnor = std::vector<int>;  // Sq(r_1, r_2, ...), no trailing zeros

inline int milnor_degree(const Milnor& r) {
  int d = 0;
  for (size_t i = 0; i < r.size(); ++i) d += r[i] * ((1 << (i + 1)) - 1);
  return d;
}

inline void trim(Milnor& r) {
  while (!r.empty() && r.back() == 0) r.pop_back();
}

// All Milnor basis elements of degree t.
inline std::vector<Milnor> milnor_basis(int t) {
  std::vector<Milnor> out;
  std::vector<int> weights;
  for (int i = 1; (1 << i) - 1 <= std::max(t, 1); ++i) weights.push_back((1 << i) - 1);
  Milnor cur(weights.size(), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i < 0) {
      if (left == 0) {
        Milnor m = cur;
        trim(m);
        out.push_back(m);
      }
      return;
    }
    for (int k = 0; k * weights[i] <= left; ++k) {
      cur[i] = k;
      self(self, i - 1, left - k * weights[i]);
    }
    cur[i] = 0;
  };
  if (t == 0) return {Milnor{}};
  rec(rec, static_cast<int>(weights.size()) - 1, t);
  std::sort(out.begin(), out.end());
  return out;
}

// Sq(r)·Sq(s) by Milnor matrices: x_{ij} (i, j >= 0, not both 0) with
// Σ_j 2^j x_{ij} = r_i and Σ_i x_{ij} = s_j; the term T_n = Σ_{i+j=n} x_{ij}
// has coefficient Π_n multinomial(x_{0n}, ..., x_{n0}) mod 2.
inline std::set<Milnor> milnor_product(const Milnor& r, const Milnor& s) {
  std::map<Milnor, int> acc;
  const int R = static_cast<int>(r.size()), S = static_cast<int>(s.size());
  // x[i][j], i in [0,R], j in [0,S]
  std::vector<std::vector<int>> x(R + 1, std::vector<int>(S + 1, 0));
  auto finish = [&]() {
    // column 0 entries (x_{i0}) are forced: x_{i0} = r_i - Σ_{j>0} 2^j x_{ij}
    for (int i = 1; i <= R; ++i) {
      int rest = r[i - 1];
      for (int j = 1; j <= S; ++j) rest -= (1 << j) * x[i][j];
      if (rest < 0) return;
      x[i][0] = rest;
    }
    // row 0 entries are forced: x_{0j} = s_j - Σ_{i>0} x_{ij}
    for (int j = 1; j <= S; ++j) {
      int rest = s[j - 1];
      for (int i = 1; i <= R; ++i) rest -= x[i][j];
      if (rest < 0) return;
      x[0][j] = rest;
    }
    Milnor t(R + S, 0);
    for (int n = 1; n <= R + S; ++n) {
      int used = 0, sum = 0;
      for (int i = 0; i <= std::min(n, R); ++i) {
        int j = n - i;
        if (j > S) continue;
        int v = x[i][j];
        if (used & v) return;  // multinomial even
        used |= v;
        sum += v;
      }
      t[n - 1] = sum;
    }
    trim(t);
    acc[t] ^= 1;
  };
  // enumerate x_{ij} for i >= 1, j >= 1
  auto rec = [&](auto&& self, int i, int j) -> void {
    if (i > R) {
      finish();
      return;
    }
    if (j > S) {
      self(self, i + 1, 1);
      return;
    }
    int room = r[i - 1];
    for (int jj = 1; jj < j; ++jj) room -= (1 << jj) * x[i][jj];
    int colroom = s[j - 1];
    for (int ii = 1; ii < i; ++ii) colroom -= x[ii][j];
    for (int v = 0; (1 << j) * v <= room && v <= colroom; ++v) {
      x[i][j] = v;
      self(self, i, j + 1);
    }
    x[i][j] = 0;
  };
  rec(rec, 1, 1);
  std::set<Milnor> out;
  for (auto& [m, c] : acc)
    if (c) out.insert(m);
  return out;
}

// Ext_A^{s,t}(F_2, F_2) for t <= t_max as the generator counts of a minimal resolution.
class MinimalResolution {
 public:
  explicit MinimalResolution(int t_max) : t_max_(t_max) {
    for (int t = 0; t <= t_max; ++t) basis_.push_back(milnor_basis(t));
    gens_.resize(t_max + 2);
    // F_0 = A·ι_0
    gens_[0].push_back({0, {}});
    for (int t = 1; t <= t_max; ++t)
      for (int s = 1; s <= t_max + 1; ++s) step(s, t);
  }

  int ext(int s, int t) const {
    if (s >= static_cast<int>(gens_.size())) return 0;
    int n = 0;
    for (auto& g : gens_[s]) n += g.degree == t;
    return n;
  }

 private:
  // element of F_s: set of (generator index, Milnor monomial)
  using Elem = std::set<std::pair<int, Milnor>>;
  struct Gen {
    int degree;
    Elem d;  // image in F_{s-1}
  };
  int t_max_;
  std::vector<std::vector<Milnor>> basis_;
  std::vector<std::vector<Gen>> gens_;

  static void add(Elem& a, const std::pair<int, Milnor>& x) {
    auto it = a.find(x);
    if (it == a.end())
      a.insert(x);
    else
      a.erase(it);
  }

  // basis of F_s in degree t
  std::vector<std::pair<int, Milnor>> fbasis(int s, int t) const {
    std::vector<std::pair<int, Milnor>> out;
    if (s < 0 || s >= static_cast<int>(gens_.size())) return out;
    for (size_t g = 0; g < gens_[s].size(); ++g) {
      int d = gens_[s][g].degree;
      if (d > t) continue;
      for (auto& m : basis_[t - d]) out.push_back({static_cast<int>(g), m});
    }
    return out;
  }

  // d(m · g) = m · d(g)
  Elem apply_d(int s, const std::pair<int, Milnor>& x) const {
    Elem out;
    for (auto& [g2, m2] : gens_[s][x.first].d)
      for (auto& prod : milnor_product(x.second, m2)) add(out, {g2, prod});
    return out;
  }

  using Row = std::vector<uint8_t>;

  // reduce v against echelon rows (pivot = first nonzero)
  static void reduce(Row& v, const std::vector<Row>& rows, const std::vector<size_t>& piv) {
    for (size_t k = 0; k < rows.size(); ++k)
      if (v[piv[k]])
        for (size_t c = 0; c < v.size(); ++c) v[c] ^= rows[k][c];
  }
  static bool insert(Row v, std::vector<Row>& rows, std::vector<size_t>& piv) {
    reduce(v, rows, piv);
    auto it = std::find(v.begin(), v.end(), 1);
    if (it == v.end()) return false;
    size_t p = it - v.begin();
    for (auto& r : rows)
      if (r[p])
        for (size_t c = 0; c < v.size(); ++c) r[c] ^= v[c];
    rows.push_back(v);
    piv.push_back(p);
    return true;
  }

  void step(int s, int t) {
    // kernel of d_{s-1}: F_{s-1,t} -> F_{s-2,t} (augmentation for s-1 = 0)
    auto src = fbasis(s - 1, t);
    if (src.empty()) return;
    std::map<std::pair<int, Milnor>, size_t> src_index;
    for (size_t i = 0; i < src.size(); ++i) src_index[src[i]] = i;
    std::vector<Row> kernel;
    if (s - 1 == 0) {
      for (size_t i = 0; i < src.size(); ++i) {
        Row v(src.size(), 0);
        v[i] = 1;
        kernel.push_back(v);
      }
    } else {
      auto tgt = fbasis(s - 2, t);
      std::map<std::pair<int, Milnor>, size_t> tgt_index;
      for (size_t i = 0; i < tgt.size(); ++i) tgt_index[tgt[i]] = i;
      // augmented [D^T | I] elimination
      size_t n = src.size(), m = tgt.size();
      std::vector<Row> rows;
      for (size_t i = 0; i < n; ++i) {
        Row r(m + n, 0);
        for (auto& y : apply_d(s - 1, src[i])) r[tgt_index.at(y)] ^= 1;
        r[m + i] = 1;
        rows.push_back(r);
      }
      size_t rank = 0;
      for (size_t c = 0; c < m && rank < n; ++c) {
        size_t pr = rank;
        while (pr < n && !rows[pr][c]) ++pr;
        if (pr == n) continue;
        std::swap(rows[pr], rows[rank]);
        for (size_t i = 0; i < n; ++i)
          if (i != rank && rows[i][c])
            for (size_t k = 0; k < m + n; ++k) rows[i][k] ^= rows[rank][k];
        ++rank;
      }
      for (size_t i = rank; i < n; ++i) kernel.emplace_back(rows[i].begin() + m, rows[i].end());
    }
    // image of d_s from existing generators
    std::vector<Row> img;
    std::vector<size_t> piv;
    for (auto& x : fbasis(s, t)) {
      Row v(src.size(), 0);
      for (auto& y : apply_d(s, x)) v[src_index.at(y)] ^= 1;
      insert(v, img, piv);
    }
    for (auto& k : kernel) {
      if (!insert(k, img, piv)) continue;
      Gen g{t, {}};
      for (size_t i = 0; i < src.size(); ++i)
        if (k[i]) add(g.d, src[i]);
      gens_[s].push_back(std::move(g));
    }
  }
};

}  // namespace oracle
