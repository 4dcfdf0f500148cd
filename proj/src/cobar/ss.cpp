#include <algorithm>
#include <numeric>

#include "synss/cobar.hpp"

namespace synss {

// ---------------------------------------------------------------- persistence over F_p

namespace {

using SparseCol = std::vector<std::pair<uint32_t, uint32_t>>;  // (row position, value), sorted

struct FieldComplex {
  int p = 2;
  std::vector<size_t> dim;
  std::vector<std::vector<SparseCol>> d;  // d[f][col], rows as word indices
  std::vector<std::vector<int>> phi;
};

uint32_t inv_mod(uint32_t a, int p) {
  uint32_t r = 1;
  for (int e = p - 2; e > 0; --e) r = static_cast<uint32_t>(uint64_t(r) * a % p);
  return r;
}

// col -= k * other, both sorted by position
void axpy(SparseCol& col, const SparseCol& other, uint32_t k, int p) {
  SparseCol out;
  out.reserve(col.size() + other.size());
  size_t i = 0, j = 0;
  while (i < col.size() || j < other.size()) {
    if (j == other.size() || (i < col.size() && col[i].first < other[j].first)) {
      out.push_back(col[i++]);
    } else if (i == col.size() || other[j].first < col[i].first) {
      uint32_t v = static_cast<uint32_t>((p - uint64_t(k) * other[j].second % p) % p);
      if (v) out.push_back({other[j].first, v});
      ++j;
    } else {
      uint32_t v = static_cast<uint32_t>((col[i].second + p - uint64_t(k) * other[j].second % p) % p);
      if (v) out.push_back({col[i].first, v});
      ++i, ++j;
    }
  }
  col.swap(out);
}

// Indices sorted by filtration descending, ties in canonical word order.
std::vector<uint32_t> filtration_order(const std::vector<int>& phi) {
  std::vector<uint32_t> ord(phi.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](uint32_t a, uint32_t b) { return phi[a] > phi[b]; });
  return ord;
}

PersistencePairs persistence_field(const FieldComplex& fc) {
  PersistencePairs out;
  const int top = static_cast<int>(fc.d.size());
  std::vector<char> cleared;  // words of C^f that are lows of d^{f-1}
  for (int f = 0; f < top; ++f) {
    if (cleared.size() != fc.dim[f]) cleared.assign(fc.dim[f], 0);
    auto col_order = filtration_order(fc.phi[f]);
    auto row_order = filtration_order(fc.phi[f + 1]);
    std::vector<uint32_t> pos(fc.dim[f + 1]);
    for (uint32_t k = 0; k < row_order.size(); ++k) pos[row_order[k]] = k;
    std::vector<SparseCol> pivot_col(fc.dim[f + 1]);
    std::vector<char> has_pivot(fc.dim[f + 1], 0);
    std::vector<char> next_cleared(fc.dim[f + 1], 0);
    for (uint32_t c : col_order) {
      if (cleared[c]) continue;
      SparseCol col;
      for (auto& [r, v] : fc.d[f][c]) col.push_back({pos[r], v % fc.p});
      std::sort(col.begin(), col.end());
      while (!col.empty()) {
        uint32_t low = col.back().first;
        if (!has_pivot[low]) break;
        const SparseCol& pc = pivot_col[low];
        uint32_t k = static_cast<uint32_t>(uint64_t(col.back().second) * inv_mod(pc.back().second, fc.p) % fc.p);
        axpy(col, pc, k, fc.p);
      }
      if (col.empty()) {
        out.essential.push_back({f, c});
        continue;
      }
      uint32_t low = col.back().first;
      uint32_t target = row_order[low];
      out.pairs.push_back({f, c, target, fc.phi[f + 1][target] - fc.phi[f][c]});
      has_pivot[low] = 1;
      next_cleared[target] = 1;
      pivot_col[low] = std::move(col);
    }
    cleared = std::move(next_cleared);
  }
  std::sort(out.essential.begin(), out.essential.end());
  return out;
}

FieldComplex field_of(const ComplexBlockF2& blk) {
  FieldComplex fc;
  fc.p = 2;
  fc.dim = blk.dim;
  for (auto& m : blk.d) {
    std::vector<SparseCol> cols;
    for (auto& c : m.cols) {
      SparseCol sc;
      for (auto r : c) sc.push_back({r, 1});
      cols.push_back(std::move(sc));
    }
    fc.d.push_back(std::move(cols));
  }
  fc.phi = blk.filtration;
  if (fc.phi.empty())
    for (auto n : blk.dim) fc.phi.push_back(std::vector<int>(n, 0));
  return fc;
}

FieldComplex field_of(const ComplexBlockZ& blk) {
  FieldComplex fc;
  fc.p = blk.p;
  fc.dim = blk.dim;
  for (auto& m : blk.d) {
    std::vector<SparseCol> cols;
    for (auto& c : m) {
      SparseCol sc;
      for (auto& [r, v] : c)
        if (uint32_t x = v.mod_p(blk.p)) sc.push_back({r, x});
      cols.push_back(std::move(sc));
    }
    fc.d.push_back(std::move(cols));
  }
  fc.phi = blk.filtration;
  return fc;
}

}  // namespace

PersistencePairs persistence(const ComplexBlockF2& blk) { return persistence_field(field_of(blk)); }

// ---------------------------------------------------------------- lattice engine

LatticeSS::LatticeSS(const ComplexBlockZ& blk, int T) : blk_(blk), R_(blk.p, T) {
  for (size_t f = 0; f < blk_.d.size(); ++f) {
    ZpkMatrix m(blk_.dim[f + 1], blk_.dim[f]);
    for (size_t c = 0; c < blk_.d[f].size(); ++c)
      for (auto& [r, v] : blk_.d[f][c]) m.at(r, c) = R_.add(m.at(r, c), R_.from(v));
    D_.push_back(std::move(m));
  }
}

int LatticeSS::min_filtration(int f) const {
  const auto& phi = blk_.filtration.at(f);
  return phi.empty() ? 0 : *std::min_element(phi.begin(), phi.end());
}

ZpkModule LatticeSS::F(int f, int j) const {
  size_t n = dim(f);
  std::vector<ZVec> gens;
  for (size_t b = 0; b < n; ++b) {
    ZVec v(n, 0);
    v[b] = R_.pow_p(std::max(0, j - blk_.filtration[f][b]));
    gens.push_back(std::move(v));
  }
  return ZpkModule::span(R_, n, std::move(gens));
}

ZpkModule LatticeSS::Z(int f, int j, int r) const {
  if (f >= static_cast<int>(D_.size())) throw std::out_of_range("no differential out of this cobar degree");
  if (r >= 1000) r = 1000;
  auto key = std::make_tuple(f, j, r);
  auto it = zcache_.find(key);
  if (it != zcache_.end()) return it->second;
  const ZpkMatrix& D = D_[f];
  size_t n = dim(f), m = dim(f + 1);
  std::vector<uint64_t> scale(n);
  for (size_t b = 0; b < n; ++b) scale[b] = R_.pow_p(std::max(0, j - blk_.filtration[f][b]));
  ZpkMatrix DS(m, n);
  for (size_t i = 0; i < m; ++i)
    for (size_t b = 0; b < n; ++b) DS.at(i, b) = R_.mul(D.at(i, b), scale[b]);
  std::vector<int> s(m);
  for (size_t i = 0; i < m; ++i)
    s[i] = r >= 1000 ? R_.T : std::min(R_.T, std::max(0, j + r - blk_.filtration[f + 1][i]));
  ZpkModule ker = kernel_mod(R_, DS, s);
  ZpkMatrix S(n, n);
  for (size_t b = 0; b < n; ++b) S.at(b, b) = scale[b];
  ZpkModule out = ker.image(S);
  zcache_.emplace(key, out);
  return out;
}

ZpkModule LatticeSS::B(int f, int j, int r) const {
  int rr = std::min(r, 1000);
  ZpkModule b = rr - 1 == 0 ? F(f, j + 1) : Z(f, j + 1, rr - 1);
  if (f > 0) {
    ZpkModule src = rr - 1 == 0 ? F(f - 1, j - rr + 1) : Z(f - 1, j - rr + 1, rr - 1);
    b = b + src.image(D_[f - 1]);
  }
  return b;
}

int LatticeSS::page_dim(int f, int j, int r) const {
  return Z(f, j, r).length() - B(f, j, r).length();
}

int LatticeSS::diff_rank(int f, int j, int r) const {
  ZpkModule b = B(f, j, r);
  ZpkModule ker = Z(f, j, r + 1) + b;
  return page_dim(f, j, r) - (ker.length() - b.length());
}

ZVec LatticeSS::apply_d(int f, const ZVec& x) const { return D_.at(f).apply(R_, x); }

ZVec LatticeSS::basis_vector(int f, size_t i, uint64_t coef) const {
  ZVec v(dim(f), 0);
  v.at(i) = coef % R_.mod;
  return v;
}

// ---------------------------------------------------------------- results

const SSPage& SSResult::page(int r) const {
  for (auto& pg : pages)
    if (pg.r == r) return pg;
  throw std::out_of_range("page E_" + std::to_string(r) + " was not computed");
}

int SSResult::dim(int r, const Spot& s) const {
  const auto& dims = r >= 1000 ? e_infinity : page(r).dims;
  auto it = dims.find(s);
  return it == dims.end() ? 0 : it->second;
}

namespace {

nlohmann::json spot_json(const Spot& s) {
  return nlohmann::json{{"f", std::get<0>(s)}, {"u", std::get<1>(s)}, {"t", std::get<2>(s)}, {"w", std::get<3>(s)}};
}

nlohmann::json dims_json(const std::map<Spot, int>& dims) {
  auto arr = nlohmann::json::array();
  for (auto& [s, d] : dims) {
    if (!d) continue;
    auto x = spot_json(s);
    x["dim"] = d;
    arr.push_back(x);
  }
  return arr;
}

std::string signed_label(uint64_t v, const ZpkRing& R) {
  if (v == 1) return "";
  if (v == R.mod - 1) return "-";
  if (v > R.mod / 2) return "-" + std::to_string(R.mod - v) + "*";
  return std::to_string(v) + "*";
}

std::string format_zvec(const ZVec& x, const std::vector<std::string>& labels, const ZpkRing& R) {
  std::string s;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) continue;
    std::string c = signed_label(x[i], R);
    if (!s.empty()) {
      if (!c.empty() && c[0] == '-') s += " - ", c = c.substr(1);
      else s += " + ";
    }
    s += c + labels[i];
  }
  return s.empty() ? "0" : s;
}

}  // namespace

nlohmann::json SSResult::to_json() const {
  nlohmann::json j;
  j["schema"] = "synss.ss/1";
  j["kind"] = kind;
  j["p"] = p;
  j["tie_break"] = tie_break;
  auto& pg = j["pages"] = nlohmann::json::array();
  for (auto& page : pages) {
    nlohmann::json x;
    x["r"] = page.r;
    x["dims"] = dims_json(page.dims);
    auto& ds = x["differentials"] = nlohmann::json::array();
    for (auto& d : page.diffs) {
      nlohmann::json y{{"source", spot_json(d.source)}, {"target", spot_json(d.target)}, {"rank", d.rank}};
      auto& ex = y["examples"] = nlohmann::json::array();
      for (auto& [a, b] : d.examples) ex.push_back({{"source", a}, {"image", b}});
      ds.push_back(y);
    }
    pg.push_back(x);
  }
  j["e_infinity"] = dims_json(e_infinity);
  j["violations"] = violations;
  return j;
}

// ---------------------------------------------------------------- ss_run

namespace {

struct SpotMap {
  FiltrationKind kind;
  // (cobar degree n, filtration φ, block) -> spot
  Spot operator()(int n, int phi, int t, std::optional<int> w, std::optional<int> u) const {
    switch (kind) {
      case FiltrationKind::CartanEilenbergCount: return {phi, n - phi, t - (n - phi), t};
      case FiltrationKind::Trivial: return {n, u.value_or(0), t, w.value_or(t + u.value_or(0))};
      case FiltrationKind::NovikovIdealPower: {
        int uu = phi - n;
        return {n, uu, t, w.value_or(t + uu)};
      }
    }
    return {};
  }
};

void run_field_block(const FieldComplex& fc, int t, std::optional<int> w, std::optional<int> u, const SpotMap& sm,
                     int r_max, const std::function<std::string(int, size_t)>& label, SSResult& res) {
  auto pp = persistence_field(fc);
  const int top = static_cast<int>(fc.d.size());
  for (int r = 1; r <= r_max; ++r) {
    auto& page = res.pages[r - 1];
    for (auto& [f, i] : pp.essential) page.dims[sm(f, fc.phi[f][i], t, w, u)] += 1;
    std::map<std::pair<Spot, Spot>, PageDifferential> diffs;
    for (auto& pr : pp.pairs) {
      if (pr.length < r) continue;
      Spot s = sm(pr.f, fc.phi[pr.f][pr.source], t, w, u);
      Spot tg = sm(pr.f + 1, fc.phi[pr.f + 1][pr.target], t, w, u);
      page.dims[s] += 1;
      if (pr.f + 1 < top) page.dims[tg] += 1;
      if (pr.length == r) {
        auto& d = diffs[{s, tg}];
        d.source = s;
        d.target = tg;
        d.rank += 1;
        if (d.examples.size() < 3 && label) d.examples.push_back({label(pr.f, pr.source), label(pr.f + 1, pr.target)});
      }
    }
    for (auto& [k, d] : diffs) page.diffs.push_back(std::move(d));
  }
  for (auto& [f, i] : pp.essential) res.e_infinity[sm(f, fc.phi[f][i], t, w, u)] += 1;
}

int default_T(int p) {
  int T = 0;
  unsigned __int128 m = 1;
  while (m * static_cast<unsigned>(p) < (static_cast<unsigned __int128>(1) << 62)) m *= p, ++T;
  return T;
}

void run_lattice_block(const ComplexBlockZ& blk, int ucap, bool synthetic, int r_max, SSResult& res) {
  LatticeSS L(blk, default_T(blk.p));
  const int top = static_cast<int>(blk.d.size());
  auto spot = [&](int f, int j) -> Spot {
    int u = j - f;
    return {f, u, blk.t, synthetic ? blk.w : blk.t + u};
  };
  for (int f = 0; f < top; ++f) {
    if (!blk.dim[f]) continue;
    for (int u = 0; u <= ucap; ++u) {
      int j = f + u;
      int prev = -1;
      for (int r = 1; r <= r_max; ++r) {
        int d = prev == 0 ? 0 : L.page_dim(f, j, r);
        if (d) res.pages[r - 1].dims[spot(f, j)] = d;
        if (prev >= 0) {
          // bookkeeping: dim E_r = dim E_{r-1} - out - in
          int out = prev ? L.diff_rank(f, j, r - 1) : 0;
          int in = f > 0 && blk.dim[f - 1] && prev ? L.diff_rank(f - 1, j - (r - 1), r - 1) : 0;
          if (d != prev - out - in)
            res.violations.push_back("page bookkeeping fails at " + spot_json(spot(f, j)).dump() + " r=" + std::to_string(r));
        }
        if (d && f + 1 < top) {
          int rk = L.diff_rank(f, j, r);
          if (rk) {
            PageDifferential pd{spot(f, j), spot(f + 1, j + r), rk, {}};
            // one representative source word and its image
            ZpkModule k = L.Z(f, j, r + 1) + L.B(f, j, r);
            ZpkModule z = L.Z(f, j, r);
            for (auto& row : z.rows())
              if (!k.contains(row)) {
                pd.examples.push_back({format_zvec(row, blk.labels[f], L.ring()),
                                       format_zvec(L.apply_d(f, row), blk.labels[f + 1], L.ring())});
                break;
              }
            res.pages[r - 1].diffs.push_back(std::move(pd));
          }
        }
        prev = d;
      }
      if (prev != 0) {
        int e = L.page_dim(f, j, 1000);
        if (e) res.e_infinity[spot(f, j)] = e;
      }
    }
  }
}

}  // namespace

SSResult ss_run(const FilteredCobarComplex& fcx, int r_max) {
  if (r_max < 1) throw std::invalid_argument("r_max must be >= 1");
  const auto& cx = fcx.cx;
  SSResult res;
  res.p = cx.p;
  res.tie_break = fcx.tie_break;
  for (int r = 1; r <= r_max; ++r) res.pages.push_back(SSPage{r, {}, {}});
  SpotMap sm{fcx.kind};
  switch (fcx.kind) {
    case FiltrationKind::CartanEilenbergCount: res.kind = "CESS"; break;
    case FiltrationKind::Trivial: res.kind = "trivial"; break;
    case FiltrationKind::NovikovIdealPower:
      res.kind = cx.hopf && cx.hopf->synthetic() ? "synthetic aNSS" : cx.over_field ? "aNSS (graded)" : "aNSS";
      break;
  }
  for (auto& blk : cx.f2_blocks) run_field_block(field_of(blk), blk.t, std::nullopt, std::nullopt, sm, r_max, blk.label, res);
  for (auto& blk : cx.z_blocks) {
    if (cx.over_field) {
      auto lab = [&blk](int f, size_t i) { return blk.labels[f][i]; };
      run_field_block(field_of(blk), blk.t, blk.has_w ? std::optional<int>(blk.w) : std::nullopt, blk.u, sm, r_max, lab, res);
      continue;
    }
    if (fcx.kind != FiltrationKind::NovikovIdealPower)
      throw std::invalid_argument("Z_(p) cobar complexes support only the Novikov filtration");
    int ucap = cx.bounds.u_max.value_or(1 << 20);
    if (!cx.hopf->synthetic() && cx.bounds.w_max) ucap = std::min(ucap, *cx.bounds.w_max - blk.t);
    if (ucap >= (1 << 20)) throw std::invalid_argument("Z_(p) spectral sequences need u_max or a weight window");
    run_lattice_block(blk, ucap, cx.hopf->synthetic(), r_max, res);
  }
  for (auto& pg : res.pages) std::erase_if(pg.dims, [](const auto& kv) { return kv.second == 0; });
  return res;
}

std::vector<std::string> check_euler_characteristic(const SSResult& res) {
  if (res.kind == "aNSS" || res.kind == "synthetic aNSS")
    throw std::invalid_argument("Euler characteristic checks need finite pages");
  std::vector<std::string> bad;
  auto chi = [&](const std::map<Spot, int>& dims) {
    std::map<std::pair<int, int>, long> out;
    for (auto& [s, d] : dims) {
      auto [f, u, t, w] = s;
      int n = res.kind == "CESS" ? f + u : f;
      auto key = res.kind == "CESS" ? std::make_pair(w, 0) : std::make_pair(t, w);
      out[key] += (n % 2 ? -1 : 1) * d;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
  };
  if (res.pages.empty()) return bad;
  auto first = chi(res.pages.front().dims);
  for (auto& pg : res.pages)
    if (chi(pg.dims) != first) bad.push_back("Euler characteristic changes at E_" + std::to_string(pg.r));
  if (chi(res.e_infinity) != first) bad.push_back("Euler characteristic changes at E_infinity");
  return bad;
}

}  // namespace synss
