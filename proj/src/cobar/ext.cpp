#include <algorithm>

#include "synss/cobar.hpp"

namespace synss {

int ExtTable::dim(int f, int t, std::optional<int> w, std::optional<int> u) const {
  int total = 0;
  for (auto& e : entries)
    if (e.f == f && e.t == t && (!w || e.w == w) && (!u || e.u == u)) total += e.dim;
  return total;
}

nlohmann::json ExtTable::to_json() const {
  nlohmann::json j;
  j["schema"] = "synss.ext/1";
  j["presentation"] = presentation;
  j["p"] = p;
  j["t_max"] = t_max;
  j["f_max"] = f_max;
  auto& arr = j["entries"] = nlohmann::json::array();
  for (auto& e : entries) {
    nlohmann::json x{{"f", e.f}, {"t", e.t}, {"dim", e.dim}};
    if (e.w) x["w"] = *e.w;
    if (e.u) x["u"] = *e.u;
    if (!e.representatives.empty()) x["representatives"] = e.representatives;
    arr.push_back(x);
  }
  return j;
}

ExtTable ExtTable::from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "synss.ext/1") throw ParseError("not an Ext table");
  ExtTable t;
  t.presentation = j.at("presentation");
  t.p = j.at("p");
  t.t_max = j.at("t_max");
  t.f_max = j.at("f_max");
  for (auto& x : j.at("entries")) {
    ExtEntry e;
    e.f = x.at("f");
    e.t = x.at("t");
    e.dim = x.at("dim");
    if (x.contains("w")) e.w = x["w"].get<int>();
    if (x.contains("u")) e.u = x["u"].get<int>();
    if (x.contains("representatives")) e.representatives = x["representatives"].get<std::vector<std::string>>();
    t.entries.push_back(e);
  }
  return t;
}

void check_window(const CobarComplex& cx, int f, int t) {
  if (t > cx.bounds.t_max || f + 1 > cx.bounds.f_max)
    throw WindowError("(f=" + std::to_string(f) + ", t=" + std::to_string(t) + ") lies outside the window t <= " +
                      std::to_string(cx.bounds.t_max) + ", f <= " + std::to_string(cx.bounds.f_max - 1));
}

namespace {

MatrixFp dense(int p, const SparseF2& m) {
  MatrixFp out(p, m.rows, m.cols.size());
  for (size_t c = 0; c < m.cols.size(); ++c)
    for (auto r : m.cols[c]) out.set(r, c, 1);
  return out;
}

// Generic F_p view of one block: dims, differentials as column lists.
struct FieldBlock {
  int p;
  std::vector<size_t> dim;
  std::vector<MatrixFp> d;         // filled lazily for small blocks
  std::vector<SparseF2> d2;        // p = 2
  std::function<std::string(int, size_t)> label;
};

std::vector<std::string> reps_for(const FieldBlock& b, int f) {
  size_t n = b.dim[f];
  MatrixFp df = b.p == 2 ? dense(2, b.d2[f]) : b.d[f];
  auto rk = rank_kernel(df);
  std::vector<std::vector<uint32_t>> image;
  if (f > 0) {
    MatrixFp dp = b.p == 2 ? dense(2, b.d2[f - 1]) : b.d[f - 1];
    for (size_t c = 0; c < dp.cols(); ++c) {
      std::vector<uint32_t> v(n);
      bool nz = false;
      for (size_t r = 0; r < n; ++r) nz |= (v[r] = dp.get(r, c)) != 0;
      if (nz) image.push_back(v);
    }
  }
  std::vector<std::string> out;
  for (auto& v : quotient_reps(b.p, image, rk.kernel)) {
    std::string s;
    for (size_t i = 0; i < n; ++i) {
      if (!v[i]) continue;
      if (!s.empty()) s += " + ";
      if (v[i] != 1) s += std::to_string(v[i]) + "*";
      s += b.label(f, i);
    }
    out.push_back(s);
  }
  return out;
}

size_t block_rank(const FieldBlock& b, int f) {
  if (f < 0 || f >= static_cast<int>(b.dim.size()) - 1) return 0;
  return b.p == 2 ? sparse_rank(b.d2[f]) : rank(b.d[f]);
}

}  // namespace

ExtTable ext_groups(const CobarComplex& cx, size_t rep_limit) {
  if (!cx.over_field) throw std::invalid_argument("Ext tables need a cobar complex over a field; use ss_run for Z_(p) blocks");
  ExtTable tab;
  tab.presentation = cx.presentation;
  tab.p = cx.p;
  tab.t_max = cx.bounds.t_max;
  tab.f_max = cx.bounds.f_max - 1;
  auto run = [&](const FieldBlock& b, int t, std::optional<int> w, std::optional<int> u) {
    int top = static_cast<int>(b.dim.size()) - 1;  // d^top is not built
    for (int f = 0; f < top; ++f) {
      long h = static_cast<long>(b.dim[f]) - static_cast<long>(block_rank(b, f)) - static_cast<long>(block_rank(b, f - 1));
      if (h <= 0) continue;
      ExtEntry e{f, t, w, u, static_cast<int>(h), {}};
      if (b.dim[f] <= rep_limit && b.dim[f + 1] <= 4 * rep_limit) e.representatives = reps_for(b, f);
      tab.entries.push_back(std::move(e));
    }
  };
  for (auto& blk : cx.f2_blocks) {
    FieldBlock b{2, blk.dim, {}, blk.d, blk.label};
    run(b, blk.t, std::nullopt, std::nullopt);
  }
  for (auto& blk : cx.z_blocks) {
    FieldBlock b{blk.p, blk.dim, {}, {}, [&blk](int f, size_t i) { return blk.labels[f][i]; }};
    for (size_t f = 0; f < blk.d.size(); ++f) {
      if (blk.p == 2) {
        SparseF2 s;
        s.rows = blk.dim[f + 1];
        s.cols.resize(blk.dim[f]);
        for (size_t c = 0; c < blk.d[f].size(); ++c)
          for (auto& [r, v] : blk.d[f][c])
            if (v.mod_p(2)) s.cols[c].push_back(r);
        b.d2.push_back(std::move(s));
      } else {
        MatrixFp m(blk.p, blk.dim[f + 1], blk.dim[f]);
        for (size_t c = 0; c < blk.d[f].size(); ++c)
          for (auto& [r, v] : blk.d[f][c]) m.set(r, c, v.mod_p(blk.p));
        b.d.push_back(std::move(m));
      }
    }
    run(b, blk.t, blk.has_w ? std::optional<int>(blk.w) : std::nullopt, blk.u);
  }
  std::sort(tab.entries.begin(), tab.entries.end(), [](const ExtEntry& a, const ExtEntry& b) {
    return std::tie(a.t, a.f, a.w, a.u) < std::tie(b.t, b.f, b.w, b.u);
  });
  return tab;
}

}  // namespace synss
