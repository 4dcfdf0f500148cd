#include <algorithm>
#include <functional>
#include <memory>
#include <unordered_map>

#include "synss/cobar.hpp"

namespace synss {

namespace {

struct VecHash {
  size_t operator()(const std::vector<uint16_t>& v) const {
    size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

using Word = std::vector<uint16_t>;  // slot algebra indices, then module index

// Words of cobar degree f and internal degree t.
std::vector<Word> f2_words(const MonomialHopfAlgebra& a, const F2Comodule& m, int f, int t) {
  std::vector<Word> out;
  Word cur(f + 1);
  std::function<void(int, int)> rec = [&](int k, int rem) {
    if (k == f) {
      for (size_t mi = 0; mi < m.degree.size(); ++mi)
        if (m.degree[mi] == rem) {
          cur[f] = static_cast<uint16_t>(mi);
          out.push_back(cur);
        }
      return;
    }
    for (int d = 1; d <= rem - (f - k - 1); ++d)
      for (int i : a.of_degree(d)) {
        cur[k] = static_cast<uint16_t>(i);
        rec(k + 1, rem - d);
      }
  };
  rec(0, t);
  return out;
}

}  // namespace

CobarComplex build_cobar(HopfPtr h, const CobarBounds& b, const ComoduleSpec* coeff) {
  CobarComplex cx;
  cx.presentation = h->name();
  cx.bounds = b;
  cx.p = h->prime();
  cx.hopf = h;
  if (b.t_max < 0) throw std::invalid_argument("t_max must be >= 0");
  if (h->is_hopf_algebra()) {
    auto a = std::make_shared<MonomialHopfAlgebra>(h, b.t_max);
    auto m = std::make_shared<F2Comodule>(coeff ? F2Comodule::from_spec(*coeff, *a, b.t_max) : F2Comodule::trivial());
    cx.coefficients = coeff ? coeff->module->id() : "F_2";
    cx.over_field = true;
    cx.algebra = a;
    int f_max = b.f_max < 0 ? b.t_max + 1 : b.f_max;
    cx.bounds.f_max = f_max;
    for (int t = 0; t <= b.t_max; ++t) {
      ComplexBlockF2 blk;
      blk.t = t;
      auto words = std::make_shared<std::vector<std::vector<Word>>>();
      for (int f = 0; f <= f_max; ++f) {
        words->push_back(f2_words(*a, *m, f, t));
        blk.dim.push_back(words->back().size());
      }
      charge_memory(0, "cobar");
      std::unordered_map<Word, uint32_t, VecHash> next_index;
      for (int f = 0; f < f_max; ++f) {
        next_index.clear();
        const auto& tgt = (*words)[f + 1];
        for (size_t i = 0; i < tgt.size(); ++i) next_index[tgt[i]] = static_cast<uint32_t>(i);
        SparseF2 d;
        d.rows = tgt.size();
        d.cols.resize((*words)[f].size());
        for (size_t c = 0; c < (*words)[f].size(); ++c) {
          const Word& w = (*words)[f][c];
          std::vector<uint32_t> hits;
          Word nw(f + 2);
          for (int i = 0; i < f; ++i)
            for (auto [l, r] : a->reduced_coproduct(w[i])) {
              std::copy(w.begin(), w.begin() + i, nw.begin());
              nw[i] = static_cast<uint16_t>(l);
              nw[i + 1] = static_cast<uint16_t>(r);
              std::copy(w.begin() + i + 1, w.end(), nw.begin() + i + 2);
              hits.push_back(next_index.at(nw));
            }
          for (auto [ai, mi] : m->reduced_coaction[w[f]]) {
            std::copy(w.begin(), w.begin() + f, nw.begin());
            nw[f] = static_cast<uint16_t>(ai);
            nw[f + 1] = static_cast<uint16_t>(mi);
            hits.push_back(next_index.at(nw));
          }
          std::sort(hits.begin(), hits.end());
          auto& col = d.cols[c];
          for (size_t i = 0; i < hits.size();) {
            size_t j = i;
            while (j < hits.size() && hits[j] == hits[i]) ++j;
            if ((j - i) % 2) col.push_back(hits[i]);
            i = j;
          }
        }
        blk.d.push_back(std::move(d));
      }
      blk.words = words;
      blk.label = [a, m, words](int f, size_t i) {
        const Word& w = (*words)[f][i];
        std::string s;
        if (f > 0) {
          s = "[";
          for (int k = 0; k < f; ++k) s += (k ? "|" : "") + a->label(w[k]);
          s += "]";
        }
        const std::string& ml = m->labels[w[f]];
        if (f == 0) return ml;
        return ml == "1" ? s : s + " " + ml;
      };
      cx.f2_blocks.push_back(std::move(blk));
    }
    return cx;
  }

  if (coeff) throw std::invalid_argument("algebroid cobar complexes take coefficients in the base ring only");
  cx.coefficients = h->presentation()->id() + " base ring";
  cx.over_field = h->ring()->mode == CoefMode::Fp;
  const auto& pres = *h->presentation();
  bool has_w = h->synthetic() || h->name() == "graded_novikov_lambda";
  bool has_u = h->name().rfind("graded", 0) == 0;
  if (has_w && (!b.w_min || !b.w_max)) throw std::invalid_argument(h->name() + " needs a weight window");
  if (has_u && !b.u_max) throw std::invalid_argument(h->name() + " needs u_max");
  int tmin = 1 << 30;
  for (int g = h->num_base(); g < pres.size(); ++g) tmin = std::min(tmin, pres.gen(g).deg.t);
  for (int t = 0; t <= b.t_max; ++t) {
    int f_cap = t / tmin + 1;
    int f_max = b.f_max < 0 ? f_cap : std::min(b.f_max, f_cap);
    std::vector<std::optional<int>> ws{std::nullopt}, us{std::nullopt};
    if (has_w) {
      ws.clear();
      for (int w = *b.w_min; w <= *b.w_max; ++w) ws.push_back(w);
    }
    if (has_u) {
      us.clear();
      for (int u = 0; u <= *b.u_max; ++u) us.push_back(u);
    }
    for (auto w : ws)
      for (auto u : us) {
        auto blk = build_algebroid_block(*h, t, w, u, f_max);
        size_t total = 0;
        for (auto d : blk.dim) total += d;
        if (total) cx.z_blocks.push_back(std::move(blk));
      }
  }
  if (b.f_max < 0) cx.bounds.f_max = b.t_max / tmin + 1;
  return cx;
}

// ---------------------------------------------------------------- algebroid blocks

namespace {

struct AWord {
  Monomial base;
  std::vector<Monomial> slots;
  bool operator<(const AWord& o) const {
    if (slots != o.slots) return slots < o.slots;
    return base < o.base;
  }
};

class AlgebroidBuilder {
 public:
  explicit AlgebroidBuilder(const HopfAlgebroid& h) : h_(h), pres_(*h.presentation()) {
    for (int g = 0; g < h.num_base(); ++g) (pres_.gen(g).deg.t > 0 ? pos_base_ : zero_base_).push_back(g);
  }

  // Base monomials in normal form of the given degree.
  std::vector<Monomial> base_monomials(int t, std::optional<int> w, std::optional<int> u) const {
    std::vector<Monomial> out;
    std::vector<Monomial::Entry> cur;
    std::function<void(size_t, int, int, int)> rec = [&](size_t k, int rt, int rw, int ru) {
      if (k == pos_base_.size()) {
        if (rt != 0) return;
        solve_zero(cur, w ? rw : 0, u ? ru : 0, w.has_value(), u.has_value(), out);
        return;
      }
      const Generator& g = pres_.gen(pos_base_[k]);
      for (int e = 0; e * g.deg.t <= rt; ++e) {
        if (e) cur.push_back({static_cast<uint16_t>(pos_base_[k]), e});
        rec(k + 1, rt - e * g.deg.t, rw - e * g.deg.w, ru - e * g.deg.u.value_or(0));
        if (e) cur.pop_back();
      }
    };
    rec(0, t, w.value_or(0), u.value_or(0));
    std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) { return canonical_less(a, b, pres_); });
    return out;
  }

  // Nonconstant cooperation monomials of degree exactly t.
  const std::vector<Monomial>& coop_of_degree(int t) {
    auto it = coop_.find(t);
    if (it != coop_.end()) return it->second;
    std::vector<Monomial> out;
    std::vector<Monomial::Entry> cur;
    std::function<void(int, int)> rec = [&](int g, int rt) {
      if (g == pres_.size()) {
        if (rt == 0 && !cur.empty()) out.push_back(Monomial(cur));
        return;
      }
      int dt = pres_.gen(g).deg.t;
      for (int e = 0; e * dt <= rt; ++e) {
        if (e) cur.push_back({static_cast<uint16_t>(g), e});
        rec(g + 1, rt - e * dt);
        if (e) cur.pop_back();
      }
    };
    if (t > 0) rec(h_.num_base(), t);
    std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) { return canonical_less(a, b, pres_); });
    return coop_[t] = out;
  }

  // η_R(a) split as (coefficient, base, cooperation part).
  const std::vector<std::tuple<Coefficient, Monomial, Monomial>>& eta(const Monomial& a) {
    auto it = eta_.find(a);
    if (it != eta_.end()) return it->second;
    std::vector<std::tuple<Coefficient, Monomial, Monomial>> out;
    Polynomial e = h_.eta_R(Polynomial::monomial(h_.ring(), a));
    for (auto& t : e.terms()) {
      std::vector<Monomial::Entry> b, c;
      for (auto& en : t.mono.entries()) (en.first < h_.num_base() ? b : c).push_back(en);
      out.emplace_back(t.coef, Monomial(b), Monomial(c));
    }
    return eta_[a] = out;
  }

  // Reduced coproduct as (coefficient, base, left, right).
  const std::vector<std::tuple<Coefficient, Monomial, Monomial, Monomial>>& dbar(const Monomial& g) {
    auto it = dbar_.find(g);
    if (it != dbar_.end()) return it->second;
    std::vector<std::tuple<Coefficient, Monomial, Monomial, Monomial>> out;
    Polynomial d = h_.coproduct(Polynomial::monomial(h_.ring(), g));
    for (auto& t : d.terms()) {
      auto sp = h_.split_tensor(t.mono);
      if (sp.left.is_one() || sp.right.is_one()) continue;
      out.emplace_back(t.coef, sp.base, sp.left, sp.right);
    }
    return dbar_[g] = out;
  }

  // Adds c · base[slots] with an A-coefficient `pending` sitting left of slot k.
  void emit(std::map<AWord, Coefficient>& acc, const Coefficient& c, const Monomial& base,
            std::vector<Monomial> slots, int k, const Monomial& pending) {
    if (pending.is_one()) {
      add(acc, AWord{base, std::move(slots)}, c);
      return;
    }
    if (k == 0) {
      Polynomial prod = Polynomial::monomial(h_.ring(), base * pending, c);
      for (auto& t : prod.terms()) add(acc, AWord{t.mono, slots}, t.coef);
      return;
    }
    for (auto& [c2, b2, tk] : eta(pending)) {
      auto s2 = slots;
      s2[k - 1] = s2[k - 1] * tk;
      emit(acc, c * c2, base, std::move(s2), k - 1, b2);
    }
  }

  const HopfAlgebroid& hopf() const { return h_; }
  const Presentation& pres() const { return pres_; }

 private:
  void solve_zero(const std::vector<Monomial::Entry>& cur, int rw, int ru, bool use_w, bool use_u,
                  std::vector<Monomial>& out) const {
    int bound = std::abs(rw) + std::abs(ru) + 1;
    std::vector<int> e(zero_base_.size(), 0);
    std::function<void(size_t, int, int)> rec = [&](size_t k, int w, int u) {
      if (k == zero_base_.size()) {
        if ((use_w && w != 0) || (use_u && u != 0)) return;
        if (!use_w && !use_u && std::any_of(e.begin(), e.end(), [](int x) { return x; })) return;
        std::vector<Monomial::Entry> all = cur;
        for (size_t i = 0; i < e.size(); ++i)
          if (e[i]) all.push_back({static_cast<uint16_t>(zero_base_[i]), e[i]});
        std::sort(all.begin(), all.end());
        Monomial m(all);
        for (auto& r : pres_.rules())
          if (m.divisible_by(r.lhs)) return;
        out.push_back(m);
        return;
      }
      const Generator& g = pres_.gen(zero_base_[k]);
      for (int x = 0; x <= bound; ++x) {
        e[k] = x;
        rec(k + 1, w - x * g.deg.w, u - x * g.deg.u.value_or(0));
      }
      e[k] = 0;
    };
    rec(0, rw, ru);
  }

  void add(std::map<AWord, Coefficient>& acc, AWord w, const Coefficient& c) {
    auto [it, fresh] = acc.emplace(std::move(w), c);
    if (!fresh) it->second = it->second + c;
  }

  const HopfAlgebroid& h_;
  const Presentation& pres_;
  std::vector<int> pos_base_, zero_base_;
  std::map<int, std::vector<Monomial>> coop_;
  std::map<Monomial, std::vector<std::tuple<Coefficient, Monomial, Monomial>>> eta_;
  std::map<Monomial, std::vector<std::tuple<Coefficient, Monomial, Monomial, Monomial>>> dbar_;
};

std::string word_label(const AWord& w, const Presentation& pres) {
  std::string b = format_monomial(w.base, pres);
  if (w.slots.empty()) return b.empty() ? "1" : b;
  std::string s = b + "[";
  for (size_t i = 0; i < w.slots.size(); ++i) s += (i ? "|" : "") + format_monomial(w.slots[i], pres);
  return s + "]";
}

}  // namespace

int novikov_filtration(const HopfAlgebroid& h, const Monomial& base, int slots, const Coefficient& c) {
  const auto& pres = *h.presentation();
  int phi = slots;
  for (auto& [g, e] : base.entries())
    if (g < h.num_base() && pres.gen(g).name != "L") phi += e;
  if (h.ring()->mode != CoefMode::Fp && !c.is_zero()) phi += c.valuation(h.prime());
  return phi;
}

ComplexBlockZ build_algebroid_block(const HopfAlgebroid& h, int t, std::optional<int> w,
                                    std::optional<int> u, int f_max) {
  if (h.is_hopf_algebra()) throw std::invalid_argument("build_algebroid_block needs an algebroid presentation");
  AlgebroidBuilder B(h);
  ComplexBlockZ blk;
  blk.p = h.prime();
  blk.field = h.ring()->mode == CoefMode::Fp;
  blk.t = t;
  blk.w = w.value_or(0);
  blk.has_w = w.has_value();
  blk.u = u;
  const auto& pres = B.pres();
  std::vector<std::vector<AWord>> words(f_max + 1);
  for (int f = 0; f <= f_max; ++f) {
    std::vector<Monomial> cur;
    std::function<void(int, int, int, int)> rec = [&](int k, int rt, int rw, int ru) {
      if (k == f) {
        auto bases = B.base_monomials(rt, w ? std::optional<int>(rw) : std::nullopt, u ? std::optional<int>(ru) : std::nullopt);
        for (auto& b : bases) words[f].push_back(AWord{b, cur});
        return;
      }
      for (int d = 1; d <= rt; ++d)
        for (auto& g : B.coop_of_degree(d)) {
          auto dg = monomial_degree(g, pres);
          cur.push_back(g);
          rec(k + 1, rt - d, rw - dg.w, ru - dg.u.value_or(0));
          cur.pop_back();
        }
    };
    rec(0, t, w.value_or(0), u.value_or(0));
    blk.dim.push_back(words[f].size());
    std::vector<std::string> labels;
    std::vector<int> phi;
    for (auto& wd : words[f]) {
      labels.push_back(word_label(wd, pres));
      phi.push_back(novikov_filtration(h, wd.base, f, Coefficient(1)));
    }
    blk.labels.push_back(std::move(labels));
    blk.filtration.push_back(std::move(phi));
  }
  for (int f = 0; f < f_max; ++f) {
    std::map<AWord, uint32_t> index;
    for (size_t i = 0; i < words[f + 1].size(); ++i) index[words[f + 1][i]] = static_cast<uint32_t>(i);
    std::vector<std::vector<std::pair<uint32_t, Coefficient>>> cols(words[f].size());
    for (size_t c = 0; c < words[f].size(); ++c) {
      const AWord& wd = words[f][c];
      std::map<AWord, Coefficient> acc;
      // [η_R(a) - a | γ_1 | ... ]
      for (auto& [ce, b, tk] : B.eta(wd.base)) {
        if (tk.is_one()) continue;
        std::vector<Monomial> s{tk};
        s.insert(s.end(), wd.slots.begin(), wd.slots.end());
        B.emit(acc, ce, b, std::move(s), 0, Monomial());
      }
      for (int i = 0; i < f; ++i) {
        Coefficient sign((i + 1) % 2 ? -1 : 1);
        for (auto& [cd, b, l, r] : B.dbar(wd.slots[i])) {
          std::vector<Monomial> s;
          s.insert(s.end(), wd.slots.begin(), wd.slots.begin() + i);
          s.push_back(l);
          s.push_back(r);
          s.insert(s.end(), wd.slots.begin() + i + 1, wd.slots.end());
          B.emit(acc, sign * cd, wd.base, std::move(s), i, b);
        }
      }
      for (auto& [k, v] : acc) {
        Coefficient val = v;
        if (blk.field) val = Coefficient(static_cast<long>(val.mod_p(blk.p)));
        if (val.is_zero()) continue;
        auto it = index.find(k);
        if (it == index.end()) throw std::logic_error("cobar differential leaves its block: " + word_label(k, pres));
        cols[c].push_back({it->second, val});
      }
      std::sort(cols[c].begin(), cols[c].end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    }
    blk.d.push_back(std::move(cols));
  }
  return blk;
}

}  // namespace synss
