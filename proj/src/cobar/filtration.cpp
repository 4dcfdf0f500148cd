#include <algorithm>

#include "synss/cobar.hpp"

namespace synss {

int cartan_eilenberg_filtration(const MonomialHopfAlgebra& a, const std::vector<int>& slots) {
  int s = 0;
  for (int i : slots) s += a.in_square_ideal(i) ? 1 : 0;
  return s;
}

FilteredCobarComplex filter_novikov(CobarComplex cx, const std::string& ideal) {
  if (!cx.f2_blocks.empty()) throw std::invalid_argument("the Novikov filtration needs an algebroid cobar complex");
  const auto& h = *cx.hopf;
  std::string want = h.synthetic() ? "J" : h.name() == "bp_classical" ? "I" : "a";
  if (ideal != want)
    throw std::invalid_argument("ideal '" + ideal + "' does not match " + h.name() + " (expected '" + want + "')");
  // build_algebroid_block already records i + ideal-adic valuation per word
  FilteredCobarComplex out;
  out.cx = std::move(cx);
  out.kind = FiltrationKind::NovikovIdealPower;
  return out;
}

FilteredCobarComplex filter_cartan_eilenberg(CobarComplex cx, const std::string& kernel) {
  if (kernel != "squares") throw std::invalid_argument("unknown Cartan-Eilenberg kernel '" + kernel + "'");
  if (!cx.algebra) throw std::invalid_argument("the Cartan-Eilenberg filtration needs a Hopf algebra cobar complex");
  const auto& a = *cx.algebra;
  for (auto& blk : cx.f2_blocks) {
    blk.filtration.assign(blk.dim.size(), {});
    for (size_t f = 0; f < blk.dim.size(); ++f)
      for (const auto& w : (*blk.words)[f]) {
        int s = 0;
        for (size_t k = 0; k < f; ++k) s += a.in_square_ideal(w[k]) ? 1 : 0;
        blk.filtration[f].push_back(s);
      }
  }
  FilteredCobarComplex out;
  out.cx = std::move(cx);
  out.kind = FiltrationKind::CartanEilenbergCount;
  return out;
}

FilteredCobarComplex filter_trivial(CobarComplex cx) {
  if (!cx.over_field) throw std::invalid_argument("the trivial filtration is only supported over a field");
  for (auto& blk : cx.f2_blocks) {
    blk.filtration.clear();
    for (auto n : blk.dim) blk.filtration.push_back(std::vector<int>(n, 0));
  }
  for (auto& blk : cx.z_blocks) {
    blk.filtration.clear();
    for (auto n : blk.dim) blk.filtration.push_back(std::vector<int>(n, 0));
  }
  FilteredCobarComplex out;
  out.cx = std::move(cx);
  out.kind = FiltrationKind::Trivial;
  return out;
}

std::vector<std::string> check_d_squared(const CobarComplex& cx) {
  std::vector<std::string> bad;
  for (auto& blk : cx.f2_blocks)
    for (size_t f = 0; f + 1 < blk.d.size(); ++f)
      for (size_t c = 0; c < blk.d[f].cols.size(); ++c) {
        std::vector<uint32_t> acc;
        for (auto r : blk.d[f].cols[c])
          for (auto r2 : blk.d[f + 1].cols[r]) acc.push_back(r2);
        std::sort(acc.begin(), acc.end());
        for (size_t i = 0; i < acc.size();) {
          size_t j = i;
          while (j < acc.size() && acc[j] == acc[i]) ++j;
          if ((j - i) % 2) {
            bad.push_back("d^2 != 0 on " + blk.label(static_cast<int>(f), c));
            break;
          }
          i = j;
        }
      }
  for (auto& blk : cx.z_blocks)
    for (size_t f = 0; f + 1 < blk.d.size(); ++f)
      for (size_t c = 0; c < blk.d[f].size(); ++c) {
        std::map<uint32_t, Coefficient> acc;
        for (auto& [r, v] : blk.d[f][c])
          for (auto& [r2, v2] : blk.d[f + 1][r]) acc[r2] = acc[r2] + v * v2;
        for (auto& [r2, v] : acc) {
          bool zero = blk.field ? v.mod_p(blk.p) == 0 : v.is_zero();
          if (!zero) {
            bad.push_back("d^2 != 0 on " + blk.labels[f][c] + " (t=" + std::to_string(blk.t) + ")");
            break;
          }
        }
      }
  return bad;
}

std::vector<std::string> check_filtration_monotone(const FilteredCobarComplex& fcx) {
  std::vector<std::string> bad;
  for (auto& blk : fcx.cx.f2_blocks) {
    if (blk.filtration.empty()) continue;
    for (size_t f = 0; f < blk.d.size(); ++f)
      for (size_t c = 0; c < blk.d[f].cols.size(); ++c)
        for (auto r : blk.d[f].cols[c])
          if (blk.filtration[f + 1][r] < blk.filtration[f][c])
            bad.push_back("d lowers filtration: " + blk.label(static_cast<int>(f), c) + " -> " +
                          blk.label(static_cast<int>(f + 1), r));
  }
  for (auto& blk : fcx.cx.z_blocks)
    for (size_t f = 0; f < blk.d.size(); ++f)
      for (size_t c = 0; c < blk.d[f].size(); ++c)
        for (auto& [r, v] : blk.d[f][c]) {
          int val = blk.field ? 0 : v.valuation(blk.p);
          if (blk.filtration[f + 1][r] + val < blk.filtration[f][c])
            bad.push_back("d lowers filtration: " + blk.labels[f][c] + " -> " + blk.labels[f + 1][r]);
        }
  return bad;
}

}  // namespace synss
