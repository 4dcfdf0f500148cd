// Hand count of the λ-Bockstein pages predicted from a classical aNSS run, and
// its comparison with a synthetic run.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "synss/bockstein.hpp"

namespace prediction {

// E_r of the λ-Bockstein spectral sequence, counted by hand: a classical E_r class
// at (f,u,t) contributes λ^k x in weight u+t-k for all k >= 0; the target of a
// d_{r'} with r' < r survives as λ-torsion of exponent r'-1.
inline std::map<synss::Spot, int> hand_prediction(const synss::SSResult& an, int r) {
  std::map<synss::Spot, int> pred;
  for (auto& [s, d] : an.page(r).dims) {
    auto [f, u, t, w] = s;
    for (int k = 0; u + t - k >= 0; ++k) pred[{f, u, t, u + t - k}] += d;
  }
  for (int r2 = 2; r2 < r; ++r2)
    for (auto& df : an.page(r2).diffs) {
      auto [f, u, t, w] = df.target;
      for (int k = 0; k <= r2 - 2; ++k) pred[{f, u, t, u + t - k}] += df.rank;
    }
  return pred;
}

inline std::string spot_text(int r, const synss::Spot& s) {
  auto [f, u, t, w] = s;
  return "E_" + std::to_string(r) + "(" + std::to_string(f) + "," + std::to_string(u) + "," + std::to_string(t) + "," +
         std::to_string(w) + ")";
}

// Spots of pages 2..4 inside t <= t_max, w_min <= w and u + t <= w_max where the
// synthetic run disagrees with the prediction; `checked` counts compared spots.
inline std::vector<std::string> mismatches(const synss::SSResult& an, const synss::SSResult& sy, int t_max, int w_min,
                                           int w_max, int* checked = nullptr) {
  std::vector<std::string> bad;
  int n = 0;
  for (int r = 2; r <= 4; ++r) {
    auto pred = hand_prediction(an, r);
    for (auto& [s, d] : pred) {
      auto [f, u, t, w] = s;
      if (u + t > w_max || w < w_min || t > t_max) continue;
      ++n;
      if (sy.dim(r, s) != d)
        bad.push_back(spot_text(r, s) + ": synthetic " + std::to_string(sy.dim(r, s)) + ", predicted " +
                      std::to_string(d));
    }
    for (auto& [s, d] : sy.page(r).dims) {
      auto [f, u, t, w] = s;
      if (u + t > w_max || t > t_max || d == 0) continue;
      if (!pred.count(s)) bad.push_back(spot_text(r, s) + ": synthetic " + std::to_string(d) + ", predicted 0");
    }
  }
  if (checked) *checked = n;
  return bad;
}

}  // namespace prediction
