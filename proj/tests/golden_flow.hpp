// The stems <= 45 deduction run on the fixtures: comparison with Ext_{A_*} and
// Leibniz propagation on S/λ, transfer along i, q-module forcing and Leibniz
// propagation on S.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "synss/deduce.hpp"

namespace golden {

inline std::string fixture(const std::string& name) { return std::string(SYNSS_FIXTURES) + "/" + name; }

struct Flow {
  synss::Session S{"S", synss::ChartKind::ANSS_S};
  synss::Session Q{"Smod", synss::ChartKind::ANSS_SModLambda};
  synss::ComparisonReport comparison;
  synss::PropagationReport q_prop, s_prop;
  synss::TransferReport transfer;
  synss::QModuleReport qmod;
};

inline Flow run(synss::Session S, synss::Session Q) {
  using namespace synss;
  Flow fl{std::move(S), std::move(Q), {}, {}, {}, {}, {}};
  std::ifstream tin(fixture("ext_a_products.jsonl"));
  auto target = ComparisonTarget::read_jsonl(tin);
  fl.comparison = infer_hidden_from_comparison(fl.Q, target);
  fl.q_prop = fl.Q.propagate_leibniz();
  fl.transfer = transfer_via_i(fl.S, fl.Q);
  apply_transfer(fl.S, fl.transfer);
  fl.qmod = q_module_check(fl.S, fl.Q);
  apply_forced(fl.S, fl.qmod);
  fl.s_prop = fl.S.propagate_leibniz();
  return fl;
}

inline Flow run() {
  return run(synss::Session::replay_file(fixture("anss_s45.jsonl")),
             synss::Session::replay_file(fixture("anss_smodlambda45.jsonl")));
}

// Session log text with every line containing `needle` removed.
inline std::string log_without(const std::string& path, const std::string& needle) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find(needle) == std::string::npos) out += line + "\n";
  return out;
}

inline std::vector<std::string> differential_lines(const synss::Session& s) {
  std::vector<std::string> out;
  for (auto& d : s.differentials())
    out.push_back("d_" + std::to_string(d.r) + "(" + d.source + ") = " + d.target.str() + " [" +
                  synss::to_string(d.provenance) + "]");
  return out;
}

inline std::vector<std::string> extension_lines(const synss::Session& s) {
  std::vector<std::string> out;
  for (auto& x : s.extensions())
    out.push_back(synss::to_string(x.kind) + " " + x.source + " -> " + x.target.str() + " " + x.level + " [" +
                  synss::to_string(x.provenance) + "]");
  return out;
}

// The Leibniz rule applications through stem 45: (source, target) in the chart's
// conventional names, resolved through the alias table.
struct Row {
  int r;
  std::string source, target;
};

inline const std::vector<Row>& leibniz_table() {
  static const std::vector<Row> rows{
      {3, "Pe_0", "alpha_1^2c_0d_0"},
      {3, "Pc_0e_0", "alpha_1^4beta_3^2"},
      {3, "P^2e_0", "Palpha_1^2c_0beta_3"},
      {3, "beta_{8/6,2}", "lambda^2 alpha_1d_1"},
      {3, "c_0beta_3e_0", "h_1^4e_0^2"},
      {3, "Pbeta_3e_0", "alpha_1^2c_0beta_3^2"},
      {3, "h_0c_2", "h_1h_3d_1"},
      {3, "P^2c_0e_0", "Palpha_1^4beta_3^2"},
      {3, "P^3e_0", "P^2h_1^2c_0beta_3"},
      {3, "beta_3^2e_0", "alpha_1^2c_0e_0^2"},
      {5, "beta_7", "lambda alpha_{2/2}e_0^2"},
      // weight bookkeeping forces the factor λ here
      {5, "beta_{6/2}beta_3", "lambda alpha_1c_0e_0^2"},
      {5, "beta_{6/2}", "alpha_1beta_2beta_4"},
  };
  return rows;
}

inline synss::Element resolved(const synss::Session& s, const std::string& text) {
  auto e = synss::Element::parse(text);
  for (auto& t : e.terms) t.name = s.resolve(t.name);
  return s.normalize(e);
}

// Empty when every row of the table is recorded on S; otherwise the missing rows.
inline std::vector<std::string> missing_rows(const synss::Session& s) {
  std::vector<std::string> bad;
  for (auto& row : leibniz_table()) {
    auto* d = s.differential_from(s.resolve(row.source));
    std::string want = "d_" + std::to_string(row.r) + "(" + row.source + ") = " + row.target;
    if (!d || d->r != row.r || s.normalize(d->target) != resolved(s, row.target)) bad.push_back(want);
  }
  return bad;
}

struct Ext {
  synss::ExtKind kind;
  std::string source, target, level;
};

inline const std::vector<Ext>& expected_extensions() {
  using synss::ExtKind;
  static const std::vector<Ext> xs{
      {ExtKind::TwoH, "hbeta_{4/4}", "lambda hbeta_3", "E2"},
      {ExtKind::TwoH, "h^3beta_{8/8}", "lambda hbeta_{6/2}", "E2"},
      {ExtKind::TwoH, "h^3beta_{6/2}", "lambda^2 P^2beta_3", "E2"},
      {ExtKind::Lambda, "Pc_0beta_3", "alpha_1^2beta_3^2", "Einf"},
  };
  return xs;
}

inline std::vector<std::string> missing_extensions(const synss::Session& s) {
  std::vector<std::string> bad;
  for (auto& want : expected_extensions()) {
    bool found = false;
    for (auto& x : s.extensions())
      found |= x.kind == want.kind && x.source == s.resolve(want.source) && x.level == want.level &&
               s.normalize(x.target) == resolved(s, want.target);
    if (!found) bad.push_back(synss::to_string(want.kind) + " " + want.source + " -> " + want.target);
  }
  return bad;
}

}  // namespace golden
