// Chart documents (versioned JSON) built from deduction sessions or spectral
// sequence runs, and their deterministic SVG rendering.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "synss/cobar.hpp"
#include "synss/deduce.hpp"

namespace synss {

struct ChartDocument {
  struct Class {
    std::string id, name;
    int stem = 0, f = 0, w = 0;
    int torsion = 0;  // λ-torsion exponent, 0 = λ-free
    int count = 1;    // F_p-dimension carried by the glyph
    std::string status = "alive";
  };
  struct Line {
    std::string id, source, target, kind;  // kind: multiplier name
  };
  struct Arrow {
    std::string id;
    int r = 2;
    std::string source, target;
    int lambda = 0;
    int rank = 1;
  };
  struct Extension {
    std::string id, kind, source, target;
  };

  int prime = 2;
  std::string kind = "ANSS-S";  // ANSS-S, ANSS-S/lambda, aNSS, CESS
  std::string title;
  int stem_min = 0, stem_max = 0, f_max = 0;
  std::vector<Class> classes;
  std::vector<Line> lines;
  std::vector<Arrow> differentials;
  std::vector<Extension> extensions;

  // Problems such as dangling class ids; empty when valid.
  std::vector<std::string> validate() const;
  nlohmann::json to_json() const;  // schema "synss.chart_document/1"
  static ChartDocument from_json(const nlohmann::json& j);

  static ChartDocument from_session(const Session& s);
  // E_r page of a spectral sequence run: one glyph per nonzero spot, arrows for d_{r'}, r' >= r.
  static ChartDocument from_ss(const SSResult& res, int r);
};

// Stems on x, filtration on y, λ-torsion exponent as glyph color, page-r
// differentials drawn from source to target position (slope (-1, r) on ANSS charts).
std::string svg_render(const ChartDocument& doc);

// Glyph color for a torsion exponent.
std::string torsion_color(int e);

}  // namespace synss
