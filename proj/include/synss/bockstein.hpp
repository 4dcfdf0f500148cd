// λ-Bockstein reconstruction of synthetic data from classical algebraic
// Novikov data, and the maps i, q of the mod-λ long exact sequence.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "synss/cobar.hpp"

namespace synss {

struct BocksteinError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadDegree {
  int f = 0, u = 0, t = 0, w = 0;
  int stem() const { return t - f; }
  auto operator<=>(const QuadDegree&) const = default;
  std::string str() const;
  Spot spot() const { return {f, u, t, w}; }
};

struct ClassicalClass {
  std::string name;
  int f = 0, u = 0, t = 0;
  std::optional<std::string> expr;  // monomial expression in a_i, b_j
  int stem() const { return t - f; }
};

// Linear combination of named classes (coefficients in F_p).
struct Combination {
  std::vector<std::pair<int, std::string>> terms;
  std::string str() const;
  static Combination of(const std::string& name) { return Combination{{{1, name}}}; }
};

struct ClassicalDifferential {
  int r = 2;
  std::string source;
  Combination target;
  bool convention_declared = true;  // false when imported data did not say page vs λ-exponent
};

QuadDegree assign_weight(const ClassicalClass& c);

struct LambdaGenerator {
  std::string name;            // class name or target combination
  QuadDegree deg;
  bool free = true;
  int torsion_exponent = 0;    // e >= 1 for λ-torsion generators
  std::string killed_by;       // source of the differential, for torsion generators
};

// d^{syn}(x) = ±λ^e y with e = r - 1.
struct BocksteinDifferential {
  std::string source;
  Combination target;
  int page = 2;
  int lambda_exponent = 1;
  int sign = -1;  // carried as a tag; trivial at p = 2
};

struct LambdaModulePresentation {
  int p = 2;
  std::vector<LambdaGenerator> gens;
  std::vector<BocksteinDifferential> diffs;
  std::vector<ClassicalClass> classes;
  std::vector<std::string> warnings;  // e.g. undeclared page conventions

  const LambdaGenerator* find(const std::string& name) const;
  // F_p-dimension of the λ-module in a quad degree.
  int dim(const QuadDegree& d) const;
  nlohmann::json to_json() const;
};

// Sources die; each target of a page-r differential becomes λ-torsion of
// exponent r - 1; everything else is λ-free.
LambdaModulePresentation reconstruct(const std::vector<ClassicalClass>& classes,
                                     const std::vector<ClassicalDifferential>& diffs, int p = 2);

// q(x̄) = -λ^{r-2} y for a source x of d_r; zero on the image of i.
struct QValue {
  bool zero = false;
  Combination target;
  int lambda_exponent = 0;
  int sign = -1;
  QuadDegree deg;  // degree of the value
  std::string str() const;
};
QValue q_map(const LambdaModulePresentation& m, const std::string& source);
// i(λ^k c): reduction mod λ; nullopt when the element is λ-divisible (k > 0).
std::optional<std::string> i_map(const LambdaModulePresentation& m, const std::string& name, int k = 0);
std::string overline_name(const std::string& name);

// Per (f,u,t): classical count = generators at (f,u,t,u+t) + λ-torsion
// generators c at (f+1, *, t) with w(c) = u + t + e(c). Returns violations.
std::vector<std::string> check_les(const LambdaModulePresentation& m);

// E_r dims of the λ-Bockstein spectral sequence predicted from classical
// E_2 classes and differentials (weights clipped below at w_min).
std::map<Spot, int> predicted_synthetic_page(const std::vector<ClassicalClass>& classes,
                                             const std::vector<ClassicalDifferential>& diffs, int r, int w_min);

// Classical classes/differentials named from an aNSS run ("x(f,u,t)#k").
// Sources whose differential leaves the window are dropped and listed in `truncated`.
struct ClassicalData {
  std::vector<ClassicalClass> classes;
  std::vector<ClassicalDifferential> diffs;
  std::vector<std::string> truncated;
};
ClassicalData classical_from_ss(const SSResult& anss, int r_max);

// JSON lines: {"kind":"class",...} / {"kind":"differential",...}, or the
// third-party form {"name":..,"degree":[f,u,t],"differentials":[{"r":..,"target":..}]}.
ClassicalData read_classical_jsonl(std::istream& in);
void write_classical_jsonl(std::ostream& out, const ClassicalData& d);

}  // namespace synss
