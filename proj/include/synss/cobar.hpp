// Truncated cobar complexes, their filtrations, Ext and spectral sequences.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "synss/hopf.hpp"
#include "synss/linf2.hpp"

namespace synss {

struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- monomial Hopf algebras over F_2

// Monomial basis of a p = 2 Hopf algebra through degree t_max, with reduced
// coproducts as index pairs.
class MonomialHopfAlgebra {
 public:
  MonomialHopfAlgebra(HopfPtr h, int t_max);

  const HopfAlgebroid& hopf() const { return *h_; }
  int t_max() const { return t_max_; }
  int size() const { return static_cast<int>(mono_.size()); }
  const Monomial& monomial(int i) const { return mono_[i]; }
  int degree(int i) const { return deg_[i]; }
  int index_of(const Monomial& m) const;  // -1 if absent
  const std::vector<int>& of_degree(int t) const { return by_deg_.at(t); }
  const std::vector<std::pair<int, int>>& reduced_coproduct(int i) const { return dbar_[i]; }
  // True if some exponent is >= 2 (the monomial lies in the ideal generated by squares).
  bool in_square_ideal(int i) const;
  std::string label(int i) const;

 private:
  HopfPtr h_;
  int t_max_;
  std::vector<Monomial> mono_;
  std::vector<int> deg_;
  std::vector<std::vector<int>> by_deg_;
  std::vector<std::vector<std::pair<int, int>>> dbar_;
  std::map<Monomial, int> index_;
};

// Left comodule over a MonomialHopfAlgebra with a monomial basis.
struct F2Comodule {
  std::vector<std::string> labels;
  std::vector<int> degree;
  std::vector<std::vector<std::pair<int, int>>> reduced_coaction;  // (algebra index, module index)

  static F2Comodule trivial();
  // Comodule algebra given by a ComoduleSpec, through degree t_max.
  static F2Comodule from_spec(const ComoduleSpec& spec, const MonomialHopfAlgebra& a, int t_max);
};

// ---------------------------------------------------------------- filtered complexes

// Cochain complex over F_2 split into independent internal-degree blocks.
struct ComplexBlockF2 {
  int t = 0;                                      // internal degree of the block
  std::vector<size_t> dim;                         // dim C^f
  std::vector<SparseF2> d;                         // d^f : C^f -> C^{f+1}
  std::vector<std::vector<int>> filtration;        // per word; empty = unfiltered
  std::function<std::string(int f, size_t i)> label;
  // words[f][i] = slot algebra indices followed by the module index
  std::shared_ptr<const std::vector<std::vector<std::vector<uint16_t>>>> words;
};

// Cochain complex over Z_(p) (or F_p when `field`) with a p-adic-aware filtration.
struct ComplexBlockZ {
  int p = 2;
  bool field = false;
  int t = 0, w = 0;
  bool has_w = false;
  std::optional<int> u;  // graded blocks
  std::vector<size_t> dim;
  // d[f][col] = list of (row, coefficient)
  std::vector<std::vector<std::vector<std::pair<uint32_t, Coefficient>>>> d;
  std::vector<std::vector<int>> filtration;  // φ per basis word (without coefficient valuation)
  std::vector<std::vector<std::string>> labels;
};

// ---------------------------------------------------------------- cobar builders

struct CobarBounds {
  int t_max = 14;
  int f_max = -1;  // -1: no cut (t_max + 1)
  std::optional<int> w_min, w_max;
  std::optional<int> u_max;
};

struct CobarComplex {
  std::string presentation;
  std::string coefficients;
  CobarBounds bounds;
  int p = 2;
  bool over_field = true;
  std::shared_ptr<const MonomialHopfAlgebra> algebra;  // Steenrod-type presentations
  HopfPtr hopf;
  std::vector<ComplexBlockF2> f2_blocks;
  std::vector<ComplexBlockZ> z_blocks;    // algebroid presentations
};

// Hopf algebra over F_2 with a left comodule (trivial when coeff is null).
CobarComplex build_cobar(HopfPtr h, const CobarBounds& b, const ComoduleSpec* coeff = nullptr);

// Algebroid cobar with coefficients in the base ring (right unit coaction), one
// block per (t[, w][, u]).
ComplexBlockZ build_algebroid_block(const HopfAlgebroid& h, int t, std::optional<int> w,
                                    std::optional<int> u, int f_max);

// ---------------------------------------------------------------- Ext

struct ExtEntry {
  int f = 0, t = 0;
  std::optional<int> w, u;
  int dim = 0;
  std::vector<std::string> representatives;  // cocycles in canonical word order (small blocks)
};

struct ExtTable {
  std::string presentation;
  int p = 2;
  int t_max = 0, f_max = 0;
  std::vector<ExtEntry> entries;
  int dim(int f, int t, std::optional<int> w = std::nullopt, std::optional<int> u = std::nullopt) const;
  nlohmann::json to_json() const;
  static ExtTable from_json(const nlohmann::json& j);
};

// Ext dims inside the reliable window; `rep_limit` caps block sizes for which
// representatives are computed.
ExtTable ext_groups(const CobarComplex& cx, size_t rep_limit = 400);
// Throws WindowError unless f + 1 <= f_max and t <= t_max.
void check_window(const CobarComplex& cx, int f, int t);

// ---------------------------------------------------------------- filtrations

enum class FiltrationKind { NovikovIdealPower, CartanEilenbergCount, Trivial };

struct FilteredCobarComplex {
  CobarComplex cx;
  FiltrationKind kind = FiltrationKind::Trivial;
  std::string tie_break = "canonical word order";
};

// Filtration i + I-adic valuation for the ideal I = (p, v_1, v_2, ...) (classical)
// or J = (h, v_1, v_2, ...) (synthetic); F_p graded algebroids use i + a-degree.
FilteredCobarComplex filter_novikov(CobarComplex cx, const std::string& ideal = "I");
// Count of tensor slots lying in G (monomials with an exponent >= 2).
FilteredCobarComplex filter_cartan_eilenberg(CobarComplex cx, const std::string& kernel = "squares");
FilteredCobarComplex filter_trivial(CobarComplex cx);

// Filtration of a single element a·[γ_1|...|γ_i] with coefficient c.
int novikov_filtration(const HopfAlgebroid& h, const Monomial& base, int slots, const Coefficient& c);
int cartan_eilenberg_filtration(const MonomialHopfAlgebra& a, const std::vector<int>& slots);

// ---------------------------------------------------------------- spectral sequences

// Quad-degree key (f, u, t, w).
using Spot = std::tuple<int, int, int, int>;

struct PageDifferential {
  Spot source, target;
  int rank = 0;
  std::vector<std::pair<std::string, std::string>> examples;  // representative words
};

struct SSPage {
  int r = 1;
  std::map<Spot, int> dims;
  std::vector<PageDifferential> diffs;
};

struct SSResult {
  std::string kind;  // "CESS", "aNSS", "synthetic aNSS", "trivial"
  int p = 2;
  std::string tie_break;
  std::vector<SSPage> pages;  // pages[k].r = first_page + k
  std::map<Spot, int> e_infinity;
  std::vector<std::string> violations;  // bookkeeping failures (expected empty)
  const SSPage& page(int r) const;
  int dim(int r, const Spot& s) const;
  nlohmann::json to_json() const;
};

// Runs the spectral sequence of the filtered complex up to page r_max and
// records E_infinity. Spots are mapped to (f,u,t,w) by the filtration kind.
SSResult ss_run(const FilteredCobarComplex& fcx, int r_max);

// ---------------------------------------------------------------- lattice engine

// Pages of one filtered Z_(p)-block computed with Z/p^T lattices.
class LatticeSS {
 public:
  LatticeSS(const ComplexBlockZ& blk, int T);
  int T() const { return R_.T; }
  const ZpkRing& ring() const { return R_; }
  const ComplexBlockZ& block() const { return blk_; }
  size_t dim(int f) const { return f >= 0 && f < static_cast<int>(blk_.dim.size()) ? blk_.dim[f] : 0; }

  ZpkModule F(int f, int j) const;                 // fil^j C^f
  ZpkModule Z(int f, int j, int r) const;          // {x in F^j : dx in F^{j+r}}; r >= 1000 means cycles
  ZpkModule B(int f, int j, int r) const;          // Z_{r-1}^{j+1} + d Z_{r-1}^{j-r+1}
  int page_dim(int f, int j, int r) const;         // dim E_r^{f,j}
  int diff_rank(int f, int j, int r) const;        // rank of d_r out of E_r^{f,j}
  ZVec apply_d(int f, const ZVec& x) const;
  ZVec basis_vector(int f, size_t i, uint64_t coef = 1) const;
  int min_filtration(int f) const;

 private:
  ComplexBlockZ blk_;
  ZpkRing R_;
  std::vector<ZpkMatrix> D_;
  mutable std::map<std::tuple<int, int, int>, ZpkModule> zcache_;
};

// Persistence pairs of a filtered F_2 block (φ descending order, lowest-φ pivot).
struct PersistencePairs {
  struct Pair {
    int f;
    size_t source, target;
    int length;
  };
  std::vector<Pair> pairs;
  std::vector<std::pair<int, size_t>> essential;
};
PersistencePairs persistence(const ComplexBlockF2& blk);

// Property checks.
std::vector<std::string> check_d_squared(const CobarComplex& cx);
std::vector<std::string> check_filtration_monotone(const FilteredCobarComplex& fcx);
std::vector<std::string> check_euler_characteristic(const SSResult& res);

}  // namespace synss
