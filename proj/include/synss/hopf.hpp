// Hopf algebroid presentations and their structure maps.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "synss/algebra.hpp"

namespace synss {

// Generator indices in every cooperations ring: base generators first
// (indices [0, nb)), then cooperation generators ([nb, nb+nc)). The doubled
// ring Γ⊗_AΓ has base generators, then leg-1 copies, then leg-2 copies; the
// tripled ring appends leg-3 copies. Base coefficients always sit on the left.
class HopfAlgebroid {
 public:
  static std::shared_ptr<const HopfAlgebroid> builtin(const std::string& name, int p, int n_max = 4);
  static const std::vector<std::string>& builtin_names();

  const std::string& name() const { return name_; }
  const std::string& id() const { return pres_->id(); }
  int prime() const { return p_; }
  int n_max() const { return n_max_; }
  bool synthetic() const { return name_ == "bp_synthetic"; }
  bool is_hopf_algebra() const { return nb_ == 0; }

  const PresentationPtr& presentation() const { return pres_; }
  const RingPtr& ring() const { return ring_; }
  const RingPtr& ring_q() const { return ring_q_; }
  const RingPtr& tensor_ring() const { return tensor_; }
  const RingPtr& triple_ring() const { return triple_; }
  int num_base() const { return nb_; }
  int num_coop() const { return nc_; }
  bool is_base(int g) const { return g < nb_; }
  int index(const std::string& gen) const { return pres_->require(gen); }

  // Rational l_n (BP presentations only).
  Polynomial log_generator(int n) const;

  Polynomial eta_R_gen(int g) const;
  Polynomial coproduct_gen(int g) const;
  Polynomial antipode_gen(int g) const;

  Polynomial eta_R(const Polynomial& x) const;
  Polynomial coproduct(const Polynomial& x) const;
  Polynomial antipode(const Polynomial& x) const;
  Polynomial counit(const Polynomial& x) const;
  // x ⊗ 1 and 1 ⊗ x in the doubled ring.
  Polynomial left_leg(const Polynomial& x) const;
  Polynomial right_leg(const Polynomial& x) const;

  // Map a doubled-ring monomial to (base part, leg-1 part, leg-2 part) in Γ indices.
  struct Split {
    Monomial base, left, right;
  };
  Split split_tensor(const Monomial& m) const;

  // [a|b] notation for doubled-ring polynomials.
  std::string format_tensor(const Polynomial& x) const;

  nlohmann::json to_json() const;

  // Copy with one coproduct image replaced (negative controls).
  std::shared_ptr<HopfAlgebroid> with_coproduct(const std::string& gen, const Polynomial& image) const;

  HopfAlgebroid(const HopfAlgebroid& o);

 private:
  HopfAlgebroid() = default;
  void build_bp(bool synthetic);
  void build_steenrod(const std::string& which);
  void build_graded(bool with_lambda);
  void build_tensor_rings();
  void compute_bp_maps() const;
  void compute_graded_maps() const;
  void compute_steenrod_maps() const;
  void ensure() const;
  Polynomial q_of(const Polynomial& x) const;

  std::string name_;
  int p_ = 2;
  int n_max_ = 4;
  int nb_ = 0, nc_ = 0;
  PresentationPtr pres_;
  RingPtr ring_, ring_q_, tensor_, tensor_q_, triple_;
  std::vector<std::string> steenrod_kind_;

  mutable std::once_flag once_;
  mutable std::mutex mu_;
  mutable std::vector<Polynomial> eta_, delta_, anti_;
  mutable std::vector<Polynomial> logs_;
};

using HopfPtr = std::shared_ptr<const HopfAlgebroid>;

// Right (module leg first) or left (coalgebra leg first) comodule algebra over
// a Hopf algebroid, given by the coaction on module-ring generators.
struct ComoduleSpec {
  enum class Side { Left, Right };
  std::string coalgebra_id;
  Side side = Side::Right;
  PresentationPtr module;  // polynomial generators of the comodule algebra
  struct Term {
    Coefficient coef;
    Monomial module_part;  // in module generators
    Monomial coalg_part;   // in coalgebra Γ indices
  };
  std::vector<std::vector<Term>> coaction;  // per module generator

  std::string format(int gen, const HopfAlgebroid& h) const;
  nlohmann::json to_json(const HopfAlgebroid& h) const;
};

// Associated graded of bp_synthetic for the J-adic filtration: returns the
// graded_novikov_lambda algebroid and the coaction on Gr(BP_*) read off from
// the J-filtration-exactly-one part of the synthetic right unit.
struct AssociatedGraded {
  HopfPtr graded;
  ComoduleSpec comodule;
};
AssociatedGraded associated_graded(const HopfAlgebroid& synthetic);

// Counit, coassociativity, antipode and homogeneity on generators of t <= t_max.
std::vector<std::string> verify_hopf_axioms(const HopfAlgebroid& h, int t_max);

// Validates a comodule spec against its coalgebra (counit and coassociativity).
std::vector<std::string> verify_comodule(const ComoduleSpec& m, const HopfAlgebroid& h);

// Even subalgebra P_* = F_2[ζ_i^2] as a left A_*-comodule algebra.
ComoduleSpec even_subalgebra_comodule(const HopfAlgebroid& steenrod);

}  // namespace synss
