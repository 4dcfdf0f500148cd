// Exact multigraded polynomial arithmetic over F_p, Z_(p) and Q.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace synss {

struct PresentationMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IntegralityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CoefMode { Fp, Zp, Q };
const char* to_string(CoefMode m);

// Arbitrary-precision rational. The ring it lives in (F_p, Z_(p), Q) is
// carried by the owning polynomial; see Ring.
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(long n) : v_(n) {}
  Coefficient(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }
  Coefficient(const mpz_class& num, const mpz_class& den);

  const mpq_class& value() const { return v_; }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  int sign() const { return sgn(v_); }

  // p-adic valuation; INT32_MAX for zero.
  int valuation(int p) const;
  bool is_p_integral(int p) const;
  // Residue in [0,p); requires p-integrality.
  uint32_t mod_p(int p) const;
  // Residue modulo p^k as an unsigned 64-bit value (p^k < 2^63).
  uint64_t mod_pk(int p, uint64_t pk) const;

  std::string str() const;

  friend Coefficient operator+(const Coefficient& a, const Coefficient& b) { return Coefficient(mpq_class(a.v_ + b.v_)); }
  friend Coefficient operator-(const Coefficient& a, const Coefficient& b) { return Coefficient(mpq_class(a.v_ - b.v_)); }
  friend Coefficient operator*(const Coefficient& a, const Coefficient& b) { return Coefficient(mpq_class(a.v_ * b.v_)); }
  friend Coefficient operator/(const Coefficient& a, const Coefficient& b) { return Coefficient(mpq_class(a.v_ / b.v_)); }
  Coefficient operator-() const { return Coefficient(mpq_class(-v_)); }
  friend bool operator==(const Coefficient& a, const Coefficient& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Coefficient& a, const Coefficient& b) { return a.v_ != b.v_; }

 private:
  mpq_class v_{0};
};

Coefficient pow_int(long base, int e);

// (f, t, w[, u]); stem = t - f.
struct MultiDegree {
  int f = 0;
  int t = 0;
  int w = 0;
  std::optional<int> u;

  int stem() const { return t - f; }
  MultiDegree operator+(const MultiDegree& o) const;
  MultiDegree operator-(const MultiDegree& o) const;
  MultiDegree scaled(int k) const;
  bool operator==(const MultiDegree& o) const;
  bool operator!=(const MultiDegree& o) const { return !(*this == o); }
  std::string str() const;
};

enum class GenKind { Polynomial, Exterior };

struct Generator {
  std::string name;     // token used by the canonical text form
  MultiDegree deg;
  GenKind kind = GenKind::Polynomial;
};

// Sparse exponent vector, sorted by generator index, no zero exponents.
class Monomial {
 public:
  using Entry = std::pair<uint16_t, int32_t>;
  Monomial() = default;
  explicit Monomial(std::vector<Entry> e);
  static Monomial gen(int index, int exp = 1);

  const std::vector<Entry>& entries() const { return e_; }
  bool is_one() const { return e_.empty(); }
  int exponent(int index) const;
  int total_exponent() const;
  Monomial operator*(const Monomial& o) const;
  Monomial pow(int k) const;
  // True if every exponent of d is <= the matching exponent here (d >= 0).
  bool divisible_by(const Monomial& d) const;
  Monomial divided(const Monomial& d) const;
  Monomial with_exponent(int index, int exp) const;
  Monomial without(int index) const { return with_exponent(index, 0); }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return a.e_ != b.e_; }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.e_ < b.e_; }
  size_t hash() const;

 private:
  std::vector<Entry> e_;
};

struct MonomialHash {
  size_t operator()(const Monomial& m) const { return m.hash(); }
};

// lhs -> coef * rhs. A zero coefficient kills the monomial.
struct Rewrite {
  Monomial lhs;
  Coefficient coef;
  Monomial rhs;
};

// Multigraded commutative ring presentation: generators plus monomial rewrite
// rules. Immutable after construction; shared by pointer.
class Presentation {
 public:
  Presentation(std::string id, int p, std::vector<Generator> gens,
               std::vector<Rewrite> rules = {});

  const std::string& id() const { return id_; }
  int prime() const { return p_; }
  const std::vector<Generator>& gens() const { return gens_; }
  const std::vector<Rewrite>& rules() const { return rules_; }
  int size() const { return static_cast<int>(gens_.size()); }
  int index_of(const std::string& name) const;  // -1 if absent
  int require(const std::string& name) const;   // throws PresentationMismatch
  const Generator& gen(int i) const { return gens_.at(i); }
  bool odd_exterior(int i) const;

 private:
  std::string id_;
  int p_;
  std::vector<Generator> gens_;
  std::vector<Rewrite> rules_;
  std::map<std::string, int> index_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

MultiDegree monomial_degree(const Monomial& m, const Presentation& pres);

// Coefficient ring plus normal-form policy for one presentation.
struct Ring {
  PresentationPtr pres;
  CoefMode mode = CoefMode::Zp;
  // Extra rules used only in this ring (e.g. h -> p*L^-1 in the Q-stage).
  std::vector<Rewrite> extra_rules;
  // Generators allowed to carry negative exponents (Laurent variables).
  std::vector<int> laurent;

  int prime() const { return pres->prime(); }
  bool same(const Ring& o) const;
};
using RingPtr = std::shared_ptr<const Ring>;

RingPtr make_ring(PresentationPtr pres, CoefMode mode);

// Finite sum of coefficient * monomial in canonical order and normal form.
class Polynomial {
 public:
  struct Term {
    Monomial mono;
    Coefficient coef;
  };

  Polynomial() = default;
  explicit Polynomial(RingPtr ring) : ring_(std::move(ring)) {}
  static Polynomial constant(RingPtr ring, const Coefficient& c);
  static Polynomial monomial(RingPtr ring, const Monomial& m, const Coefficient& c = 1);
  static Polynomial generator(RingPtr ring, const std::string& name, int exp = 1);
  // Build from raw terms; normalizes.
  static Polynomial from_terms(RingPtr ring, std::vector<Term> terms);

  const RingPtr& ring() const { return ring_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  Coefficient coefficient_of(const Monomial& m) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Coefficient& c) const;
  Polynomial pow(int k) const;
  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  bool operator==(const Polynomial& o) const;
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  // Degrees of all terms; homogeneous iff all equal.
  std::vector<MultiDegree> term_degrees() const;
  bool is_homogeneous() const;

  std::string str() const;

 private:
  void normalize();
  RingPtr ring_;
  std::vector<Term> terms_;
};

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);

// Canonical order comparator (true if a precedes b).
bool canonical_less(const Monomial& a, const Monomial& b, const Presentation& pres);

// Apply the ring's rewrite rules to one term; returns false if it vanishes.
bool normalize_term(const Ring& ring, Monomial& m, Coefficient& c);

// Same as above but choosing applicable rules in a caller-given order
// (used to test confluence).
bool normalize_term_ordered(const Ring& ring, Monomial& m, Coefficient& c,
                            const std::vector<int>& rule_order);

// Canonical text form.
std::string format_monomial(const Monomial& m, const Presentation& pres);
Polynomial parse_polynomial(const std::string& text, RingPtr ring);

// Ring homomorphism given by generator images (missing entries map to themselves,
// which then requires the generator to exist in the target by name).
Polynomial substitute(const Polynomial& x, RingPtr target,
                      const std::map<int, Polynomial>& images);

// Change coefficient mode (e.g. Q -> Z_(p) with integrality assertion, Z_(p) -> F_p).
Polynomial change_mode(const Polynomial& x, RingPtr target);

// Ideal generated by a subset of generators and/or a power of p.
struct IdealSpec {
  std::vector<std::string> generators;
  std::optional<int> p_power;  // p^k in the ideal
};
Polynomial reduce_mod(const Polynomial& a, const IdealSpec& ideal);

// Synthetic BP -> classical BP: L -> 1, h -> p, single grading t.
Polynomial localize_lambda(const Polynomial& a, RingPtr classical);

}  // namespace synss
