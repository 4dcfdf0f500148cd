#include "synss/algebra.hpp"

#include <algorithm>
#include <climits>
#include <sstream>
#include <unordered_map>

namespace synss {

const char* to_string(CoefMode m) {
  switch (m) {
    case CoefMode::Fp: return "F_p";
    case CoefMode::Zp: return "Z_(p)";
    case CoefMode::Q: return "Q";
  }
  return "?";
}

// ---------------------------------------------------------------- Coefficient

Coefficient::Coefficient(const mpz_class& num, const mpz_class& den) : v_(num, den) {
  if (den == 0) throw std::domain_error("zero denominator");
  v_.canonicalize();
}

int Coefficient::valuation(int p) const {
  if (is_zero()) return INT32_MAX;
  int v = 0;
  mpz_class n = v_.get_num(), d = v_.get_den();
  while (mpz_divisible_ui_p(n.get_mpz_t(), p)) { n /= p; ++v; }
  while (mpz_divisible_ui_p(d.get_mpz_t(), p)) { d /= p; --v; }
  return v;
}

bool Coefficient::is_p_integral(int p) const {
  return !mpz_divisible_ui_p(v_.get_den().get_mpz_t(), p);
}

uint64_t Coefficient::mod_pk(int p, uint64_t pk) const {
  if (!is_p_integral(p)) throw IntegralityError("coefficient " + str() + " is not p-integral");
  mpz_class m(std::to_string(pk));
  mpz_class num = v_.get_num() % m;
  if (num < 0) num += m;
  mpz_class inv;
  if (!mpz_invert(inv.get_mpz_t(), v_.get_den().get_mpz_t(), m.get_mpz_t()))
    throw IntegralityError("denominator not invertible mod p^k");
  mpz_class r = (num * inv) % m;
  return std::stoull(r.get_str());
}

uint32_t Coefficient::mod_p(int p) const {
  return static_cast<uint32_t>(mod_pk(p, static_cast<uint64_t>(p)));
}

std::string Coefficient::str() const { return v_.get_str(); }

Coefficient pow_int(long base, int e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(std::labs(base)), e);
  if (base < 0 && (e & 1)) r = -r;
  return Coefficient(mpq_class(r));
}

// ---------------------------------------------------------------- MultiDegree

MultiDegree MultiDegree::operator+(const MultiDegree& o) const {
  MultiDegree r{f + o.f, t + o.t, w + o.w, std::nullopt};
  if (u || o.u) r.u = u.value_or(0) + o.u.value_or(0);
  return r;
}

MultiDegree MultiDegree::operator-(const MultiDegree& o) const { return *this + o.scaled(-1); }

MultiDegree MultiDegree::scaled(int k) const {
  MultiDegree r{f * k, t * k, w * k, std::nullopt};
  if (u) r.u = *u * k;
  return r;
}

bool MultiDegree::operator==(const MultiDegree& o) const {
  return f == o.f && t == o.t && w == o.w && u == o.u;
}

std::string MultiDegree::str() const {
  std::ostringstream os;
  os << "(f=" << f;
  if (u) os << ",u=" << *u;
  os << ",t=" << t << ",w=" << w << ")";
  return os.str();
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<Entry> e) {
  std::sort(e.begin(), e.end());
  for (auto& [g, x] : e) {
    if (!e_.empty() && e_.back().first == g) e_.back().second += x;
    else e_.push_back({g, x});
  }
  std::erase_if(e_, [](const Entry& en) { return en.second == 0; });
}

Monomial Monomial::gen(int index, int exp) {
  Monomial m;
  if (exp != 0) m.e_.push_back({static_cast<uint16_t>(index), exp});
  return m;
}

int Monomial::exponent(int index) const {
  auto it = std::lower_bound(e_.begin(), e_.end(), Entry{static_cast<uint16_t>(index), INT32_MIN});
  return (it != e_.end() && it->first == index) ? it->second : 0;
}

int Monomial::total_exponent() const {
  int s = 0;
  for (auto& en : e_) s += en.second;
  return s;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.e_.reserve(e_.size() + o.e_.size());
  size_t i = 0, j = 0;
  while (i < e_.size() || j < o.e_.size()) {
    if (j == o.e_.size() || (i < e_.size() && e_[i].first < o.e_[j].first)) r.e_.push_back(e_[i++]);
    else if (i == e_.size() || o.e_[j].first < e_[i].first) r.e_.push_back(o.e_[j++]);
    else {
      int x = e_[i].second + o.e_[j].second;
      if (x != 0) r.e_.push_back({e_[i].first, x});
      ++i, ++j;
    }
  }
  return r;
}

Monomial Monomial::pow(int k) const {
  Monomial r;
  if (k == 0) return r;
  r.e_ = e_;
  for (auto& en : r.e_) en.second *= k;
  return r;
}

bool Monomial::divisible_by(const Monomial& d) const {
  for (auto& [g, x] : d.e_)
    if (x > 0 && exponent(g) < x) return false;
  return true;
}

Monomial Monomial::divided(const Monomial& d) const { return *this * d.pow(-1); }

Monomial Monomial::with_exponent(int index, int exp) const {
  std::vector<Entry> e = e_;
  std::erase_if(e, [&](const Entry& en) { return en.first == index; });
  if (exp != 0) e.push_back({static_cast<uint16_t>(index), exp});
  return Monomial(std::move(e));
}

size_t Monomial::hash() const {
  size_t h = 1469598103934665603ull;
  for (auto& [g, x] : e_) {
    h ^= (static_cast<size_t>(g) << 32) ^ static_cast<uint32_t>(x);
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------- Presentation

Presentation::Presentation(std::string id, int p, std::vector<Generator> gens,
                           std::vector<Rewrite> rules)
    : id_(std::move(id)), p_(p), gens_(std::move(gens)), rules_(std::move(rules)) {
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(gens_[i].name, i).second)
      throw PresentationMismatch("duplicate generator " + gens_[i].name);
  }
}

int Presentation::index_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int Presentation::require(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw PresentationMismatch("generator '" + name + "' not in presentation " + id_);
  return i;
}

bool Presentation::odd_exterior(int i) const {
  const auto& g = gens_[i];
  return p_ != 2 && g.kind == GenKind::Exterior && (g.deg.t & 1);
}

MultiDegree monomial_degree(const Monomial& m, const Presentation& pres) {
  MultiDegree d;
  for (auto& [g, x] : m.entries()) {
    if (g >= pres.size())
      throw PresentationMismatch("generator id " + std::to_string(g) + " not in " + pres.id());
    d = d + pres.gen(g).deg.scaled(x);
  }
  return d;
}

bool Ring::same(const Ring& o) const {
  return pres->id() == o.pres->id() && mode == o.mode && laurent == o.laurent &&
         extra_rules.size() == o.extra_rules.size();
}

RingPtr make_ring(PresentationPtr pres, CoefMode mode) {
  auto r = std::make_shared<Ring>();
  r->pres = std::move(pres);
  r->mode = mode;
  return r;
}

// ---------------------------------------------------------------- normal form

namespace {

bool laurent_gen(const Ring& ring, int g) {
  return std::find(ring.laurent.begin(), ring.laurent.end(), g) != ring.laurent.end();
}

const Rewrite& rule_at(const Ring& ring, int k) {
  int n = static_cast<int>(ring.pres->rules().size());
  return k < n ? ring.pres->rules()[k] : ring.extra_rules[k - n];
}

int rule_count(const Ring& ring) {
  return static_cast<int>(ring.pres->rules().size() + ring.extra_rules.size());
}

bool finish_term(const Ring& ring, const Monomial& m, Coefficient& c) {
  const auto& pres = *ring.pres;
  for (auto& [g, x] : m.entries()) {
    if (x < 0 && !laurent_gen(ring, g))
      throw PresentationMismatch("negative exponent on non-Laurent generator " + pres.gen(g).name);
    if (x >= 2 && pres.gen(g).kind == GenKind::Exterior) return false;
  }
  if (ring.mode == CoefMode::Fp) {
    c = Coefficient(static_cast<long>(c.mod_p(ring.prime())));
  } else if (ring.mode == CoefMode::Zp && !c.is_p_integral(ring.prime())) {
    throw IntegralityError("coefficient " + c.str() + " leaves Z_(p)");
  }
  return !c.is_zero();
}

// Koszul sign of the product a*b when odd exterior generators are commuted
// past each other into index order.
int koszul_sign(const Monomial& a, const Monomial& b, const Presentation& pres) {
  if (pres.prime() == 2) return 1;
  int swaps = 0;
  for (auto& [ga, xa] : a.entries()) {
    if (!pres.odd_exterior(ga) || !(xa & 1)) continue;
    for (auto& [gb, xb] : b.entries())
      if (gb < ga && pres.odd_exterior(gb) && (xb & 1)) ++swaps;
  }
  return (swaps & 1) ? -1 : 1;
}

struct OrderKey {
  int t;
  int len;
  std::vector<int> seq;
};

OrderKey order_key(const Monomial& m, const Presentation& pres) {
  OrderKey k{0, 0, {}};
  for (auto& [g, x] : m.entries()) {
    k.t += pres.gen(g).deg.t * x;
    k.len += x;
    for (int i = 0; i < x; ++i) k.seq.push_back(g);
  }
  return k;
}

bool key_less(const OrderKey& a, const OrderKey& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.len != b.len) return a.len < b.len;
  return a.seq > b.seq;
}

}  // namespace

bool normalize_term_ordered(const Ring& ring, Monomial& m, Coefficient& c,
                            const std::vector<int>& rule_order) {
  if (c.is_zero()) return false;
  for (bool changed = true; changed;) {
    changed = false;
    for (int k : rule_order) {
      const Rewrite& r = rule_at(ring, k);
      if (!m.divisible_by(r.lhs)) continue;
      if (r.coef.is_zero()) return false;
      m = m.divided(r.lhs) * r.rhs;
      c = c * r.coef;
      changed = true;
      break;
    }
  }
  return finish_term(ring, m, c);
}

bool normalize_term(const Ring& ring, Monomial& m, Coefficient& c) {
  int n = rule_count(ring);
  if (n == 0) {
    if (c.is_zero()) return false;
    return finish_term(ring, m, c);
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  return normalize_term_ordered(ring, m, c, order);
}

bool canonical_less(const Monomial& a, const Monomial& b, const Presentation& pres) {
  OrderKey ka = order_key(a, pres), kb = order_key(b, pres);
  if (key_less(ka, kb)) return true;
  if (key_less(kb, ka)) return false;
  return a < b;
}

// ---------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(RingPtr ring, const Coefficient& c) {
  return monomial(std::move(ring), Monomial(), c);
}

Polynomial Polynomial::monomial(RingPtr ring, const Monomial& m, const Coefficient& c) {
  return from_terms(std::move(ring), {{m, c}});
}

Polynomial Polynomial::generator(RingPtr ring, const std::string& name, int exp) {
  int g = ring->pres->require(name);
  return monomial(std::move(ring), Monomial::gen(g, exp));
}

Polynomial Polynomial::from_terms(RingPtr ring, std::vector<Term> terms) {
  Polynomial p(std::move(ring));
  p.terms_ = std::move(terms);
  p.normalize();
  return p;
}

void Polynomial::normalize() {
  if (!ring_) {
    if (!terms_.empty()) throw PresentationMismatch("polynomial without a ring");
    return;
  }
  std::unordered_map<Monomial, Coefficient, MonomialHash> acc;
  acc.reserve(terms_.size() * 2);
  for (auto& t : terms_) {
    Monomial m = t.mono;
    Coefficient c = t.coef;
    if (!normalize_term(*ring_, m, c)) continue;
    auto [it, fresh] = acc.emplace(m, c);
    if (!fresh) it->second = it->second + c;
  }
  const auto& pres = *ring_->pres;
  std::vector<std::pair<OrderKey, Term>> keyed;
  keyed.reserve(acc.size());
  for (auto& [m, c] : acc) {
    Coefficient cc = c;
    if (ring_->mode == CoefMode::Fp) cc = Coefficient(static_cast<long>(cc.mod_p(ring_->prime())));
    if (cc.is_zero()) continue;
    keyed.push_back({order_key(m, pres), Term{m, cc}});
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (key_less(a.first, b.first)) return true;
    if (key_less(b.first, a.first)) return false;
    return a.second.mono < b.second.mono;
  });
  terms_.clear();
  terms_.reserve(keyed.size());
  for (auto& kt : keyed) terms_.push_back(std::move(kt.second));
}

Coefficient Polynomial::coefficient_of(const Monomial& m) const {
  for (auto& t : terms_)
    if (t.mono == m) return t.coef;
  return Coefficient(0);
}

namespace {

const RingPtr& common_ring(const Polynomial& a, const Polynomial& b) {
  if (!a.ring()) return b.ring();
  if (!b.ring()) return a.ring();
  if (a.ring() != b.ring() && !a.ring()->same(*b.ring())) {
    if (a.ring()->pres->id() != b.ring()->pres->id())
      throw PresentationMismatch("presentation mismatch: " + a.ring()->pres->id() + " vs " +
                                 b.ring()->pres->id());
    throw PresentationMismatch(std::string("coefficient-mode mismatch: ") +
                               to_string(a.ring()->mode) + " vs " + to_string(b.ring()->mode));
  }
  return a.ring();
}

}  // namespace

Polynomial Polynomial::operator+(const Polynomial& o) const {
  const RingPtr& r = common_ring(*this, o);
  if (!r) return Polynomial();
  std::vector<Term> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return from_terms(r, std::move(t));
}

Polynomial Polynomial::operator-() const { return scaled(Coefficient(-1)); }

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::scaled(const Coefficient& c) const {
  if (!ring_) return *this;
  std::vector<Term> t = terms_;
  for (auto& x : t) x.coef = x.coef * c;
  return from_terms(ring_, std::move(t));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  const RingPtr& r = common_ring(*this, o);
  if (!r || is_zero() || o.is_zero()) return Polynomial(r);
  const auto& pres = *r->pres;
  std::unordered_map<Monomial, Coefficient, MonomialHash> acc;
  acc.reserve(terms_.size() * o.terms_.size());
  for (auto& a : terms_)
    for (auto& b : o.terms_) {
      Monomial m = a.mono * b.mono;
      Coefficient c = a.coef * b.coef;
      if (koszul_sign(a.mono, b.mono, pres) < 0) c = -c;
      auto [it, fresh] = acc.emplace(std::move(m), c);
      if (!fresh) it->second = it->second + c;
    }
  std::vector<Term> t;
  t.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (!c.is_zero()) t.push_back({m, c});
  return from_terms(r, std::move(t));
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw std::domain_error("negative polynomial power");
  Polynomial result = constant(ring_, 1), base = *this;
  while (k) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

bool Polynomial::operator==(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return is_zero() && o.is_zero();
  common_ring(*this, o);
  if (terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].mono != o.terms_[i].mono || terms_[i].coef != o.terms_[i].coef) return false;
  return true;
}

std::vector<MultiDegree> Polynomial::term_degrees() const {
  std::vector<MultiDegree> d;
  for (auto& t : terms_) d.push_back(monomial_degree(t.mono, *ring_->pres));
  return d;
}

bool Polynomial::is_homogeneous() const {
  auto d = term_degrees();
  for (auto& x : d)
    if (x != d.front()) return false;
  return true;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }

// ---------------------------------------------------------------- text form

std::string format_monomial(const Monomial& m, const Presentation& pres) {
  std::string s;
  for (auto& [g, x] : m.entries()) {
    if (!s.empty()) s += '*';
    s += pres.gen(g).name;
    if (x != 1) s += '^' + std::to_string(x);
  }
  return s;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    bool neg = t.coef.sign() < 0;
    Coefficient a = neg ? -t.coef : t.coef;
    if (i == 0) s += neg ? "-" : "";
    else s += neg ? " - " : " + ";
    std::string mono = format_monomial(t.mono, *ring_->pres);
    if (mono.empty()) s += a.str();
    else if (a.is_one()) s += mono;
    else s += a.str() + "*" + mono;
  }
  return s;
}

namespace {

struct Parser {
  const std::string& s;
  const RingPtr& ring;
  size_t i = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(i) + " in '" + s + "'");
  }
  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) { ++i; return true; }
    return false;
  }
  mpz_class integer() {
    skip();
    size_t b = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (b == i) fail("expected integer");
    return mpz_class(s.substr(b, i - b));
  }
  static bool name_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '*' &&
           c != '^' && c != '/';
  }
  // One factor of a term: a number or NAME[^[-]INT].
  void factor(Monomial& m, Coefficient& c) {
    skip();
    if (i >= s.size()) fail("unexpected end");
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      mpz_class n = integer(), d = 1;
      if (eat('/')) d = integer();
      if (d == 0) fail("zero denominator");
      c = c * Coefficient(n, d);
      return;
    }
    size_t b = i;
    while (i < s.size() && name_char(s[i])) ++i;
    if (b == i) fail("expected factor");
    std::string name = s.substr(b, i - b);
    int g = ring->pres->index_of(name);
    if (g < 0) fail("unknown generator '" + name + "'");
    int e = 1;
    if (eat('^')) {
      bool neg = eat('-');
      e = static_cast<int>(integer().get_si());
      if (neg) e = -e;
    }
    m = m * Monomial::gen(g, e);
  }
  Polynomial::Term term(bool neg) {
    Monomial m;
    Coefficient c = neg ? -1 : 1;
    factor(m, c);
    while (eat('*')) factor(m, c);
    return {m, c};
  }
  Polynomial run() {
    std::vector<Polynomial::Term> terms;
    bool neg = eat('-');
    terms.push_back(term(neg));
    for (;;) {
      skip();
      if (i >= s.size()) break;
      if (eat('+')) terms.push_back(term(false));
      else if (eat('-')) terms.push_back(term(true));
      else fail("expected '+' or '-'");
    }
    return Polynomial::from_terms(ring, std::move(terms));
  }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, RingPtr ring) {
  return Parser{text, ring}.run();
}

// ---------------------------------------------------------------- maps

namespace {

// Inverse of a unit monomial c*m in a ring where m's generators are Laurent.
Polynomial invert_monomial(const Polynomial& x) {
  if (x.size() != 1) throw PresentationMismatch("cannot invert a non-monomial image");
  const auto& t = x.terms().front();
  for (auto& [g, e] : t.mono.entries())
    if (!laurent_gen(*x.ring(), g))
      throw PresentationMismatch("cannot invert generator " + x.ring()->pres->gen(g).name);
  return Polynomial::monomial(x.ring(), t.mono.pow(-1), Coefficient(1) / t.coef);
}

// p-adic inverse of g through a rule g*k -> c: g^-1 = k / c.
std::optional<Polynomial> rule_inverse(const RingPtr& target, int g) {
  for (auto& r : target->pres->rules()) {
    if (r.lhs.exponent(g) != 1 || r.lhs.entries().size() != 2 || !r.rhs.is_one()) continue;
    if (r.coef.is_zero()) continue;
    Monomial k = r.lhs.without(g);
    return Polynomial::monomial(target, k, Coefficient(1) / r.coef);
  }
  return std::nullopt;
}

}  // namespace

Polynomial substitute(const Polynomial& x, RingPtr target,
                      const std::map<int, Polynomial>& images) {
  if (x.is_zero()) return Polynomial(target);
  const auto& spres = *x.ring()->pres;
  std::map<int, Polynomial> img = images;
  std::map<std::pair<int, int>, Polynomial> powers;
  auto image_of = [&](int g) -> const Polynomial& {
    auto it = img.find(g);
    if (it == img.end()) {
      int tg = target->pres->require(spres.gen(g).name);
      it = img.emplace(g, Polynomial::monomial(target, Monomial::gen(tg))).first;
    }
    return it->second;
  };
  auto power_of = [&](int g, int e) -> const Polynomial& {
    auto key = std::make_pair(g, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    Polynomial base = image_of(g);
    if (e < 0) base = invert_monomial(base);
    return powers.emplace(key, base.pow(std::abs(e))).first->second;
  };
  std::vector<Polynomial::Term> acc;
  for (auto& t : x.terms()) {
    Polynomial prod = Polynomial::constant(target, t.coef);
    for (auto& [g, e] : t.mono.entries()) prod = prod * power_of(g, e);
    acc.insert(acc.end(), prod.terms().begin(), prod.terms().end());
  }
  return Polynomial::from_terms(target, std::move(acc));
}

Polynomial change_mode(const Polynomial& x, RingPtr target) {
  if (x.is_zero()) return Polynomial(target);
  const auto& spres = *x.ring()->pres;
  std::map<int, Polynomial> images;
  std::vector<Polynomial::Term> acc;
  for (auto& t : x.terms()) {
    Polynomial prod = Polynomial::constant(std::make_shared<Ring>(Ring{target->pres, CoefMode::Q, {}, {}}), t.coef);
    RingPtr qr = prod.ring();
    for (auto& [g, e] : t.mono.entries()) {
      int tg = target->pres->require(spres.gen(g).name);
      if (e < 0 && !laurent_gen(*target, tg)) {
        auto inv = rule_inverse(qr, tg);
        if (!inv) throw IntegralityError("cannot clear negative power of " + spres.gen(g).name);
        prod = prod * inv->pow(-e);
      } else {
        prod = prod * Polynomial::monomial(qr, Monomial::gen(tg, e));
      }
    }
    for (auto& pt : prod.terms()) {
      if (target->mode != CoefMode::Q && !pt.coef.is_p_integral(target->prime()))
        throw IntegralityError("term " + pt.coef.str() + "*" + format_monomial(pt.mono, *target->pres) +
                               " is not p-integral");
      acc.push_back(pt);
    }
  }
  return Polynomial::from_terms(target, std::move(acc));
}

Polynomial reduce_mod(const Polynomial& a, const IdealSpec& ideal) {
  if (a.is_zero()) return a;
  const RingPtr& ring = a.ring();
  const auto& pres = *ring->pres;
  std::vector<int> gens;
  for (auto& n : ideal.generators) gens.push_back(pres.require(n));
  std::optional<int> pk = ideal.p_power;
  // A rule g*k -> p*unit with g in the ideal puts p in the ideal as well.
  for (auto& r : pres.rules()) {
    if (!r.rhs.is_one() || r.coef.valuation(pres.prime()) != 1) continue;
    for (int g : gens)
      if (r.lhs.exponent(g) > 0) pk = 1;
  }
  RingPtr out = ring;
  if (pk && *pk <= 1 && ring->mode != CoefMode::Fp) out = make_ring(ring->pres, CoefMode::Fp);
  std::vector<Polynomial::Term> terms;
  for (auto& t : a.terms()) {
    bool killed = false;
    for (int g : gens)
      if (t.mono.exponent(g) > 0) killed = true;
    if (killed) continue;
    Coefficient c = t.coef;
    if (pk && *pk > 1) {
      uint64_t m = 1;
      for (int i = 0; i < *pk; ++i) m *= pres.prime();
      c = Coefficient(static_cast<long>(c.mod_pk(pres.prime(), m)));
    }
    terms.push_back({t.mono, c});
  }
  return Polynomial::from_terms(out, std::move(terms));
}

Polynomial localize_lambda(const Polynomial& a, RingPtr classical) {
  if (a.is_zero()) return Polynomial(classical);
  const auto& spres = *a.ring()->pres;
  std::map<int, Polynomial> images;
  int L = spres.index_of("L"), h = spres.index_of("h");
  if (L >= 0) images.emplace(L, Polynomial::constant(classical, 1));
  if (h >= 0) images.emplace(h, Polynomial::constant(classical, spres.prime()));
  return substitute(a, classical, images);
}

}  // namespace synss
