// Event-sourced deduction sessions over spectral-sequence charts: classes,
// products, differentials, Leibniz propagation, hidden extensions and the
// comparison maps i and q between the charts of S and S/λ.
#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "synss/bockstein.hpp"

namespace synss {

struct DeductionError : std::runtime_error {
  std::string code;  // degree_mismatch, dead_source, conflict, unknown_class, invalid, replay
  DeductionError(std::string c, const std::string& what) : std::runtime_error(what), code(std::move(c)) {}
};

// (stem, filtration, weight). λ = (0,0,-1), h = (0,0,1).
struct ChartDegree {
  int stem = 0, f = 0, w = 0;
  auto operator<=>(const ChartDegree&) const = default;
  ChartDegree operator+(const ChartDegree& o) const { return {stem + o.stem, f + o.f, w + o.w}; }
  std::string str() const;
};
inline constexpr ChartDegree kLambdaDegree{0, 0, -1};

enum class ChartKind { ANSS_S, ANSS_SModLambda, aNSS, CESS };
std::string to_string(ChartKind k);
ChartKind chart_kind_from(const std::string& s);
// Degree shift of a page-r differential on a chart of this kind.
ChartDegree differential_shift(ChartKind k, int r);

enum class Provenance { Imported, Asserted, Leibniz, QMap };
std::string to_string(Provenance p);
Provenance provenance_from(const std::string& s);

enum class ExtKind { TwoH, Alpha1, Alpha22, Lambda };
std::string to_string(ExtKind k);
ExtKind ext_kind_from(const std::string& s);
std::string multiplier_of(ExtKind k);  // "h", "alpha_1", "alpha_{2/2}", "lambda"

// coef · λ^k · class
struct Term {
  int coef = 1;
  int k = 0;
  std::string name;
  auto operator<=>(const Term&) const = default;
};

// F_p-combination of λ-multiples of basis classes; kept sorted by (name, k).
struct Element {
  std::vector<Term> terms;
  bool zero() const { return terms.empty(); }
  bool operator==(const Element&) const = default;
  std::string str() const;
  // "x", "lambda x", "lambda^2 x + x'", "2 x" (terms separated by " + ").
  static Element parse(const std::string& s);
  static Element of(const std::string& name, int k = 0) { return Element{{{1, k, name}}}; }
  int min_lambda() const;
};

struct ClassEntry {
  std::string name;
  ChartDegree deg;
  int torsion = 0;  // E_2 λ-torsion exponent, 0 = λ-free
  bool permanent = false;
  std::optional<std::string> expr;  // carried through imports of classical data
};

struct FactBase {
  std::string id;
  Provenance provenance = Provenance::Asserted;
  std::string cite;
  std::vector<std::string> parents;  // fact ids, or "<session>:<id>" for facts of a linked session
};

// m · x = result
struct Relation : FactBase {
  std::string m, x;
  Element result;
};

struct Differential : FactBase {
  int r = 2;
  std::string source;
  Element target;
};

struct HiddenExtension : FactBase {
  ExtKind kind = ExtKind::TwoH;
  std::string source;
  Element target;
  std::string level = "Einf";  // "E2" or "Einf"
};

// q(source) = value; source on an S/λ chart, value on the chart of S.
struct QRecord : FactBase {
  std::string source;
  Element value;
};

struct Task {
  std::string kind;  // non-unique division, unknown product, no solution, ambiguous lambda division, conflict
  std::string text;
  std::vector<std::string> facts;
  bool operator==(const Task&) const = default;
};

struct PropagationReport {
  std::vector<std::string> derived;  // new fact ids, in emission order
  std::vector<Task> tasks;
  std::vector<std::string> conflicts;
};

struct ConsistencyReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

// Read-only external Ext table, e.g. Ext_{A_*}: dims by (stem, s) and products m·x = y
// in its own naming (h_0, h_1, ...).
struct ComparisonTarget {
  struct Product {
    std::string m, x, y;
    std::optional<std::pair<int, int>> x_deg, y_deg;  // (stem, s), used to list candidates
  };
  std::string name;
  std::map<std::pair<int, int>, int> dims;
  std::vector<Product> products;
  static ComparisonTarget from_ext_table(const ExtTable& t);
  static ComparisonTarget read_jsonl(std::istream& in);
};

class Session {
 public:
  Session(std::string id, ChartKind kind, int p = 2);
  // Rebuild from an event log; every recorded outcome is re-derived and compared.
  static Session replay(std::istream& log);
  static Session replay_file(const std::string& path);

  const std::string& id() const { return id_; }
  ChartKind kind() const { return kind_; }
  int prime() const { return p_; }

  // Mutations. Each validates, logs one event and returns the new fact id
  // (empty when the call was a no-op repetition of a known fact).
  void add_class(const std::string& name, ChartDegree deg, int torsion = 0,
                 const std::optional<std::string>& expr = std::nullopt);
  void add_alias(const std::string& alias, const std::string& name);
  std::string add_relation(const std::string& m, const std::string& x, const Element& result,
                           Provenance prov = Provenance::Imported, const std::string& cite = "");
  std::string assert_permanent(const std::string& name, Provenance prov = Provenance::Asserted,
                               const std::string& cite = "");
  std::string assert_differential(int r, const std::string& source, const Element& target,
                                  Provenance prov = Provenance::Asserted, const std::string& cite = "",
                                  const std::vector<std::string>& parents = {});
  std::string assert_hidden_extension(ExtKind kind, const std::string& source, const Element& target,
                                      const std::string& level = "Einf", Provenance prov = Provenance::Asserted,
                                      const std::string& cite = "", const std::vector<std::string>& parents = {});
  std::string record_q_value(const std::string& source, const Element& value, Provenance prov = Provenance::Imported,
                             const std::string& cite = "");
  PropagationReport propagate_leibniz();
  // Apply one event given as JSON (the wire form used by the log and the service).
  nlohmann::json apply_event(const nlohmann::json& ev);

  // Queries.
  std::string resolve(const std::string& name) const;  // alias → canonical; throws unknown_class
  bool has_class(const std::string& name) const;
  const ClassEntry& cls(const std::string& name) const;
  const std::map<std::string, ClassEntry>& classes() const { return classes_; }
  const std::vector<std::string>& class_order() const { return class_order_; }
  const std::map<std::string, std::string>& aliases() const { return aliases_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const std::vector<Differential>& differentials() const { return diffs_; }
  const std::vector<HiddenExtension>& extensions() const { return exts_; }
  const std::vector<QRecord>& q_values() const { return qvals_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const Differential* differential_from(const std::string& source) const;
  std::string status(const std::string& name) const;  // alive, source, target
  bool alive_at_einf(const std::string& name) const;
  int einf_torsion(const std::string& name) const;  // 0 = λ-free at E_∞
  ChartDegree degree(const Element& e) const;       // throws unless homogeneous
  Element normalize(Element e) const;
  std::optional<Element> product(const std::string& m, const Element& e, std::vector<std::string>* used = nullptr,
                                 std::string* missing = nullptr) const;
  // Collapse at E_N: no differential of page >= N and no open tasks.
  bool collapses_by(int page) const;
  int last_page() const;  // largest r among recorded differentials (1 if none)
  std::vector<std::string> provenance_chain(const std::string& fact) const;
  // λ^j·c in degree d that are d_r-cycles on E_r and not known d_r-boundaries; d_r-boundaries
  // are indeterminacy of the source. `pending` counts as recorded.
  std::vector<Term> page_candidates(const ChartDegree& d, int r, const std::vector<Differential>& pending = {}) const;
  ConsistencyReport check_consistency(const Session* quotient = nullptr) const;

  // Serialization.
  const std::vector<nlohmann::json>& log() const { return log_; }
  std::string log_text() const;
  void write_log(const std::string& path) const;
  nlohmann::json export_chart() const;  // schema "synss.chart/1"

 private:
  std::string id_;
  ChartKind kind_;
  int p_;
  int next_fact_ = 1;
  std::map<std::string, ClassEntry> classes_;
  std::vector<std::string> class_order_;
  std::map<std::string, std::string> aliases_;
  std::vector<Relation> relations_;
  std::vector<Differential> diffs_;
  std::vector<HiddenExtension> exts_;
  std::vector<QRecord> qvals_;
  std::vector<Task> tasks_;
  std::vector<FactBase> permanence_;
  std::map<std::string, std::string> permanent_fact_;  // class → fact id
  std::map<std::pair<std::string, std::string>, size_t> relation_index_;
  std::vector<nlohmann::json> log_;

  std::string new_fact() { return "F" + std::to_string(next_fact_++); }
  void log_event(nlohmann::json ev);
  Element resolve_element(const Element& e) const;
  void check_parents(const std::vector<std::string>& parents) const;
  const FactBase* fact(const std::string& id) const;
  std::string fact_summary(const std::string& id) const;
  std::string insert_differential(Differential d);
  std::string insert_extension(HiddenExtension x);
  bool is_permanent(const std::string& name) const;
  bool killed(const std::string& name, int* page = nullptr) const;
  PropagationReport run_propagation();
};

// Forced consequences of q being a module map: for each S/λ relation m·X = Y with
// recorded q(X), q(Y), checks m·q(X) = q(Y) on S; missing products become E_2 hidden
// extensions (proposals), contradictions are violations.
struct QModuleReport {
  int checked = 0;
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  std::vector<HiddenExtension> forced;
};
QModuleReport q_module_check(const Session& s, const Session& smod);

// Facts on the S/λ chart whose classes all have i-preimages of the same name on S.
struct TransferReport {
  std::vector<Differential> differentials;
  std::vector<HiddenExtension> extensions;
  std::vector<std::string> skipped;
  std::vector<Task> tasks;
};
TransferReport transfer_via_i(const Session& s, const Session& smod);

// Records proposals from q_module_check / transfer_via_i on s; returns the new fact ids.
std::vector<std::string> apply_forced(Session& s, const QModuleReport& r);
std::vector<std::string> apply_transfer(Session& s, const TransferReport& r);

struct ComparisonReport {
  struct Item {
    std::string product;  // "h_0 · h_0h_2 = h_1^3"
    std::string status;   // witnessed, recorded, unresolved, rejected
    std::string detail;
    std::vector<std::string> candidate_sources, candidate_targets;
  };
  std::vector<Item> items;
  std::vector<std::string> recorded;
};
// Compares chart products with the target's products (abutment = Ext of the target,
// filtration s = w - stem) and records hidden extensions that lack a chart witness.
ComparisonReport infer_hidden_from_comparison(Session& sess, const ComparisonTarget& target);

// Batch import of classical data (bockstein JSON lines) onto an aNSS chart, and back.
void import_classical(Session& sess, const ClassicalData& data);
ClassicalData export_classical(const Session& sess);

}  // namespace synss
