#pragma once

// DL-Lite_A ontology vocabulary extended with aggregate concepts, datasets of
// ground assertions, and conjunctive queries over that vocabulary.

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "obda/common/rational.hpp"

namespace obda {

/// Element of the object domain. Names starting with "_:" are labeled nulls
/// produced by the chase; they never come from user input.
struct Individual {
  std::string name;

  bool is_null() const { return name.rfind("_:", 0) == 0; }
  std::strong_ordering operator<=>(const Individual&) const = default;
  bool operator==(const Individual&) const = default;
};

struct Role {
  std::string name;
  bool inverse = false;

  Role inverted() const { return Role{name, !inverse}; }
  std::strong_ordering operator<=>(const Role&) const = default;
  bool operator==(const Role&) const = default;
};

enum class ConceptKind { Atomic, ExistsRole, ExistsAttribute };

/// Extended concept C: an atomic name A, an unqualified existential on a role
/// (\exists R) or on an attribute (\exists F). Basic concepts are the first two.
struct Concept {
  ConceptKind kind = ConceptKind::Atomic;
  std::string name;
  bool inverse = false;  // only meaningful for ExistsRole

  static Concept atomic(std::string name) { return {ConceptKind::Atomic, std::move(name), false}; }
  static Concept exists(const Role& r) { return {ConceptKind::ExistsRole, r.name, r.inverse}; }
  static Concept exists_attribute(std::string name) { return {ConceptKind::ExistsAttribute, std::move(name), false}; }

  bool is_basic() const { return kind != ConceptKind::ExistsAttribute; }
  Role role() const { return Role{name, inverse}; }

  std::strong_ordering operator<=>(const Concept&) const = default;
  bool operator==(const Concept&) const = default;
};

enum class AggFn { Min, Max, Count, CountDistinct, Sum, Avg };
enum class CmpOp { Ge, Le, Lt, Gt, Eq, Ne };

/// \circ_r(agg F): individuals whose F-value multiset aggregates to something
/// that compares against the threshold.
struct AggregateConcept {
  AggFn fn = AggFn::Min;
  CmpOp cmp = CmpOp::Ge;
  Rational threshold;
  std::string attribute;

  std::strong_ordering operator<=>(const AggregateConcept&) const = default;
  bool operator==(const AggregateConcept&) const = default;
};

struct ConceptInclusion {
  Concept sub;
  Concept sup;
  bool operator==(const ConceptInclusion&) const = default;
};
struct AggregateInclusion {
  AggregateConcept sub;
  Concept sup;
  bool operator==(const AggregateInclusion&) const = default;
};
struct RoleInclusion {
  Role sub;
  Role sup;
  bool operator==(const RoleInclusion&) const = default;
};
struct AttributeInclusion {
  std::string sub;
  std::string sup;
  bool operator==(const AttributeInclusion&) const = default;
};
struct FunctionalRole {
  Role role;
  bool operator==(const FunctionalRole&) const = default;
};
struct FunctionalAttribute {
  std::string attribute;
  bool operator==(const FunctionalAttribute&) const = default;
};
struct ConceptDisjointness {
  Concept first;
  Concept second;
  bool operator==(const ConceptDisjointness&) const = default;
};
struct RoleDisjointness {
  Role first;
  Role second;
  bool operator==(const RoleDisjointness&) const = default;
};
struct AttributeDisjointness {
  std::string first;
  std::string second;
  bool operator==(const AttributeDisjointness&) const = default;
};

using Axiom = std::variant<ConceptInclusion, AggregateInclusion, RoleInclusion, AttributeInclusion, FunctionalRole,
                           FunctionalAttribute, ConceptDisjointness, RoleDisjointness, AttributeDisjointness>;

enum class PredicateKind { Concept, Role, Attribute };

/// Names known to the system, each tagged with the kind of predicate it denotes.
class Vocabulary {
 public:
  void add(PredicateKind kind, const std::string& name);
  std::optional<PredicateKind> kind_of(const std::string& name) const;
  bool contains(PredicateKind kind, const std::string& name) const;
  void merge(const Vocabulary& other);

  const std::set<std::string>& concepts() const { return concepts_; }
  const std::set<std::string>& roles() const { return roles_; }
  const std::set<std::string>& attributes() const { return attributes_; }

 private:
  std::set<std::string> concepts_;
  std::set<std::string> roles_;
  std::set<std::string> attributes_;
};

class Ontology {
 public:
  Ontology() = default;
  explicit Ontology(std::vector<Axiom> axioms) : axioms_(std::move(axioms)) {}

  void add(Axiom axiom) { axioms_.push_back(std::move(axiom)); }
  const std::vector<Axiom>& axioms() const { return axioms_; }
  bool empty() const { return axioms_.empty(); }

  Vocabulary vocabulary() const;

  /// Attributes F' with F' \sqsubseteq^* F, starting with F itself, in breadth-first order.
  std::vector<std::string> sub_attributes(const std::string& attribute) const;

 private:
  std::vector<Axiom> axioms_;
};

struct ConceptAssertion {
  std::string concept_name;
  Individual individual;
  std::strong_ordering operator<=>(const ConceptAssertion&) const = default;
  bool operator==(const ConceptAssertion&) const = default;
};

struct RoleAssertion {
  std::string role;
  Individual subject;
  Individual object;
  std::strong_ordering operator<=>(const RoleAssertion&) const = default;
  bool operator==(const RoleAssertion&) const = default;
};

struct AttributeAssertion {
  std::string attribute;
  Individual subject;
  Rational value;
  std::strong_ordering operator<=>(const AttributeAssertion&) const = default;
  bool operator==(const AttributeAssertion&) const = default;
};

/// Ground assertions with set semantics.
struct Dataset {
  std::set<ConceptAssertion> concepts;
  std::set<RoleAssertion> roles;
  std::set<AttributeAssertion> attributes;

  bool add(ConceptAssertion a) { return concepts.insert(std::move(a)).second; }
  bool add(RoleAssertion a) { return roles.insert(std::move(a)).second; }
  bool add(AttributeAssertion a) { return attributes.insert(std::move(a)).second; }

  std::size_t size() const { return concepts.size() + roles.size() + attributes.size(); }
  bool empty() const { return size() == 0; }
  std::set<Individual> individuals() const;
  bool contains_all(const Dataset& other) const;

  bool operator==(const Dataset&) const = default;
};

/// A variable, the anonymous variable "_", an individual constant or a data value.
struct Term {
  enum class Kind { Variable, Individual, Value };

  Kind kind = Kind::Variable;
  std::string name;
  Rational value;

  static Term variable(std::string name) { return {Kind::Variable, std::move(name), {}}; }
  static Term anonymous() { return {Kind::Variable, "_", {}}; }
  static Term individual(std::string name) { return {Kind::Individual, std::move(name), {}}; }
  static Term data(Rational v) { return {Kind::Value, {}, std::move(v)}; }

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_anonymous() const { return kind == Kind::Variable && name == "_"; }
  bool is_constant() const { return kind != Kind::Variable; }

  std::strong_ordering operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

enum class AtomKind { Concept, Aggregate, Role, Attribute };

struct Atom {
  AtomKind kind = AtomKind::Concept;
  std::string predicate;                       // concept/role/attribute name; empty for aggregate atoms
  std::optional<AggregateConcept> aggregate;   // set iff kind == Aggregate
  std::vector<Term> args;

  static Atom concept_atom(std::string name, Term t) { return {AtomKind::Concept, std::move(name), std::nullopt, {std::move(t)}}; }
  static Atom role_atom(std::string name, Term s, Term o) {
    return {AtomKind::Role, std::move(name), std::nullopt, {std::move(s), std::move(o)}};
  }
  static Atom attribute_atom(std::string name, Term s, Term v) {
    return {AtomKind::Attribute, std::move(name), std::nullopt, {std::move(s), std::move(v)}};
  }
  static Atom aggregate_atom(AggregateConcept e, Term t) { return {AtomKind::Aggregate, {}, std::move(e), {std::move(t)}}; }

  bool same_predicate(const Atom& other) const {
    return kind == other.kind && predicate == other.predicate && aggregate == other.aggregate;
  }

  std::strong_ordering operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

/// q(head) :- atoms. Head terms are variables, or constants after unification.
struct ConjunctiveQuery {
  std::vector<Term> head;
  std::vector<Atom> atoms;

  std::strong_ordering operator<=>(const ConjunctiveQuery&) const = default;
  bool operator==(const ConjunctiveQuery&) const = default;
};

struct UnionOfCQs {
  std::vector<std::string> head_names;  // output column names, from the input query's head
  std::vector<ConjunctiveQuery> disjuncts;
};

/// Ground value an answer position binds to.
using Constant = Term;
using AnswerTuple = std::vector<Constant>;

bool compare(const Rational& lhs, CmpOp op, const Rational& rhs);

std::string to_string(const Role& r);
std::string to_string(const Concept& c);
std::string to_string(AggFn fn);
std::string to_string(CmpOp op);
std::string to_string(const AggregateConcept& e);
std::string to_string(const Axiom& a);
std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const ConjunctiveQuery& q);

std::optional<AggFn> parse_agg_fn(std::string_view s);
std::optional<CmpOp> parse_cmp_op(std::string_view s);

}  // namespace obda
