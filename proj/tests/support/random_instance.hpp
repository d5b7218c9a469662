#pragma once

// Small random ontologies, datasets and queries for property tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "obda/ontology/model.hpp"
#include "obda/ontology/reasoning.hpp"

namespace obda::testing {

struct RandomInstance {
  Ontology ontology;
  Dataset data;
  ConjunctiveQuery query;
};

struct InstanceShape {
  int max_axioms = 8;
  int max_individuals = 6;
  int attributes = 3;
  int aggregates = 2;
  int max_assertions = 12;
  int max_atoms = 3;
};

class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed, InstanceShape shape = {}) : rng_(seed), shape_(shape) {
    for (int i = 0; i < shape_.attributes; ++i) attributes_.push_back("F" + std::to_string(i + 1));
  }

  RandomInstance next() {
    for (;;) {
      RandomInstance inst;
      make_aggregates();
      int n_axioms = uniform(0, shape_.max_axioms);
      for (int i = 0; i < n_axioms; ++i) inst.ontology.add(axiom());
      if (!validate_ontology(inst.ontology).ok()) continue;
      int n_ind = uniform(1, shape_.max_individuals);
      int n_assert = uniform(0, shape_.max_assertions);
      for (int i = 0; i < n_assert; ++i) assertion(inst.data, n_ind);
      inst.query = query(n_ind);
      return inst;
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))]; }
  bool coin() { return uniform(0, 1) == 1; }

  Rational value() {
    static const std::vector<Rational> values{Rational(0), Rational(1, 2), Rational(1), Rational(2)};
    return pick(values);
  }

  void make_aggregates() {
    aggregates_.clear();
    static const std::vector<AggFn> fns{AggFn::Min, AggFn::Max, AggFn::Count, AggFn::CountDistinct, AggFn::Sum, AggFn::Avg};
    static const std::vector<CmpOp> cmps{CmpOp::Ge, CmpOp::Le, CmpOp::Lt, CmpOp::Gt, CmpOp::Eq, CmpOp::Ne};
    for (int i = 0; i < shape_.aggregates; ++i)
      aggregates_.push_back(AggregateConcept{pick(fns), pick(cmps), value(), pick(attributes_)});
  }

  Role role() { return Role{pick(roles_), coin()}; }

  Concept basic() {
    switch (uniform(0, 2)) {
      case 0: return Concept::atomic(pick(concepts_));
      default: return Concept::exists(role());
    }
  }

  Axiom axiom() {
    switch (uniform(0, 9)) {
      case 0:
      case 1: return ConceptInclusion{Concept::atomic(pick(concepts_)), Concept::atomic(pick(concepts_))};
      case 2: return ConceptInclusion{Concept::exists(role()), Concept::atomic(pick(concepts_))};
      case 3: return ConceptInclusion{Concept::exists_attribute(pick(attributes_)), Concept::atomic(pick(concepts_))};
      case 4: return ConceptInclusion{basic(), Concept::exists(role())};
      case 5: return RoleInclusion{role(), role()};
      case 6: return AttributeInclusion{pick(attributes_), pick(attributes_)};
      case 7: return AggregateInclusion{pick(aggregates_), Concept::atomic(pick(concepts_))};
      case 8: return AggregateInclusion{pick(aggregates_), basic()};
      default: return ConceptInclusion{basic(), basic()};
    }
  }

  Individual individual(int n) { return Individual{std::string(1, static_cast<char>('a' + uniform(0, n - 1)))}; }

  void assertion(Dataset& d, int n) {
    switch (uniform(0, 2)) {
      case 0: d.add(ConceptAssertion{pick(concepts_), individual(n)}); break;
      case 1: d.add(RoleAssertion{pick(roles_), individual(n), individual(n)}); break;
      default: d.add(AttributeAssertion{pick(attributes_), individual(n), value()}); break;
    }
  }

  Term object_term(int n) {
    static const std::vector<std::string> vars{"x", "y", "z"};
    if (uniform(0, 7) == 0) return Term::individual(individual(n).name);
    if (uniform(0, 6) == 0) return Term::anonymous();
    return Term::variable(pick(vars));
  }

  ConjunctiveQuery query(int n) {
    for (;;) {
      ConjunctiveQuery q;
      int atoms = uniform(1, shape_.max_atoms);
      for (int i = 0; i < atoms; ++i) {
        switch (uniform(0, 3)) {
          case 0: q.atoms.push_back(Atom::concept_atom(pick(concepts_), object_term(n))); break;
          case 1: q.atoms.push_back(Atom::role_atom(pick(roles_), object_term(n), object_term(n))); break;
          case 2: {
            Term v = uniform(0, 2) == 0 ? Term::data(value()) : Term::variable("v" + std::to_string(i));
            q.atoms.push_back(Atom::attribute_atom(pick(attributes_), object_term(n), v));
            break;
          }
          default: q.atoms.push_back(Atom::aggregate_atom(pick(aggregates_), object_term(n))); break;
        }
      }
      // answer variables: a nonempty subset of the object variables used
      std::vector<std::string> used;
      for (const auto& a : q.atoms)
        if (a.args[0].is_variable() && !a.args[0].is_anonymous()) used.push_back(a.args[0].name);
      for (const auto& a : q.atoms)
        if (a.kind == AtomKind::Role && a.args[1].is_variable() && !a.args[1].is_anonymous()) used.push_back(a.args[1].name);
      std::sort(used.begin(), used.end());
      used.erase(std::unique(used.begin(), used.end()), used.end());
      if (used.empty()) continue;
      for (const auto& v : used)
        if (q.head.empty() || coin()) q.head.push_back(Term::variable(v));
      // occasionally answer a value variable too
      for (const auto& a : q.atoms)
        if (a.kind == AtomKind::Attribute && a.args[1].is_variable() && uniform(0, 3) == 0) q.head.push_back(a.args[1]);
      return q;
    }
  }

  std::mt19937_64 rng_;
  InstanceShape shape_;
  std::vector<std::string> concepts_{"A", "B", "C"};
  std::vector<std::string> roles_{"P", "Q"};
  std::vector<std::string> attributes_;
  std::vector<AggregateConcept> aggregates_;
};

}  // namespace obda::testing
