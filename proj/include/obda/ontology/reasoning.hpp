#pragma once

#include <set>
#include <string>
#include <vector>

#include "obda/ontology/model.hpp"

namespace obda {

struct OntologyViolation {
  std::string rule;                  // e.g. "funct-role-inclusion"
  std::vector<std::size_t> axioms;   // indices into Ontology::axioms()
  std::string message;
};

struct ValidationReport {
  std::vector<OntologyViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the syntactic restrictions that keep query answering tractable:
/// no inclusion into a functional role or attribute, no \exists F on the right
/// of an inclusion, basic concepts only in disjointness, one kind per name.
ValidationReport validate_ontology(const Ontology& o);

/// Throws obda::Error describing every violation.
void require_valid(const Ontology& o);

/// Saturates `d` under the positive axioms, over the individuals already in
/// `d` (no labeled nulls are introduced). Attribute assertions are closed
/// first; aggregate inclusions then fire on the closed attribute relation.
Dataset deductive_closure(const Dataset& d, const Ontology& o);

/// Extension of a basic concept or attribute existential in `d`, without reasoning.
std::set<Individual> concept_members(const Concept& c, const Dataset& d);

/// Members of `e` given an instance whose attribute relation is already closed.
std::set<Individual> aggregate_members(const AggregateConcept& e, const Dataset& closed);

/// Members of `e` over the closure of `d`. Individuals without any value for
/// the attribute are never members.
std::set<Individual> eval_aggregate_concept(const AggregateConcept& e, const Dataset& d, const Ontology& o);

/// agg over a non-empty multiset of values.
Rational aggregate_value(AggFn fn, const std::vector<Rational>& values);

struct SatisfiabilityViolation {
  std::string axiom;                   // offending axiom in ontology syntax
  std::vector<std::string> witnesses;  // assertions (or anonymous elements) that clash
};

struct SatisfiabilityReport {
  bool satisfiable = true;
  std::vector<SatisfiabilityViolation> violations;
};

/// Checks disjointness and functionality against the closure, including the
/// types forced on anonymous role successors.
SatisfiabilityReport check_satisfiability(const Ontology& o, const Dataset& d);

/// Basic concepts (and attribute existentials) entailed by `c` under the
/// concept, role and attribute inclusions of `o`; includes `c` itself.
std::set<Concept> implied_concepts(const Concept& c, const Ontology& o);

/// Roles entailed by `r`; includes `r` itself.
std::set<Role> implied_roles(const Role& r, const Ontology& o);

}  // namespace obda
