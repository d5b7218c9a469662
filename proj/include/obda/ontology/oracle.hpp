#pragma once

// Brute-force certain answers: bounded restricted chase, then homomorphic
// evaluation with aggregate atoms read as closed predicates. Meant for small
// instances and as ground truth in tests.

#include <set>
#include <vector>

#include "obda/ontology/model.hpp"
#include "obda/ontology/reasoning.hpp"

namespace obda {

struct ChaseResult {
  Dataset instance;        // closure plus labeled-null individuals "_:nK"
  bool exhausted = false;  // some existential was left unfired at the depth bound
};

/// Fires A \sqsubseteq \exists R style axioms (restricted: only when no R-successor
/// exists yet), re-saturating after every round. Nulls deeper than `max_depth`
/// are not created.
ChaseResult bounded_chase(const Dataset& d, const Ontology& o, int max_depth = 3);

/// Homomorphisms from q into `instance`. Aggregate atoms are matched against
/// aggregate_members over `attribute_source`, which must hold the closed
/// attribute relation. Tuples are returned as-is, nulls included.
std::set<AnswerTuple> evaluate_cq(const ConjunctiveQuery& q, const Dataset& instance, const Dataset& attribute_source);
std::set<AnswerTuple> evaluate_ucq(const UnionOfCQs& u, const Dataset& instance, const Dataset& attribute_source);

/// Evaluation of a rewriting directly over the raw assertions: atoms match
/// stored facts only, aggregate atoms use eval_aggregate_concept(e, d, o).
std::set<AnswerTuple> evaluate_over_raw(const UnionOfCQs& u, const Dataset& d, const Ontology& o);

enum class OracleStatus { Complete, DepthExhausted, Unsatisfiable };

struct OracleResult {
  OracleStatus status = OracleStatus::Complete;
  std::set<AnswerTuple> answers;  // null-free; empty when unsatisfiable
  SatisfiabilityReport satisfiability;
};

struct OracleOptions {
  int max_depth = 3;
};

OracleResult certain_answers_oracle(const ConjunctiveQuery& q, const Ontology& o, const Dataset& d, OracleOptions options = {});

std::string to_string(const AnswerTuple& t);
std::string to_string(OracleStatus s);

}  // namespace obda
