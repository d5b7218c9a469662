#pragma once

#include <string>

#include "obda/ontology/model.hpp"

namespace obda {

/// Rewrites q backward through the positive inclusions of o (PerfectRef
/// style: atom rewriting plus reduction by most general unifiers) until no
/// new disjunct appears. Aggregate atoms are closed predicates and are never
/// rewritten; an inclusion E \sqsubseteq B only lets B(x) become E(x).
///
/// When `vocab` is given, every predicate of q must be declared there with the
/// arity it is used with, otherwise obda::Error names it.
UnionOfCQs rewrite(const ConjunctiveQuery& q, const Ontology& o, const Vocabulary* vocab = nullptr);

/// {F'(x,y) | F' \sqsubseteq^* F}, F itself first.
UnionOfCQs rewrite_attribute(const std::string& attribute, const Ontology& o, const Vocabulary* vocab = nullptr);

/// Non-answer variables occurring once become "_", duplicate atoms collapse,
/// remaining existential variables are renamed _e0, _e1, ... in an order fixed
/// by the atoms they occur in, and atoms are sorted. Two queries equal up to
/// such a renaming usually canonicalize to the same value.
ConjunctiveQuery canonicalize(const ConjunctiveQuery& q);

/// One disjunct per line.
std::string to_string(const UnionOfCQs& u);

}  // namespace obda
