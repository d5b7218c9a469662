#pragma once

// rewrite -> unfold -> evaluate over the dataset loaded as a table, with
// identity mappings for the whole random-instance vocabulary.

#include <set>

#include "obda/mapping/mapping.hpp"
#include "obda/mapping/relational.hpp"
#include "obda/mapping/unfold.hpp"
#include "obda/rewrite/rewriter.hpp"

namespace obda::testing {

inline Vocabulary instance_vocabulary(const Ontology& o, const Dataset& d, const ConjunctiveQuery& q) {
  Vocabulary v = o.vocabulary();
  for (const auto& a : d.concepts) v.add(PredicateKind::Concept, a.concept_name);
  for (const auto& a : d.roles) v.add(PredicateKind::Role, a.role);
  for (const auto& a : d.attributes) v.add(PredicateKind::Attribute, a.attribute);
  for (const auto& a : q.atoms) {
    if (a.kind == AtomKind::Concept) v.add(PredicateKind::Concept, a.predicate);
    if (a.kind == AtomKind::Role) v.add(PredicateKind::Role, a.predicate);
    if (a.kind == AtomKind::Attribute) v.add(PredicateKind::Attribute, a.predicate);
    if (a.kind == AtomKind::Aggregate) v.add(PredicateKind::Attribute, a.aggregate->attribute);
  }
  return v;
}

inline std::set<AnswerTuple> answers_via_unfold(const ConjunctiveQuery& q, const Ontology& o, const Dataset& d) {
  MappingSet m = identity_mappings(instance_vocabulary(o, d, q));
  TableStore tables;
  tables.add("dataset", dataset_table(d));
  return to_answers(evaluate(unfold_static(rewrite(q, o), m, o), tables));
}

}  // namespace obda::testing
