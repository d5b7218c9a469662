#pragma once

#include "obda/mapping/ir.hpp"
#include "obda/mapping/mapping.hpp"
#include "obda/ontology/model.hpp"

namespace obda {

/// Each disjunct becomes the join of its atoms' mapping bodies (one plan per
/// combination of mapping alternatives), aggregate atoms become
/// build_aggregate_query plans, and everything is unioned and projected onto
/// the answer columns. Throws obda::Error naming the predicate and disjunct
/// when an atom has no mapping.
ir::PlanNode unfold_static(const UnionOfCQs& u, const MappingSet& m, const Ontology& o);

/// SELECT x FROM SQL_F(x,y) GROUP BY x HAVING agg(y) cmp r, where SQL_F is the
/// union of the mappings of every F' \sqsubseteq^* F. Built fresh on every call.
ir::PlanNode build_aggregate_query(const AggregateConcept& e, const MappingSet& m, const Ontology& o);

}  // namespace obda
