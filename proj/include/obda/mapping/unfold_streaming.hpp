#pragma once

#include <string>
#include <vector>

#include "obda/mapping/ir.hpp"
#include "obda/mapping/mapping.hpp"
#include "obda/starql/ast.hpp"

namespace obda {

/// HAVING clause of a validated query in relational form. Every GRAPH i+k
/// triple becomes the union, over its stream mappings and the streams they
/// apply to, of Slice -> Select -> Project; patterns of one state are joined
/// on shared variables and the index, conjunctions join, comparisons become
/// Compute filters, NOT an anti-join, and EXISTS/FORALL group the states by
/// the variables visible outside them. Patterns binding a static column are
/// semi-joined with the static answers (Filter).
///
/// A stream mapping whose source names a stream of the query applies to that
/// stream only; any other source name applies to every stream.
ir::PlanNode unfold_streaming(const starql::StarqlQuery& q, const MappingSet& m,
                              const std::vector<std::string>& static_columns);

}  // namespace obda
