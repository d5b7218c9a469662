#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obda/mapping/ir.hpp"
#include "obda/mapping/mapping.hpp"
#include "obda/ontology/model.hpp"
#include "obda/starql/ast.hpp"

namespace obda::starql {

struct ExecutablePlan {
  StarqlQuery query;
  /// Head of the WHERE query: WHERE variables that the output or HAVING use.
  std::vector<std::string> static_columns;
  std::optional<ConjunctiveQuery> static_query;
  std::optional<UnionOfCQs> static_rewriting;
  std::optional<ir::PlanNode> static_plan;
  std::optional<ir::PlanNode> stream_plan;
  /// SELECT variables, or the template subjects of CONSTRUCT, in order.
  std::vector<std::string> output_columns;
};

/// WHERE triples as a conjunctive query over o's and m's vocabulary.
ConjunctiveQuery where_query(const StarqlQuery& q, const Vocabulary& vocab, const std::vector<std::string>& head);

/// Validates, rewrites the WHERE part and unfolds both parts. Throws
/// obda::Error on invalid queries and unmapped predicates.
ExecutablePlan compile(const StarqlQuery& q, const Ontology& o, const MappingSet& m);

/// Deterministic text of a compiled plan.
std::string explain(const ExecutablePlan& p);

}  // namespace obda::starql
