#pragma once

#include <set>
#include <string>
#include <vector>

#include "obda/starql/ast.hpp"

namespace obda::starql {

/// Rules: time-variable-in-output, unbound-output-variable, unsafe-comparison,
/// unsafe-aggregate, unsafe-disjunction, unsupported-negation, kind-mixing,
/// unknown-sequence, unsupported-strategy, unknown-pulse, unknown-function,
/// function-arity, nested-aggregate, aggregate-outside-quantifier,
/// unbound-index, undeclared-prefix, nonpositive-duration, duplicate-stream,
/// variable-predicate, unsupported-template.
struct StarqlViolation {
  std::string rule;
  std::string variable;  // offending variable or name, may be empty
  std::string clause;    // WHERE, HAVING, SELECT, ...
  std::string message;
  SourcePos pos;
};

struct StarqlReport {
  std::vector<StarqlViolation> violations;
  bool ok() const { return violations.empty(); }
};

StarqlReport validate(const StarqlQuery& q);
/// Throws obda::Error listing every violation.
void require_valid(const StarqlQuery& q);
std::string to_string(const StarqlViolation& v);

/// Value variables of the WHERE pattern.
std::set<std::string> where_variables(const StarqlQuery& q);
/// Variables named by SELECT or by CONSTRUCT templates.
std::set<std::string> output_variables(const StarqlQuery& q);
/// Value variables used in the HAVING clause outside `node` (which must live
/// inside q.having), plus WHERE and output variables.
std::set<std::string> visible_outside(const StarqlQuery& q, const Expr& node);

}  // namespace obda::starql
