#pragma once

// Relational / stream algebra shared by mapping bodies and compiled plans.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obda/ontology/model.hpp"

namespace obda::ir {

/// Raw: uninterpreted table text. Individual / Value: ontology-level objects
/// and data values. Time: milliseconds. Index: position in a state sequence.
enum class ColumnType { Raw, Individual, Value, Time, Index, Boolean };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Raw;
  bool operator==(const Column&) const = default;
};

/// Either a column reference or a literal written in the mapping file.
struct Operand {
  bool is_column = true;
  std::string text;
  bool operator==(const Operand&) const = default;
};

struct Condition {
  std::string column;
  CmpOp op = CmpOp::Eq;
  Operand rhs;
  bool operator==(const Condition&) const = default;
};

struct ProjectItem {
  std::string output;
  Operand source;
  ColumnType type = ColumnType::Raw;
  bool operator==(const ProjectItem&) const = default;
};

struct SliceParams {
  std::string stream;
  std::string index;          // sequence index variable, e.g. "i"
  std::int64_t offset = 0;    // GRAPH i+offset
  std::int64_t range_ms = 0;
  std::int64_t slide_ms = 0;
  std::string strategy;
  std::int64_t setback_ms = 0;
  bool operator==(const SliceParams&) const = default;
};

/// Scalar expression over the columns of one row (Compute) or over the series
/// of a group (Quantify conditions, where calls like pearson(y, z) aggregate).
struct ScalarExpr {
  enum class Kind { Column, Number, Call, Arith, Negate, Compare, And, Or, Not };
  Kind kind = Kind::Number;
  std::string name;  // column, or canonical function name
  char op = '+';     // Arith
  CmpOp cmp = CmpOp::Eq;
  double number = 0;
  std::vector<ScalarExpr> args;
  bool operator==(const ScalarExpr&) const = default;
};

std::string to_string(const ScalarExpr& e);
/// pearson, cosine, avg, min, max, sum, count.
bool is_aggregate_function(const std::string& name);

/// Sensor whose window holds the values of an aggregated series variable: a
/// literal sensor id or a group column.
struct SeriesSource {
  std::string variable;
  Operand sensor;
  bool operator==(const SeriesSource&) const = default;
};

enum class NodeKind {
  Scan,         // table; columns read
  Select,       // conditions over the child
  Project,      // items
  Join,         // natural join on `keys`
  Union,        // set union of children with identical schemas
  GroupHaving,  // group_by; fn(value) cmp threshold
  Slice,        // stream slice for one state of the sequence
  Compute,      // row filter, exprs[0]
  Quantify,     // EXISTS / FORALL (detail) over index `value` of sequence `table`, grouped by `keys`
  Combine,      // left rows without a match in right on `keys` (NOT)
  Filter        // semi-join with the static answers on `keys`
};

struct PlanNode {
  NodeKind kind = NodeKind::Scan;
  std::string label;                // mapping label (sql1, ...) or empty
  std::string table;                // Scan
  std::vector<Condition> conditions;  // Select
  std::vector<ProjectItem> items;   // Project
  std::vector<std::string> keys;    // Join
  std::string group_by;             // GroupHaving
  std::string value;                // GroupHaving
  AggFn fn = AggFn::Min;
  CmpOp cmp = CmpOp::Ge;
  Rational threshold;
  SliceParams slice;                // Slice
  std::string detail;               // Quantify
  std::vector<ScalarExpr> exprs;    // Compute predicate; optional Quantify condition
  std::vector<SeriesSource> series; // Quantify
  std::vector<Column> columns;      // output schema
  std::vector<PlanNode> children;

  bool operator==(const PlanNode&) const = default;
};

PlanNode scan(std::string table, std::vector<std::string> raw_columns, std::string label = {});
PlanNode select(PlanNode child, std::vector<Condition> conditions);
PlanNode project(PlanNode child, std::vector<ProjectItem> items);
/// Natural join: keys are the column names both sides share.
PlanNode join(PlanNode left, PlanNode right);
/// Nested unions are flattened and duplicate branches collapse; a single
/// remaining branch is returned as is.
PlanNode union_of(std::vector<PlanNode> children);
PlanNode group_having(PlanNode child, std::string group_by, std::string value, AggFn fn, CmpOp cmp, Rational threshold);

/// Columns: index (named params.index), sid, sval, time.
PlanNode slice(SliceParams params);
PlanNode compute(PlanNode child, ScalarExpr predicate);
PlanNode quantify(PlanNode child, bool forall, std::string index, std::string sequence, std::vector<std::string> keys,
                  std::optional<ScalarExpr> condition, std::vector<SeriesSource> series = {});
PlanNode anti_join(PlanNode left, PlanNode right);
PlanNode static_filter(PlanNode child, std::vector<std::string> keys);

/// Indented rendering, one operator per line.
std::string explain(const PlanNode& n, int indent = 0);
std::string to_string(ColumnType t);

struct PlanIssue {
  std::string message;
};

/// Structural checks: referenced columns exist with the right types, union
/// branches agree, aggregate inputs are values, Slice only when `streaming`.
std::vector<PlanIssue> validate_plan(const PlanNode& n, bool streaming);

/// Scan tables referenced anywhere in the plan.
std::vector<std::string> scanned_tables(const PlanNode& n);

}  // namespace obda::ir
