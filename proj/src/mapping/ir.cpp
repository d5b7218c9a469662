#include "obda/mapping/ir.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda::ir {

namespace {

const Column* find_column(const std::vector<Column>& cols, const std::string& name) {
  for (const auto& c : cols)
    if (c.name == name) return &c;
  return nullptr;
}

std::string operand_text(const Operand& o) {
  if (o.is_column) return o.text;
  if (parse_rational(o.text)) return o.text;
  return "'" + o.text + "'";
}

}  // namespace

PlanNode scan(std::string table, std::vector<std::string> raw_columns, std::string label) {
  PlanNode n;
  n.kind = NodeKind::Scan;
  n.table = std::move(table);
  n.label = std::move(label);
  for (auto& c : raw_columns) n.columns.push_back({std::move(c), ColumnType::Raw});
  return n;
}

PlanNode select(PlanNode child, std::vector<Condition> conditions) {
  PlanNode n;
  n.kind = NodeKind::Select;
  n.conditions = std::move(conditions);
  n.columns = child.columns;
  n.children.push_back(std::move(child));
  return n;
}

PlanNode project(PlanNode child, std::vector<ProjectItem> items) {
  PlanNode n;
  n.kind = NodeKind::Project;
  for (const auto& it : items) n.columns.push_back({it.output, it.type});
  n.items = std::move(items);
  n.children.push_back(std::move(child));
  return n;
}

PlanNode join(PlanNode left, PlanNode right) {
  PlanNode n;
  n.kind = NodeKind::Join;
  n.columns = left.columns;
  for (const auto& c : right.columns) {
    if (find_column(left.columns, c.name))
      n.keys.push_back(c.name);
    else
      n.columns.push_back(c);
  }
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}

PlanNode union_of(std::vector<PlanNode> children) {
  if (children.empty()) throw Error("union of no plans");
  std::vector<PlanNode> flat;
  std::set<std::string> seen;
  auto add = [&](PlanNode&& c) {
    if (seen.insert(explain(c)).second) flat.push_back(std::move(c));
  };
  for (auto& c : children) {
    if (c.kind == NodeKind::Union && c.label.empty()) {
      for (auto& g : c.children) add(std::move(g));
    } else {
      add(std::move(c));
    }
  }
  if (flat.size() == 1) return std::move(flat.front());
  PlanNode n;
  n.kind = NodeKind::Union;
  n.columns = flat.front().columns;
  n.children = std::move(flat);
  return n;
}

PlanNode group_having(PlanNode child, std::string group_by, std::string value, AggFn fn, CmpOp cmp, Rational threshold) {
  PlanNode n;
  n.kind = NodeKind::GroupHaving;
  const Column* g = find_column(child.columns, group_by);
  n.columns.push_back({group_by, g ? g->type : ColumnType::Individual});
  n.group_by = std::move(group_by);
  n.value = std::move(value);
  n.fn = fn;
  n.cmp = cmp;
  n.threshold = std::move(threshold);
  n.children.push_back(std::move(child));
  return n;
}

PlanNode slice(SliceParams params) {
  PlanNode n;
  n.kind = NodeKind::Slice;
  n.columns = {{params.index, ColumnType::Index}, {"sid", ColumnType::Raw}, {"sval", ColumnType::Value}, {"time", ColumnType::Time}};
  n.slice = std::move(params);
  return n;
}

PlanNode compute(PlanNode child, ScalarExpr predicate) {
  PlanNode n;
  n.kind = NodeKind::Compute;
  n.columns = child.columns;
  n.exprs.push_back(std::move(predicate));
  n.children.push_back(std::move(child));
  return n;
}

PlanNode quantify(PlanNode child, bool forall, std::string index, std::string sequence, std::vector<std::string> keys,
                  std::optional<ScalarExpr> condition, std::vector<SeriesSource> series) {
  PlanNode n;
  n.kind = NodeKind::Quantify;
  n.detail = forall ? "FORALL" : "EXISTS";
  n.value = std::move(index);
  n.table = std::move(sequence);
  for (const auto& k : keys) {
    const Column* c = find_column(child.columns, k);
    n.columns.push_back({k, c ? c->type : ColumnType::Raw});
  }
  n.keys = std::move(keys);
  if (condition) n.exprs.push_back(std::move(*condition));
  n.series = std::move(series);
  n.children.push_back(std::move(child));
  return n;
}

PlanNode anti_join(PlanNode left, PlanNode right) {
  PlanNode n;
  n.kind = NodeKind::Combine;
  n.columns = left.columns;
  for (const auto& c : right.columns)
    if (find_column(left.columns, c.name)) n.keys.push_back(c.name);
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  return n;
}

PlanNode static_filter(PlanNode child, std::vector<std::string> keys) {
  PlanNode n;
  n.kind = NodeKind::Filter;
  n.columns = child.columns;
  n.keys = std::move(keys);
  n.children.push_back(std::move(child));
  return n;
}

bool is_aggregate_function(const std::string& name) {
  static const std::set<std::string> names{"pearson", "cosine", "avg", "min", "max", "sum", "count"};
  return names.count(name) > 0;
}

std::string to_string(const ScalarExpr& e) {
  using K = ScalarExpr::Kind;
  switch (e.kind) {
    case K::Column: return e.name;
    case K::Number: return text::format_double(e.number);
    case K::Call: {
      std::vector<std::string> args;
      for (const auto& a : e.args) args.push_back(to_string(a));
      return e.name + "(" + text::join(args, ", ") + ")";
    }
    case K::Arith: return "(" + to_string(e.args[0]) + " " + e.op + " " + to_string(e.args[1]) + ")";
    case K::Negate: return "-" + to_string(e.args[0]);
    case K::Compare: return to_string(e.args[0]) + " " + obda::to_string(e.cmp) + " " + to_string(e.args[1]);
    case K::And: return "(" + to_string(e.args[0]) + " AND " + to_string(e.args[1]) + ")";
    case K::Or: return "(" + to_string(e.args[0]) + " OR " + to_string(e.args[1]) + ")";
    case K::Not: return "NOT " + to_string(e.args[0]);
  }
  return {};
}

std::string to_string(ColumnType t) {
  switch (t) {
    case ColumnType::Raw: return "raw";
    case ColumnType::Individual: return "individual";
    case ColumnType::Value: return "value";
    case ColumnType::Time: return "time";
    case ColumnType::Index: return "index";
    case ColumnType::Boolean: return "boolean";
  }
  return {};
}

std::string explain(const PlanNode& n, int indent) {
  std::string line(static_cast<std::size_t>(indent) * 2, ' ');
  switch (n.kind) {
    case NodeKind::Scan: {
      std::vector<std::string> cols;
      for (const auto& c : n.columns) cols.push_back(c.name);
      line += "Scan " + n.table + " (" + text::join(cols, ", ") + ")";
      break;
    }
    case NodeKind::Select: {
      std::vector<std::string> conds;
      for (const auto& c : n.conditions) conds.push_back(c.column + " " + obda::to_string(c.op) + " " + operand_text(c.rhs));
      line += "Select " + text::join(conds, " AND ");
      break;
    }
    case NodeKind::Project: {
      std::vector<std::string> items;
      for (const auto& it : n.items) items.push_back(it.output + " <- " + operand_text(it.source) + " : " + to_string(it.type));
      line += "Project " + text::join(items, ", ");
      break;
    }
    case NodeKind::Join: line += n.keys.empty() ? "Join cross" : "Join on " + text::join(n.keys, ", "); break;
    case NodeKind::Union: line += "Union"; break;
    case NodeKind::GroupHaving:
      line += "GroupHaving by " + n.group_by + ": " + obda::to_string(n.fn) + "(" + n.value + ") " + obda::to_string(n.cmp) +
              " " + format_rational(n.threshold);
      break;
    case NodeKind::Slice: {
      const auto& s = n.slice;
      std::string state = s.index + (s.offset > 0 ? "+" + std::to_string(s.offset) : s.offset < 0 ? std::to_string(s.offset) : "");
      line += "Slice " + s.stream + " state=" + state + " range=" + std::to_string(s.range_ms) + "ms slide=" +
              std::to_string(s.slide_ms) + "ms setback=" + std::to_string(s.setback_ms) + "ms strategy=" + s.strategy;
      break;
    }
    case NodeKind::Compute: line += "Compute " + (n.exprs.empty() ? std::string("?") : to_string(n.exprs[0])); break;
    case NodeKind::Quantify: {
      line += "Quantify " + n.detail + " " + n.value + " IN " + n.table + " by (" + text::join(n.keys, ", ") + ")";
      if (!n.exprs.empty()) line += " HAVING " + to_string(n.exprs[0]);
      std::vector<std::string> parts;
      for (const auto& s : n.series) parts.push_back(s.variable + " from " + operand_text(s.sensor));
      if (!parts.empty()) line += " series " + text::join(parts, ", ");
      break;
    }
    case NodeKind::Combine: line += "Combine NOT on (" + text::join(n.keys, ", ") + ")"; break;
    case NodeKind::Filter: line += "Filter static on (" + text::join(n.keys, ", ") + ")"; break;
  }
  if (!n.label.empty()) line += "  [" + n.label + "]";
  line += "\n";
  for (const auto& c : n.children) line += explain(c, indent + 1);
  return line;
}

namespace {

void collect_columns(const ScalarExpr& e, std::set<std::string>& out) {
  if (e.kind == ScalarExpr::Kind::Column) out.insert(e.name);
  for (const auto& a : e.args) collect_columns(a, out);
}

std::set<std::string> expr_columns(const ScalarExpr& e) {
  std::set<std::string> out;
  collect_columns(e, out);
  return out;
}

bool is_stream_node(NodeKind k) {
  return k == NodeKind::Slice || k == NodeKind::Compute || k == NodeKind::Quantify || k == NodeKind::Combine ||
         k == NodeKind::Filter;
}

void check(const PlanNode& n, bool streaming, std::vector<PlanIssue>& out) {
  auto issue = [&](const std::string& m) {
    PlanNode head = n;
    head.children.clear();
    out.push_back({m + " at '" + std::string(text::trim(explain(head))) + "'"});
  };
  for (const auto& c : n.children) check(c, streaming, out);

  std::set<std::string> names;
  for (const auto& c : n.columns)
    if (!names.insert(c.name).second) issue("duplicate column '" + c.name + "'");

  if (is_stream_node(n.kind) && !streaming) {
    issue("stream operator in a static plan");
    return;
  }
  const std::vector<Column> none;
  const auto& in = n.children.empty() ? none : n.children[0].columns;
  switch (n.kind) {
    case NodeKind::Scan:
      if (!n.children.empty()) issue("scan with inputs");
      break;
    case NodeKind::Select:
      if (n.children.size() != 1) issue("select needs one input");
      for (const auto& c : n.conditions) {
        if (!find_column(in, c.column)) issue("unknown column '" + c.column + "'");
        if (c.rhs.is_column && !find_column(in, c.rhs.text)) issue("unknown column '" + c.rhs.text + "'");
      }
      if (n.columns != in) issue("select changes the schema");
      break;
    case NodeKind::Project:
      if (n.children.size() != 1) issue("project needs one input");
      for (const auto& it : n.items) {
        if (!it.source.is_column) continue;
        const Column* src = find_column(in, it.source.text);
        if (!src) {
          issue("unknown column '" + it.source.text + "'");
        } else if (src->type != ColumnType::Raw && src->type != it.type) {
          issue("column '" + it.source.text + "' is " + to_string(src->type) + ", projected as " + to_string(it.type));
        }
      }
      break;
    case NodeKind::Join:
      if (n.children.size() != 2) {
        issue("join needs two inputs");
        break;
      }
      for (const auto& k : n.keys) {
        const Column* l = find_column(n.children[0].columns, k);
        const Column* r = find_column(n.children[1].columns, k);
        if (!l || !r) issue("join key '" + k + "' missing on one side");
        else if (l->type != r->type) issue("join key '" + k + "' has mismatched types");
      }
      break;
    case NodeKind::Union:
      if (n.children.size() < 2) issue("union needs two inputs");
      for (const auto& c : n.children)
        if (c.columns != n.columns) issue("union branches disagree on columns");
      break;
    case NodeKind::GroupHaving: {
      if (n.children.size() != 1) issue("group-having needs one input");
      const Column* g = find_column(in, n.group_by);
      const Column* v = find_column(in, n.value);
      if (!g) issue("unknown group column '" + n.group_by + "'");
      if (!v) issue("unknown aggregate column '" + n.value + "'");
      else if (v->type != ColumnType::Value) issue("aggregate over non-value column '" + n.value + "'");
      break;
    }
    case NodeKind::Slice:
      if (!n.children.empty()) issue("slice with inputs");
      break;
    case NodeKind::Compute:
      if (n.children.size() != 1 || n.exprs.size() != 1) {
        issue("compute needs one input and one predicate");
        break;
      }
      for (const auto& c : expr_columns(n.exprs[0]))
        if (!find_column(in, c)) issue("unknown column '" + c + "'");
      break;
    case NodeKind::Quantify: {
      if (n.children.size() != 1) {
        issue("quantifier needs one input");
        break;
      }
      const Column* idx = find_column(in, n.value);
      if (!idx || idx->type != ColumnType::Index) issue("quantified index '" + n.value + "' is not an index column");
      for (const auto& k : n.keys)
        if (!find_column(in, k)) issue("unknown group column '" + k + "'");
      for (const auto& e : n.exprs)
        for (const auto& c : expr_columns(e))
          if (!find_column(in, c)) issue("unknown column '" + c + "'");
      break;
    }
    case NodeKind::Combine:
      if (n.children.size() != 2) {
        issue("negation needs two inputs");
        break;
      }
      for (const auto& k : n.keys)
        if (!find_column(n.children[0].columns, k) || !find_column(n.children[1].columns, k))
          issue("negation key '" + k + "' missing on one side");
      break;
    case NodeKind::Filter:
      if (n.children.size() != 1) issue("filter needs one input");
      for (const auto& k : n.keys)
        if (!find_column(in, k)) issue("unknown filter column '" + k + "'");
      break;
  }
}

}  // namespace

std::vector<PlanIssue> validate_plan(const PlanNode& n, bool streaming) {
  std::vector<PlanIssue> out;
  check(n, streaming, out);
  return out;
}

std::vector<std::string> scanned_tables(const PlanNode& n) {
  std::vector<std::string> out;
  if (n.kind == NodeKind::Scan) out.push_back(n.table);
  if (n.kind == NodeKind::Slice) out.push_back(n.slice.stream);
  for (const auto& c : n.children) {
    auto more = scanned_tables(c);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

}  // namespace obda::ir
