#include "obda/mapping/relational.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "obda/common/csv.hpp"
#include "obda/common/error.hpp"
#include "obda/common/text.hpp"
#include "obda/ontology/reasoning.hpp"

namespace obda {

const Table& TableStore::get(const std::string& name) const {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw Error("no table named '" + name + "'");
  return it->second;
}

std::vector<std::string> TableStore::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : tables_) out.push_back(k);
  return out;
}

namespace {

bool is_dataset_row(const std::vector<std::string>& fields) {
  return fields.size() == 4 && (fields[0] == "concept" || fields[0] == "role" || fields[0] == "attr");
}

Table load_table(const std::filesystem::path& path) {
  auto records = csv::read_file(path);
  Table t;
  if (records.empty()) throw Error("table file " + path.string() + " is empty");
  std::size_t first = 1;
  if (is_dataset_row(records[0].fields)) {
    t.header = {"kind", "subject", "predicate", "object"};
    first = 0;
  } else {
    t.header = records[0].fields;
  }
  for (std::size_t i = first; i < records.size(); ++i) {
    if (records[i].fields.size() != t.header.size())
      throw ParseError(path.string(), records[i].line, 1,
                       "expected " + std::to_string(t.header.size()) + " fields, got " +
                           std::to_string(records[i].fields.size()));
    t.rows.push_back(records[i].fields);
  }
  return t;
}

bool ordered(int c, CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
  }
  return false;
}

Cell convert(const Cell& c, ir::ColumnType type) {
  if (type == ir::ColumnType::Value || type == ir::ColumnType::Index || type == ir::ColumnType::Time) {
    if (!std::holds_alternative<std::string>(c)) return c;
    auto v = parse_rational(std::get<std::string>(c));
    if (!v) throw Error("'" + std::get<std::string>(c) + "' is not a numeric value");
    return *v;
  }
  if (std::holds_alternative<std::string>(c)) return c;
  return cell_text(c);
}

}  // namespace

int column_index(const std::vector<ir::Column>& cols, const std::string& name) {
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i].name == name) return static_cast<int>(i);
  throw Error("plan refers to unknown column '" + name + "'");
}

std::optional<double> cell_number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* r = std::get_if<Rational>(&c)) return to_double(*r);
  if (auto r = parse_rational(std::get<std::string>(c))) return to_double(*r);
  return std::nullopt;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return text::format_double(*d);
  if (const auto* r = std::get_if<Rational>(&c)) return format_rational(*r);
  return std::get<std::string>(c);
}

bool cell_compare(const Cell& lhs, CmpOp op, const Cell& rhs) {
  bool ldouble = std::holds_alternative<double>(lhs), rdouble = std::holds_alternative<double>(rhs);
  if (ldouble || rdouble) {
    auto a = cell_number(lhs), b = cell_number(rhs);
    if (!a || !b) return op == CmpOp::Ne;
    return ordered(*a < *b ? -1 : *a > *b ? 1 : 0, op);
  }
  const Rational* a = std::get_if<Rational>(&lhs);
  const Rational* b = std::get_if<Rational>(&rhs);
  std::optional<Rational> pa, pb;
  if (!a) {
    pa = parse_rational(std::get<std::string>(lhs));
    if (pa) a = &*pa;
  }
  if (!b) {
    pb = parse_rational(std::get<std::string>(rhs));
    if (pb) b = &*pb;
  }
  if (a && b) return compare(*a, op, *b);
  if (std::holds_alternative<Rational>(lhs) || std::holds_alternative<Rational>(rhs)) return op == CmpOp::Ne;
  int c = std::get<std::string>(lhs).compare(std::get<std::string>(rhs));
  return ordered(c < 0 ? -1 : c > 0 ? 1 : 0, op);
}

void TableStore::load(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) add(f.stem().string(), load_table(f));
    return;
  }
  if (!std::filesystem::exists(path)) throw Error("no such data file " + path.string());
  add(path.stem().string(), load_table(path));
}

Table dataset_table(const Dataset& d) {
  Table t;
  t.header = {"kind", "subject", "predicate", "object"};
  for (const auto& a : d.concepts) t.rows.push_back({"concept", a.individual.name, a.concept_name, ""});
  for (const auto& a : d.roles) t.rows.push_back({"role", a.subject.name, a.role, a.object.name});
  for (const auto& a : d.attributes) t.rows.push_back({"attr", a.subject.name, a.attribute, format_rational(a.value)});
  return t;
}

Relation evaluate(const ir::PlanNode& plan, const TableStore& tables) { return Evaluator(tables).run(plan); }

Relation Evaluator::extension(const ir::PlanNode& n) { throw Error("stream operator in a static plan: " + ir::explain(n)); }

Relation Evaluator::run(const ir::PlanNode& n) {
  const TableStore& tables = tables_;
  Relation out;
  out.columns = n.columns;
  switch (n.kind) {
    case ir::NodeKind::Scan: {
      const Table& t = tables.get(n.table);
      std::vector<std::size_t> idx;
      for (const auto& c : n.columns) {
        auto it = std::find(t.header.begin(), t.header.end(), c.name);
        if (it == t.header.end()) throw Error("table '" + n.table + "' has no column '" + c.name + "'");
        idx.push_back(static_cast<std::size_t>(it - t.header.begin()));
      }
      for (const auto& r : t.rows) {
        Row row;
        for (auto i : idx) row.emplace_back(r[i]);
        out.rows.insert(std::move(row));
      }
      break;
    }
    case ir::NodeKind::Select: {
      Relation in = run(n.children.at(0));
      std::vector<std::pair<int, int>> refs;  // lhs index, rhs index or -1
      for (const auto& c : n.conditions)
        refs.emplace_back(column_index(in.columns, c.column), c.rhs.is_column ? column_index(in.columns, c.rhs.text) : -1);
      for (auto& row : in.rows) {
        bool keep = true;
        for (std::size_t k = 0; k < n.conditions.size() && keep; ++k) {
          Cell rhs = refs[k].second >= 0 ? row[static_cast<std::size_t>(refs[k].second)] : Cell{n.conditions[k].rhs.text};
          keep = cell_compare(row[static_cast<std::size_t>(refs[k].first)], n.conditions[k].op, rhs);
        }
        if (keep) out.rows.insert(row);
      }
      break;
    }
    case ir::NodeKind::Project: {
      Relation in = run(n.children.at(0));
      std::vector<int> src;
      for (const auto& it : n.items) src.push_back(it.source.is_column ? column_index(in.columns, it.source.text) : -1);
      for (const auto& row : in.rows) {
        Row r;
        for (std::size_t k = 0; k < n.items.size(); ++k) {
          Cell c = src[k] >= 0 ? row[static_cast<std::size_t>(src[k])] : Cell{n.items[k].source.text};
          r.push_back(convert(c, n.items[k].type));
        }
        out.rows.insert(std::move(r));
      }
      break;
    }
    case ir::NodeKind::Join: {
      Relation l = run(n.children.at(0));
      Relation r = run(n.children.at(1));
      std::vector<int> lk, rk, rest;
      for (const auto& k : n.keys) {
        lk.push_back(column_index(l.columns, k));
        rk.push_back(column_index(r.columns, k));
      }
      for (std::size_t i = 0; i < r.columns.size(); ++i)
        if (std::find(n.keys.begin(), n.keys.end(), r.columns[i].name) == n.keys.end()) rest.push_back(static_cast<int>(i));
      std::map<Row, std::vector<const Row*>> index;
      for (const auto& row : r.rows) {
        Row key;
        for (int i : rk) key.push_back(row[static_cast<std::size_t>(i)]);
        index[key].push_back(&row);
      }
      for (const auto& row : l.rows) {
        Row key;
        for (int i : lk) key.push_back(row[static_cast<std::size_t>(i)]);
        auto it = index.find(key);
        if (it == index.end()) continue;
        for (const Row* m : it->second) {
          Row joined = row;
          for (int i : rest) joined.push_back((*m)[static_cast<std::size_t>(i)]);
          out.rows.insert(std::move(joined));
        }
      }
      break;
    }
    case ir::NodeKind::Union:
      for (const auto& c : n.children) {
        Relation part = run(c);
        out.rows.insert(part.rows.begin(), part.rows.end());
      }
      break;
    case ir::NodeKind::GroupHaving: {
      Relation in = run(n.children.at(0));
      int g = column_index(in.columns, n.group_by);
      int v = column_index(in.columns, n.value);
      std::set<std::pair<Cell, Cell>> pairs;
      for (const auto& row : in.rows) pairs.emplace(row[static_cast<std::size_t>(g)], row[static_cast<std::size_t>(v)]);
      std::map<Cell, std::vector<Rational>> groups;
      for (const auto& [k, val] : pairs) {
        Cell v = convert(val, ir::ColumnType::Value);
        if (const auto* d = std::get_if<double>(&v)) v = Rational(*d);
        groups[k].push_back(std::get<Rational>(v));
      }
      for (const auto& [k, vals] : groups)
        if (compare(aggregate_value(n.fn, vals), n.cmp, n.threshold)) out.rows.insert(Row{k});
      break;
    }
    default: return extension(n);
  }
  return out;
}

std::set<AnswerTuple> to_answers(const Relation& r) {
  std::set<AnswerTuple> out;
  for (const auto& row : r.rows) {
    AnswerTuple t;
    for (const auto& c : row) {
      if (const auto* v = std::get_if<Rational>(&c))
        t.push_back(Term::data(*v));
      else if (const auto* d = std::get_if<double>(&c))
        t.push_back(Term::data(Rational(*d)));
      else
        t.push_back(Term::individual(std::get<std::string>(c)));
    }
    out.insert(std::move(t));
  }
  return out;
}

}  // namespace obda
