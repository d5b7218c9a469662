#pragma once

// In-memory evaluation of static plans over CSV tables.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "obda/mapping/ir.hpp"
#include "obda/ontology/model.hpp"

namespace obda {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

class TableStore {
 public:
  void add(const std::string& name, Table t) { tables_[name] = std::move(t); }
  const Table& get(const std::string& name) const;
  bool contains(const std::string& name) const { return tables_.count(name) > 0; }
  std::vector<std::string> names() const;

  /// A CSV file becomes a table named after its stem; a directory contributes
  /// every *.csv inside. The first row is the header, except for dataset files
  /// (kind,subject,predicate,object rows) whose header may be omitted.
  void load(const std::filesystem::path& path);

 private:
  std::map<std::string, Table> tables_;
};

Table dataset_table(const Dataset& d);

/// Raw and individual cells hold text, static values exact rationals, stream
/// measurements doubles. Index and time cells are integral rationals.
using Cell = std::variant<std::string, Rational, double>;
using Row = std::vector<Cell>;

struct Relation {
  std::vector<ir::Column> columns;
  std::set<Row> rows;
};

/// Numeric view of a cell, when it has one (text is parsed).
std::optional<double> cell_number(const Cell& c);
bool cell_compare(const Cell& lhs, CmpOp op, const Cell& rhs);
std::string cell_text(const Cell& c);

/// Set semantics throughout. Throws obda::Error for missing tables/columns or
/// text that cannot be read as a value. Stream operators are delegated to
/// `extension`, which subclasses override.
class Evaluator {
 public:
  explicit Evaluator(const TableStore& tables) : tables_(tables) {}
  virtual ~Evaluator() = default;

  Relation run(const ir::PlanNode& n);

 protected:
  virtual Relation extension(const ir::PlanNode& n);
  const TableStore& tables() const { return tables_; }

 private:
  const TableStore& tables_;
};

Relation evaluate(const ir::PlanNode& plan, const TableStore& tables);

/// Position of a column, throwing obda::Error when absent.
int column_index(const std::vector<ir::Column>& cols, const std::string& name);

std::set<AnswerTuple> to_answers(const Relation& r);

}  // namespace obda
