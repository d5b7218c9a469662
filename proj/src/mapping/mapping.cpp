#include "obda/mapping/mapping.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda {

std::vector<const ClassicalMapping*> MappingSet::find(PredicateKind kind, const std::string& predicate) const {
  std::vector<const ClassicalMapping*> out;
  for (const auto& m : classical_)
    if (m.kind == kind && m.predicate == predicate) out.push_back(&m);
  return out;
}

std::vector<const StreamMapping*> MappingSet::find_stream(const std::string& predicate) const {
  std::vector<const StreamMapping*> out;
  for (const auto& m : streaming_)
    if (m.predicate == predicate) out.push_back(&m);
  return out;
}

Vocabulary MappingSet::vocabulary() const {
  Vocabulary v;
  for (const auto& m : classical_) v.add(m.kind, m.predicate);
  for (const auto& m : streaming_) v.add(PredicateKind::Attribute, m.predicate);
  return v;
}

namespace {

class LineScanner {
 public:
  LineScanner(std::string_view line, const std::string& source, int number)
      : s_(line), source_(source), line_(number) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(source_, line_, static_cast<int>(pos_) + 1, msg);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool try_consume(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!try_consume(tok)) fail("expected '" + std::string(tok) + "'");
  }
  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '-' || s_[pos_] == '.' || s_[pos_] == ':'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }
  std::string variable() {
    try_consume("?");
    auto w = word();
    if (!text::is_identifier(w)) fail("bad variable '" + w + "'");
    return w;
  }
  std::string literal() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '\'') {
      auto end = s_.find('\'', pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated literal");
      auto lit = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return lit;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' && s_[pos_] != ';' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected a literal");
    return std::string(s_.substr(start, pos_ - start));
  }
  CmpOp op() {
    skip_ws();
    for (std::string_view t : {">=", "<=", "!=", "<>", "=", "<", ">"}) {
      if (s_.substr(pos_, t.size()) == t) {
        pos_ += t.size();
        return *parse_cmp_op(t);
      }
    }
    fail("expected a comparison operator");
  }
 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  const std::string& source_;
  int line_;
};

std::string stream_column(LineScanner& sc, const std::string& name) {
  if (name == "sid" || name == "sensor_id") return "sid";
  if (name == "sval" || name == "value") return "sval";
  if (name == "time" || name == "time_ms") return "time";
  sc.fail("stream relations have columns sid, sval and time, not '" + name + "'");
}

}  // namespace

MappingSet parse_mappings(std::string_view text, const std::string& source) {
  MappingSet out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    LineScanner sc(line, source, number);
    if (sc.at_end()) continue;
    sc.expect("map");
    auto kind_word = sc.word();
    std::size_t arity = 0;
    PredicateKind kind = PredicateKind::Concept;
    bool stream = false;
    if (kind_word == "concept") {
      arity = 1;
    } else if (kind_word == "role") {
      arity = 2;
      kind = PredicateKind::Role;
    } else if (kind_word == "attr") {
      arity = 2;
      kind = PredicateKind::Attribute;
    } else if (kind_word == "stream") {
      arity = 2;
      stream = true;
    } else {
      sc.fail("unknown mapping kind '" + kind_word + "' (concept, role, attr or stream)");
    }

    auto predicate = sc.word();
    if (auto colon = predicate.rfind(':'); colon != std::string::npos) predicate = predicate.substr(colon + 1);
    std::vector<std::string> head;
    sc.expect("(");
    do {
      head.push_back(sc.variable());
    } while (sc.try_consume(","));
    sc.expect(")");
    if (head.size() != arity) sc.fail("'" + predicate + "' needs " + std::to_string(arity) + " head variable(s)");
    if (arity == 2 && head[0] == head[1]) sc.fail("head variables must be distinct");
    sc.expect("<-");

    auto op_word = sc.word();
    if (stream ? op_word != "slice" : op_word != "scan") sc.fail(stream ? "expected slice(...)" : "expected scan(...)");
    sc.expect("(");
    auto table = sc.word();
    sc.expect(";");
    std::map<std::string, std::string> bindings;
    do {
      auto var = sc.variable();
      sc.expect("=");
      auto col = sc.word();
      if (std::find(head.begin(), head.end(), var) == head.end()) sc.fail("'" + var + "' is not a head variable");
      if (!bindings.emplace(var, col).second) sc.fail("'" + var + "' bound twice");
    } while (sc.try_consume(","));
    std::vector<ir::Condition> conditions;
    if (sc.try_consume(";")) {
      sc.expect("where");
      do {
        ir::Condition c;
        c.column = sc.word();
        c.op = sc.op();
        c.rhs = ir::Operand{false, sc.literal()};
        conditions.push_back(std::move(c));
      } while (sc.try_consume(","));
    }
    sc.expect(")");
    std::string label;
    if (sc.try_consume("as")) label = sc.word();
    if (!sc.at_end()) sc.fail("unexpected trailing input");
    for (const auto& h : head)
      if (!bindings.count(h)) sc.fail("head variable '" + h + "' is not bound to a column");

    if (stream) {
      StreamMapping m;
      m.predicate = predicate;
      m.subject = head[0];
      m.object = head[1];
      m.source = table;
      m.subject_column = stream_column(sc, bindings[head[0]]);
      m.value_column = stream_column(sc, bindings[head[1]]);
      for (auto& c : conditions) c.column = stream_column(sc, c.column);
      m.conditions = std::move(conditions);
      m.label = label;
      m.line = number;
      out.add(std::move(m));
      continue;
    }

    std::vector<std::string> raw_columns;
    auto note = [&](const std::string& c) {
      if (std::find(raw_columns.begin(), raw_columns.end(), c) == raw_columns.end()) raw_columns.push_back(c);
    };
    for (const auto& h : head) note(bindings[h]);
    for (const auto& c : conditions) note(c.column);
    ir::PlanNode body = ir::scan(table, raw_columns);
    if (!conditions.empty()) body = ir::select(std::move(body), std::move(conditions));
    std::vector<ir::ProjectItem> items;
    for (std::size_t k = 0; k < head.size(); ++k) {
      auto type = kind == PredicateKind::Attribute && k == 1 ? ir::ColumnType::Value : ir::ColumnType::Individual;
      items.push_back({head[k], ir::Operand{true, bindings[head[k]]}, type});
    }
    body = ir::project(std::move(body), std::move(items));
    body.label = label;
    out.add(ClassicalMapping{kind, predicate, head, std::move(body), number});
  }
  return out;
}

MappingSet read_mappings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mapping file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mappings(buf.str(), path.string());
}

MappingSet identity_mappings(const Vocabulary& vocab, const std::string& table) {
  MappingSet out;
  auto make = [&](PredicateKind kind, const std::string& name) {
    std::string kind_text = kind == PredicateKind::Concept ? "concept" : kind == PredicateKind::Role ? "role" : "attr";
    std::vector<ir::Condition> where{{"kind", CmpOp::Eq, {false, kind_text}}, {"predicate", CmpOp::Eq, {false, name}}};
    std::vector<std::string> cols{"subject"};
    if (kind != PredicateKind::Concept) cols.push_back("object");
    cols.push_back("kind");
    cols.push_back("predicate");
    ir::PlanNode body = ir::select(ir::scan(table, cols), std::move(where));
    std::vector<ir::ProjectItem> items{{"x", {true, "subject"}, ir::ColumnType::Individual}};
    std::vector<std::string> head{"x"};
    if (kind != PredicateKind::Concept) {
      items.push_back({"y", {true, "object"}, kind == PredicateKind::Role ? ir::ColumnType::Individual : ir::ColumnType::Value});
      head.push_back("y");
    }
    body = ir::project(std::move(body), std::move(items));
    body.label = table + ":" + name;
    out.add(ClassicalMapping{kind, name, head, std::move(body), 0});
  };
  for (const auto& c : vocab.concepts()) make(PredicateKind::Concept, c);
  for (const auto& r : vocab.roles()) make(PredicateKind::Role, r);
  for (const auto& f : vocab.attributes()) make(PredicateKind::Attribute, f);
  return out;
}

}  // namespace obda
