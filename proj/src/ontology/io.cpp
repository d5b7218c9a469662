#include "obda/ontology/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "obda/common/csv.hpp"
#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda {

namespace {

struct Token {
  std::string text;
  int column = 0;
};

std::vector<Token> tokenize_line(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, const std::string& source, int line, const std::set<std::string>& attributes)
      : tokens_(std::move(tokens)), source_(source), line_(line), attributes_(attributes) {}

  Axiom parse() {
    const auto& head = peek();
    if (head == "funct") {
      next();
      if (peek() == "attr") {
        next();
        return FunctionalAttribute{name()};
      }
      return FunctionalRole{role()};
    }
    if (head == "disjoint") {
      next();
      if (peek() == "role") {
        next();
        Role a = role();
        return finish(RoleDisjointness{a, role()});
      }
      if (peek() == "attr") {
        next();
        auto a = name();
        return finish(AttributeDisjointness{a, name()});
      }
      Concept a = concept_expr();
      return finish(ConceptDisjointness{a, concept_expr()});
    }
    if (head.rfind("agg:", 0) == 0) {
      AggregateConcept e = aggregate();
      expect("sub");
      return finish(AggregateInclusion{std::move(e), concept_expr()});
    }
    if (tokens_.size() == 3 && tokens_[1].text == "subrole") {
      Role a = role();
      next();
      return finish(RoleInclusion{a, role()});
    }
    if (tokens_.size() == 3 && tokens_[1].text == "subattr") {
      auto a = name();
      next();
      return finish(AttributeInclusion{a, name()});
    }
    Concept lhs = concept_expr();
    expect("sub");
    if (peek().rfind("agg:", 0) == 0) fail("aggregate concepts may not appear on the right-hand side");
    return finish(ConceptInclusion{lhs, concept_expr()});
  }

 private:
  const std::string& peek() const {
    static const std::string end;
    return pos_ < tokens_.size() ? tokens_[pos_].text : end;
  }
  int column() const {
    if (pos_ < tokens_.size()) return tokens_[pos_].column;
    return tokens_.empty() ? 1 : tokens_.back().column + static_cast<int>(tokens_.back().text.size());
  }
  const std::string& next() {
    if (pos_ >= tokens_.size()) fail("unexpected end of line");
    return tokens_[pos_++].text;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source_, line_, column(), msg); }
  void expect(const std::string& kw) {
    if (peek() != kw) fail("expected '" + kw + "'");
    ++pos_;
  }
  template <class T>
  Axiom finish(T axiom) {
    if (pos_ != tokens_.size()) fail("unexpected '" + peek() + "'");
    return axiom;
  }

  std::string name() {
    if (!text::is_identifier(peek())) fail("expected a name, got '" + peek() + "'");
    return next();
  }

  Role role() {
    const auto& t = peek();
    if (t.rfind("inv(", 0) == 0 && t.size() > 5 && t.back() == ')') {
      auto inner = t.substr(4, t.size() - 5);
      if (!text::is_identifier(inner)) fail("bad role name '" + inner + "'");
      next();
      return Role{inner, true};
    }
    return Role{name(), false};
  }

  Concept concept_expr() {
    if (peek() == "exists") {
      next();
      if (peek() == "attr") {
        next();
        return Concept::exists_attribute(name());
      }
      if (peek() == "role") {
        next();
        return Concept::exists(role());
      }
      Role r = role();
      if (!r.inverse && attributes_.count(r.name)) return Concept::exists_attribute(r.name);
      return Concept::exists(r);
    }
    return Concept::atomic(name());
  }

  AggregateConcept aggregate() {
    auto fn_text = next().substr(4);
    auto fn = parse_agg_fn(fn_text);
    if (!fn) {
      --pos_;
      fail("unknown aggregate function '" + fn_text + "'");
    }
    AggregateConcept e;
    e.fn = *fn;
    e.attribute = name();
    auto cmp = parse_cmp_op(peek());
    if (!cmp) fail("expected a comparison operator");
    next();
    e.cmp = *cmp;
    auto threshold = parse_rational(peek());
    if (!threshold) fail("expected a rational threshold");
    next();
    e.threshold = *threshold;
    return e;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const std::string& source_;
  int line_;
  const std::set<std::string>& attributes_;
};

std::string strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return std::string(hash == std::string_view::npos ? line : line.substr(0, hash));
}

}  // namespace

Ontology parse_ontology(std::string_view text, const std::string& source) {
  std::vector<std::pair<int, std::vector<Token>>> lines;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
      ++n;
      auto tokens = tokenize_line(strip_comment(raw));
      if (!tokens.empty()) lines.emplace_back(n, std::move(tokens));
    }
  }

  // Attribute names are whatever the file uses in attribute-only positions.
  std::set<std::string> attributes;
  for (const auto& [n, tokens] : lines) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto& t = tokens[i].text;
      if (t == "subattr" && i > 0 && i + 1 < tokens.size()) {
        attributes.insert(tokens[i - 1].text);
        attributes.insert(tokens[i + 1].text);
      } else if (t == "attr" && i > 0 && i + 1 < tokens.size()) {
        attributes.insert(tokens[i + 1].text);
        if (tokens[i - 1].text == "disjoint" && i + 2 < tokens.size()) attributes.insert(tokens[i + 2].text);
      } else if (t.rfind("agg:", 0) == 0 && i + 1 < tokens.size()) {
        attributes.insert(tokens[i + 1].text);
      }
    }
  }

  Ontology o;
  for (auto& [n, tokens] : lines) {
    LineParser p(std::move(tokens), source, n, attributes);
    o.add(p.parse());
  }
  return o;
}

Ontology read_ontology_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ontology file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ontology(buf.str(), path.string());
}

Dataset parse_dataset(std::istream& in, const std::string& source) {
  Dataset d;
  auto records = csv::parse(in, source);
  auto individual = [&](const csv::Record& rec, const std::string& name, int col) {
    if (name.empty()) throw ParseError(source, rec.line, col, "empty individual name");
    if (name.rfind("_:", 0) == 0) throw ParseError(source, rec.line, col, "individual names may not start with '_:'");
    if (parse_rational(name)) throw ParseError(source, rec.line, col, "individual name '" + name + "' is numeric");
    return Individual{name};
  };
  bool first = true;
  for (const auto& rec : records) {
    if (first && rec.fields.size() == 4 && rec.fields[0] == "kind" && rec.fields[1] == "subject") {
      first = false;
      continue;
    }
    first = false;
    if (rec.fields.size() != 4) throw ParseError(source, rec.line, 1, "expected 4 fields: kind,subject,predicate,object");
    const auto& kind = rec.fields[0];
    const auto& pred = rec.fields[2];
    if (!text::is_identifier(pred)) throw ParseError(source, rec.line, 3, "bad predicate name '" + pred + "'");
    if (kind == "concept") {
      if (!rec.fields[3].empty()) throw ParseError(source, rec.line, 4, "concept assertions take no object");
      d.add(ConceptAssertion{pred, individual(rec, rec.fields[1], 2)});
    } else if (kind == "role") {
      d.add(RoleAssertion{pred, individual(rec, rec.fields[1], 2), individual(rec, rec.fields[3], 4)});
    } else if (kind == "attr") {
      auto v = parse_rational(rec.fields[3]);
      if (!v) throw ParseError(source, rec.line, 4, "attribute value '" + rec.fields[3] + "' is not a rational");
      d.add(AttributeAssertion{pred, individual(rec, rec.fields[1], 2), *v});
    } else {
      throw ParseError(source, rec.line, 1, "unknown assertion kind '" + kind + "'");
    }
  }
  return d;
}

Dataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path.string());
  return parse_dataset(in, path.string());
}

void write_dataset(std::ostream& out, const Dataset& d) {
  out << "kind,subject,predicate,object\n";
  for (const auto& a : d.concepts) out << "concept," << a.individual.name << "," << a.concept_name << ",\n";
  for (const auto& a : d.roles) out << "role," << a.subject.name << "," << a.role << "," << a.object.name << "\n";
  for (const auto& a : d.attributes)
    out << "attr," << a.subject.name << "," << a.attribute << "," << format_rational(a.value) << "\n";
}

namespace {

class CqParser {
 public:
  CqParser(std::string_view text, const Vocabulary& vocab, const std::string& source)
      : s_(text), vocab_(vocab), source_(source) {}

  ConjunctiveQuery parse() {
    ConjunctiveQuery q;
    identifier();  // query name
    expect('(');
    if (!try_consume(')')) {
      do {
        Term t = term();
        if (!t.is_variable() || t.is_anonymous()) fail("head terms must be named variables");
        q.head.push_back(std::move(t));
      } while (try_consume(','));
      expect(')');
    }
    skip_ws();
    if (s_.substr(pos_, 2) != ":-") fail("expected ':-'");
    pos_ += 2;
    do {
      q.atoms.push_back(atom());
    } while (try_consume(','));
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    for (const auto& h : q.head) {
      bool found = false;
      for (const auto& a : q.atoms)
        for (const auto& t : a.args) found = found || t == h;
      if (!found) throw Error("head variable '" + h.name + "' does not occur in the query body");
    }
    return q;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(source_, 1, static_cast<int>(pos_) + 1, msg);
  }
  bool try_consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
      ++pos_;
    if (start == pos_) fail("expected an identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  Term term() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '\'') {
      auto end = s_.find('\'', pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated constant");
      auto name = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return Term::individual(name);
    }
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' && !std::isspace(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      auto v = parse_rational(s_.substr(start, pos_ - start));
      if (!v) fail("bad numeric constant");
      return Term::data(*v);
    }
    auto name = identifier();
    if (name == "_") return Term::anonymous();
    if (name.front() == '_') fail("variable names may not start with '_'");
    return Term::variable(name);
  }

  Atom atom() {
    skip_ws();
    if (try_consume('[')) {
      std::size_t start = pos_;
      auto end = s_.find(']', pos_);
      if (end == std::string_view::npos) fail("unterminated aggregate concept");
      auto body = std::string(s_.substr(start, end - start));
      pos_ = end + 1;
      auto parts = text::split(std::string(text::trim(body)), ' ');
      std::vector<std::string> tokens;
      for (auto& p : parts)
        if (!p.empty()) tokens.push_back(p);
      if (tokens.size() != 4 || tokens[0].rfind("agg:", 0) != 0) fail("expected [agg:fn F op r]");
      AggregateConcept e;
      auto fn = parse_agg_fn(tokens[0].substr(4));
      auto cmp = parse_cmp_op(tokens[2]);
      auto r = parse_rational(tokens[3]);
      if (!fn || !cmp || !r) fail("malformed aggregate concept");
      e.fn = *fn;
      e.attribute = tokens[1];
      e.cmp = *cmp;
      e.threshold = *r;
      expect('(');
      Term t = term();
      expect(')');
      return Atom::aggregate_atom(std::move(e), std::move(t));
    }
    std::size_t at = pos_;
    auto pred = identifier();
    expect('(');
    std::vector<Term> args;
    do {
      args.push_back(term());
    } while (try_consume(','));
    expect(')');
    if (args.size() == 1) return Atom::concept_atom(pred, args[0]);
    if (args.size() != 2) fail("atoms take one or two arguments");
    auto kind = vocab_.kind_of(pred);
    if (!kind) {
      pos_ = at;
      fail("unknown predicate '" + pred + "'");
    }
    if (*kind == PredicateKind::Attribute) return Atom::attribute_atom(pred, args[0], args[1]);
    if (*kind == PredicateKind::Role) return Atom::role_atom(pred, args[0], args[1]);
    pos_ = at;
    fail("'" + pred + "' is a concept but is used with two arguments");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const Vocabulary& vocab_;
  const std::string& source_;
};

}  // namespace

ConjunctiveQuery parse_cq(std::string_view text, const Vocabulary& vocab, const std::string& source) {
  return CqParser(text, vocab, source).parse();
}

}  // namespace obda
