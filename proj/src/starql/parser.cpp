#include "obda/starql/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda::starql {

Millis parse_duration(std::string_view text) {
  std::size_t split = 0;
  while (split < text.size() && (std::isdigit(static_cast<unsigned char>(text[split])) || text[split] == '.')) ++split;
  auto number = parse_rational(text.substr(0, split));
  if (split == 0 || !number) throw Error("bad duration '" + std::string(text) + "'");
  std::string unit(text.substr(split));
  Millis scale = 0;
  if (unit == "ms") scale = 1;
  else if (unit == "sec" || unit == "s") scale = 1000;
  else if (unit == "min") scale = 60LL * 1000;
  else if (unit == "hour" || unit == "h") scale = 3600LL * 1000;
  else if (unit == "day") scale = 24LL * 3600 * 1000;
  else if (unit == "year") scale = 365LL * 24 * 3600 * 1000;
  else throw Error("unknown duration unit '" + unit + "' (ms, sec, min, hour, day, year)");
  Rational ms = *number * scale;
  if (denominator(ms) != 1) throw Error("duration '" + std::string(text) + "' is not a whole number of milliseconds");
  return static_cast<Millis>(numerator(ms));
}

namespace {

struct Token {
  enum class Kind { End, Word, Var, Number, Duration, Punct };
  Kind kind = Kind::End;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':'; }
bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':'; }

class Lexer {
 public:
  Lexer(std::string_view s, std::string source) : s_(s), source_(std::move(source)) {}

  SourcePos pos_of(std::size_t offset) const {
    SourcePos p{1, 1};
    for (std::size_t i = 0; i < offset && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++p.line;
        p.column = 1;
      } else {
        ++p.column;
      }
    }
    return p;
  }

  [[noreturn]] void fail_at(std::size_t offset, const std::string& msg) const {
    auto p = pos_of(offset);
    throw ParseError(source_, p.line, p.column, msg);
  }

  Token peek() {
    std::size_t save = pos_;
    Token t = next();
    pos_ = save;
    return t;
  }

  Token next() {
    skip();
    Token t;
    t.begin = pos_;
    if (pos_ >= s_.size()) {
      t.end = pos_;
      return t;
    }
    char c = s_[pos_];
    if (c == '?') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      if (start == pos_) fail_at(t.begin, "expected a variable name after '?'");
      t.kind = Token::Kind::Var;
      t.text = std::string(s_.substr(start, pos_ - start));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(t);
    } else if (word_start(c)) {
      while (pos_ < s_.size() && word_char(s_[pos_])) ++pos_;
      t.kind = Token::Kind::Word;
      t.text = std::string(s_.substr(t.begin, pos_ - t.begin));
    } else {
      static const char* two[] = {"<-", "->", "<=", ">=", "!=", "<>"};
      t.kind = Token::Kind::Punct;
      for (const char* p : two) {
        if (s_.substr(pos_, 2) == p) {
          t.text = p;
          pos_ += 2;
          t.end = pos_;
          return t;
        }
      }
      if (std::string_view("{}()[],.;=<>+-*/").find(c) == std::string_view::npos)
        fail_at(pos_, std::string("unexpected character '") + c + "'");
      t.text = std::string(1, c);
      ++pos_;
    }
    t.end = pos_;
    return t;
  }

  /// <...> read raw; only valid where an IRI is expected.
  std::string iri() {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != '<') fail_at(pos_, "expected <iri>");
    auto close = s_.find('>', pos_);
    if (close == std::string_view::npos) fail_at(pos_, "unterminated <iri>");
    std::string out(s_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return out;
  }

  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }

 private:
  void skip() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      return;
    }
  }

  void lex_number(Token& t) {
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ + 1 < s_.size() && s_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
        pos_ = k;
        digits();
      }
    }
    t.kind = Token::Kind::Number;
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      t.kind = Token::Kind::Duration;
    }
    t.text = std::string(s_.substr(t.begin, pos_ - t.begin));
  }

  std::string_view s_;
  std::string source_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const std::string& source) : lx_(text, source) {}

  StarqlQuery query() {
    StarqlQuery q;
    while (keyword_ahead("PREFIX")) prefix(q);
    if (keyword_ahead("CREATE") && second_word_is("PULSE")) q.pulse = pulse();
    expect_keyword("CREATE");
    if (keyword_ahead("PULSE")) fail(lx_.peek(), "duplicate or misplaced PULSE declaration");
    expect_keyword("STREAM");
    q.output_stream = name("output stream name");
    expect_keyword("AS");
    q.output = output();
    if (keyword_ahead("FROM") && second_word_is("STATIC")) {
      lx_.next();
      lx_.next();
      expect_keyword("ONTOLOGY");
      std::string onto = name("ontology name");
      expect_punct(",");
      expect_keyword("DATA");
      q.static_sources = std::make_pair(onto, name("data name"));
    }
    if (keyword_ahead("WHERE")) {
      lx_.next();
      q.where = triples_block();
    }
    if (keyword_ahead("FROM") && second_word_is("STREAM")) {
      lx_.next();
      lx_.next();
      q.streams.push_back(stream_source());
      for (;;) {
        bool comma = punct_ahead(",");
        if (comma) lx_.next();
        auto t = lx_.peek();
        if (t.kind == Token::Kind::Word && !is_clause_keyword(t.text)) {
          q.streams.push_back(stream_source());
          continue;
        }
        break;
      }
    }
    if (keyword_ahead("USING")) {
      lx_.next();
      expect_keyword("PULSE");
      q.using_pulse = name("pulse name");
    }
    if (keyword_ahead("SEQUENCE")) {
      lx_.next();
      expect_keyword("BY");
      q.strategy = name("sequencing strategy");
      expect_keyword("AS");
      q.sequence = name("sequence name");
    }
    if (keyword_ahead("HAVING")) {
      lx_.next();
      q.having = or_expr(false);
    }
    auto t = lx_.peek();
    if (t.kind != Token::Kind::End) {
      if (t.kind == Token::Kind::Word && is_clause_keyword(t.text))
        fail(t, "duplicate or misplaced " + upper(t.text) + " clause");
      fail(t, "unexpected '" + t.text + "'");
    }
    return q;
  }

 private:
  static std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }

  static bool is_clause_keyword(const std::string& w) {
    for (const char* k : {"PREFIX", "CREATE", "CONSTRUCT", "SELECT", "FROM", "WHERE", "USING", "SEQUENCE", "HAVING"})
      if (text::iequals(w, k)) return true;
    return false;
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) { lx_.fail_at(t.begin, msg); }

  bool keyword_ahead(const char* kw) {
    auto t = lx_.peek();
    return t.kind == Token::Kind::Word && text::iequals(t.text, kw);
  }
  bool second_word_is(const char* kw) {
    auto m = lx_.mark();
    lx_.next();
    bool yes = keyword_ahead(kw);
    lx_.reset(m);
    return yes;
  }
  bool punct_ahead(const char* p) {
    auto t = lx_.peek();
    return t.kind == Token::Kind::Punct && t.text == p;
  }
  void expect_keyword(const char* kw) {
    auto t = lx_.next();
    if (t.kind != Token::Kind::Word || !text::iequals(t.text, kw))
      fail(t, std::string("expected ") + kw + (t.kind == Token::Kind::End ? " at end of input" : ", found '" + t.text + "'"));
  }
  void expect_punct(const char* p) {
    auto t = lx_.next();
    if (t.kind != Token::Kind::Punct || t.text != p)
      fail(t, std::string("expected '") + p + "'" + (t.kind == Token::Kind::End ? " at end of input" : ", found '" + t.text + "'"));
  }
  std::string name(const char* what) {
    auto t = lx_.next();
    if (t.kind != Token::Kind::Word) fail(t, std::string("expected ") + what);
    return t.text;
  }
  Millis duration() {
    auto t = lx_.next();
    if (t.kind != Token::Kind::Duration) fail(t, "expected a duration such as 1min");
    try {
      return parse_duration(t.text);
    } catch (const Error& e) {
      fail(t, e.what());
    }
  }

  void prefix(StarqlQuery& q) {
    lx_.next();
    auto t = lx_.next();
    if (t.kind != Token::Kind::Word) fail(t, "expected a prefix name");
    std::string p = t.text;
    if (p.back() == ':') {
      p.pop_back();
    } else {
      auto colon = lx_.next();
      if (colon.kind != Token::Kind::Word || colon.text != ":") fail(colon, "expected ':' after prefix name");
    }
    if (p.find(':') != std::string::npos) fail(t, "bad prefix name '" + p + "'");
    for (const auto& [k, v] : q.prefixes)
      if (k == p) fail(t, "prefix '" + p + "' declared twice");
    q.prefixes.emplace_back(p, lx_.iri());
  }

  Pulse pulse() {
    Pulse p;
    auto t = lx_.next();
    p.pos = lx_.pos_of(t.begin);
    expect_keyword("PULSE");
    p.name = name("pulse name");
    expect_keyword("WITH");
    expect_keyword("START");
    expect_punct("=");
    auto s = lx_.next();
    if (s.kind == Token::Kind::Word && text::iequals(s.text, "NOW")) {
      p.start.reset();
    } else if (s.kind == Token::Kind::Number && s.text.find_first_of(".eE") == std::string::npos) {
      p.start = std::stoll(s.text);
    } else {
      fail(s, "START must be NOW or a time in milliseconds");
    }
    expect_punct(",");
    expect_keyword("FREQUENCY");
    expect_punct("=");
    p.frequency = duration();
    return p;
  }

  Term term(bool predicate_position) {
    auto t = lx_.next();
    Term out;
    out.pos = lx_.pos_of(t.begin);
    switch (t.kind) {
      case Token::Kind::Var:
        out.kind = Term::Kind::Variable;
        out.text = t.text;
        return out;
      case Token::Kind::Word:
        if (t.text == ":") fail(t, "expected a name after ':'");
        out.kind = Term::Kind::Iri;
        out.text = t.text;
        if (!predicate_position && text::iequals(t.text, "a")) fail(t, "'a' is only allowed as a predicate");
        return out;
      case Token::Kind::Number:
        if (predicate_position) fail(t, "a number cannot be a predicate");
        out.kind = Term::Kind::Number;
        out.text = t.text;
        out.number = *parse_rational(t.text);
        return out;
      default: fail(t, "expected a variable, name or number");
    }
  }

  std::vector<Triple> triples_block() {
    expect_punct("{");
    std::vector<Triple> out;
    while (!punct_ahead("}")) {
      Triple tr;
      tr.subject = term(false);
      tr.predicate = term(true);
      tr.object = term(false);
      if (tr.subject.kind == Term::Kind::Number) fail(lx_.peek(), "a number cannot be a subject");
      out.push_back(std::move(tr));
      if (punct_ahead(".")) {
        lx_.next();
        continue;
      }
      if (!punct_ahead("}")) fail(lx_.peek(), "expected '.' or '}'");
    }
    lx_.next();
    if (out.empty()) fail(lx_.peek(), "empty graph pattern");
    return out;
  }

  OutputForm output() {
    OutputForm f;
    if (keyword_ahead("CONSTRUCT")) {
      lx_.next();
      expect_keyword("GRAPH");
      expect_keyword("NOW");
      f.construct = true;
      f.templates = triples_block();
      return f;
    }
    if (keyword_ahead("SELECT")) {
      lx_.next();
      f.construct = false;
      for (;;) {
        auto t = lx_.peek();
        if (t.kind == Token::Kind::Var) {
          lx_.next();
          f.variables.push_back({Term::Kind::Variable, t.text, {}, lx_.pos_of(t.begin)});
        } else if (t.kind == Token::Kind::Word && !is_clause_keyword(t.text)) {
          lx_.next();
          f.variables.push_back({Term::Kind::Iri, t.text, {}, lx_.pos_of(t.begin)});
        } else {
          break;
        }
      }
      if (f.variables.empty()) fail(lx_.peek(), "SELECT needs at least one variable");
      return f;
    }
    fail(lx_.peek(), "expected CONSTRUCT or SELECT");
  }

  StreamSource stream_source() {
    StreamSource s;
    auto t = lx_.peek();
    s.pos = lx_.pos_of(t.begin);
    s.name = name("stream name");
    if (lx_.peek().kind == Token::Kind::Duration) {
      s.setback = duration();
      expect_punct("<-");
    }
    expect_punct("[");
    expect_keyword("NOW");
    if (punct_ahead("-")) {
      lx_.next();
      s.range = duration();
    }
    expect_punct(",");
    expect_keyword("NOW");
    expect_punct("]");
    expect_punct("->");
    s.slide = duration();
    return s;
  }

  // ---- HAVING ----

  Expr node(Expr::Kind k, const Token& at) {
    Expr e;
    e.kind = k;
    e.pos = lx_.pos_of(at.begin);
    return e;
  }

  Expr or_expr(bool condition) {
    auto start = lx_.peek();
    Expr first = and_expr(condition);
    if (!keyword_ahead("OR")) return first;
    Expr e = node(Expr::Kind::Or, start);
    e.children.push_back(std::move(first));
    while (keyword_ahead("OR")) {
      lx_.next();
      e.children.push_back(and_expr(condition));
    }
    return e;
  }

  Expr and_expr(bool condition) {
    auto start = lx_.peek();
    Expr first = unary(condition);
    if (!keyword_ahead("AND")) return first;
    Expr e = node(Expr::Kind::And, start);
    e.children.push_back(std::move(first));
    while (keyword_ahead("AND")) {
      lx_.next();
      e.children.push_back(unary(condition));
    }
    return e;
  }

  Expr unary(bool condition) {
    auto t = lx_.peek();
    if (keyword_ahead("NOT")) {
      lx_.next();
      Expr e = node(Expr::Kind::Not, t);
      e.children.push_back(unary(condition));
      return e;
    }
    if (keyword_ahead("EXISTS") || keyword_ahead("FORALL")) {
      if (condition) fail(t, "quantifiers are not allowed in a HAVING condition");
      lx_.next();
      Expr e = node(text::iequals(t.text, "EXISTS") ? Expr::Kind::Exists : Expr::Kind::Forall, t);
      e.name = name("index variable");
      expect_keyword("IN");
      e.sequence = name("sequence name");
      e.children.push_back(unary(false));
      if (keyword_ahead("HAVING")) {
        lx_.next();
        e.children.push_back(or_expr(true));
      }
      return e;
    }
    if (keyword_ahead("GRAPH")) {
      if (condition) fail(t, "graph patterns are not allowed in a HAVING condition");
      lx_.next();
      Expr e = node(Expr::Kind::Graph, t);
      auto idx = lx_.next();
      if (idx.kind == Token::Kind::Var) {
        e.index_is_value_var = true;
      } else if (idx.kind != Token::Kind::Word) {
        fail(idx, "expected a state index after GRAPH");
      }
      e.name = idx.text;
      if (punct_ahead("+") || punct_ahead("-")) {
        bool minus = lx_.next().text == "-";
        auto n = lx_.next();
        if (n.kind != Token::Kind::Number || n.text.find_first_of(".eE") != std::string::npos)
          fail(n, "expected an integer state offset");
        e.offset = std::stoll(n.text) * (minus ? -1 : 1);
      }
      e.triples = triples_block();
      return e;
    }
    if (punct_ahead("(")) {
      auto m = lx_.mark();
      try {
        lx_.next();
        Expr inner = or_expr(condition);
        expect_punct(")");
        auto after = lx_.peek();
        bool continues_value = after.kind == Token::Kind::Punct && std::string("<=>!+-*/").find(after.text[0]) != std::string::npos;
        if (!continues_value) return inner;
      } catch (const ParseError&) {
      }
      lx_.reset(m);
    }
    return comparison();
  }

  Expr comparison() {
    auto start = lx_.peek();
    Expr lhs = arith();
    auto t = lx_.next();
    std::optional<CmpOp> op;
    if (t.kind == Token::Kind::Punct) op = parse_cmp_op(t.text == "<>" ? "!=" : t.text);
    if (!op) fail(t, "expected a comparison operator");
    Expr e = node(Expr::Kind::Compare, start);
    e.cmp = *op;
    e.children.push_back(std::move(lhs));
    e.children.push_back(arith());
    return e;
  }

  Expr arith() {
    auto start = lx_.peek();
    Expr e = product();
    while (punct_ahead("+") || punct_ahead("-")) {
      Expr bin = node(Expr::Kind::Arith, start);
      bin.op = lx_.next().text[0];
      bin.children.push_back(std::move(e));
      bin.children.push_back(product());
      e = std::move(bin);
    }
    return e;
  }

  Expr product() {
    auto start = lx_.peek();
    Expr e = factor();
    while (punct_ahead("*") || punct_ahead("/")) {
      Expr bin = node(Expr::Kind::Arith, start);
      bin.op = lx_.next().text[0];
      bin.children.push_back(std::move(e));
      bin.children.push_back(factor());
      e = std::move(bin);
    }
    return e;
  }

  Expr factor() {
    auto t = lx_.next();
    switch (t.kind) {
      case Token::Kind::Number: {
        Expr e = node(Expr::Kind::Number, t);
        e.number = *parse_rational(t.text);
        return e;
      }
      case Token::Kind::Var: {
        Expr e = node(Expr::Kind::Var, t);
        e.name = t.text;
        return e;
      }
      case Token::Kind::Word: {
        if (punct_ahead("(")) {
          lx_.next();
          Expr e = node(Expr::Kind::Call, t);
          e.name = t.text;
          if (!punct_ahead(")")) {
            e.children.push_back(arith());
            while (punct_ahead(",")) {
              lx_.next();
              e.children.push_back(arith());
            }
          }
          expect_punct(")");
          return e;
        }
        Expr e = node(Expr::Kind::Index, t);
        e.name = t.text;
        return e;
      }
      case Token::Kind::Punct:
        if (t.text == "-") {
          Expr e = node(Expr::Kind::Negate, t);
          e.children.push_back(factor());
          return e;
        }
        if (t.text == "(") {
          Expr e = arith();
          expect_punct(")");
          return e;
        }
        break;
      default: break;
    }
    fail(t, t.kind == Token::Kind::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }

  Lexer lx_;
};

}  // namespace

StarqlQuery parse_starql(std::string_view text, const std::string& source) { return Parser(text, source).query(); }

StarqlQuery read_starql_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open query file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_starql(buf.str(), path.string());
}

}  // namespace obda::starql
