#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "obda/ontology/model.hpp"

namespace obda::starql {

using Millis = std::int64_t;

/// Source location; ignored by comparisons so that reparsed ASTs compare equal.
struct SourcePos {
  int line = 0;
  int column = 0;
  bool operator==(const SourcePos&) const { return true; }
};

/// `?x`, a (prefixed) name, or a number.
struct Term {
  enum class Kind { Variable, Iri, Number };
  Kind kind = Kind::Iri;
  std::string text;  // variable name without '?', or the name as written ("ex:refSensor")
  Rational number;
  SourcePos pos;

  bool operator==(const Term&) const = default;
  bool is_variable() const { return kind == Kind::Variable; }
};

/// subject predicate object; predicate "a" is rdf:type.
struct Triple {
  Term subject;
  Term predicate;
  Term object;
  bool operator==(const Triple&) const = default;
};

struct Pulse {
  std::string name;
  std::optional<Millis> start;  // nullopt = NOW
  Millis frequency = 0;
  SourcePos pos;
  bool operator==(const Pulse&) const = default;
};

struct StreamSource {
  std::string name;
  Millis range = 0;
  Millis slide = 0;
  std::optional<Millis> setback;
  SourcePos pos;
  bool operator==(const StreamSource&) const = default;
};

struct OutputForm {
  bool construct = true;
  std::vector<Triple> templates;  // CONSTRUCT GRAPH NOW { ?v a C . ... }
  std::vector<Term> variables;    // SELECT ?a ?b
  bool operator==(const OutputForm&) const = default;
};

/// HAVING tree. Value variables carry '?' in the source; index variables are
/// bare names.
struct Expr {
  enum class Kind {
    Exists,   // name = index, sequence; children = {body} or {body, condition}
    Forall,
    Graph,    // name = index, offset; triples
    And,
    Or,
    Not,
    Compare,  // cmp; children = {lhs, rhs}
    Call,     // name as written; children = args
    Arith,    // op; children = {lhs, rhs}
    Negate,
    Var,      // value variable
    Index,    // index variable used as a term
    Number
  };
  Kind kind = Kind::Number;
  std::string name;
  std::string sequence;
  std::int64_t offset = 0;
  bool index_is_value_var = false;  // GRAPH ?x { ... }
  std::vector<Triple> triples;
  CmpOp cmp = CmpOp::Eq;
  char op = '+';
  Rational number;
  std::vector<Expr> children;
  SourcePos pos;

  bool operator==(const Expr&) const = default;
};

struct StarqlQuery {
  std::vector<std::pair<std::string, std::string>> prefixes;  // in declaration order
  std::optional<Pulse> pulse;
  std::string output_stream;
  OutputForm output;
  std::optional<std::pair<std::string, std::string>> static_sources;  // ontology, data
  std::optional<std::vector<Triple>> where;
  std::vector<StreamSource> streams;
  std::string using_pulse;
  std::string strategy;
  std::string sequence;
  std::optional<Expr> having;

  bool operator==(const StarqlQuery&) const = default;
};

/// Canonical text; parse(print(q)) == q.
std::string print(const StarqlQuery& q);
std::string print(const Expr& e);
std::string print(const Term& t);
std::string print_duration(Millis ms);

/// Local part of a prefixed name ("ex:Reliable" -> "Reliable").
std::string local_name(const std::string& iri);

/// Canonical function name for a HAVING call, or empty when unknown.
std::string canonical_function(const std::string& name);

}  // namespace obda::starql
