#include "obda/starql/ast.hpp"

#include <algorithm>
#include <cctype>

#include "obda/common/text.hpp"

namespace obda::starql {

namespace {

struct Unit {
  const char* name;
  Millis ms;
};

constexpr Unit kUnits[] = {{"year", 365LL * 24 * 3600 * 1000}, {"day", 24LL * 3600 * 1000}, {"hour", 3600LL * 1000},
                           {"min", 60LL * 1000},                {"sec", 1000},                {"ms", 1}};

bool compound(const Expr& e) {
  using K = Expr::Kind;
  return e.kind == K::And || e.kind == K::Or || e.kind == K::Not ||
         ((e.kind == K::Exists || e.kind == K::Forall) && e.children.size() > 1);
}

std::string print_triples(const std::vector<Triple>& ts) {
  std::vector<std::string> parts;
  for (const auto& t : ts) parts.push_back(print(t.subject) + " " + print(t.predicate) + " " + print(t.object));
  return "{ " + text::join(parts, " . ") + " }";
}

std::string print_value(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Var: return "?" + e.name;
    case K::Index: return e.name;
    case K::Number: return format_rational(e.number);
    case K::Negate: return "-" + print_value(e.children[0]);
    case K::Arith: return "(" + print_value(e.children[0]) + " " + e.op + " " + print_value(e.children[1]) + ")";
    case K::Call: {
      std::vector<std::string> args;
      for (const auto& a : e.children) args.push_back(print_value(a));
      return e.name + "(" + text::join(args, ", ") + ")";
    }
    default: return "(" + print(e) + ")";
  }
}

}  // namespace

std::string print_duration(Millis ms) {
  for (const auto& u : kUnits)
    if (ms != 0 && ms % u.ms == 0) return std::to_string(ms / u.ms) + u.name;
  return std::to_string(ms) + "ms";
}

std::string print(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Variable: return "?" + t.text;
    case Term::Kind::Iri: return t.text;
    case Term::Kind::Number: return format_rational(t.number);
  }
  return {};
}

std::string print(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Exists:
    case K::Forall: {
      std::string out = std::string(e.kind == K::Exists ? "EXISTS " : "FORALL ") + e.name + " IN " + e.sequence + " (" +
                        print(e.children[0]) + ")";
      if (e.children.size() > 1) out += " HAVING " + print(e.children[1]);
      return out;
    }
    case K::Graph: {
      std::string index = (e.index_is_value_var ? "?" : "") + e.name;
      if (e.offset > 0) index += "+" + std::to_string(e.offset);
      if (e.offset < 0) index += std::to_string(e.offset);
      return "GRAPH " + index + " " + print_triples(e.triples);
    }
    case K::And:
    case K::Or: {
      std::vector<std::string> parts;
      for (const auto& c : e.children) parts.push_back(compound(c) ? "(" + print(c) + ")" : print(c));
      return text::join(parts, e.kind == K::And ? " AND " : " OR ");
    }
    case K::Not: return "NOT (" + print(e.children[0]) + ")";
    case K::Compare:
      return print_value(e.children[0]) + " " + obda::to_string(e.cmp) + " " + print_value(e.children[1]);
    default: return print_value(e);
  }
}

std::string print(const StarqlQuery& q) {
  std::string out;
  for (const auto& [name, iri] : q.prefixes) out += "PREFIX " + name + ": <" + iri + ">\n";
  if (q.pulse) {
    out += "CREATE PULSE " + q.pulse->name + " WITH START = " +
           (q.pulse->start ? std::to_string(*q.pulse->start) : std::string("NOW")) +
           ", FREQUENCY = " + print_duration(q.pulse->frequency) + "\n";
  }
  out += "CREATE STREAM " + q.output_stream + " AS\n";
  if (q.output.construct) {
    out += "CONSTRUCT GRAPH NOW " + print_triples(q.output.templates) + "\n";
  } else {
    std::vector<std::string> vars;
    for (const auto& v : q.output.variables) vars.push_back(print(v));
    out += "SELECT " + text::join(vars, " ") + "\n";
  }
  if (q.static_sources)
    out += "FROM STATIC ONTOLOGY " + q.static_sources->first + ", DATA " + q.static_sources->second + "\n";
  if (q.where) out += "WHERE " + print_triples(*q.where) + "\n";
  if (!q.streams.empty()) {
    std::vector<std::string> parts;
    for (const auto& s : q.streams) {
      std::string p = s.name + " ";
      if (s.setback) p += print_duration(*s.setback) + " <- ";
      p += "[NOW - " + print_duration(s.range) + ", NOW] -> " + print_duration(s.slide);
      parts.push_back(p);
    }
    out += "FROM STREAM " + text::join(parts, ", ") + "\n";
  }
  if (!q.using_pulse.empty()) out += "USING PULSE " + q.using_pulse + "\n";
  if (!q.strategy.empty()) out += "SEQUENCE BY " + q.strategy + " AS " + q.sequence + "\n";
  if (q.having) out += "HAVING " + print(*q.having) + "\n";
  return out;
}

std::string local_name(const std::string& iri) {
  auto colon = iri.rfind(':');
  return colon == std::string::npos ? iri : iri.substr(colon + 1);
}

std::string canonical_function(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "pearsoncorrelation" || lower == "pearson") return "pearson";
  if (lower == "cosinesimilarity" || lower == "cosine") return "cosine";
  for (const char* f : {"avg", "min", "max", "sum", "count", "abs"})
    if (lower == f) return f;
  return {};
}

}  // namespace obda::starql
