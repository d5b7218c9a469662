#include "obda/starql/validate.hpp"

#include <algorithm>
#include <map>

#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda::starql {

namespace {

using K = Expr::Kind;

enum class ValueKind { Neutral, Value, Index, Mixed };

ValueKind combine(ValueKind a, ValueKind b) {
  if (a == ValueKind::Neutral) return b;
  if (b == ValueKind::Neutral || a == b) return a;
  return ValueKind::Mixed;
}

void triple_vars(const std::vector<Triple>& ts, std::set<std::string>& out) {
  for (const auto& t : ts)
    for (const Term* x : {&t.subject, &t.predicate, &t.object})
      if (x->is_variable()) out.insert(x->text);
}

void having_vars(const Expr& e, const Expr* skip, std::set<std::string>& out) {
  if (&e == skip) return;
  if (e.kind == K::Var) out.insert(e.name);
  if (e.kind == K::Graph) triple_vars(e.triples, out);
  for (const auto& c : e.children) having_vars(c, skip, out);
}

// Variables in subject position denote individuals, objects of stream
// triples denote values.
void triple_positions(const Expr& e, std::set<std::string>& subjects, std::set<std::string>& values) {
  for (const auto& t : e.triples) {
    if (t.subject.is_variable()) subjects.insert(t.subject.text);
    if (t.object.is_variable()) values.insert(t.object.text);
  }
  for (const auto& c : e.children) triple_positions(c, subjects, values);
}

void index_names(const Expr& e, std::set<std::string>& out) {
  if (e.kind == K::Exists || e.kind == K::Forall) out.insert(e.name);
  if (e.kind == K::Graph && e.index_is_value_var) out.insert(e.name);
  for (const auto& c : e.children) index_names(c, out);
}

class Checker {
 public:
  explicit Checker(const StarqlQuery& q) : q_(q) {
    for (const auto& [p, iri] : q.prefixes) prefixes_.insert(p);
  }

  StarqlReport run() {
    check_header();
    if (q_.where) {
      for (const auto& t : *q_.where) check_triple(t, "WHERE");
    }
    std::set<std::string> having_columns;
    if (q_.having) {
      index_names(*q_.having, all_indices_);
      std::set<std::string> values;
      having_vars(*q_.having, nullptr, values);
      for (const auto& v : values)
        if (all_indices_.count(v))
          add("kind-mixing", v, "HAVING", "'" + v + "' is used both as a state index and as a value variable", q_.having->pos);
      std::set<std::string> subjects, stream_values;
      triple_positions(*q_.having, subjects, stream_values);
      if (q_.where)
        for (const auto& t : *q_.where)
          if (t.subject.is_variable()) subjects.insert(t.subject.text);
      for (const auto& v : stream_values)
        if (subjects.count(v))
          add("kind-mixing", v, "HAVING", "?" + v + " is used both as an individual and as a stream value", q_.having->pos);
      having_columns = formula(*q_.having, {}, false);
      if (q_.having->kind == K::Compare || q_.having->kind == K::Not) having_columns.clear();
    }
    check_output(having_columns);
    return std::move(report_);
  }

 private:
  void add(std::string rule, std::string var, std::string clause, std::string msg, SourcePos pos = {}) {
    report_.violations.push_back({std::move(rule), std::move(var), std::move(clause), std::move(msg), pos});
  }

  void check_name(const std::string& name, const std::string& clause, SourcePos pos) {
    auto colon = name.find(':');
    if (colon == std::string::npos || colon == 0) return;
    std::string p = name.substr(0, colon);
    if (!prefixes_.count(p)) add("undeclared-prefix", name, clause, "prefix '" + p + "' is not declared", pos);
  }

  void check_triple(const Triple& t, const std::string& clause) {
    if (t.predicate.is_variable())
      add("variable-predicate", t.predicate.text, clause, "predicates must be names, not variables", t.predicate.pos);
    for (const Term* x : {&t.subject, &t.predicate, &t.object})
      if (x->kind == Term::Kind::Iri) check_name(x->text, clause, x->pos);
  }

  void check_header() {
    if (q_.static_sources) {
      check_name(q_.static_sources->first, "FROM STATIC", {});
      check_name(q_.static_sources->second, "FROM STATIC", {});
    }
    if (q_.pulse && q_.pulse->frequency <= 0)
      add("nonpositive-duration", q_.pulse->name, "CREATE PULSE", "pulse frequency must be positive", q_.pulse->pos);
    std::set<std::string> seen;
    for (const auto& s : q_.streams) {
      if (!seen.insert(s.name).second)
        add("duplicate-stream", s.name, "FROM STREAM", "stream '" + s.name + "' is listed twice", s.pos);
      if (s.slide <= 0) add("nonpositive-duration", s.name, "FROM STREAM", "window slide must be positive", s.pos);
    }
    if (!q_.streams.empty() || !q_.using_pulse.empty()) {
      if (q_.using_pulse.empty())
        add("unknown-pulse", "", "USING PULSE", "streams are read with USING PULSE <name>");
      else if (!q_.pulse || q_.pulse->name != q_.using_pulse)
        add("unknown-pulse", q_.using_pulse, "USING PULSE", "no pulse named '" + q_.using_pulse + "' is declared");
    }
    if (!q_.strategy.empty() && !text::iequals(q_.strategy, "StandardSequencing"))
      add("unsupported-strategy", q_.strategy, "SEQUENCE BY", "only StandardSequencing is supported");
  }

  void check_output(const std::set<std::string>& having_columns) {
    std::string clause = q_.output.construct ? "CONSTRUCT" : "SELECT";
    std::set<std::string> bound = where_variables(q_);
    bound.insert(having_columns.begin(), having_columns.end());
    std::vector<const Term*> items;
    if (q_.output.construct) {
      for (const auto& t : q_.output.templates) {
        if (!t.subject.is_variable() || t.predicate.kind != Term::Kind::Iri || t.predicate.text != "a" ||
            t.object.kind != Term::Kind::Iri) {
          add("unsupported-template", t.subject.text, clause, "templates have the form ?x a C", t.subject.pos);
          continue;
        }
        check_name(t.object.text, clause, t.object.pos);
        items.push_back(&t.subject);
      }
    } else {
      for (const auto& v : q_.output.variables) items.push_back(&v);
    }
    for (const Term* t : items) {
      if (all_indices_.count(t->text)) {
        add("time-variable-in-output", t->text, clause, "state index '" + t->text + "' cannot be part of the output", t->pos);
      } else if (!t->is_variable() || !bound.count(t->text)) {
        add("unbound-output-variable", t->text, clause, "'" + t->text + "' is not bound by WHERE or HAVING", t->pos);
      }
    }
  }

  // Columns produced by a HAVING formula: pattern-bound values and state indices.
  std::set<std::string> formula(const Expr& e, const std::set<std::string>& indices, bool in_and) {
    switch (e.kind) {
      case K::Graph: {
        std::set<std::string> out;
        if (e.index_is_value_var) {
          add("kind-mixing", e.name, "HAVING", "GRAPH needs a state index, not the value variable ?" + e.name, e.pos);
        } else if (!indices.count(e.name)) {
          add("unbound-index", e.name, "HAVING", "state index '" + e.name + "' is not bound by EXISTS or FORALL", e.pos);
        }
        out.insert(e.name);
        for (const auto& t : e.triples) check_triple(t, "HAVING");
        triple_vars(e.triples, out);
        return out;
      }
      case K::And: return conjunction(e, indices);
      case K::Or: {
        std::set<std::string> first;
        for (std::size_t k = 0; k < e.children.size(); ++k) {
          auto cols = formula(e.children[k], indices, false);
          if (k == 0) {
            first = cols;
          } else if (cols != first) {
            std::vector<std::string> diff;
            std::set_symmetric_difference(first.begin(), first.end(), cols.begin(), cols.end(), std::back_inserter(diff));
            add("unsafe-disjunction", diff.empty() ? "" : diff.front(), "HAVING",
                "both sides of OR must bind the same variables", e.pos);
          }
        }
        return first;
      }
      case K::Not:
        if (!in_and) add("unsupported-negation", "", "HAVING", "NOT needs a positive conjunct that binds its variables", e.pos);
        formula(e.children[0], indices, false);
        return {};
      case K::Compare:
        if (!in_and) {
          value(e, {}, nullptr, indices);
          std::set<std::string> vars;
          having_vars(e, nullptr, vars);
          for (const auto& v : vars)
            add("unsafe-comparison", v, "HAVING", "?" + v + " is compared without being bound by a graph pattern", e.pos);
        }
        return {};
      case K::Exists:
      case K::Forall: return quantifier(e, indices);
      default: return {};
    }
  }

  std::set<std::string> conjunction(const Expr& e, const std::set<std::string>& indices) {
    std::set<std::string> cols;
    bool positive = false;
    for (const auto& c : e.children) {
      if (c.kind == K::Compare || c.kind == K::Not) continue;
      auto more = formula(c, indices, true);
      cols.insert(more.begin(), more.end());
      positive = true;
    }
    for (const auto& c : e.children) {
      if (c.kind == K::Compare) {
        value(c, cols, nullptr, indices);
      } else if (c.kind == K::Not) {
        if (!positive) add("unsupported-negation", "", "HAVING", "NOT needs a positive conjunct that binds its variables", c.pos);
        formula(c.children[0], indices, false);
      }
    }
    return cols;
  }

  std::set<std::string> quantifier(const Expr& e, std::set<std::string> indices) {
    if (q_.sequence.empty() || e.sequence != q_.sequence)
      add("unknown-sequence", e.sequence, "HAVING", "no sequence named '" + e.sequence + "' (SEQUENCE BY ... AS name)", e.pos);
    std::set<std::string> outer_indices = indices;
    indices.insert(e.name);
    auto body = formula(e.children[0], indices, false);
    if (!body.count(e.name))
      add("unbound-index", e.name, "HAVING", "state index '" + e.name + "' is not used by any GRAPH pattern", e.pos);
    auto visible = visible_outside(q_, e);
    std::set<std::string> keys;
    for (const auto& c : body)
      if (c != e.name && (visible.count(c) || outer_indices.count(c))) keys.insert(c);
    if (e.children.size() > 1) {
      const Expr& cond = e.children[1];
      if (cond.kind == K::Compare || cond.kind == K::And || cond.kind == K::Or || cond.kind == K::Not) {
        condition(cond, keys, body, indices);
      }
    }
    return keys;
  }

  void condition(const Expr& e, const std::set<std::string>& keys, const std::set<std::string>& body,
                 const std::set<std::string>& indices) {
    if (e.kind == K::Compare) {
      value(e, keys, &body, indices);
      return;
    }
    for (const auto& c : e.children) condition(c, keys, body, indices);
  }

  // Checks a comparison or value expression. `bound` holds the variables that
  // may appear bare; `series` (in HAVING conditions) those that aggregates may read.
  ValueKind value(const Expr& e, const std::set<std::string>& bound, const std::set<std::string>* series,
                  const std::set<std::string>& indices, bool in_aggregate = false) {
    switch (e.kind) {
      case K::Number: return ValueKind::Neutral;
      case K::Var: {
        const auto& pool = in_aggregate && series ? *series : bound;
        if (!pool.count(e.name)) {
          if (in_aggregate)
            add("unsafe-aggregate", e.name, "HAVING", "?" + e.name + " is not bound by the quantified pattern", e.pos);
          else if (series && series->count(e.name))
            add("unsafe-comparison", e.name, "HAVING", "?" + e.name + " varies within the group; aggregate it", e.pos);
          else
            add("unsafe-comparison", e.name, "HAVING", "?" + e.name + " is compared without being bound by a graph pattern", e.pos);
        }
        return ValueKind::Value;
      }
      case K::Index:
        if (!bound.count(e.name) || in_aggregate) {
          if (in_aggregate)
            add("kind-mixing", e.name, "HAVING", "state index '" + e.name + "' used as a value", e.pos);
          else if (!indices.count(e.name) && !all_indices_.count(e.name))
            add("unbound-index", e.name, "HAVING", "'" + e.name + "' is not a bound state index", e.pos);
          else
            add("unsafe-comparison", e.name, "HAVING", "state index '" + e.name + "' is compared outside its pattern", e.pos);
        }
        return ValueKind::Index;
      case K::Negate: return value(e.children[0], bound, series, indices, in_aggregate);
      case K::Arith: {
        auto a = value(e.children[0], bound, series, indices, in_aggregate);
        auto b = value(e.children[1], bound, series, indices, in_aggregate);
        auto k = combine(a, b);
        if (k == ValueKind::Mixed && a != ValueKind::Mixed && b != ValueKind::Mixed)
          add("kind-mixing", "", "HAVING", "arithmetic mixes state indices and values", e.pos);
        return k;
      }
      case K::Compare: {
        auto a = value(e.children[0], bound, series, indices, in_aggregate);
        auto b = value(e.children[1], bound, series, indices, in_aggregate);
        if (combine(a, b) == ValueKind::Mixed && a != ValueKind::Mixed && b != ValueKind::Mixed)
          add("kind-mixing", "", "HAVING", "comparison mixes state indices and values", e.pos);
        return ValueKind::Neutral;
      }
      case K::Call: {
        std::string fn = canonical_function(e.name);
        if (fn.empty()) {
          add("unknown-function", e.name, "HAVING", "unknown function '" + e.name + "'", e.pos);
          for (const auto& a : e.children) value(a, bound, series, indices, in_aggregate);
          return ValueKind::Value;
        }
        std::size_t arity = fn == "pearson" || fn == "cosine" ? 2 : 1;
        if (e.children.size() != arity)
          add("function-arity", e.name, "HAVING",
              e.name + " takes " + std::to_string(arity) + " argument(s), got " + std::to_string(e.children.size()), e.pos);
        bool aggregate = fn != "abs";
        if (aggregate && in_aggregate)
          add("nested-aggregate", e.name, "HAVING", e.name + " is applied inside another aggregate", e.pos);
        else if (aggregate && !series)
          add("aggregate-outside-quantifier", e.name, "HAVING",
              e.name + " aggregates over states and belongs in the HAVING part of EXISTS/FORALL", e.pos);
        for (const auto& a : e.children) {
          auto k = value(a, bound, series, indices, in_aggregate || aggregate);
          if (k == ValueKind::Index && !in_aggregate && !aggregate)
            add("kind-mixing", e.name, "HAVING", e.name + " takes values, not state indices", e.pos);
        }
        return ValueKind::Value;
      }
      default: return ValueKind::Neutral;
    }
  }

  const StarqlQuery& q_;
  std::set<std::string> prefixes_;
  std::set<std::string> all_indices_;
  StarqlReport report_;
};

}  // namespace

std::set<std::string> where_variables(const StarqlQuery& q) {
  std::set<std::string> out;
  if (q.where) triple_vars(*q.where, out);
  return out;
}

std::set<std::string> output_variables(const StarqlQuery& q) {
  std::set<std::string> out;
  if (q.output.construct) {
    for (const auto& t : q.output.templates)
      if (t.subject.is_variable()) out.insert(t.subject.text);
  } else {
    for (const auto& v : q.output.variables) out.insert(v.text);
  }
  return out;
}

std::set<std::string> visible_outside(const StarqlQuery& q, const Expr& node) {
  std::set<std::string> out = where_variables(q);
  auto more = output_variables(q);
  out.insert(more.begin(), more.end());
  if (q.having) having_vars(*q.having, &node, out);
  return out;
}

StarqlReport validate(const StarqlQuery& q) { return Checker(q).run(); }

std::string to_string(const StarqlViolation& v) {
  std::string out = v.rule + " [" + v.clause + "]";
  if (v.pos.line > 0) out += " " + std::to_string(v.pos.line) + ":" + std::to_string(v.pos.column);
  if (!v.variable.empty()) out += " '" + v.variable + "'";
  return out + ": " + v.message;
}

void require_valid(const StarqlQuery& q) {
  auto report = validate(q);
  if (report.ok()) return;
  std::vector<std::string> lines;
  for (const auto& v : report.violations) lines.push_back(to_string(v));
  throw Error("invalid query:\n  " + text::join(lines, "\n  "));
}

}  // namespace obda::starql
