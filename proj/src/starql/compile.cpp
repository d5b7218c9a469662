#include "obda/starql/compile.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "obda/common/error.hpp"
#include "obda/common/text.hpp"
#include "obda/mapping/unfold.hpp"
#include "obda/mapping/unfold_streaming.hpp"
#include "obda/rewrite/rewriter.hpp"
#include "obda/starql/validate.hpp"

namespace obda::starql {

namespace {

void having_variables(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Var) out.insert(e.name);
  for (const auto& t : e.triples)
    for (const Term* term : {&t.subject, &t.object})
      if (term->is_variable()) out.insert(term->text);
  for (const auto& c : e.children) having_variables(c, out);
}

obda::Term cq_term(const Term& t, bool value_position) {
  switch (t.kind) {
    case Term::Kind::Variable: return obda::Term::variable(t.text);
    case Term::Kind::Number: return obda::Term::data(t.number);
    case Term::Kind::Iri:
      if (value_position) {
        auto v = parse_rational(local_name(t.text));
        if (!v) throw Error("'" + t.text + "' is not a data value");
        return obda::Term::data(*v);
      }
      return obda::Term::individual(local_name(t.text));
  }
  return {};
}

void push_unique(std::vector<std::string>& out, const std::string& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

}  // namespace

ConjunctiveQuery where_query(const StarqlQuery& q, const Vocabulary& vocab, const std::vector<std::string>& head) {
  ConjunctiveQuery cq;
  for (const auto& h : head) cq.head.push_back(obda::Term::variable(h));
  if (!q.where) return cq;
  for (const auto& t : *q.where) {
    if (t.predicate.text == "a") {
      if (t.object.kind != Term::Kind::Iri) throw Error("class of '" + print(t.subject) + " a ...' must be a name");
      std::string c = local_name(t.object.text);
      if (!vocab.contains(PredicateKind::Concept, c)) throw Error("unknown concept '" + c + "' in WHERE");
      cq.atoms.push_back(obda::Atom::concept_atom(c, cq_term(t.subject, false)));
      continue;
    }
    std::string p = local_name(t.predicate.text);
    auto kind = vocab.kind_of(p);
    if (!kind || *kind == PredicateKind::Concept) throw Error("unknown property '" + p + "' in WHERE");
    if (*kind == PredicateKind::Role)
      cq.atoms.push_back(obda::Atom::role_atom(p, cq_term(t.subject, false), cq_term(t.object, false)));
    else
      cq.atoms.push_back(obda::Atom::attribute_atom(p, cq_term(t.subject, false), cq_term(t.object, true)));
  }
  return cq;
}

ExecutablePlan compile(const StarqlQuery& q, const Ontology& o, const MappingSet& m) {
  require_valid(q);
  ExecutablePlan plan;
  plan.query = q;

  if (q.output.construct) {
    for (const auto& t : q.output.templates)
      for (const Term* term : {&t.subject, &t.object})
        if (term->is_variable()) push_unique(plan.output_columns, term->text);
  } else {
    for (const auto& v : q.output.variables) push_unique(plan.output_columns, v.text);
  }

  std::set<std::string> used(plan.output_columns.begin(), plan.output_columns.end());
  if (q.having) having_variables(*q.having, used);
  if (q.where) {
    for (const auto& t : *q.where)
      for (const Term* term : {&t.subject, &t.object})
        if (term->is_variable() && used.count(term->text)) push_unique(plan.static_columns, term->text);
    Vocabulary vocab = o.vocabulary();
    vocab.merge(m.vocabulary());
    plan.static_query = where_query(q, vocab, plan.static_columns);
    plan.static_rewriting = rewrite(*plan.static_query, o, &vocab);
    plan.static_plan = unfold_static(*plan.static_rewriting, m, o);
  }
  if (q.having) plan.stream_plan = unfold_streaming(q, m, plan.static_columns);
  return plan;
}

std::string explain(const ExecutablePlan& p) {
  const auto& q = p.query;
  std::ostringstream out;
  out << "Output " << q.output_stream << (q.output.construct ? " CONSTRUCT" : " SELECT") << " ("
      << text::join(p.output_columns, ", ") << ")\n";
  if (q.pulse)
    out << "Pulse " << q.pulse->name << " start "
        << (q.pulse->start ? print_duration(*q.pulse->start) : std::string("NOW")) << " every "
        << print_duration(q.pulse->frequency) << "\n";
  for (const auto& s : q.streams) {
    out << "Stream " << s.name << " range " << print_duration(s.range) << " slide " << print_duration(s.slide);
    if (s.setback) out << " setback " << print_duration(*s.setback);
    out << "\n";
  }
  if (!q.sequence.empty()) out << "Sequence " << q.sequence << " by " << q.strategy << "\n";
  if (p.static_plan) {
    out << "Static (" << text::join(p.static_columns, ", ") << ")\n";
    out << "  rewriting " << p.static_rewriting->disjuncts.size() << " CQs\n";
    out << ir::explain(*p.static_plan, 1);
  }
  if (p.stream_plan) {
    out << "Having\n";
    out << ir::explain(*p.stream_plan, 1);
  }
  return out.str();
}

}  // namespace obda::starql
