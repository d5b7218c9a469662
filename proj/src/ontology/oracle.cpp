#include "obda/ontology/oracle.hpp"

#include <functional>
#include <map>

#include "obda/common/text.hpp"

namespace obda {

ChaseResult bounded_chase(const Dataset& d, const Ontology& o, int max_depth) {
  ChaseResult result;
  Dataset& inst = result.instance;
  inst = deductive_closure(d, o);
  std::map<Individual, int> depth;
  int counter = 0;

  bool fired = true;
  while (fired) {
    fired = false;
    for (const auto& axiom : o.axioms()) {
      std::set<Individual> who;
      Concept head;
      if (const auto* ci = std::get_if<ConceptInclusion>(&axiom)) {
        if (ci->sup.kind != ConceptKind::ExistsRole) continue;
        head = ci->sup;
        who = concept_members(ci->sub, inst);
      } else if (const auto* ai = std::get_if<AggregateInclusion>(&axiom)) {
        if (ai->sup.kind != ConceptKind::ExistsRole) continue;
        head = ai->sup;
        who = aggregate_members(ai->sub, inst);
      } else {
        continue;
      }
      auto satisfied = concept_members(head, inst);
      bool added = false;
      for (const auto& x : who) {
        if (satisfied.count(x)) continue;
        int dx = depth.count(x) ? depth[x] : 0;
        if (dx >= max_depth) {
          result.exhausted = true;
          continue;
        }
        Individual n{"_:n" + std::to_string(++counter)};
        depth[n] = dx + 1;
        Role r = head.role();
        inst.add(r.inverse ? RoleAssertion{r.name, n, x} : RoleAssertion{r.name, x, n});
        added = true;
      }
      if (added) {
        inst = deductive_closure(inst, o);
        fired = true;
      }
    }
  }
  return result;
}

namespace {

using Binding = std::map<std::string, Term>;

struct Index {
  std::map<std::string, std::vector<Term>> concepts;
  std::map<std::string, std::vector<std::pair<Term, Term>>> binary;  // roles and attributes share the namespace
};

Index build_index(const Dataset& d) {
  Index idx;
  for (const auto& a : d.concepts) idx.concepts[a.concept_name].push_back(Term::individual(a.individual.name));
  for (const auto& a : d.roles)
    idx.binary[a.role].emplace_back(Term::individual(a.subject.name), Term::individual(a.object.name));
  for (const auto& a : d.attributes)
    idx.binary[a.attribute].emplace_back(Term::individual(a.subject.name), Term::data(a.value));
  return idx;
}

// Unifies a query term with a ground term under `b`; returns false on clash.
bool match(const Term& t, const Term& value, Binding& b, std::vector<std::string>& bound) {
  if (t.is_anonymous()) return true;
  if (t.is_constant()) return t == value;
  auto it = b.find(t.name);
  if (it != b.end()) return it->second == value;
  b.emplace(t.name, value);
  bound.push_back(t.name);
  return true;
}

void unbind(Binding& b, std::vector<std::string>& bound, std::size_t mark) {
  while (bound.size() > mark) {
    b.erase(bound.back());
    bound.pop_back();
  }
}

}  // namespace

std::set<AnswerTuple> evaluate_cq(const ConjunctiveQuery& q, const Dataset& instance, const Dataset& attribute_source) {
  const Index idx = build_index(instance);
  std::map<AggregateConcept, std::vector<Term>> aggregates;
  for (const auto& atom : q.atoms) {
    if (atom.kind != AtomKind::Aggregate || aggregates.count(*atom.aggregate)) continue;
    auto& v = aggregates[*atom.aggregate];
    for (const auto& x : aggregate_members(*atom.aggregate, attribute_source)) v.push_back(Term::individual(x.name));
  }
  static const std::vector<Term> no_terms;
  static const std::vector<std::pair<Term, Term>> no_pairs;

  std::set<AnswerTuple> out;
  Binding b;
  std::vector<std::string> bound;
  std::function<void(std::size_t)> search = [&](std::size_t i) {
    if (i == q.atoms.size()) {
      AnswerTuple t;
      for (const auto& h : q.head) t.push_back(h.is_variable() ? b.at(h.name) : h);
      out.insert(std::move(t));
      return;
    }
    const Atom& atom = q.atoms[i];
    const std::size_t mark = bound.size();
    if (atom.kind == AtomKind::Concept || atom.kind == AtomKind::Aggregate) {
      const std::vector<Term>* cands = &no_terms;
      if (atom.kind == AtomKind::Concept) {
        auto it = idx.concepts.find(atom.predicate);
        if (it != idx.concepts.end()) cands = &it->second;
      } else {
        cands = &aggregates.at(*atom.aggregate);
      }
      for (const auto& v : *cands) {
        if (match(atom.args[0], v, b, bound)) search(i + 1);
        unbind(b, bound, mark);
      }
    } else {
      auto it = idx.binary.find(atom.predicate);
      const auto& cands = it == idx.binary.end() ? no_pairs : it->second;
      for (const auto& [s, v] : cands) {
        // roles hold individuals on both sides, attributes a value on the right
        if (atom.kind == AtomKind::Role && v.kind != Term::Kind::Individual) continue;
        if (atom.kind == AtomKind::Attribute && v.kind != Term::Kind::Value) continue;
        if (match(atom.args[0], s, b, bound) && match(atom.args[1], v, b, bound)) search(i + 1);
        unbind(b, bound, mark);
      }
    }
  };
  search(0);
  return out;
}

std::set<AnswerTuple> evaluate_ucq(const UnionOfCQs& u, const Dataset& instance, const Dataset& attribute_source) {
  std::set<AnswerTuple> out;
  for (const auto& q : u.disjuncts) {
    auto part = evaluate_cq(q, instance, attribute_source);
    out.insert(part.begin(), part.end());
  }
  return out;
}

std::set<AnswerTuple> evaluate_over_raw(const UnionOfCQs& u, const Dataset& d, const Ontology& o) {
  // Only the attribute part of the closure is needed for aggregate atoms.
  Dataset attributes;
  attributes.attributes = d.attributes;
  Ontology attribute_axioms;
  for (const auto& axiom : o.axioms())
    if (std::holds_alternative<AttributeInclusion>(axiom)) attribute_axioms.add(axiom);
  return evaluate_ucq(u, d, deductive_closure(attributes, attribute_axioms));
}

OracleResult certain_answers_oracle(const ConjunctiveQuery& q, const Ontology& o, const Dataset& d, OracleOptions options) {
  OracleResult result;
  result.satisfiability = check_satisfiability(o, d);
  if (!result.satisfiability.satisfiable) {
    result.status = OracleStatus::Unsatisfiable;
    return result;
  }
  ChaseResult chase = bounded_chase(d, o, options.max_depth);
  for (auto& t : evaluate_cq(q, chase.instance, chase.instance)) {
    bool has_null = false;
    for (const auto& c : t) has_null |= c.kind == Term::Kind::Individual && Individual{c.name}.is_null();
    if (!has_null) result.answers.insert(t);
  }
  result.status = chase.exhausted ? OracleStatus::DepthExhausted : OracleStatus::Complete;
  return result;
}

std::string to_string(const AnswerTuple& t) {
  std::vector<std::string> parts;
  for (const auto& c : t) parts.push_back(c.kind == Term::Kind::Individual ? c.name : to_string(c));
  return "(" + text::join(parts, ",") + ")";
}

std::string to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::Complete: return "complete";
    case OracleStatus::DepthExhausted: return "depth-exhausted";
    case OracleStatus::Unsatisfiable: return "unsatisfiable";
  }
  return {};
}

}  // namespace obda
