#include "obda/ontology/reasoning.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "obda/common/error.hpp"

namespace obda {

namespace {

using Edge = std::pair<Individual, Individual>;

std::vector<Edge> extension(const Dataset& d, const Role& r) {
  std::vector<Edge> out;
  for (const auto& a : d.roles) {
    if (a.role != r.name) continue;
    out.push_back(r.inverse ? Edge{a.object, a.subject} : Edge{a.subject, a.object});
  }
  return out;
}

RoleAssertion make_role(const Role& r, const Individual& x, const Individual& y) {
  return r.inverse ? RoleAssertion{r.name, y, x} : RoleAssertion{r.name, x, y};
}

std::set<Individual> members_of(const Concept& c, const Dataset& d) {
  std::set<Individual> out;
  switch (c.kind) {
    case ConceptKind::Atomic:
      for (const auto& a : d.concepts)
        if (a.concept_name == c.name) out.insert(a.individual);
      break;
    case ConceptKind::ExistsRole:
      for (const auto& [x, y] : extension(d, c.role())) out.insert(x);
      break;
    case ConceptKind::ExistsAttribute:
      for (const auto& a : d.attributes)
        if (a.attribute == c.name) out.insert(a.subject);
      break;
  }
  return out;
}

Dataset close_attributes(Dataset c, const Ontology& o) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<AttributeAssertion> added;
    for (const auto& axiom : o.axioms()) {
      const auto* inc = std::get_if<AttributeInclusion>(&axiom);
      if (!inc) continue;
      for (const auto& a : c.attributes)
        if (a.attribute == inc->sub) added.push_back({inc->sup, a.subject, a.value});
    }
    for (auto& a : added) changed |= c.add(std::move(a));
  }
  return c;
}

/// Saturation of role and concept assertions given a closed attribute relation.
void close_roles_and_concepts(Dataset& c, const Ontology& o) {
  std::vector<std::pair<std::string, std::set<Individual>>> aggregate_heads;
  for (const auto& axiom : o.axioms()) {
    const auto* inc = std::get_if<AggregateInclusion>(&axiom);
    if (inc && inc->sup.kind == ConceptKind::Atomic) aggregate_heads.emplace_back(inc->sup.name, aggregate_members(inc->sub, c));
  }
  for (const auto& [name, who] : aggregate_heads)
    for (const auto& x : who) c.add(ConceptAssertion{name, x});

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<RoleAssertion> roles;
    std::vector<ConceptAssertion> concepts;
    for (const auto& axiom : o.axioms()) {
      if (const auto* ri = std::get_if<RoleInclusion>(&axiom)) {
        for (const auto& [x, y] : extension(c, ri->sub)) roles.push_back(make_role(ri->sup, x, y));
      } else if (const auto* ci = std::get_if<ConceptInclusion>(&axiom)) {
        if (ci->sup.kind != ConceptKind::Atomic) continue;
        for (const auto& x : members_of(ci->sub, c)) concepts.push_back({ci->sup.name, x});
      }
    }
    for (auto& a : roles) changed |= c.add(std::move(a));
    for (auto& a : concepts) changed |= c.add(std::move(a));
  }
}

std::string role_fact(const Role& r, const Individual& x, const Individual& y) {
  auto a = make_role(r, x, y);
  return a.role + "(" + a.subject.name + "," + a.object.name + ")";
}

}  // namespace

std::set<Individual> concept_members(const Concept& c, const Dataset& d) { return members_of(c, d); }

ValidationReport validate_ontology(const Ontology& o) {
  ValidationReport report;
  const auto& axioms = o.axioms();
  for (std::size_t i = 0; i < axioms.size(); ++i) {
    if (const auto* f = std::get_if<FunctionalRole>(&axioms[i])) {
      for (std::size_t j = 0; j < axioms.size(); ++j) {
        const auto* inc = std::get_if<RoleInclusion>(&axioms[j]);
        if (inc && inc->sup.name == f->role.name) {
          report.violations.push_back({"funct-role-inclusion", {i, j},
                                       "'" + to_string(axioms[i]) + "' forbids '" + to_string(axioms[j]) + "'"});
        }
      }
    } else if (const auto* fa = std::get_if<FunctionalAttribute>(&axioms[i])) {
      for (std::size_t j = 0; j < axioms.size(); ++j) {
        const auto* inc = std::get_if<AttributeInclusion>(&axioms[j]);
        if (inc && inc->sup == fa->attribute) {
          report.violations.push_back({"funct-attribute-inclusion", {i, j},
                                       "'" + to_string(axioms[i]) + "' forbids '" + to_string(axioms[j]) + "'"});
        }
      }
    } else if (const auto* ci = std::get_if<ConceptInclusion>(&axioms[i])) {
      if (!ci->sup.is_basic())
        report.violations.push_back({"attribute-existential-rhs", {i}, "'" + to_string(axioms[i]) + "' has \\exists F on the right"});
    } else if (const auto* ai = std::get_if<AggregateInclusion>(&axioms[i])) {
      if (!ai->sup.is_basic())
        report.violations.push_back({"attribute-existential-rhs", {i}, "'" + to_string(axioms[i]) + "' has \\exists F on the right"});
    } else if (const auto* cd = std::get_if<ConceptDisjointness>(&axioms[i])) {
      if (!cd->first.is_basic() || !cd->second.is_basic())
        report.violations.push_back({"non-basic-disjointness", {i}, "'" + to_string(axioms[i]) + "' uses a non-basic concept"});
    }
  }

  // A name must denote one kind of predicate throughout.
  std::map<std::string, std::set<PredicateKind>> kinds;
  auto note = [&](const Concept& c) {
    kinds[c.name].insert(c.kind == ConceptKind::Atomic     ? PredicateKind::Concept
                         : c.kind == ConceptKind::ExistsRole ? PredicateKind::Role
                                                             : PredicateKind::Attribute);
  };
  for (const auto& axiom : axioms) {
    if (const auto* a = std::get_if<ConceptInclusion>(&axiom)) { note(a->sub); note(a->sup); }
    if (const auto* a = std::get_if<AggregateInclusion>(&axiom)) { kinds[a->sub.attribute].insert(PredicateKind::Attribute); note(a->sup); }
    if (const auto* a = std::get_if<RoleInclusion>(&axiom)) { kinds[a->sub.name].insert(PredicateKind::Role); kinds[a->sup.name].insert(PredicateKind::Role); }
    if (const auto* a = std::get_if<AttributeInclusion>(&axiom)) { kinds[a->sub].insert(PredicateKind::Attribute); kinds[a->sup].insert(PredicateKind::Attribute); }
    if (const auto* a = std::get_if<FunctionalRole>(&axiom)) kinds[a->role.name].insert(PredicateKind::Role);
    if (const auto* a = std::get_if<FunctionalAttribute>(&axiom)) kinds[a->attribute].insert(PredicateKind::Attribute);
    if (const auto* a = std::get_if<ConceptDisjointness>(&axiom)) { note(a->first); note(a->second); }
    if (const auto* a = std::get_if<RoleDisjointness>(&axiom)) { kinds[a->first.name].insert(PredicateKind::Role); kinds[a->second.name].insert(PredicateKind::Role); }
    if (const auto* a = std::get_if<AttributeDisjointness>(&axiom)) { kinds[a->first].insert(PredicateKind::Attribute); kinds[a->second].insert(PredicateKind::Attribute); }
  }
  for (const auto& [name, k] : kinds) {
    if (k.size() > 1) report.violations.push_back({"kind-conflict", {}, "'" + name + "' is used as more than one kind of predicate"});
  }
  return report;
}

void require_valid(const Ontology& o) {
  auto report = validate_ontology(o);
  if (report.ok()) return;
  std::string msg = "invalid ontology:";
  for (const auto& v : report.violations) msg += "\n  [" + v.rule + "] " + v.message;
  throw Error(msg);
}

Dataset deductive_closure(const Dataset& d, const Ontology& o) {
  Dataset c = close_attributes(d, o);
  close_roles_and_concepts(c, o);
  return c;
}

Rational aggregate_value(AggFn fn, const std::vector<Rational>& values) {
  switch (fn) {
    case AggFn::Min: return *std::min_element(values.begin(), values.end());
    case AggFn::Max: return *std::max_element(values.begin(), values.end());
    case AggFn::Count: return Rational(static_cast<long long>(values.size()));
    case AggFn::CountDistinct: return Rational(static_cast<long long>(std::set<Rational>(values.begin(), values.end()).size()));
    case AggFn::Sum:
    case AggFn::Avg: {
      Rational sum = 0;
      for (const auto& v : values) sum += v;
      if (fn == AggFn::Sum) return sum;
      return sum / Rational(static_cast<long long>(values.size()));
    }
  }
  return Rational(0);
}

std::set<Individual> aggregate_members(const AggregateConcept& e, const Dataset& closed) {
  std::map<Individual, std::vector<Rational>> groups;
  for (const auto& a : closed.attributes)
    if (a.attribute == e.attribute) groups[a.subject].push_back(a.value);
  std::set<Individual> out;
  for (const auto& [who, values] : groups)
    if (compare(aggregate_value(e.fn, values), e.cmp, e.threshold)) out.insert(who);
  return out;
}

std::set<Individual> eval_aggregate_concept(const AggregateConcept& e, const Dataset& d, const Ontology& o) {
  return aggregate_members(e, close_attributes(d, o));
}

std::set<Concept> implied_concepts(const Concept& c, const Ontology& o) {
  std::set<Concept> seen{c};
  std::deque<Concept> queue{c};
  auto push = [&](const Concept& x) {
    if (seen.insert(x).second) queue.push_back(x);
  };
  while (!queue.empty()) {
    Concept cur = queue.front();
    queue.pop_front();
    for (const auto& axiom : o.axioms()) {
      if (const auto* ci = std::get_if<ConceptInclusion>(&axiom)) {
        if (ci->sub == cur) push(ci->sup);
      } else if (const auto* ri = std::get_if<RoleInclusion>(&axiom)) {
        if (cur.kind != ConceptKind::ExistsRole) continue;
        if (ri->sub == cur.role()) push(Concept::exists(ri->sup));
        if (ri->sub.inverted() == cur.role()) push(Concept::exists(ri->sup.inverted()));
      } else if (const auto* ai = std::get_if<AttributeInclusion>(&axiom)) {
        if (cur.kind == ConceptKind::ExistsAttribute && ai->sub == cur.name) push(Concept::exists_attribute(ai->sup));
      }
    }
  }
  return seen;
}

std::set<Role> implied_roles(const Role& r, const Ontology& o) {
  std::set<Role> seen{r};
  std::deque<Role> queue{r};
  while (!queue.empty()) {
    Role cur = queue.front();
    queue.pop_front();
    for (const auto& axiom : o.axioms()) {
      const auto* ri = std::get_if<RoleInclusion>(&axiom);
      if (!ri) continue;
      if (ri->sub == cur && seen.insert(ri->sup).second) queue.push_back(ri->sup);
      if (ri->sub.inverted() == cur && seen.insert(ri->sup.inverted()).second) queue.push_back(ri->sup.inverted());
    }
  }
  return seen;
}

SatisfiabilityReport check_satisfiability(const Ontology& o, const Dataset& d) {
  SatisfiabilityReport report;
  const Dataset c = deductive_closure(d, o);

  auto violate = [&](const Axiom& axiom, std::vector<std::string> witnesses) {
    report.satisfiable = false;
    report.violations.push_back({to_string(axiom), std::move(witnesses)});
  };

  // Types of named individuals, closed under TBox entailment.
  std::map<Individual, std::set<Concept>> full_type;
  for (const auto& x : c.individuals()) full_type[x];
  for (const auto& a : c.concepts) full_type[a.individual].insert(Concept::atomic(a.concept_name));
  for (const auto& a : c.roles) {
    full_type[a.subject].insert(Concept::exists(Role{a.role, false}));
    full_type[a.object].insert(Concept::exists(Role{a.role, true}));
  }
  for (const auto& a : c.attributes) full_type[a.subject].insert(Concept::exists_attribute(a.attribute));
  for (auto& [x, type] : full_type) {
    std::set<Concept> closed;
    for (const auto& t : type) {
      auto imp = implied_concepts(t, o);
      closed.insert(imp.begin(), imp.end());
    }
    type = std::move(closed);
  }

  // Anonymous successors: every \exists S in a realised type forces an
  // S-successor typed by implied(\exists S^-).
  std::map<Role, std::pair<std::set<Concept>, std::string>> anonymous;  // S -> (type, origin)
  std::deque<Role> pending;
  auto enqueue_existentials = [&](const std::set<Concept>& type, const std::string& origin) {
    for (const auto& t : type) {
      if (t.kind != ConceptKind::ExistsRole) continue;
      Role s = t.role();
      if (anonymous.count(s)) continue;
      anonymous[s] = {implied_concepts(Concept::exists(s.inverted()), o), origin};
      pending.push_back(s);
    }
  };
  for (const auto& [x, type] : full_type) enqueue_existentials(type, x.name);
  while (!pending.empty()) {
    Role s = pending.front();
    pending.pop_front();
    auto [type, origin] = anonymous[s];
    enqueue_existentials(type, "anonymous " + to_string(s) + "-successor of " + origin);
  }

  for (const auto& axiom : o.axioms()) {
    if (const auto* cd = std::get_if<ConceptDisjointness>(&axiom)) {
      for (const auto& [x, type] : full_type)
        if (type.count(cd->first) && type.count(cd->second))
          violate(axiom, {x.name + " : " + to_string(cd->first), x.name + " : " + to_string(cd->second)});
      for (const auto& [s, entry] : anonymous) {
        const auto& [type, origin] = entry;
        if (type.count(cd->first) && type.count(cd->second))
          violate(axiom, {"anonymous " + to_string(s) + "-successor of " + origin});
      }
    } else if (const auto* rd = std::get_if<RoleDisjointness>(&axiom)) {
      auto first = extension(c, rd->first);
      auto second = extension(c, rd->second);
      std::set<Edge> lhs(first.begin(), first.end());
      for (const auto& [x, y] : second)
        if (lhs.count({x, y})) violate(axiom, {role_fact(rd->first, x, y), role_fact(rd->second, x, y)});
      for (const auto& [s, entry] : anonymous) {
        auto roles = implied_roles(s, o);
        bool clash = (roles.count(rd->first) && roles.count(rd->second)) ||
                     (roles.count(rd->first.inverted()) && roles.count(rd->second.inverted()));
        if (clash) violate(axiom, {"anonymous " + to_string(s) + "-edge from " + entry.second});
      }
    } else if (const auto* ad = std::get_if<AttributeDisjointness>(&axiom)) {
      for (const auto& a : c.attributes) {
        if (a.attribute != ad->first) continue;
        if (c.attributes.count(AttributeAssertion{ad->second, a.subject, a.value}))
          violate(axiom, {ad->first + "(" + a.subject.name + "," + format_rational(a.value) + ")",
                          ad->second + "(" + a.subject.name + "," + format_rational(a.value) + ")"});
      }
    } else if (const auto* fr = std::get_if<FunctionalRole>(&axiom)) {
      std::map<Individual, std::vector<Individual>> succ;
      for (const auto& [x, y] : extension(c, fr->role)) succ[x].push_back(y);
      for (const auto& [x, ys] : succ)
        if (ys.size() > 1) violate(axiom, {role_fact(fr->role, x, ys[0]), role_fact(fr->role, x, ys[1])});
    } else if (const auto* fa = std::get_if<FunctionalAttribute>(&axiom)) {
      std::map<Individual, std::vector<Rational>> values;
      for (const auto& a : c.attributes)
        if (a.attribute == fa->attribute) values[a.subject].push_back(a.value);
      for (const auto& [x, vs] : values)
        if (vs.size() > 1)
          violate(axiom, {fa->attribute + "(" + x.name + "," + format_rational(vs[0]) + ")",
                          fa->attribute + "(" + x.name + "," + format_rational(vs[1]) + ")"});
    }
  }
  return report;
}

}  // namespace obda
