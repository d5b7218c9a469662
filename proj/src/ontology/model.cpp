#include "obda/ontology/model.hpp"

#include <deque>

#include "obda/common/text.hpp"

namespace obda {

void Vocabulary::add(PredicateKind kind, const std::string& name) {
  switch (kind) {
    case PredicateKind::Concept: concepts_.insert(name); break;
    case PredicateKind::Role: roles_.insert(name); break;
    case PredicateKind::Attribute: attributes_.insert(name); break;
  }
}

std::optional<PredicateKind> Vocabulary::kind_of(const std::string& name) const {
  if (attributes_.count(name)) return PredicateKind::Attribute;
  if (roles_.count(name)) return PredicateKind::Role;
  if (concepts_.count(name)) return PredicateKind::Concept;
  return std::nullopt;
}

bool Vocabulary::contains(PredicateKind kind, const std::string& name) const {
  switch (kind) {
    case PredicateKind::Concept: return concepts_.count(name) > 0;
    case PredicateKind::Role: return roles_.count(name) > 0;
    case PredicateKind::Attribute: return attributes_.count(name) > 0;
  }
  return false;
}

void Vocabulary::merge(const Vocabulary& other) {
  concepts_.insert(other.concepts_.begin(), other.concepts_.end());
  roles_.insert(other.roles_.begin(), other.roles_.end());
  attributes_.insert(other.attributes_.begin(), other.attributes_.end());
}

namespace {

void add_concept(Vocabulary& v, const Concept& c) {
  switch (c.kind) {
    case ConceptKind::Atomic: v.add(PredicateKind::Concept, c.name); break;
    case ConceptKind::ExistsRole: v.add(PredicateKind::Role, c.name); break;
    case ConceptKind::ExistsAttribute: v.add(PredicateKind::Attribute, c.name); break;
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Vocabulary Ontology::vocabulary() const {
  Vocabulary v;
  for (const auto& axiom : axioms_) {
    std::visit(overloaded{
                   [&](const ConceptInclusion& a) { add_concept(v, a.sub); add_concept(v, a.sup); },
                   [&](const AggregateInclusion& a) {
                     v.add(PredicateKind::Attribute, a.sub.attribute);
                     add_concept(v, a.sup);
                   },
                   [&](const RoleInclusion& a) {
                     v.add(PredicateKind::Role, a.sub.name);
                     v.add(PredicateKind::Role, a.sup.name);
                   },
                   [&](const AttributeInclusion& a) {
                     v.add(PredicateKind::Attribute, a.sub);
                     v.add(PredicateKind::Attribute, a.sup);
                   },
                   [&](const FunctionalRole& a) { v.add(PredicateKind::Role, a.role.name); },
                   [&](const FunctionalAttribute& a) { v.add(PredicateKind::Attribute, a.attribute); },
                   [&](const ConceptDisjointness& a) { add_concept(v, a.first); add_concept(v, a.second); },
                   [&](const RoleDisjointness& a) {
                     v.add(PredicateKind::Role, a.first.name);
                     v.add(PredicateKind::Role, a.second.name);
                   },
                   [&](const AttributeDisjointness& a) {
                     v.add(PredicateKind::Attribute, a.first);
                     v.add(PredicateKind::Attribute, a.second);
                   },
               },
               axiom);
  }
  return v;
}

std::vector<std::string> Ontology::sub_attributes(const std::string& attribute) const {
  std::vector<std::string> order{attribute};
  std::set<std::string> seen{attribute};
  std::deque<std::string> queue{attribute};
  while (!queue.empty()) {
    auto current = queue.front();
    queue.pop_front();
    for (const auto& axiom : axioms_) {
      const auto* inc = std::get_if<AttributeInclusion>(&axiom);
      if (inc && inc->sup == current && seen.insert(inc->sub).second) {
        order.push_back(inc->sub);
        queue.push_back(inc->sub);
      }
    }
  }
  return order;
}

std::set<Individual> Dataset::individuals() const {
  std::set<Individual> out;
  for (const auto& a : concepts) out.insert(a.individual);
  for (const auto& a : roles) {
    out.insert(a.subject);
    out.insert(a.object);
  }
  for (const auto& a : attributes) out.insert(a.subject);
  return out;
}

bool Dataset::contains_all(const Dataset& other) const {
  for (const auto& a : other.concepts)
    if (!concepts.count(a)) return false;
  for (const auto& a : other.roles)
    if (!roles.count(a)) return false;
  for (const auto& a : other.attributes)
    if (!attributes.count(a)) return false;
  return true;
}

bool compare(const Rational& lhs, CmpOp op, const Rational& rhs) {
  switch (op) {
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
  }
  return false;
}

std::string to_string(const Role& r) { return r.inverse ? "inv(" + r.name + ")" : r.name; }

std::string to_string(const Concept& c) {
  switch (c.kind) {
    case ConceptKind::Atomic: return c.name;
    case ConceptKind::ExistsRole: return "exists " + to_string(c.role());
    case ConceptKind::ExistsAttribute: return "exists " + c.name;
  }
  return {};
}

std::string to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Count: return "count";
    case AggFn::CountDistinct: return "countd";
    case AggFn::Sum: return "sum";
    case AggFn::Avg: return "avg";
  }
  return {};
}

std::string to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Ge: return ">=";
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
  }
  return {};
}

std::optional<AggFn> parse_agg_fn(std::string_view s) {
  if (s == "min") return AggFn::Min;
  if (s == "max") return AggFn::Max;
  if (s == "count") return AggFn::Count;
  if (s == "countd") return AggFn::CountDistinct;
  if (s == "sum") return AggFn::Sum;
  if (s == "avg") return AggFn::Avg;
  return std::nullopt;
}

std::optional<CmpOp> parse_cmp_op(std::string_view s) {
  if (s == ">=") return CmpOp::Ge;
  if (s == "<=") return CmpOp::Le;
  if (s == "<") return CmpOp::Lt;
  if (s == ">") return CmpOp::Gt;
  if (s == "=" || s == "==") return CmpOp::Eq;
  if (s == "!=" || s == "<>") return CmpOp::Ne;
  return std::nullopt;
}

std::string to_string(const AggregateConcept& e) {
  return "agg:" + to_string(e.fn) + " " + e.attribute + " " + to_string(e.cmp) + " " + format_rational(e.threshold);
}

std::string to_string(const Axiom& axiom) {
  return std::visit(
      overloaded{
          [](const ConceptInclusion& a) { return to_string(a.sub) + " sub " + to_string(a.sup); },
          [](const AggregateInclusion& a) { return to_string(a.sub) + " sub " + to_string(a.sup); },
          [](const RoleInclusion& a) { return to_string(a.sub) + " subrole " + to_string(a.sup); },
          [](const AttributeInclusion& a) { return a.sub + " subattr " + a.sup; },
          [](const FunctionalRole& a) { return "funct " + to_string(a.role); },
          [](const FunctionalAttribute& a) { return "funct attr " + a.attribute; },
          [](const ConceptDisjointness& a) { return "disjoint " + to_string(a.first) + " " + to_string(a.second); },
          [](const RoleDisjointness& a) {
            return "disjoint role " + to_string(a.first) + " " + to_string(a.second);
          },
          [](const AttributeDisjointness& a) { return "disjoint attr " + a.first + " " + a.second; },
      },
      axiom);
}

std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Variable: return t.name;
    case Term::Kind::Individual: return "'" + t.name + "'";
    case Term::Kind::Value: return format_rational(t.value);
  }
  return {};
}

std::string to_string(const Atom& a) {
  std::vector<std::string> args;
  for (const auto& t : a.args) args.push_back(to_string(t));
  std::string pred = a.kind == AtomKind::Aggregate ? "[" + to_string(*a.aggregate) + "]" : a.predicate;
  return pred + "(" + text::join(args, ",") + ")";
}

std::string to_string(const ConjunctiveQuery& q) {
  std::vector<std::string> head;
  for (const auto& t : q.head) head.push_back(to_string(t));
  std::vector<std::string> body;
  for (const auto& a : q.atoms) body.push_back(to_string(a));
  return "q(" + text::join(head, ",") + ") :- " + text::join(body, ", ");
}

}  // namespace obda
