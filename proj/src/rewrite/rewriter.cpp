#include "obda/rewrite/rewriter.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include "obda/common/error.hpp"

namespace obda {

namespace {

bool is_head_var(const ConjunctiveQuery& q, const std::string& name) {
  for (const auto& h : q.head)
    if (h.is_variable() && h.name == name) return true;
  return false;
}

void check_vocabulary(const ConjunctiveQuery& q, const Vocabulary& vocab) {
  for (const auto& a : q.atoms) {
    switch (a.kind) {
      case AtomKind::Concept:
        if (!vocab.contains(PredicateKind::Concept, a.predicate))
          throw Error("unknown concept '" + a.predicate + "' in query");
        break;
      case AtomKind::Role:
        if (!vocab.contains(PredicateKind::Role, a.predicate)) throw Error("unknown role '" + a.predicate + "' in query");
        break;
      case AtomKind::Attribute:
        if (!vocab.contains(PredicateKind::Attribute, a.predicate))
          throw Error("unknown attribute '" + a.predicate + "' in query");
        break;
      case AtomKind::Aggregate:
        if (!vocab.contains(PredicateKind::Attribute, a.aggregate->attribute))
          throw Error("unknown attribute '" + a.aggregate->attribute + "' in aggregate concept " +
                      to_string(*a.aggregate));
        break;
    }
  }
}

// Atom asserting membership in basic concept (or attribute existential) c for term t.
Atom concept_as_atom(const Concept& c, const Term& t) {
  switch (c.kind) {
    case ConceptKind::Atomic: return Atom::concept_atom(c.name, t);
    case ConceptKind::ExistsRole:
      return c.inverse ? Atom::role_atom(c.name, Term::anonymous(), t) : Atom::role_atom(c.name, t, Term::anonymous());
    case ConceptKind::ExistsAttribute: return Atom::attribute_atom(c.name, t, Term::anonymous());
  }
  return {};
}

// Sub-concepts B with B \sqsubseteq sup, as atoms over t.
std::vector<Atom> concept_rewritings(const Concept& sup, const Term& t, const Ontology& o) {
  std::vector<Atom> out;
  for (const auto& axiom : o.axioms()) {
    if (const auto* ci = std::get_if<ConceptInclusion>(&axiom)) {
      if (ci->sup == sup) out.push_back(concept_as_atom(ci->sub, t));
    } else if (const auto* ai = std::get_if<AggregateInclusion>(&axiom)) {
      if (ai->sup == sup) out.push_back(Atom::aggregate_atom(ai->sub, t));
    }
  }
  return out;
}

std::vector<Atom> rewrite_atom(const Atom& g, const Ontology& o) {
  std::vector<Atom> out;
  switch (g.kind) {
    case AtomKind::Aggregate: break;
    case AtomKind::Concept: out = concept_rewritings(Concept::atomic(g.predicate), g.args[0], o); break;
    case AtomKind::Attribute:
      for (const auto& axiom : o.axioms()) {
        const auto* inc = std::get_if<AttributeInclusion>(&axiom);
        if (inc && inc->sup == g.predicate) out.push_back(Atom::attribute_atom(inc->sub, g.args[0], g.args[1]));
      }
      break;
    case AtomKind::Role: {
      const Term& x = g.args[0];
      const Term& y = g.args[1];
      if (y.is_anonymous()) {
        auto more = concept_rewritings(Concept::exists(Role{g.predicate, false}), x, o);
        out.insert(out.end(), more.begin(), more.end());
      }
      if (x.is_anonymous()) {
        auto more = concept_rewritings(Concept::exists(Role{g.predicate, true}), y, o);
        out.insert(out.end(), more.begin(), more.end());
      }
      for (const auto& axiom : o.axioms()) {
        const auto* inc = std::get_if<RoleInclusion>(&axiom);
        if (!inc || inc->sup.name != g.predicate) continue;
        // normalise to sub' \sqsubseteq P
        Role sub = inc->sup.inverse ? inc->sub.inverted() : inc->sub;
        out.push_back(sub.inverse ? Atom::role_atom(sub.name, y, x) : Atom::role_atom(sub.name, x, y));
      }
      break;
    }
  }
  return out;
}

struct UnionFind {
  std::map<Term, Term> parent;

  Term find(const Term& t) {
    auto it = parent.find(t);
    if (it == parent.end() || it->second == t) return t;
    Term root = find(it->second);
    parent[t] = root;
    return root;
  }
};

// Most general unifier of two atoms of the same predicate, applied to q.
std::optional<ConjunctiveQuery> reduce(const ConjunctiveQuery& q, std::size_t i, std::size_t j) {
  ConjunctiveQuery r = q;
  int fresh = 0;
  for (auto& a : r.atoms)
    for (auto& t : a.args)
      if (t.is_anonymous()) t = Term::variable("_u" + std::to_string(fresh++));

  UnionFind uf;
  auto rank = [&](const Term& t) {
    if (t.is_constant()) return 0;
    if (is_head_var(q, t.name)) return 1;
    return 2;
  };
  for (std::size_t k = 0; k < r.atoms[i].args.size(); ++k) {
    Term a = uf.find(r.atoms[i].args[k]);
    Term b = uf.find(r.atoms[j].args[k]);
    if (a == b) continue;
    if (a.is_constant() && b.is_constant()) return std::nullopt;
    // keep the most specific representative: constant, then answer variable
    if (rank(b) < rank(a) || (rank(a) == rank(b) && b < a)) std::swap(a, b);
    uf.parent[b] = a;
  }
  for (auto& a : r.atoms)
    for (auto& t : a.args) t = uf.find(t);
  for (auto& h : r.head) h = uf.find(h);
  return r;
}

}  // namespace

ConjunctiveQuery canonicalize(const ConjunctiveQuery& q) {
  ConjunctiveQuery r = q;
  std::set<std::string> head;
  for (const auto& h : r.head)
    if (h.is_variable()) head.insert(h.name);

  std::map<std::string, int> occurrences;
  for (const auto& a : r.atoms)
    for (const auto& t : a.args)
      if (t.is_variable() && !t.is_anonymous()) ++occurrences[t.name];
  for (auto& a : r.atoms)
    for (auto& t : a.args)
      if (t.is_variable() && !t.is_anonymous() && !head.count(t.name) && occurrences[t.name] == 1) t = Term::anonymous();

  std::set<Atom> unique(r.atoms.begin(), r.atoms.end());
  r.atoms.assign(unique.begin(), unique.end());

  std::set<std::string> existential;
  for (const auto& a : r.atoms)
    for (const auto& t : a.args)
      if (t.is_variable() && !t.is_anonymous() && !head.count(t.name)) existential.insert(t.name);

  // Key of an existential: the sorted atoms it occurs in, seen from that variable.
  std::vector<std::pair<std::string, std::string>> keyed;
  for (const auto& v : existential) {
    std::vector<std::string> parts;
    for (const auto& a : r.atoms) {
      bool occurs = false;
      Atom masked = a;
      for (auto& t : masked.args) {
        if (!t.is_variable() || t.is_anonymous() || head.count(t.name)) continue;
        occurs |= t.name == v;
        t = Term::variable(t.name == v ? "#" : "?");
      }
      if (occurs) parts.push_back(to_string(masked));
    }
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& p : parts) key += p + ";";
    keyed.emplace_back(key, v);
  }
  std::sort(keyed.begin(), keyed.end());
  std::map<std::string, std::string> rename;
  for (std::size_t k = 0; k < keyed.size(); ++k) rename[keyed[k].second] = "_e" + std::to_string(k);
  for (auto& a : r.atoms)
    for (auto& t : a.args)
      if (rename.count(t.name) && t.is_variable()) t = Term::variable(rename[t.name]);

  std::sort(r.atoms.begin(), r.atoms.end());
  r.atoms.erase(std::unique(r.atoms.begin(), r.atoms.end()), r.atoms.end());
  return r;
}

UnionOfCQs rewrite(const ConjunctiveQuery& q, const Ontology& o, const Vocabulary* vocab) {
  if (vocab) check_vocabulary(q, *vocab);
  UnionOfCQs out;
  for (const auto& h : q.head) out.head_names.push_back(h.name);

  std::set<ConjunctiveQuery> seen;
  std::deque<ConjunctiveQuery> work;
  auto push = [&](const ConjunctiveQuery& c) {
    auto canon = canonicalize(c);
    if (seen.insert(canon).second) {
      out.disjuncts.push_back(canon);
      work.push_back(canon);
    }
  };
  push(q);
  while (!work.empty()) {
    ConjunctiveQuery cur = work.front();
    work.pop_front();
    for (std::size_t i = 0; i < cur.atoms.size(); ++i) {
      for (auto& replacement : rewrite_atom(cur.atoms[i], o)) {
        ConjunctiveQuery next = cur;
        next.atoms[i] = std::move(replacement);
        push(next);
      }
    }
    for (std::size_t i = 0; i < cur.atoms.size(); ++i)
      for (std::size_t j = i + 1; j < cur.atoms.size(); ++j)
        if (cur.atoms[i].same_predicate(cur.atoms[j]))
          if (auto reduced = reduce(cur, i, j)) push(*reduced);
  }
  return out;
}

UnionOfCQs rewrite_attribute(const std::string& attribute, const Ontology& o, const Vocabulary* vocab) {
  if (vocab && !vocab->contains(PredicateKind::Attribute, attribute)) throw Error("unknown attribute '" + attribute + "'");
  UnionOfCQs out;
  out.head_names = {"x", "y"};
  for (const auto& f : o.sub_attributes(attribute)) {
    ConjunctiveQuery q;
    q.head = {Term::variable("x"), Term::variable("y")};
    q.atoms = {Atom::attribute_atom(f, Term::variable("x"), Term::variable("y"))};
    out.disjuncts.push_back(std::move(q));
  }
  return out;
}

std::string to_string(const UnionOfCQs& u) {
  std::string s;
  for (const auto& q : u.disjuncts) s += to_string(q) + "\n";
  return s;
}

}  // namespace obda
