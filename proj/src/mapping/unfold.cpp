#include "obda/mapping/unfold.hpp"

#include <map>

#include "obda/common/error.hpp"
#include "obda/rewrite/rewriter.hpp"

namespace obda {

namespace {

ir::ColumnType column_type(const ir::PlanNode& plan, const std::string& name) {
  for (const auto& c : plan.columns)
    if (c.name == name) return c.type;
  return ir::ColumnType::Raw;
}

std::string literal_text(const Term& t) { return t.kind == Term::Kind::Value ? format_rational(t.value) : t.name; }

ir::ColumnType literal_type(const Term& t) {
  return t.kind == Term::Kind::Value ? ir::ColumnType::Value : ir::ColumnType::Individual;
}

bool is_identity(const ir::PlanNode& child, const std::vector<ir::ProjectItem>& items) {
  if (child.columns.size() != items.size()) return false;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (!items[k].source.is_column || items[k].source.text != child.columns[k].name || items[k].output != items[k].source.text)
      return false;
    if (items[k].type != child.columns[k].type) return false;
  }
  return true;
}

ir::PlanNode project_unless_identity(ir::PlanNode child, std::vector<ir::ProjectItem> items) {
  if (is_identity(child, items)) return child;
  return ir::project(std::move(child), std::move(items));
}

// Renames the output columns of a mapping body (named `cols`) after the atom's
// arguments: constants become selections, repeated variables equalities, and
// anonymous positions are dropped.
ir::PlanNode adapt(const ir::PlanNode& body, const std::vector<std::string>& cols, const std::vector<Term>& args) {
  std::vector<ir::Condition> conds;
  std::vector<ir::ProjectItem> items;
  std::map<std::string, std::string> seen;
  for (std::size_t k = 0; k < args.size(); ++k) {
    const Term& t = args[k];
    const std::string& col = cols[k];
    if (t.is_anonymous()) continue;
    if (t.is_constant()) {
      conds.push_back({col, CmpOp::Eq, {false, literal_text(t)}});
    } else if (auto it = seen.find(t.name); it != seen.end()) {
      conds.push_back({col, CmpOp::Eq, {true, it->second}});
    } else {
      seen.emplace(t.name, col);
      items.push_back({t.name, {true, col}, column_type(body, col)});
    }
  }
  ir::PlanNode plan = body;
  if (!conds.empty()) plan = ir::select(std::move(plan), std::move(conds));
  return project_unless_identity(std::move(plan), std::move(items));
}

std::vector<ir::PlanNode> alternatives(const Atom& atom, const MappingSet& m, const Ontology& o,
                                       const ConjunctiveQuery& disjunct) {
  std::vector<ir::PlanNode> out;
  if (atom.kind == AtomKind::Aggregate) {
    out.push_back(adapt(build_aggregate_query(*atom.aggregate, m, o), {"x"}, atom.args));
    return out;
  }
  PredicateKind kind = atom.kind == AtomKind::Concept ? PredicateKind::Concept
                       : atom.kind == AtomKind::Role  ? PredicateKind::Role
                                                      : PredicateKind::Attribute;
  auto found = m.find(kind, atom.predicate);
  if (found.empty())
    throw Error("no mapping for predicate '" + atom.predicate + "' in disjunct " + to_string(disjunct));
  for (const auto* mapping : found) out.push_back(adapt(mapping->body, mapping->head, atom.args));
  return out;
}

ir::PlanNode unfold_disjunct(const ConjunctiveQuery& q, const std::vector<std::string>& head_names, const MappingSet& m,
                             const Ontology& o) {
  std::vector<std::vector<ir::PlanNode>> options;
  for (const auto& a : q.atoms) options.push_back(alternatives(a, m, o, q));

  std::vector<ir::PlanNode> combos;
  std::vector<std::size_t> pick(options.size(), 0);
  for (;;) {
    ir::PlanNode plan = options[0][pick[0]];
    for (std::size_t k = 1; k < options.size(); ++k) plan = ir::join(std::move(plan), options[k][pick[k]]);

    std::vector<ir::ProjectItem> items;
    for (std::size_t k = 0; k < q.head.size(); ++k) {
      const Term& h = q.head[k];
      const std::string& name = k < head_names.size() ? head_names[k] : h.name;
      if (h.is_variable())
        items.push_back({name, {true, h.name}, column_type(plan, h.name)});
      else
        items.push_back({name, {false, literal_text(h)}, literal_type(h)});
    }
    combos.push_back(project_unless_identity(std::move(plan), std::move(items)));

    std::size_t k = options.size();
    while (k > 0) {
      --k;
      if (++pick[k] < options[k].size()) break;
      pick[k] = 0;
      if (k == 0) return ir::union_of(std::move(combos));
    }
    if (options.empty()) return ir::union_of(std::move(combos));
  }
}

}  // namespace

ir::PlanNode build_aggregate_query(const AggregateConcept& e, const MappingSet& m, const Ontology& o) {
  std::vector<ir::PlanNode> branches;
  for (const auto& q : rewrite_attribute(e.attribute, o).disjuncts) {
    const auto& atom = q.atoms.front();
    for (const auto* mapping : m.find(PredicateKind::Attribute, atom.predicate))
      branches.push_back(adapt(mapping->body, mapping->head, {Term::variable("x"), Term::variable("y")}));
  }
  if (branches.empty())
    throw Error("no mapping for attribute '" + e.attribute + "' or any of its sub-attributes (needed by " + to_string(e) + ")");
  return ir::group_having(ir::union_of(std::move(branches)), "x", "y", e.fn, e.cmp, e.threshold);
}

ir::PlanNode unfold_static(const UnionOfCQs& u, const MappingSet& m, const Ontology& o) {
  if (u.disjuncts.empty()) throw Error("cannot unfold an empty union");
  std::vector<ir::PlanNode> parts;
  for (const auto& q : u.disjuncts) {
    if (q.atoms.empty()) throw Error("cannot unfold a disjunct without atoms");
    parts.push_back(unfold_disjunct(q, u.head_names, m, o));
  }
  return ir::union_of(std::move(parts));
}

}  // namespace obda
