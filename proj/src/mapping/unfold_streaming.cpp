#include "obda/mapping/unfold_streaming.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "obda/common/error.hpp"
#include "obda/starql/validate.hpp"

namespace obda {

namespace {

using starql::Expr;
using K = Expr::Kind;

ir::ColumnType stream_column_type(const std::string& column) {
  if (column == "sval") return ir::ColumnType::Value;
  if (column == "time") return ir::ColumnType::Time;
  return ir::ColumnType::Individual;
}

ir::ScalarExpr scalar(const Expr& e) {
  ir::ScalarExpr out;
  switch (e.kind) {
    case K::Var:
    case K::Index:
      out.kind = ir::ScalarExpr::Kind::Column;
      out.name = e.name;
      break;
    case K::Number:
      out.kind = ir::ScalarExpr::Kind::Number;
      out.number = to_double(e.number);
      break;
    case K::Call:
      out.kind = ir::ScalarExpr::Kind::Call;
      out.name = starql::canonical_function(e.name);
      break;
    case K::Arith:
      out.kind = ir::ScalarExpr::Kind::Arith;
      out.op = e.op;
      break;
    case K::Negate: out.kind = ir::ScalarExpr::Kind::Negate; break;
    case K::Compare:
      out.kind = ir::ScalarExpr::Kind::Compare;
      out.cmp = e.cmp;
      break;
    case K::And: out.kind = ir::ScalarExpr::Kind::And; break;
    case K::Or: out.kind = ir::ScalarExpr::Kind::Or; break;
    case K::Not: out.kind = ir::ScalarExpr::Kind::Not; break;
    default: throw Error("'" + starql::print(e) + "' is not a value expression");
  }
  // And/Or are n-ary in the AST and binary here.
  if ((e.kind == K::And || e.kind == K::Or) && e.children.size() > 2) {
    ir::ScalarExpr acc = scalar(e.children[0]);
    for (std::size_t k = 1; k < e.children.size(); ++k) {
      ir::ScalarExpr next;
      next.kind = out.kind;
      next.args = {std::move(acc), scalar(e.children[k])};
      acc = std::move(next);
    }
    return acc;
  }
  for (const auto& c : e.children) out.args.push_back(scalar(c));
  return out;
}

void aggregate_args(const ir::ScalarExpr& e, std::set<std::string>& out, bool inside = false) {
  bool agg = e.kind == ir::ScalarExpr::Kind::Call && ir::is_aggregate_function(e.name);
  if (e.kind == ir::ScalarExpr::Kind::Column && inside) out.insert(e.name);
  for (const auto& a : e.args) aggregate_args(a, out, inside || agg);
}

void body_triples(const Expr& e, std::vector<const starql::Triple*>& out) {
  if (e.kind == K::Exists || e.kind == K::Forall) return;
  if (e.kind == K::Graph)
    for (const auto& t : e.triples) out.push_back(&t);
  if (e.kind == K::Not) return;
  for (const auto& c : e.children) body_triples(c, out);
}

class StreamUnfolder {
 public:
  StreamUnfolder(const starql::StarqlQuery& q, const MappingSet& m, const std::vector<std::string>& static_columns)
      : q_(q), m_(m), static_(static_columns.begin(), static_columns.end()) {
    for (const auto& s : q.streams) stream_names_.insert(s.name);
  }

  ir::PlanNode formula(const Expr& e, const std::set<std::string>& indices) {
    switch (e.kind) {
      case K::Graph: return graph(e);
      case K::And: return conjunction(e, indices);
      case K::Or: {
        std::vector<ir::PlanNode> parts;
        std::vector<ir::Column> order;
        for (const auto& c : e.children) {
          auto p = formula(c, indices);
          if (order.empty()) {
            order = p.columns;
            std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
          }
          parts.push_back(reorder(std::move(p), order));
        }
        return ir::union_of(std::move(parts));
      }
      case K::Exists:
      case K::Forall: return quantifier(e, indices);
      default:
        throw Error("'" + starql::print(e) + "' does not bind any variable; combine it with a graph pattern using AND");
    }
  }

 private:
  static ir::PlanNode reorder(ir::PlanNode p, const std::vector<ir::Column>& order) {
    if (p.columns == order) return p;
    std::vector<ir::ProjectItem> items;
    for (const auto& c : order) {
      auto it = std::find_if(p.columns.begin(), p.columns.end(), [&](const auto& x) { return x.name == c.name; });
      if (it == p.columns.end()) throw Error("OR branches bind different variables");
      items.push_back({c.name, {true, c.name}, it->type});
    }
    return ir::project(std::move(p), std::move(items));
  }

  ir::PlanNode conjunction(const Expr& e, const std::set<std::string>& indices) {
    std::optional<ir::PlanNode> plan;
    for (const auto& c : e.children) {
      if (c.kind == K::Compare || c.kind == K::Not) continue;
      auto p = formula(c, indices);
      plan = plan ? ir::join(std::move(*plan), std::move(p)) : std::move(p);
    }
    if (!plan) throw Error("conjunction without a graph pattern: " + starql::print(e));
    for (const auto& c : e.children)
      if (c.kind == K::Compare) plan = ir::compute(std::move(*plan), scalar(c));
    for (const auto& c : e.children)
      if (c.kind == K::Not) plan = ir::anti_join(std::move(*plan), formula(c.children[0], indices));
    return std::move(*plan);
  }

  ir::PlanNode quantifier(const Expr& e, std::set<std::string> indices) {
    std::set<std::string> outer_indices = indices;
    indices.insert(e.name);
    ir::PlanNode body = formula(e.children[0], indices);
    auto visible = starql::visible_outside(q_, e);
    std::vector<std::string> keys;
    for (const auto& c : body.columns)
      if (c.name != e.name && (visible.count(c.name) || outer_indices.count(c.name))) keys.push_back(c.name);
    std::optional<ir::ScalarExpr> cond;
    std::vector<ir::SeriesSource> series;
    if (e.children.size() > 1) {
      cond = scalar(e.children[1]);
      std::set<std::string> args;
      aggregate_args(*cond, args);
      std::vector<const starql::Triple*> triples;
      body_triples(e.children[0], triples);
      for (const auto& v : args) {
        const starql::Triple* source = nullptr;
        int found = 0;
        for (const auto* t : triples)
          if (t->object.is_variable() && t->object.text == v) {
            source = t;
            ++found;
          }
        if (found != 1) continue;
        if (source->subject.kind == starql::Term::Kind::Iri)
          series.push_back({v, {false, starql::local_name(source->subject.text)}});
        else if (source->subject.is_variable() && std::count(keys.begin(), keys.end(), source->subject.text))
          series.push_back({v, {true, source->subject.text}});
      }
    }
    return ir::quantify(std::move(body), e.kind == K::Forall, e.name, e.sequence, std::move(keys), std::move(cond),
                        std::move(series));
  }

  ir::PlanNode graph(const Expr& e) {
    std::optional<ir::PlanNode> plan;
    for (const auto& t : e.triples) {
      auto p = triple(t, e);
      plan = plan ? ir::join(std::move(*plan), std::move(p)) : std::move(p);
    }
    std::vector<std::string> keys;
    for (const auto& c : plan->columns)
      if (static_.count(c.name)) keys.push_back(c.name);
    if (!keys.empty()) return ir::static_filter(std::move(*plan), std::move(keys));
    return std::move(*plan);
  }

  ir::PlanNode triple(const starql::Triple& t, const Expr& g) {
    std::string predicate = starql::local_name(t.predicate.text);
    auto mappings = m_.find_stream(predicate);
    if (mappings.empty())
      throw Error("no streaming mapping for predicate '" + predicate + "' in " + starql::print(g));
    std::vector<ir::PlanNode> branches;
    for (const auto* mapping : mappings) {
      bool named = stream_names_.count(mapping->source) > 0;
      for (const auto& s : q_.streams) {
        if (named && s.name != mapping->source) continue;
        ir::SliceParams params{s.name, g.name, g.offset, s.range, s.slide, q_.strategy, s.setback.value_or(0)};
        ir::PlanNode plan = ir::slice(params);
        std::vector<ir::Condition> conds = mapping->conditions;
        std::vector<ir::ProjectItem> items{{g.name, {true, g.name}, ir::ColumnType::Index}};
        auto bind = [&](const starql::Term& term, const std::string& column) {
          if (term.kind == starql::Term::Kind::Iri) {
            conds.push_back({column, CmpOp::Eq, {false, starql::local_name(term.text)}});
          } else if (term.kind == starql::Term::Kind::Number) {
            conds.push_back({column, CmpOp::Eq, {false, format_rational(term.number)}});
          } else {
            for (const auto& it : items)
              if (it.output == term.text) {
                conds.push_back({column, CmpOp::Eq, {true, it.source.text}});
                return;
              }
            items.push_back({term.text, {true, column}, stream_column_type(column)});
          }
        };
        bind(t.subject, mapping->subject_column);
        bind(t.object, mapping->value_column);
        if (!conds.empty()) plan = ir::select(std::move(plan), std::move(conds));
        plan = ir::project(std::move(plan), std::move(items));
        plan.label = mapping->label;
        branches.push_back(std::move(plan));
      }
    }
    if (branches.empty())
      throw Error("streaming mappings for '" + predicate + "' apply to none of the query's streams");
    return ir::union_of(std::move(branches));
  }

  const starql::StarqlQuery& q_;
  const MappingSet& m_;
  std::set<std::string> static_;
  std::set<std::string> stream_names_;
};

}  // namespace

ir::PlanNode unfold_streaming(const starql::StarqlQuery& q, const MappingSet& m,
                              const std::vector<std::string>& static_columns) {
  if (!q.having) throw Error("query has no HAVING clause");
  return StreamUnfolder(q, m, static_columns).formula(*q.having, {});
}

}  // namespace obda
