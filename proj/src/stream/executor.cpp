#include "obda/stream/executor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "obda/common/csv.hpp"
#include "obda/common/error.hpp"
#include "obda/dist/partition.hpp"
#include "obda/stream/mws.hpp"
#include "obda/stream/window.hpp"

namespace obda::stream {

namespace {

using ir::ScalarExpr;

struct StreamState {
  const StreamInput* input = nullptr;
  Millis setback = 0;
  WindowAssigner assigner;
};

struct TickContext {
  Millis tick = 0;
  struct Win {
    std::size_t first = 0, last = 0;
    std::int64_t k = 0;
  };
  std::map<std::string, Win> windows;
  std::map<Millis, std::int64_t> state_of;
  std::int64_t states = 0;
};

using SignatureKey = std::tuple<std::string, std::string, std::int64_t>;

struct Scope {
  const std::vector<ir::Column>& cols;
  const Row& row;                              // the row, or the first row of the group
  const std::vector<const Row*>* group = nullptr;
  const ir::PlanNode* quantifier = nullptr;
};

class TickEvaluator : public Evaluator {
 public:
  TickEvaluator(const TableStore& tables, const std::map<std::string, StreamState>& streams, const Relation* statics,
                bool mws, Metrics& metrics)
      : Evaluator(tables), streams_(streams), statics_(statics), mws_(mws), metrics_(metrics) {}

  void set_tick(const TickContext* ctx) { ctx_ = ctx; }

 protected:
  Relation extension(const ir::PlanNode& n) override {
    switch (n.kind) {
      case ir::NodeKind::Slice: return slice(n);
      case ir::NodeKind::Compute: return compute(n);
      case ir::NodeKind::Quantify: return quantify(n);
      case ir::NodeKind::Combine: return combine(n);
      case ir::NodeKind::Filter: return filter(n);
      default: return Evaluator::extension(n);
    }
  }

 private:
  Relation slice(const ir::PlanNode& n) {
    Relation out;
    out.columns = n.columns;
    const auto& stream = streams_.at(n.slice.stream);
    const auto& win = ctx_->windows.at(n.slice.stream);
    const auto& rows = stream.input->rows;
    for (std::size_t r = win.first; r < win.last; ++r) {
      Millis shifted = rows[r].time + stream.setback;
      std::int64_t i = ctx_->state_of.at(shifted) - n.slice.offset;
      if (i < 0 || i >= ctx_->states) continue;
      out.rows.insert(Row{Rational(i), rows[r].sensor, rows[r].value, Rational(shifted)});
    }
    return out;
  }

  Relation compute(const ir::PlanNode& n) {
    Relation in = run(n.children.at(0));
    Relation out;
    out.columns = n.columns;
    for (const auto& row : in.rows)
      if (truth(n.exprs.at(0), Scope{in.columns, row})) out.rows.insert(row);
    return out;
  }

  Relation quantify(const ir::PlanNode& n) {
    Relation body = run(n.children.at(0));
    Relation out;
    out.columns = n.columns;
    auto index = static_cast<std::size_t>(column_index(body.columns, n.value));
    std::vector<std::size_t> keys;
    for (const auto& k : n.keys) keys.push_back(static_cast<std::size_t>(column_index(body.columns, k)));
    std::map<Row, std::vector<const Row*>> groups;
    for (const auto& row : body.rows) {
      Row key;
      for (auto k : keys) key.push_back(row[k]);
      groups[key].push_back(&row);
    }
    for (auto& [key, rows] : groups) {
      std::stable_sort(rows.begin(), rows.end(), [&](const Row* a, const Row* b) {
        return std::get<Rational>((*a)[index]) < std::get<Rational>((*b)[index]);
      });
      if (n.detail == "FORALL") {
        std::set<Cell> seen;
        for (const Row* r : rows) seen.insert((*r)[index]);
        if (static_cast<std::int64_t>(seen.size()) != ctx_->states) continue;
      }
      if (!n.exprs.empty()) {
        bool ok = false;
        try {
          ok = truth(n.exprs[0], Scope{body.columns, *rows.front(), &rows, &n});
        } catch (const Error&) {
          ++metrics_.numeric_errors;
        }
        if (!ok) continue;
      }
      out.rows.insert(key);
    }
    return out;
  }

  Relation combine(const ir::PlanNode& n) {
    Relation left = run(n.children.at(0));
    Relation right = run(n.children.at(1));
    std::vector<std::size_t> lk, rk;
    for (const auto& k : n.keys) {
      lk.push_back(static_cast<std::size_t>(column_index(left.columns, k)));
      rk.push_back(static_cast<std::size_t>(column_index(right.columns, k)));
    }
    std::set<Row> present;
    for (const auto& row : right.rows) {
      Row key;
      for (auto k : rk) key.push_back(row[k]);
      present.insert(std::move(key));
    }
    Relation out;
    out.columns = n.columns;
    for (const auto& row : left.rows) {
      Row key;
      for (auto k : lk) key.push_back(row[k]);
      if (!present.count(key)) out.rows.insert(row);
    }
    return out;
  }

  Relation filter(const ir::PlanNode& n) {
    Relation in = run(n.children.at(0));
    if (!statics_) return in;
    std::vector<std::size_t> ik, sk;
    for (const auto& k : n.keys) {
      ik.push_back(static_cast<std::size_t>(column_index(in.columns, k)));
      sk.push_back(static_cast<std::size_t>(column_index(statics_->columns, k)));
    }
    std::set<Row> allowed;
    for (const auto& row : statics_->rows) {
      Row key;
      for (auto k : sk) key.push_back(row[k]);
      allowed.insert(std::move(key));
    }
    Relation out;
    out.columns = n.columns;
    for (const auto& row : in.rows) {
      Row key;
      for (auto k : ik) key.push_back(row[k]);
      if (allowed.count(key)) out.rows.insert(row);
    }
    return out;
  }

  // ---- scalar evaluation ----

  bool truth(const ScalarExpr& e, const Scope& s) {
    auto v = eval(e, s);
    return v && *v != 0;
  }

  std::optional<double> eval(const ScalarExpr& e, const Scope& s) {
    using K = ScalarExpr::Kind;
    switch (e.kind) {
      case K::Column: return cell_number(s.row[static_cast<std::size_t>(column_index(s.cols, e.name))]);
      case K::Number: return e.number;
      case K::Negate: {
        auto v = eval(e.args.at(0), s);
        if (v) return -*v;
        return std::nullopt;
      }
      case K::Arith: {
        auto a = eval(e.args.at(0), s), b = eval(e.args.at(1), s);
        if (!a || !b) return std::nullopt;
        switch (e.op) {
          case '+': return *a + *b;
          case '-': return *a - *b;
          case '*': return *a * *b;
          default:
            if (*b == 0) {
              ++metrics_.numeric_errors;
              return std::nullopt;
            }
            return *a / *b;
        }
      }
      case K::Compare: {
        auto a = eval(e.args.at(0), s), b = eval(e.args.at(1), s);
        if (!a || !b) return std::nullopt;
        double c = *a < *b ? -1 : *a > *b ? 1 : 0;
        switch (e.cmp) {
          case CmpOp::Eq: return c == 0;
          case CmpOp::Ne: return c != 0;
          case CmpOp::Lt: return c < 0;
          case CmpOp::Le: return c <= 0;
          case CmpOp::Gt: return c > 0;
          case CmpOp::Ge: return c >= 0;
        }
        return std::nullopt;
      }
      case K::And: return truth(e.args.at(0), s) && truth(e.args.at(1), s) ? 1.0 : 0.0;
      case K::Or: return truth(e.args.at(0), s) || truth(e.args.at(1), s) ? 1.0 : 0.0;
      case K::Not: return truth(e.args.at(0), s) ? 0.0 : 1.0;
      case K::Call: return call(e, s);
    }
    return std::nullopt;
  }

  std::optional<std::vector<double>> series(const ScalarExpr& arg, const Scope& s) {
    std::vector<double> out;
    out.reserve(s.group->size());
    for (const Row* r : *s.group) {
      auto v = eval(arg, Scope{s.cols, *r});
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    return out;
  }

  std::optional<double> call(const ScalarExpr& e, const Scope& s) {
    if (e.name == "abs") {
      auto v = eval(e.args.at(0), s);
      if (v) return std::abs(*v);
      return std::nullopt;
    }
    if (!s.group) throw Error("aggregate " + e.name + " outside a quantifier");
    if (e.name == "pearson" || e.name == "cosine") {
      auto x = series(e.args.at(0), s), y = series(e.args.at(1), s);
      if (!x || !y) return std::nullopt;
      std::optional<MwsSignature> sx, sy;
      if (mws_) {
        sx = cached_signature(e.args[0], s);
        sy = cached_signature(e.args[1], s);
      }
      std::optional<double> r;
      if (sx || sy) {
        if (!sx) sx = compute_mws(*x);
        if (!sy) sy = compute_mws(*y);
        r = e.name == "pearson" ? pearson_mws(*x, *sx, *y, *sy) : cosine_mws(*x, *sx, *y, *sy);
      } else {
        r = e.name == "pearson" ? pearson_direct(*x, *y) : cosine_direct(*x, *y);
      }
      if (!r) ++metrics_.excluded_pairs;
      return r;
    }
    auto xs = series(e.args.at(0), s);
    if (!xs || xs->empty()) return std::nullopt;
    if (e.name == "count") return static_cast<double>(xs->size());
    std::optional<MwsSignature> sig;
    if (mws_) sig = cached_signature(e.args[0], s);
    if (!sig) sig = compute_mws(*xs);
    if (e.name == "avg") return sig->mean;
    if (e.name == "min") return sig->min;
    if (e.name == "max") return sig->max;
    if (e.name == "sum") return sig->sum;
    throw Error("unknown function " + e.name);
  }

  // Signature of the series `arg` when it is exactly one sensor's window of a
  // historic stream.
  std::optional<MwsSignature> cached_signature(const ScalarExpr& arg, const Scope& s) {
    if (arg.kind != ScalarExpr::Kind::Column || !s.quantifier) return std::nullopt;
    const ir::SeriesSource* source = nullptr;
    for (const auto& src : s.quantifier->series)
      if (src.variable == arg.name) source = &src;
    if (!source) return std::nullopt;
    std::string sensor = source->sensor.is_column
                             ? cell_text(s.row[static_cast<std::size_t>(column_index(s.cols, source->sensor.text))])
                             : source->sensor.text;
    const StreamState* home = nullptr;
    std::string home_name;
    std::vector<double> values;
    for (const auto& [name, st] : streams_) {
      const auto& win = ctx_->windows.at(name);
      std::vector<double> mine;
      for (std::size_t r = win.first; r < win.last; ++r)
        if (st.input->rows[r].sensor == sensor) mine.push_back(st.input->rows[r].value);
      if (mine.empty()) continue;
      if (home) return std::nullopt;  // sensor in several streams
      home = &st;
      home_name = name;
      values = std::move(mine);
    }
    if (!home || home->setback <= 0) return std::nullopt;
    if (values.size() != s.group->size()) return std::nullopt;
    std::set<Cell> states;
    auto index = static_cast<std::size_t>(column_index(s.cols, s.quantifier->value));
    for (const Row* r : *s.group) states.insert((*r)[index]);
    if (states.size() != s.group->size()) return std::nullopt;
    SignatureKey key{home_name, sensor, ctx_->windows.at(home_name).k};
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++metrics_.signature_hits;
      return it->second;
    }
    ++metrics_.signature_reads;
    return cache_.emplace(key, compute_mws(values)).first->second;
  }

  const std::map<std::string, StreamState>& streams_;
  const Relation* statics_;
  bool mws_;
  Metrics& metrics_;
  const TickContext* ctx_ = nullptr;
  std::map<SignatureKey, MwsSignature> cache_;
};

Relation natural_join(const Relation& a, const Relation& b) {
  Relation out;
  out.columns = a.columns;
  std::vector<std::pair<std::size_t, std::size_t>> shared;
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < b.columns.size(); ++j) {
    bool found = false;
    for (std::size_t i = 0; i < a.columns.size(); ++i)
      if (a.columns[i].name == b.columns[j].name) {
        shared.emplace_back(i, j);
        found = true;
      }
    if (!found) {
      rest.push_back(j);
      out.columns.push_back(b.columns[j]);
    }
  }
  for (const auto& ra : a.rows)
    for (const auto& rb : b.rows) {
      bool match = true;
      for (auto [i, j] : shared)
        if (ra[i] != rb[j]) match = false;
      if (!match) continue;
      Row row = ra;
      for (auto j : rest) row.push_back(rb[j]);
      out.rows.insert(std::move(row));
    }
  return out;
}

}  // namespace

RunResult execute(const starql::ExecutablePlan& plan, const TableStore& tables, const std::vector<StreamInput>& inputs,
                  const RunOptions& opt) {
  const auto& q = plan.query;
  if (opt.workers < 1) throw Error("worker count must be at least 1");
  RunResult result;
  result.header = {"tick_ms"};
  if (q.output.construct) {
    result.header.push_back("subject");
    result.header.push_back("concept");
  } else {
    for (const auto& v : plan.output_columns) result.header.push_back(v);
  }

  std::map<std::string, StreamState> streams;
  for (const auto& src : q.streams) {
    auto it = std::find_if(inputs.begin(), inputs.end(), [&](const auto& in) { return in.name == src.name; });
    if (it == inputs.end()) throw Error("no input given for stream '" + src.name + "'");
    if (!std::is_sorted(it->rows.begin(), it->rows.end(), [](const auto& a, const auto& b) { return a.time < b.time; }))
      throw Error("stream '" + src.name + "' is not time-ordered");
    StreamState st;
    st.input = &*it;
    st.setback = it->setback.value_or(src.setback.value_or(0));
    st.assigner = {src.range, src.slide, 0, st.setback};
    streams.emplace(src.name, st);
  }
  for (const auto& in : inputs)
    if (!streams.count(in.name)) throw Error("stream '" + in.name + "' is not used by the query");

  // pulse
  std::optional<Millis> now, last;
  for (const auto& [name, st] : streams) {
    if (st.input->rows.empty()) continue;
    Millis first = st.input->rows.front().time + st.setback;
    Millis end = st.input->rows.back().time + st.setback;
    if (st.setback == 0) now = now ? std::min(*now, first) : first;
    last = last ? std::max(*last, end) : end;
  }
  if (!now)
    for (const auto& [name, st] : streams)
      if (!st.input->rows.empty()) {
        Millis first = st.input->rows.front().time + st.setback;
        now = now ? std::min(*now, first) : first;
      }
  Millis start = q.pulse && q.pulse->start ? *q.pulse->start : now.value_or(0);
  if (streams.empty()) {
    result.ticks.push_back(start);
  } else if (now || (q.pulse && q.pulse->start)) {
    Millis freq = q.pulse ? q.pulse->frequency : 0;
    if (freq <= 0) throw Error("pulse frequency must be positive");
    Millis end = opt.last_tick.value_or(last.value_or(start));
    for (Millis t = start; t <= end; t += freq) result.ticks.push_back(t);
  }
  for (auto& [name, st] : streams) st.assigner.anchor = start;

  std::optional<Relation> statics;
  if (plan.static_plan) statics = evaluate(*plan.static_plan, tables);

  std::vector<std::vector<ResultRow>> produced(opt.workers);
  std::vector<Metrics> metrics(opt.workers);
  dist::fork_join(opt.workers, [&](std::size_t w) {
    TickEvaluator evaluator(tables, streams, statics ? &*statics : nullptr, opt.mws, metrics[w]);
    for (std::size_t k = 0; k < result.ticks.size(); ++k) {
      if (opt.workers > 1 && dist::splitmix64(k) % opt.workers != w) continue;
      TickContext ctx;
      ctx.tick = result.ticks[k];
      for (const auto& [name, st] : streams) {
        TickContext::Win win;
        win.k = st.assigner.latest_at(ctx.tick);
        std::tie(win.first, win.last) = window_rows(st.input->rows, st.assigner, win.k);
        for (std::size_t r = win.first; r < win.last; ++r) ctx.state_of[st.input->rows[r].time + st.setback] = 0;
        ctx.windows.emplace(name, win);
      }
      for (auto& [t, idx] : ctx.state_of) idx = ctx.states++;
      evaluator.set_tick(&ctx);
      ++metrics[w].ticks;

      Relation joined;
      if (plan.stream_plan) {
        joined = evaluator.run(*plan.stream_plan);
        if (statics) joined = natural_join(joined, *statics);
      } else if (statics) {
        joined = *statics;
      }
      std::vector<std::size_t> cols;
      for (const auto& v : plan.output_columns) cols.push_back(static_cast<std::size_t>(column_index(joined.columns, v)));
      std::set<std::vector<std::string>> seen;
      for (const auto& row : joined.rows) {
        if (q.output.construct) {
          for (const auto& t : q.output.templates) {
            std::string subject = cell_text(row[static_cast<std::size_t>(column_index(joined.columns, t.subject.text))]);
            std::vector<std::string> values{subject, starql::local_name(t.object.text)};
            if (seen.insert(values).second) produced[w].push_back({ctx.tick, values});
          }
        } else {
          std::vector<std::string> values;
          for (auto c : cols) values.push_back(cell_text(row[c]));
          if (seen.insert(values).second) produced[w].push_back({ctx.tick, values});
        }
      }
    }
  });
  for (std::size_t w = 0; w < opt.workers; ++w) {
    result.rows.insert(result.rows.end(), produced[w].begin(), produced[w].end());
    result.metrics.merge(metrics[w]);
  }
  std::sort(result.rows.begin(), result.rows.end());
  return result;
}

void write_csv(std::ostream& out, const RunResult& r) {
  for (std::size_t i = 0; i < r.header.size(); ++i) out << (i ? "," : "") << csv::escape(r.header[i]);
  out << "\n";
  for (const auto& row : r.rows) {
    out << row.tick;
    for (const auto& v : row.values) out << "," << csv::escape(v);
    out << "\n";
  }
}

}  // namespace obda::stream
