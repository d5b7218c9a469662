#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "obda/bench/bench.hpp"
#include "obda/common/error.hpp"
#include "obda/common/text.hpp"
#include "obda/mapping/mapping.hpp"
#include "obda/mapping/relational.hpp"
#include "obda/mapping/unfold.hpp"
#include "obda/ontology/io.hpp"
#include "obda/ontology/reasoning.hpp"
#include "obda/rewrite/rewriter.hpp"
#include "obda/starql/compile.hpp"
#include "obda/starql/parser.hpp"
#include "obda/stream/executor.hpp"
#include "obda/stream/store.hpp"

namespace fs = std::filesystem;
using namespace obda;

namespace {

struct Options {
  std::string ontology, mappings, query, out, metrics;
  std::vector<std::string> data, streams;
  std::string workers = "1";
  std::string mws = "on";
  std::string bench_mws = "both";
  std::uint64_t index_threshold = 3;
  std::size_t windows = 10000, cycles = 15;
  std::uint64_t seed = 42;
  std::string range = "1min", slide = "1sec", lateness = "0sec", last_tick, queries = "pearson,avg,min";
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --query takes a file or the text itself
std::string query_text(const std::string& q) {
  if (q.empty()) throw Error("--query is required");
  std::error_code ec;
  if (fs::is_regular_file(q, ec)) return slurp(q);
  return q;
}

bool is_starql(const std::string& q) {
  return q.ends_with(".starql") || q.find("CREATE") != std::string::npos;
}

// "Reliable(x)" is short for "q(x) :- Reliable(x)"
std::string with_head(const std::string& text) {
  if (text.find(":-") != std::string::npos) return text;
  std::vector<std::string> vars;
  static const std::regex args(R"(\(([^()]*)\))");
  for (std::sregex_iterator it(text.begin(), text.end(), args), end; it != end; ++it)
    for (const auto& part : text::split((*it)[1].str(), ',')) {
      std::string v(text::trim(part));
      if (text::is_identifier(v) && v.front() != '_' && std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
    }
  return "q(" + text::join(vars, ",") + ") :- " + text;
}

Ontology load_ontology(const Options& o) {
  if (o.ontology.empty()) throw Error("--ontology is required");
  auto onto = read_ontology_file(o.ontology);
  require_valid(onto);
  return onto;
}

Vocabulary vocabulary(const Ontology& o, const MappingSet* m) {
  Vocabulary v = o.vocabulary();
  if (m) v.merge(m->vocabulary());
  return v;
}

MappingSet load_mappings(const Options& o) {
  if (o.mappings.empty()) throw Error("--mappings is required");
  return read_mappings_file(o.mappings);
}

// Writes through a temporary so a failed command leaves no partial file.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  fs::path tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw Error("cannot write " + path);
  }
  fs::rename(tmp, path);
}

struct StreamArg {
  std::string name;
  fs::path path;
  std::optional<stream::Millis> setback;
};

StreamArg parse_stream_arg(const std::string& arg) {
  auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("--stream expects name=path[,setback=DUR], got '" + arg + "'");
  StreamArg s;
  s.name = arg.substr(0, eq);
  auto parts = text::split(arg.substr(eq + 1), ',');
  s.path = std::string(text::trim(parts.at(0)));
  for (std::size_t i = 1; i < parts.size(); ++i) {
    std::string p(text::trim(parts[i]));
    if (!p.starts_with("setback=")) throw Error("unknown --stream option '" + p + "'");
    s.setback = starql::parse_duration(p.substr(8));
  }
  return s;
}

std::vector<std::size_t> parse_workers(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& part : text::split(s, ',')) {
    std::string t(text::trim(part));
    std::size_t pos = 0;
    long long n = -1;
    try {
      n = std::stoll(t, &pos);
    } catch (const std::exception&) {
    }
    if (pos != t.size() || n < 1) throw Error("--workers must be positive integers, got '" + t + "'");
    out.push_back(static_cast<std::size_t>(n));
  }
  return out;
}

std::vector<bool> parse_mws(const std::string& s) {
  if (s == "on") return {true};
  if (s == "off") return {false};
  if (s == "both") return {true, false};
  throw Error("--mws must be on, off or both");
}

void write_metrics(const Options& o, const std::string& content) {
  if (!o.metrics.empty()) write_output(o.metrics, content);
}

// ---- commands ----

int cmd_validate(const Options& o) {
  if (o.ontology.empty()) throw Error("--ontology is required");
  auto onto = read_ontology_file(o.ontology);
  auto report = validate_ontology(onto);
  int status = 0;
  for (const auto& v : report.violations) {
    std::cout << "violation " << v.rule << ": " << v.message << "\n";
    status = 1;
  }
  if (report.ok())
    std::cout << "ontology ok (" << onto.axioms().size() << " axioms)\n";
  for (const auto& path : o.data) {
    auto d = read_dataset_file(path);
    if (!report.ok()) continue;
    auto sat = check_satisfiability(onto, d);
    for (const auto& v : sat.violations) {
      std::cout << "unsatisfiable " << v.axiom << ": " << text::join(v.witnesses, "; ") << "\n";
      status = 1;
    }
    if (sat.satisfiable) std::cout << path << " satisfiable (" << d.size() << " assertions)\n";
  }
  return status;
}

int cmd_rewrite(const Options& o) {
  auto onto = load_ontology(o);
  std::optional<MappingSet> m;
  if (!o.mappings.empty()) m = load_mappings(o);
  auto vocab = vocabulary(onto, m ? &*m : nullptr);
  auto q = parse_cq(with_head(query_text(o.query)), vocab);
  std::cout << to_string(rewrite(q, onto, &vocab));
  return 0;
}

int cmd_unfold(const Options& o) {
  auto onto = load_ontology(o);
  auto m = load_mappings(o);
  auto text = query_text(o.query);
  if (is_starql(o.query) || is_starql(text)) {
    auto plan = starql::compile(starql::parse_starql(text, o.query), onto, m);
    if (plan.static_plan) std::cout << "Static\n" << ir::explain(*plan.static_plan, 1);
    if (plan.stream_plan) std::cout << "Having\n" << ir::explain(*plan.stream_plan, 1);
    return 0;
  }
  auto vocab = vocabulary(onto, &m);
  auto q = parse_cq(with_head(text), vocab);
  std::cout << ir::explain(unfold_static(rewrite(q, onto, &vocab), m, onto));
  return 0;
}

int cmd_explain(const Options& o) {
  auto onto = load_ontology(o);
  auto m = load_mappings(o);
  auto text = query_text(o.query);
  if (is_starql(o.query) || is_starql(text)) {
    std::cout << starql::explain(starql::compile(starql::parse_starql(text, o.query), onto, m));
    return 0;
  }
  auto vocab = vocabulary(onto, &m);
  auto q = parse_cq(with_head(text), vocab);
  auto u = rewrite(q, onto, &vocab);
  std::cout << "Query " << to_string(q) << "\n";
  std::cout << "Rewriting (" << u.disjuncts.size() << " CQs)\n" << to_string(u);
  std::cout << "Plan\n" << ir::explain(unfold_static(u, m, onto), 1);
  return 0;
}

int cmd_ingest(const Options& o) {
  if (o.streams.size() != 1) throw Error("ingest takes exactly one --stream name=path");
  if (o.out.empty()) throw Error("--out directory is required");
  auto s = parse_stream_arg(o.streams[0]);
  auto load = stream::read_measurements_file(s.path, starql::parse_duration(o.lateness));
  stream::Metrics metrics;
  metrics.rejected_measurements = load.late + load.malformed;
  if (load.malformed) std::cerr << "rejected " << load.malformed << " malformed rows\n";
  if (load.late) std::cerr << "rejected " << load.late << " late rows\n";
  if (load.rows.empty()) std::cerr << "warning: no measurements, the store is empty\n";
  auto store = stream::ingest(load.rows, starql::parse_duration(o.range), starql::parse_duration(o.slide), s.name,
                              &metrics);
  store.save(o.out);
  std::cout << "windows " << store.windows().size() << "\n";
  std::cout << "measurements " << store.rows().size() << "\n";
  std::cout << "empty windows " << metrics.empty_windows << "\n";
  if (!store.windows().empty()) {
    stream::MwsSignature all;
    std::uint64_t min_n = UINT64_MAX, max_n = 0;
    for (const auto& w : store.windows()) {
      all = stream::merge(all, w.signature);
      min_n = std::min<std::uint64_t>(min_n, w.signature.n);
      max_n = std::max<std::uint64_t>(max_n, w.signature.n);
    }
    std::cout << "tuples per window " << min_n << ".." << max_n << "\n";
    std::cout << "value mean " << text::format_double(all.mean) << " sd " << text::format_double(all.stddev())
              << " min " << text::format_double(all.min) << " max " << text::format_double(all.max) << "\n";
  }
  std::ostringstream m;
  stream::write_jsonl(m, "ingest", metrics, {{"stream", s.name}});
  write_metrics(o, m.str());
  return 0;
}

int cmd_run(const Options& o) {
  auto onto = load_ontology(o);
  auto m = load_mappings(o);
  auto q = starql::parse_starql(query_text(o.query), o.query);
  auto plan = starql::compile(q, onto, m);
  TableStore tables;
  for (const auto& d : o.data) tables.load(d);
  std::vector<stream::StreamInput> inputs;
  stream::Metrics rejected;
  for (const auto& arg : o.streams) {
    auto s = parse_stream_arg(arg);
    auto load = stream::read_measurements_file(s.path, starql::parse_duration(o.lateness));
    rejected.rejected_measurements += load.late + load.malformed;
    inputs.push_back({s.name, std::move(load.rows), s.setback});
  }
  stream::RunOptions opt;
  auto workers = parse_workers(o.workers);
  if (workers.size() != 1) throw Error("run takes a single --workers count");
  opt.workers = workers[0];
  auto mws = parse_mws(o.mws);
  if (mws.size() != 1) throw Error("run takes --mws on or off");
  opt.mws = mws[0];
  if (!o.last_tick.empty()) opt.last_tick = std::stoll(o.last_tick);
  auto result = stream::execute(plan, tables, inputs, opt);
  result.metrics.merge(rejected);
  std::ostringstream csv;
  stream::write_csv(csv, result);
  write_output(o.out, csv.str());
  std::ostringstream metrics;
  stream::write_jsonl(metrics, "run", result.metrics,
                      {{"query", q.output_stream}, {"rows", result.rows.size()}, {"workers", opt.workers},
                       {"mws", opt.mws}});
  write_metrics(o, metrics.str());
  return 0;
}

int cmd_bench(const Options& o) {
  bench::BenchConfig c;
  c.windows = o.windows;
  c.cycles = o.cycles;
  c.seed = o.seed;
  c.workers = parse_workers(o.workers);
  c.mws = parse_mws(o.bench_mws);
  c.index_threshold = o.index_threshold;
  c.queries.clear();
  for (const auto& q : text::split(o.queries, ',')) c.queries.push_back(stream::parse_similarity_kind(std::string(text::trim(q))));
  auto archive = bench::synthetic_archive(c);
  auto rows = bench::run_bench(c, archive);
  std::ostringstream csv;
  bench::write_bench_csv(csv, rows);
  write_output(o.out, csv.str());
  std::ostringstream metrics;
  for (const auto& r : rows) {
    stream::Metrics m;
    m.measurement_scans = r.measurement_scans;
    m.index_builds = r.index_builds;
    stream::write_jsonl(metrics, "bench", m,
                        {{"query", r.query}, {"mws", r.mws}, {"workers", r.workers}, {"results", r.results}});
  }
  write_metrics(o, metrics.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ontology-mediated stream query engine"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* sub, bool mappings) {
    sub->add_option("--ontology", o.ontology, "ontology file")->check(CLI::ExistingFile);
    if (mappings) sub->add_option("--mappings", o.mappings, "mapping file")->check(CLI::ExistingFile);
  };

  auto* validate = app.add_subcommand("validate", "check the ontology restrictions and dataset satisfiability");
  add_model(validate, false);
  validate->add_option("--data", o.data, "dataset CSV (kind,subject,predicate,object)")->check(CLI::ExistingFile);

  auto* rewrite = app.add_subcommand("rewrite", "print the rewriting of a conjunctive query");
  add_model(rewrite, true);
  rewrite->add_option("--query", o.query, "query text or file")->required();

  auto* unfold = app.add_subcommand("unfold", "print the relational plan of a query");
  add_model(unfold, true);
  unfold->add_option("--query", o.query, "query text or file")->required();

  auto* explain = app.add_subcommand("explain", "print the compiled plan of a query");
  add_model(explain, true);
  explain->add_option("--query", o.query, "query text or file")->required();

  auto* ingest = app.add_subcommand("ingest", "archive a measurement stream as windows with signatures");
  ingest->add_option("--stream", o.streams, "name=path")->required();
  ingest->add_option("--range", o.range, "window range")->capture_default_str();
  ingest->add_option("--slide", o.slide, "window slide")->capture_default_str();
  ingest->add_option("--lateness", o.lateness, "accepted out-of-order delay per sensor")->capture_default_str();
  ingest->add_option("--out", o.out, "store directory")->required();
  ingest->add_option("--metrics", o.metrics, "metrics JSONL file");

  auto* run = app.add_subcommand("run", "evaluate a STARQL query over replayed streams");
  add_model(run, true);
  run->add_option("--data", o.data, "table CSV files or directories");
  run->add_option("--query", o.query, "STARQL file")->required();
  run->add_option("--stream", o.streams, "name=path[,setback=DUR]");
  run->add_option("--workers", o.workers, "worker threads")->capture_default_str();
  run->add_option("--mws", o.mws, "on or off")->capture_default_str();
  run->add_option("--index-threshold", o.index_threshold, "accepted for symmetry with bench");
  run->add_option("--lateness", o.lateness, "accepted out-of-order delay per sensor")->capture_default_str();
  run->add_option("--last-tick", o.last_tick, "last pulse tick in ms");
  run->add_option("--out", o.out, "result CSV (default stdout)");
  run->add_option("--metrics", o.metrics, "metrics JSONL file");

  auto* bench = app.add_subcommand("bench", "similarity queries over a synthetic archive");
  bench->add_option("--windows", o.windows, "archived windows")->capture_default_str();
  bench->add_option("--cycles", o.cycles, "live cycles per cell")->capture_default_str();
  bench->add_option("--seed", o.seed, "generator seed")->capture_default_str();
  bench->add_option("--workers", o.workers, "comma-separated worker counts")->capture_default_str();
  bench->add_option("--mws", o.bench_mws, "on, off or both")->capture_default_str();
  bench->add_option("--queries", o.queries, "pearson,cosine,avg,min")->capture_default_str();
  bench->add_option("--index-threshold", o.index_threshold, "probes before a batch is indexed")->capture_default_str();
  bench->add_option("--out", o.out, "timing CSV (default stdout)");
  bench->add_option("--metrics", o.metrics, "metrics JSONL file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*rewrite) return cmd_rewrite(o);
    if (*unfold) return cmd_unfold(o);
    if (*explain) return cmd_explain(o);
    if (*ingest) return cmd_ingest(o);
    if (*run) return cmd_run(o);
    if (*bench) return cmd_bench(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
