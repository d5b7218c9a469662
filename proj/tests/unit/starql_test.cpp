#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "obda/common/error.hpp"
#include "obda/mapping/mapping.hpp"
#include "obda/ontology/io.hpp"
#include "obda/starql/compile.hpp"
#include "obda/starql/parser.hpp"
#include "obda/starql/validate.hpp"

using namespace obda;
using namespace obda::starql;

namespace {

const std::filesystem::path kSource(OBDA_SOURCE_DIR);
const std::filesystem::path kRunning = kSource / "samples" / "running";
const std::filesystem::path kFixtures = kSource / "tests" / "fixtures" / "starql";

std::vector<std::filesystem::path> files_in(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".starql") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::set<std::string> rules_of(const StarqlReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) out.insert(v.rule);
  return out;
}

const char* kSmall = R"(PREFIX ex: <http://example.org/>
CREATE PULSE p WITH START = NOW, FREQUENCY = 1min
CREATE STREAM out AS
CONSTRUCT GRAPH NOW { ?s a ex:Alarm }
FROM STREAM msmt [NOW - 1min, NOW] -> 1sec
USING PULSE p
SEQUENCE BY StandardSequencing AS seq
HAVING )";

}  // namespace

TEST(StarqlParser, CriticalModeAst) {
  auto q = read_starql_file(kRunning / "queries" / "critical_mode.starql");
  ASSERT_EQ(q.prefixes.size(), 1u);
  EXPECT_EQ(q.prefixes[0].first, "ex");
  EXPECT_EQ(q.prefixes[0].second, "http://www.siemens.com/onto/gasturbine/");
  ASSERT_TRUE(q.pulse);
  EXPECT_EQ(q.pulse->name, "examplePulse");
  EXPECT_FALSE(q.pulse->start);
  EXPECT_EQ(q.pulse->frequency, 60000);
  EXPECT_EQ(q.output_stream, "StreamOfSensorsInCriticalMode");
  ASSERT_TRUE(q.output.construct);
  ASSERT_EQ(q.output.templates.size(), 1u);
  EXPECT_EQ(q.output.templates[0].object.text, ":InCriticalMode");
  ASSERT_TRUE(q.where);
  ASSERT_EQ(q.where->size(), 1u);
  EXPECT_EQ((*q.where)[0].object.text, "ex:Reliable");
  ASSERT_EQ(q.streams.size(), 2u);
  EXPECT_EQ(q.streams[0].name, "sensorMeasurements");
  EXPECT_EQ(q.streams[0].range, 60000);
  EXPECT_EQ(q.streams[0].slide, 1000);
  EXPECT_FALSE(q.streams[0].setback);
  EXPECT_EQ(q.streams[1].name, "referenceSensorMeasurements");
  EXPECT_EQ(q.streams[1].range, 60000);
  EXPECT_EQ(q.streams[1].slide, 1000);
  EXPECT_EQ(q.streams[1].setback, std::optional<Millis>(31536000000LL));
  EXPECT_EQ(q.using_pulse, "examplePulse");
  EXPECT_EQ(q.strategy, "StandardSequencing");
  EXPECT_EQ(q.sequence, "MergedSequenceOfMeasurementes");
  ASSERT_TRUE(q.having);
  const Expr& h = *q.having;
  EXPECT_EQ(h.kind, Expr::Kind::Exists);
  EXPECT_EQ(h.name, "i");
  ASSERT_EQ(h.children.size(), 2u);
  EXPECT_EQ(h.children[0].kind, Expr::Kind::Graph);
  EXPECT_EQ(h.children[0].triples.size(), 2u);
  const Expr& cond = h.children[1];
  EXPECT_EQ(cond.kind, Expr::Kind::Compare);
  EXPECT_EQ(cond.cmp, CmpOp::Gt);
  EXPECT_EQ(canonical_function(cond.children[0].name), "pearson");
  EXPECT_EQ(cond.children[1].number, Rational(3, 4));
  EXPECT_TRUE(validate(q).ok()) << to_string(validate(q).violations.front());
}

TEST(StarqlParser, Durations) {
  EXPECT_EQ(parse_duration("250ms"), 250);
  EXPECT_EQ(parse_duration("1sec"), 1000);
  EXPECT_EQ(parse_duration("2s"), 2000);
  EXPECT_EQ(parse_duration("1min"), 60000);
  EXPECT_EQ(parse_duration("1.5min"), 90000);
  EXPECT_EQ(parse_duration("2hour"), 7200000);
  EXPECT_EQ(parse_duration("1day"), 86400000);
  EXPECT_EQ(parse_duration("1year"), 31536000000LL);
  EXPECT_THROW(parse_duration("1fortnight"), Error);
  EXPECT_THROW(parse_duration("0.0001sec"), Error);
  for (Millis ms : {1LL, 999LL, 1000LL, 60000LL, 90000LL, 3600000LL, 31536000000LL})
    EXPECT_EQ(parse_duration(print_duration(ms)), ms);
}

TEST(StarqlParser, ErrorsCarryPosition) {
  try {
    parse_starql(std::string(kSmall) + "EXISTS i IN seq GRAPH i { ?s ex:hasValue }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8);
    EXPECT_GT(e.column(), 30);
  }
  EXPECT_THROW(parse_starql("CREATE STREAM out AS SELECT ?x FROM STREAM s [NOW - 1min, NOW] -> 1sec HAVING"), ParseError);
  // clause order is fixed
  EXPECT_THROW(parse_starql("CREATE STREAM out AS SELECT ?x USING PULSE p FROM STREAM s [NOW - 1min, NOW] -> 1sec"),
               ParseError);
}

TEST(StarqlCorpus, RoundTrip) {
  auto files = files_in(kFixtures / "corpus");
  ASSERT_GE(files.size(), 20u);
  for (const auto& f : files) {
    SCOPED_TRACE(f.filename().string());
    auto q = read_starql_file(f);
    std::string text = print(q);
    auto again = parse_starql(text);
    EXPECT_EQ(again, q);
    EXPECT_EQ(print(again), text);
  }
}

TEST(StarqlCorpus, AllValid) {
  for (const auto& f : files_in(kFixtures / "corpus")) {
    SCOPED_TRACE(f.filename().string());
    auto r = validate(read_starql_file(f));
    for (const auto& v : r.violations) ADD_FAILURE() << to_string(v);
  }
}

TEST(StarqlCorpus, NegativeQueriesRejected) {
  auto files = files_in(kFixtures / "negative");
  ASSERT_GE(files.size(), 10u);
  std::set<std::string> covered;
  for (const auto& f : files) {
    SCOPED_TRACE(f.filename().string());
    std::string text = slurp(f);
    const std::string tag = "# expect: ";
    ASSERT_EQ(text.rfind(tag, 0), 0u);
    std::string rule = text.substr(tag.size(), text.find('\n') - tag.size());
    auto r = validate(parse_starql(text));
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(rules_of(r).count(rule)) << (r.ok() ? "accepted" : to_string(r.violations.front()));
    EXPECT_THROW(require_valid(parse_starql(text)), Error);
    covered.insert(rule);
  }
  EXPECT_EQ(covered.size(), files.size());
}

TEST(StarqlValidate, ScopeRules) {
  auto rules = [](const std::string& having) { return rules_of(validate(parse_starql(kSmall + having))); };
  EXPECT_TRUE(rules("EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v } HAVING max(?v) > 1").empty());
  // ?v is used outside, so it becomes a group key of the quantifier
  EXPECT_TRUE(rules("EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v } AND ?v > 1").empty());
  EXPECT_TRUE(rules("(EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v }) AND ?w > 1").count("unsafe-comparison"));
  EXPECT_TRUE(rules("EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v } HAVING ?v > 1").count("unsafe-comparison"));
  EXPECT_TRUE(rules("EXISTS i IN seq GRAPH i+1 { ?s ex:hasValue ?v }").empty());
  EXPECT_TRUE(rules("EXISTS i IN seq (GRAPH i { ?s ex:hasValue ?v } AND NOT GRAPH i { ?s ex:hasFault ?f })").empty());
  // variables only under NOT are existential there
  EXPECT_TRUE(rules("EXISTS i IN seq (GRAPH i { ?s ex:hasValue ?v } AND NOT GRAPH i { ?t ex:hasFault ?f })").empty());
  EXPECT_TRUE(rules("EXISTS i IN seq (NOT GRAPH i { ?t ex:hasFault ?f } OR GRAPH i { ?t ex:hasFault ?f })")
                  .count("unsupported-negation"));
  EXPECT_TRUE(rules("EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v } HAVING cosine(?v, ?v, ?v) > 1").count("function-arity"));
}

TEST(StarqlValidate, ViolationsNameClauseAndVariable) {
  auto r = validate(parse_starql(std::string(kSmall) + "EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v } HAVING max(?u) > 1"));
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].rule, "unsafe-aggregate");
  EXPECT_EQ(r.violations[0].variable, "u");
  EXPECT_EQ(r.violations[0].clause, "HAVING");
  EXPECT_EQ(r.violations[0].pos.line, 8);
}

TEST(StarqlValidate, VisibleOutside) {
  auto q = parse_starql(std::string(kSmall) +
                        "EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v } AND NOT EXISTS j IN seq GRAPH j { ?s ex:hasFault ?f }");
  const Expr& inner = q.having->children[0];  // EXISTS i
  auto vis = visible_outside(q, inner);
  EXPECT_TRUE(vis.count("s"));
  EXPECT_FALSE(vis.count("v"));
}

// Random condition trees survive print -> parse.
TEST(StarqlProperty, ConditionRoundTrip) {
  std::mt19937_64 rng(7);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  std::function<std::string(int)> value = [&](int depth) -> std::string {
    int k = depth <= 0 ? pick(2) : pick(6);
    switch (k) {
      case 0: return std::to_string(pick(100)) + (pick(2) ? ".5" : "");
      case 1: {
        static const char* fns[] = {"max", "min", "avg", "sum", "count"};
        return std::string(fns[pick(5)]) + "(?v)";
      }
      case 2: return "pearson(?v, ?w)";
      case 3: return "-" + value(depth - 1);
      case 4: return "(" + value(depth - 1) + " " + "+-*/"[pick(4)] + " " + value(depth - 1) + ")";
      default: return "abs(" + value(depth - 1) + ")";
    }
  };
  std::function<std::string(int)> cond = [&](int depth) -> std::string {
    static const char* ops[] = {"<", "<=", "=", "!=", ">=", ">"};
    int k = depth <= 0 ? 0 : pick(4);
    if (k == 0) return value(2) + " " + ops[pick(6)] + " " + value(2);
    if (k == 1) return "NOT (" + cond(depth - 1) + ")";
    return "(" + cond(depth - 1) + (k == 2 ? " AND " : " OR ") + cond(depth - 1) + ")";
  };
  for (int n = 0; n < 300; ++n) {
    std::string text = std::string(kSmall) + "EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v . ex:r ex:hasValue ?w } HAVING " + cond(3);
    SCOPED_TRACE(text);
    auto q = parse_starql(text);
    auto again = parse_starql(print(q));
    ASSERT_EQ(again, q);
    EXPECT_TRUE(validate(q).ok());
  }
}

namespace {

struct Running {
  Ontology o = read_ontology_file(kRunning / "ontology.txt");
  MappingSet m = read_mappings_file(kRunning / "mappings.txt");
  StarqlQuery q = read_starql_file(kRunning / "queries" / "critical_mode.starql");
};

}  // namespace

TEST(StarqlCompile, CriticalMode) {
  Running r;
  auto plan = compile(r.q, r.o, r.m);
  EXPECT_EQ(plan.static_columns, std::vector<std::string>{"sensor"});
  EXPECT_EQ(plan.output_columns, std::vector<std::string>{"sensor"});
  ASSERT_TRUE(plan.static_plan);
  ASSERT_TRUE(plan.stream_plan);
  EXPECT_TRUE(ir::validate_plan(*plan.static_plan, false).empty());
  EXPECT_TRUE(ir::validate_plan(*plan.stream_plan, true).empty());
  auto tables = ir::scanned_tables(*plan.static_plan);
  EXPECT_EQ(std::set<std::string>(tables.begin(), tables.end()), (std::set<std::string>{"certified", "precision", "tests"}));
  const auto& top = *plan.stream_plan;
  EXPECT_EQ(top.kind, ir::NodeKind::Quantify);
  EXPECT_EQ(top.keys, std::vector<std::string>{"sensor"});
  ASSERT_EQ(top.series.size(), 2u);
  EXPECT_EQ(top.series[0].variable, "y");
  EXPECT_TRUE(top.series[0].sensor.is_column);
  EXPECT_EQ(top.series[1].variable, "z");
  EXPECT_EQ(top.series[1].sensor.text, "refSensor");
  std::string text = explain(plan);
  EXPECT_NE(text.find("Filter static on (sensor)"), std::string::npos) << text;
  EXPECT_NE(text.find("Slice referenceSensorMeasurements"), std::string::npos) << text;
  EXPECT_NE(text.find("Select sid = 'refSensor'"), std::string::npos) << text;
}

TEST(StarqlCompile, ExplainStable) {
  Running a, b;
  EXPECT_EQ(explain(compile(a.q, a.o, a.m)), explain(compile(b.q, b.o, b.m)));
  auto reparsed = parse_starql(print(a.q));
  EXPECT_EQ(explain(compile(reparsed, a.o, a.m)), explain(compile(a.q, a.o, a.m)));
}

TEST(StarqlCompile, UnmappedPredicates) {
  Running r;
  auto q = parse_starql(std::string(kSmall) + "EXISTS i IN seq GRAPH i { ?s ex:hasTemperature ?v }");
  EXPECT_THROW(compile(q, r.o, r.m), Error);
  auto bad_where = r.q;
  (*bad_where.where)[0].object.text = "ex:Unknown";
  EXPECT_THROW(compile(bad_where, r.o, r.m), Error);
  auto invalid = parse_starql(std::string(kSmall) + "EXISTS i IN seq GRAPH i { ?s ex:hasValue ?v } HAVING max(?u) > 1");
  EXPECT_THROW(compile(invalid, r.o, r.m), Error);
}

TEST(StarqlCompile, StreamMappingSourceSelectsStream) {
  Running r;
  auto m = parse_mappings("map stream hasValue(s,v) <- slice(sensorMeasurements; s=sid, v=sval) as live\n");
  auto plan = compile(r.q, r.o, parse_mappings(slurp(kRunning / "mappings.txt") +
                                               "map stream hasValue(s,v) <- slice(sensorMeasurements; s=sid, v=sval) as live\n"));
  std::string text = ir::explain(*plan.stream_plan);
  // the generic mapping reaches both streams, the named one only its own
  std::size_t live = 0, pos = 0;
  while ((pos = text.find("Slice sensorMeasurements", pos)) != std::string::npos) ++live, ++pos;
  EXPECT_EQ(live, 4u);  // 2 triples x (generic + named)
  EXPECT_FALSE(m.find_stream("hasValue").empty());
}
