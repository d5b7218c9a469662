#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path kSource(OBDA_SOURCE_DIR);
const fs::path kRunning = kSource / "samples" / "running";

struct Result {
  int status = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("obda_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

Result cli(const std::string& args) {
  const char* exe = std::getenv("OBDA_CLI");
  if (!exe) throw std::runtime_error("OBDA_CLI is not set");
  auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  std::string cmd = std::string("\"") + exe + "\" " + args + " >" + out.string() + " 2>" + err.string();
  int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string model() {
  return " --ontology " + (kRunning / "ontology.txt").string() + " --mappings " + (kRunning / "mappings.txt").string();
}

std::string run_args() {
  return model() + " --data " + (kRunning / "tables").string() + " --query " +
         (kRunning / "queries" / "critical_mode.starql").string() + " --stream sensorMeasurements=" +
         (kRunning / "streams" / "live.csv").string() + " --stream referenceSensorMeasurements=" +
         (kRunning / "streams" / "reference.csv").string();
}

int count_lines(const std::string& s, const std::string& prefix) {
  int n = 0;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) n += l.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST(Cli, ValidateRunningExample) {
  auto r = cli("validate --ontology " + (kRunning / "ontology.txt").string() + " --data " +
               (kRunning / "dataset.csv").string());
  EXPECT_EQ(r.status, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("satisfiable"), std::string::npos);
}

TEST(Cli, ValidateFunctionalityViolation) {
  auto dir = kSource / "tests" / "fixtures" / "sat" / "funct_attr";
  auto r = cli("validate --ontology " + (dir / "ontology.txt").string() + " --data " + (dir / "dataset.csv").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(count_lines(r.out, "unsatisfiable "), 1) << r.out;
}

TEST(Cli, ValidateSyntacticRestriction) {
  write(scratch() / "restricted.txt", "funct hasPart\npartOf subrole hasPart\n");
  auto r = cli("validate --ontology " + (scratch() / "restricted.txt").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(count_lines(r.out, "violation "), 1) << r.out;
}

TEST(Cli, MalformedAxiomIsAParseError) {
  write(scratch() / "bad.txt", "A sub B\nA sub\n");
  auto r = cli("validate --ontology " + (scratch() / "bad.txt").string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("bad.txt:2:"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsAreParseErrors) {
  EXPECT_EQ(cli("").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
  EXPECT_EQ(cli("run --workers").status, 2);
}

TEST(Cli, RewritePrintsTwoDisjuncts) {
  auto r = cli("rewrite --ontology " + (kRunning / "ontology.txt").string() + " --query 'Reliable(x)'");
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "q(x) :- Reliable(x)\nq(x) :- [agg:min testScore >= 0.9](x)\n");
}

TEST(Cli, UnfoldNamesUnmappedPredicate) {
  write(scratch() / "device.txt", "Sensor sub Device\n");
  auto r = cli("unfold --ontology " + (scratch() / "device.txt").string() + " --mappings " +
               (kRunning / "mappings.txt").string() + " --query 'Device(x)'");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("'Device'"), std::string::npos) << r.err;
}

TEST(Cli, UnfoldRunningExample) {
  auto r = cli("unfold" + model() + " --query 'Reliable(x)'");
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("Union\n", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("GroupHaving by x: min(y) >= 0.9"), std::string::npos);
}

TEST(Cli, ExplainIsStable) {
  std::string args = "explain" + model() + " --query " + (kRunning / "queries" / "critical_mode.starql").string();
  auto a = cli(args), b = cli(args);
  EXPECT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("Pulse examplePulse"), std::string::npos) << a.out;
}

TEST(Cli, IngestNonOverlappingWindows) {
  std::ostringstream csv;
  csv << "time_ms,sensor_id,value\n";
  for (int i = 0; i < 60; ++i) csv << i * 1000 << ",s1," << (i % 7) << "\n";
  write(scratch() / "grid.csv", csv.str());
  auto dir = scratch() / "grid_store";
  auto r = cli("ingest --stream m=" + (scratch() / "grid.csv").string() + " --range 60s --slide 60s --out " +
               dir.string());
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("windows 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("tuples per window 60..60"), std::string::npos) << r.out;
  auto first = slurp(dir / "windows.csv") + slurp(dir / "measurements.bin") + slurp(dir / "store.json");
  auto again = cli("ingest --stream m=" + (scratch() / "grid.csv").string() + " --range 60s --slide 60s --out " +
                   dir.string());
  EXPECT_EQ(again.status, 0);
  EXPECT_EQ(slurp(dir / "windows.csv") + slurp(dir / "measurements.bin") + slurp(dir / "store.json"), first);
}

TEST(Cli, IngestKeepsDuplicateTimestampsAndCountsRejects) {
  write(scratch() / "dups.csv", "time_ms,sensor_id,value\n0,s1,1\n0,s1,2\n1000,s1,3\nnot,a,row\n");
  auto r = cli("ingest --stream m=" + (scratch() / "dups.csv").string() + " --range 2s --slide 2s --out " +
               (scratch() / "dups_store").string() + " --metrics " + (scratch() / "dups.jsonl").string());
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("measurements 3\n"), std::string::npos) << r.out;
  EXPECT_NE(r.err.find("rejected 1 malformed"), std::string::npos) << r.err;
  EXPECT_NE(slurp(scratch() / "dups.jsonl").find("\"rejected_measurements\":1"), std::string::npos);
}

TEST(Cli, IngestEmptyInputWarns) {
  write(scratch() / "empty.csv", "time_ms,sensor_id,value\n");
  auto r = cli("ingest --stream m=" + (scratch() / "empty.csv").string() + " --out " + (scratch() / "empty_store").string());
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, RunReportsOnlyS2) {
  auto r = cli("run" + run_args());
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "tick_ms,subject,concept\n60000,s2,InCriticalMode\n120000,s2,InCriticalMode\n"
                   "180000,s2,InCriticalMode\n");
}

TEST(Cli, RunMwsAndWorkersKeepRows) {
  auto on = cli("run" + run_args() + " --metrics " + (scratch() / "on.jsonl").string());
  auto off = cli("run" + run_args() + " --mws off --metrics " + (scratch() / "off.jsonl").string());
  auto four = cli("run" + run_args() + " --workers 4");
  EXPECT_EQ(on.out, off.out);
  EXPECT_EQ(on.out, four.out);
  EXPECT_NE(slurp(scratch() / "on.jsonl"), slurp(scratch() / "off.jsonl"));
}

TEST(Cli, RunFailureLeavesNoSink) {
  auto sink = scratch() / "result.csv";
  fs::remove(sink);
  auto r = cli("run" + model() + " --data " + (kRunning / "tables").string() + " --query " +
               (kRunning / "queries" / "critical_mode.starql").string() + " --stream sensorMeasurements=" +
               (kRunning / "streams" / "live.csv").string() + " --out " + sink.string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("referenceSensorMeasurements"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(sink));
  EXPECT_FALSE(fs::exists(sink.string() + ".partial"));
  EXPECT_EQ(cli("run" + run_args() + " --workers 0").status, 1);
}

TEST(Cli, BenchTable) {
  auto r = cli("bench --windows 400 --cycles 3 --workers 1,2 --queries pearson,avg");
  EXPECT_EQ(r.status, 0) << r.err;
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "query,mws,workers,cycles,windows,median_total_ms,mean_total_ms,mean_join_ms,mean_compute_ms,"
                    "measurement_scans,index_builds,results");
  int rows = 0;
  for (std::string l; std::getline(in, l);) {
    ++rows;
    if (l.rfind("avg,on,", 0) == 0) EXPECT_NE(l.find(",0,0,"), std::string::npos) << l;  // no scans, no index
  }
  EXPECT_EQ(rows, 8);
}
