#include "catch_amalgamated.hpp"
#include "support/oracles.hpp"

#include "cli.hpp"

#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace dropwarp;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dropwarp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("dropwarp-test-" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string slurp(const std::string& path) { return cli::read_text(path); }

} // namespace

TEST_CASE("dist reports cost and drops") {
  TempDir dir("dist");
  const auto input = dir.file("ex.jsonl");
  write(input, oracle::example_one_jsonl());
  // the file's alphabet is sorted (C, P, R, S), which leaves distances unchanged
  auto r = run({"dist", input, "--id-a", "s1", "--id-b", "s2", "--p-t", "0.1111111111111111", "--p-e", "1",
                "--delta", "1", "--tau", "3.5"});
  REQUIRE(r.code == 0);
  const auto doc = r.doc();
  CHECK(doc["cost"].get<double>() == Catch::Approx(3.6196329811802244).epsilon(1e-12));
  CHECK(doc["col_drops"] == json::array({2, 3}));
  CHECK(doc["row_drops"].empty());

  r = run({"dist", input, "--id-a", "s3", "--id-b", "s3"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["cost"].get<double>() == 0.0);

  CHECK(run({"dist", input, "--id-a", "s1", "--id-b", "nope"}).code == 2);
  CHECK(run({"dist", dir.file("missing.jsonl"), "--id-a", "a", "--id-b", "b"}).code == 1);
  write(dir.file("bad.jsonl"), "{\"id\":\"a\",\"events\":[{\"e\":\"S\",\"t\":\"x\"}]}\n");
  const auto bad = run({"dist", dir.file("bad.jsonl"), "--id-a", "a", "--id-b", "a"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 1") != std::string::npos);
}

TEST_CASE("infinite costs are printed as a string") {
  TempDir dir("inf");
  const auto input = dir.file("two.jsonl");
  write(input, "{\"id\":\"a\",\"events\":[{\"e\":\"S\",\"t\":0}]}\n{\"id\":\"b\",\"events\":[]}\n");
  const auto r = run({"dist", input, "--id-a", "a", "--id-b", "b", "--delta", "inf"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["cost"] == "inf");
}

TEST_CASE("metric flags derive defaults from tau") {
  cli::MetricFlags f;
  f.tau = 3.0;
  f.t_max = 20.0;
  auto p = f.resolve();
  CHECK(p.weights.event == 9.0);
  CHECK(p.weights.time == 1.0);
  CHECK(p.max_gap == 3.0);
  f.delta = "inf";
  CHECK(std::isinf(f.resolve().drop_cost));
  f.p_e = 2.0;
  CHECK(f.resolve().weights.event == 2.0);

  cli::MetricFlags lone;
  lone.tau = 3.0;
  CHECK_THROWS_AS(lone.resolve(), PreconditionError);
  CHECK_THROWS_AS(cli::MetricFlags::parse_cost("four"), ValidationError);
}

TEST_CASE("average writes a parseable barycenter") {
  TempDir dir("avg");
  const auto input = dir.file("ex.jsonl");
  write(input, oracle::example_one_jsonl());
  auto r = run({"average", input, "--ids", "s1,s3", "--delta", "2", "--out", dir.file("c.json")});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["sequences"] == 2);
  const auto corpus = parse_sequences_file(input);
  const auto center = barycenter_from_json(json::parse(slurp(dir.file("c.json"))), corpus.alphabet);
  CHECK(center.size() == r.doc()["length"].get<std::size_t>());
  CHECK(run({"average", input, "--ids", "s1,zz"}).code == 2);
}

TEST_CASE("synth, cluster, eval and hist form a pipeline") {
  TempDir dir("pipeline");
  const auto data = dir.file("extra.jsonl");
  REQUIRE(run({"synth", "--scenario", "extra", "--seed", "0", "--out", data}).code == 0);
  const auto labels = dir.file("extra.labels.csv");
  REQUIRE(fs::exists(labels));
  const auto corpus = parse_sequences_file(data);
  CHECK(corpus.sequences.size() == 45);

  const auto out = dir.file("hac");
  auto r = run({"cluster", data, "--method", "hac", "--k", "2", "--p-t", "0.1111111111111111", "--p-e", "1",
                "--delta", "4", "--out-dir", out, "--svg", dir.file("h.svg")});
  REQUIRE(r.code == 0);
  for (auto name : {"assignments.csv", "centroids.json", "metrics.json", "histogram.csv"})
    CHECK(fs::exists(fs::path(out) / name));
  CHECK(fs::exists(dir.file("h.svg")));
  const auto centroids = json::parse(slurp(out + "/centroids.json"));
  REQUIRE(centroids.size() == 2);
  for (const auto& c : centroids) CHECK_NOTHROW(barycenter_from_json(c, corpus.alphabet));
  CHECK(read_label_csv_file(out + "/assignments.csv").size() == 45);

  r = run({"eval", "--pred", out + "/assignments.csv", "--truth", labels, "--merge", "1=3", "--out-dir", out});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["kappa"] == 1.0);
  CHECK(fs::exists(out + "/confusion.csv"));

  r = run({"hist", data, "--assignments", out + "/assignments.csv", "--bin-width", "7"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("cluster,type,bin_start,count\n", 0) == 0);

  CHECK(run({"cluster", data, "--k", "9999", "--out-dir", out}).code == 2);
  CHECK(run({"eval", "--pred", out + "/assignments.csv", "--truth", dir.file("none.csv")}).code == 1);
}

TEST_CASE("eval rejects mismatched ids") {
  TempDir dir("eval");
  write(dir.file("p.csv"), "id,cluster\na,0\nb,1\n");
  write(dir.file("t.csv"), "id,label\na,1\nc,2\n");
  CHECK(run({"eval", "--pred", dir.file("p.csv"), "--truth", dir.file("t.csv")}).code == 2);
  write(dir.file("t.csv"), "id,label\nb,2\na,1\n");
  const auto r = run({"eval", "--pred", dir.file("p.csv"), "--truth", dir.file("t.csv")});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["kappa"] == 1.0);
}

TEST_CASE("k-means with one cluster on duplicates") {
  TempDir dir("kmeans");
  const auto input = dir.file("dup.jsonl");
  write(input, "{\"id\":\"a\",\"events\":[{\"e\":\"S\",\"t\":1},{\"e\":\"C\",\"t\":2}]}\n"
               "{\"id\":\"b\",\"events\":[{\"e\":\"S\",\"t\":1},{\"e\":\"C\",\"t\":2}]}\n");
  const auto r = run({"cluster", input, "--method", "kmeans", "--k", "1", "--out-dir", dir.file("o")});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["total_inertia"] == 0.0);
  const auto centroids = json::parse(slurp(dir.file("o") + "/centroids.json"));
  CHECK(centroids[0]["events"].size() == 2);
}

TEST_CASE("synth output is reproducible") {
  TempDir dir("synth");
  REQUIRE(run({"synth", "--scenario", "ratio", "--seed", "4", "--out", dir.file("a.jsonl")}).code == 0);
  REQUIRE(run({"synth", "--scenario", "ratio", "--seed", "4", "--out", dir.file("b.jsonl")}).code == 0);
  CHECK(slurp(dir.file("a.jsonl")) == slurp(dir.file("b.jsonl")));
  CHECK(parse_sequences_file(dir.file("a.jsonl")).sequences.size() == 135);
}

TEST_CASE("repro checks the expected outcome") {
  const auto r = run({"repro", "--experiment", "extra", "--delta", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["runs"][0]["kappa"] == 1.0);
  CHECK(r.doc()["passed"] == true);
  CHECK(run({"repro", "--experiment", "nothing"}).code == 2);
  CHECK(run({"repro", "--experiment", "extra", "--delta", "7"}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"dist"}).code == 2);
  CHECK(run({"cluster", "x.jsonl", "--k", "2", "--out-dir", "o", "--method", "ward"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
