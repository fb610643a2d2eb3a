#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli_app.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "syncoord");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = syncoord::cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> records(const std::string& jsonl) {
  std::vector<json> out;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "syncoord-cli-XXXXXX").string();
    path_ = mkdtemp(pattern.data());
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

void write_file(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

int layout_width(const json& layout) {
  int w = 0;
  for (const auto& b : layout) w += b["width"].get<int>();
  return w;
}

}  // namespace

TEST(Cli, FeaturizeEthanol) {
  const auto r = run_cli({"featurize"}, "CCO ethanol\n");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto recs = records(r.out);
  ASSERT_EQ(recs.size(), 1u);
  const json& d = recs[0];
  EXPECT_EQ(d["name"], "ethanol");
  EXPECT_EQ(d["line"], 1);
  EXPECT_EQ(d["line_graph"]["nodes"].size(), 4u);
  EXPECT_EQ(d["line_graph"]["edges"].size(), 2u);
  // 2 * 19 atom + 4 bond + 16 bounds + 16 ppr; 18 bounds + 18 ppr angle.
  EXPECT_EQ(layout_width(d["node_layout"]), 2 * 19 + 4 + 16 + 16);
  EXPECT_EQ(layout_width(d["edge_layout"]), 36);
  for (const auto& row : d["node_features"]) EXPECT_EQ(static_cast<int>(row.size()), layout_width(d["node_layout"]));
  for (const auto& row : d["edge_features"]) EXPECT_EQ(static_cast<int>(row.size()), layout_width(d["edge_layout"]));
  EXPECT_EQ(d["manifest"]["status"], "ok");
  EXPECT_EQ(d["manifest"]["version"], syncoord::kToolVersion);
  EXPECT_EQ(d["bounds"].size(), 3u);
}

TEST(Cli, ManifestEchoesEveryKnob) {
  const auto r = run_cli({"featurize", "--alpha", "0.3", "--n-rbf", "8", "--n-abf", "12", "--angle-mode", "min_max",
                          "--coords", "bounds", "--include-backtrack", "--seed", "42"},
                         "CCO\n");
  ASSERT_EQ(r.code, 0) << r.err;
  const json cfg = records(r.out)[0]["manifest"]["config"];
  EXPECT_EQ(cfg["alpha"], 0.3);
  EXPECT_EQ(cfg["n_rbf"], 8);
  EXPECT_EQ(cfg["n_abf"], 12);
  EXPECT_EQ(cfg["angle_mode"], "min_max");
  EXPECT_EQ(cfg["coords"], "bounds");
  EXPECT_EQ(cfg["include_backtrack"], true);
  EXPECT_EQ(cfg["refnet"]["seed"], 42);
  EXPECT_TRUE(cfg["d_max_global"].contains("bounds"));
  EXPECT_TRUE(cfg["d_max_global"].contains("ppr"));
  const json d = records(r.out)[0];
  EXPECT_EQ(d["line_graph"]["edges"].size(), 6u);
  EXPECT_EQ(layout_width(d["edge_layout"]), 12);
}

TEST(Cli, EmptyInput) {
  TempDir tmp;
  write_file(tmp.file("empty.smi"), "");
  const auto r = run_cli({"featurize", tmp.file("empty.smi")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
}

TEST(Cli, MalformedLineRecorded) {
  const auto r = run_cli({"featurize"}, "CCO\nC1CC\nCC\n");
  EXPECT_EQ(r.code, 1);
  const auto recs = records(r.out);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1]["line"], 2);
  EXPECT_EQ(recs[1]["manifest"]["status"], "error");
  EXPECT_NE(recs[1]["manifest"]["error"].get<std::string>().find("unmatched ring closure"), std::string::npos);
  EXPECT_TRUE(recs[1]["manifest"].contains("config"));
  EXPECT_EQ(recs[2]["manifest"]["status"], "ok");
  EXPECT_EQ(run_cli({"featurize", "--keep-going"}, "CCO\nC1CC\n").code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"featurize", "--bogus"}, "CC\n").code, 2);
  EXPECT_EQ(run_cli({"featurize", "--alpha", "0"}, "CC\n").code, 2);
  EXPECT_EQ(run_cli({"featurize", "--coords", "xyz"}, "CC\n").code, 2);
  EXPECT_EQ(run_cli({"featurize", "--n-abf", "10"}, "CC\n").code, 2);
  EXPECT_EQ(run_cli({"featurize", "--format", "json+bin"}, "CC\n").code, 2);
  EXPECT_EQ(run_cli({"featurize", "/nonexistent/input.smi"}).code, 2);
}

TEST(Cli, AlphaOne) {
  const auto r = run_cli({"featurize", "--alpha", "1.0", "--emit-dist-matrix"}, "CC(=O)O\n");
  ASSERT_EQ(r.code, 0) << r.err;
  const json dist = records(r.out)[0]["sppr"]["dist"];
  for (std::size_t i = 0; i < dist.size(); ++i)
    for (std::size_t j = 0; j < dist.size(); ++j)
      EXPECT_NEAR(dist[i][j].get<double>(), i == j ? 0.0 : std::sqrt(2.0), 1e-12);
  const auto v = run_cli({"validate", "--alpha", "1.0"}, "CC(=O)O\nc1ccccc1\n");
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_TRUE(json::parse(v.out)["passed"].get<bool>());
}

TEST(Cli, SizeGate) {
  const std::string big(syncoord::kDenseMatrixAtomLimit + 1, 'C');
  const auto gated = run_cli({"featurize", "--emit-dist-matrix", "--coords", "ppr"}, big + "\n");
  ASSERT_EQ(gated.code, 0) << gated.err;
  EXPECT_TRUE(records(gated.out)[0]["sppr"].is_null());
  const auto forced = run_cli({"featurize", "--emit-dist-matrix", "--force-dist-matrix", "--coords", "ppr"}, big + "\n");
  EXPECT_EQ(records(forced.out)[0]["sppr"]["dist"].size(), big.size());
  const auto none = run_cli({"featurize"}, "CC\n");
  EXPECT_FALSE(records(none.out)[0].contains("sppr"));
}

TEST(Cli, ValidateCorpus) {
  const auto r = run_cli({"validate", testing_support::data_path("corpus.smi")});
  EXPECT_EQ(r.code, 0) << r.out;
  const json report = json::parse(r.out);
  EXPECT_TRUE(report["passed"].get<bool>());
  for (const char* name : {"metric_axioms", "oracle_equivalence", "bounds_invariants", "angle_bound_ordering",
                           "line_graph_counts", "refnet_permutation_invariance", "refnet_reversal_invariance",
                           "refnet_determinism"}) {
    ASSERT_TRUE(report["checks"].contains(name)) << name;
    EXPECT_TRUE(report["checks"][name]["passed"].get<bool>()) << name;
  }
  EXPECT_EQ(report["molecules"][0]["pooled"].size(), 32u);
}

TEST(Cli, InjectedFaultFailsNamedInvariant) {
  const auto r = run_cli({"validate", "--inject-fault", "angle-order"}, "CCO\nc1ccccc1\n");
  EXPECT_EQ(r.code, 1);
  const json report = json::parse(r.out);
  EXPECT_FALSE(report["passed"].get<bool>());
  EXPECT_FALSE(report["checks"]["angle_bound_ordering"]["passed"].get<bool>());
  EXPECT_TRUE(report["checks"]["metric_axioms"]["passed"].get<bool>());
  EXPECT_NE(r.err.find("FAIL angle_bound_ordering"), std::string::npos);
}

TEST(Cli, ValidateParseErrorFails) {
  const auto r = run_cli({"validate"}, "CCO\nC(\n");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(json::parse(r.out)["molecules"][1].contains("error"));
}

TEST(Cli, DeterministicBytes) {
  TempDir first, second;
  const std::string corpus = testing_support::data_path("corpus.smi");
  for (const char* fmt : {"json", "json+bin"}) {
    // Same file name in both runs: the sidecar name is embedded in records.
    const std::string a = first.file(std::string("out-") + fmt + ".jsonl");
    const std::string b = second.file(std::string("out-") + fmt + ".jsonl");
    ASSERT_EQ(run_cli({"featurize", corpus, "--format", fmt, "--threads", "4", "-o", a}).code, 0);
    ASSERT_EQ(run_cli({"featurize", corpus, "--format", fmt, "--threads", "1", "-o", b}).code, 0);
    EXPECT_EQ(testing_support::slurp(a), testing_support::slurp(b));
    if (std::string(fmt) == "json+bin") {
      EXPECT_EQ(testing_support::slurp(a + ".bin"), testing_support::slurp(b + ".bin"));
    }
  }
}

TEST(Cli, OutputOrderFollowsInput) {
  const auto r = run_cli({"featurize", testing_support::data_path("corpus.smi"), "--threads", "8"});
  const auto recs = records(r.out);
  const auto corpus = testing_support::load_corpus();
  ASSERT_EQ(recs.size(), corpus.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i]["index"], i);
    EXPECT_EQ(recs[i]["input"], corpus[i].smiles);
  }
}

TEST(Cli, BinarySidecar) {
  TempDir tmp;
  const std::string out = tmp.file("out.jsonl");
  ASSERT_EQ(run_cli({"featurize", "--format", "json+bin", "-o", out}, "CCO\nc1ccccc1\n").code, 0);
  const auto recs = records(testing_support::slurp(out));
  const std::string bin = testing_support::slurp(out + ".bin");
  std::size_t expected = 0;
  for (const auto& rec : recs) {
    for (const auto& t : rec["tensors"]) {
      EXPECT_EQ(t["dtype"], "float32");
      EXPECT_EQ(t["byte_order"], "little");
      EXPECT_EQ(t["offset"].get<std::size_t>(), expected);
      expected += t["shape"][0].get<std::size_t>() * t["shape"][1].get<std::size_t>() * 4;
    }
    // First node feature value read back from the sidecar.
    const std::size_t off = rec["tensors"][0]["offset"].get<std::size_t>();
    const auto* p = reinterpret_cast<const unsigned char*>(bin.data() + off);
    const std::uint32_t bits = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    EXPECT_EQ(f, static_cast<float>(rec["node_features"][0][0].get<double>()));
  }
  EXPECT_EQ(bin.size(), expected);
}

TEST(Cli, JsonInput) {
  TempDir tmp;
  const std::string path = tmp.file("mols.jsonl");
  write_file(path, R"({"atoms":[{"element":6},{"element":6},{"element":8}],"bonds":[[0,1],[1,2]]})"
                   "\n"
                   R"({"atoms":[{"element":6}],"bonds":[[0,0]]})"
                   "\n");
  const auto r = run_cli({"featurize", path});
  EXPECT_EQ(r.code, 1);
  const auto recs = records(r.out);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0]["line_graph"]["nodes"].size(), 4u);
  EXPECT_NE(recs[1]["manifest"]["error"].get<std::string>().find("self-loop"), std::string::npos);

  const std::string arr = tmp.file("arr.json");
  write_file(arr, R"([{"atoms":[{"element":6},{"element":6}],"bonds":[[0,1]]}])");
  EXPECT_EQ(records(run_cli({"featurize", arr}).out).size(), 1u);
  EXPECT_EQ(run_cli({"featurize", "--input-format", "json"}, R"({"atoms":[{"element":8}]})").code, 0);
}

TEST(Cli, ConfigFileAndEnvironment) {
  TempDir tmp;
  const std::string cfg = tmp.file("cfg.json");
  write_file(cfg, R"({"alpha": 0.5, "n_abf": 12})");
  auto alpha_of = [](const RunResult& r) { return records(r.out)[0]["manifest"]["config"]["alpha"].get<double>(); };
  EXPECT_EQ(alpha_of(run_cli({"featurize", "--config", cfg}, "CC\n")), 0.5);
  EXPECT_EQ(alpha_of(run_cli({"featurize", "--config", cfg, "--alpha", "0.2"}, "CC\n")), 0.2);
  setenv(syncoord::cli::kConfigEnvVar, cfg.c_str(), 1);
  const auto r = run_cli({"featurize"}, "CC\n");
  unsetenv(syncoord::cli::kConfigEnvVar);
  EXPECT_EQ(alpha_of(r), 0.5);
  EXPECT_EQ(records(r.out)[0]["manifest"]["config"]["n_abf"], 12);
  write_file(cfg, "{not json");
  EXPECT_EQ(run_cli({"featurize", "--config", cfg}, "CC\n").code, 2);
}

TEST(Cli, WarningsStatus) {
  const auto recs = records(run_cli({"featurize"}, "[Na+].[Cl-]\nC/C=C/C\n").out);
  EXPECT_EQ(recs[0]["manifest"]["status"], "warnings");
  EXPECT_EQ(recs[0]["line_graph"]["nodes"].size(), 0u);
  EXPECT_EQ(recs[1]["manifest"]["status"], "warnings");
}
