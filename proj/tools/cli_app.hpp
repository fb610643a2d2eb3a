#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "syncoord/syncoord.hpp"

namespace syncoord::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMoleculeErrors = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming a JSON file with default settings.
inline constexpr const char* kConfigEnvVar = "SYNCOORD_CONFIG";

enum class InputFormat { AUTO, SMILES, JSON };

/// One molecule as read from the input stream.
struct InputItem {
  std::string source;
  std::size_t line = 0;  // 1-based; 0 for array elements
  std::string text;
  std::string name;
  bool json = false;
};

struct Settings {
  PipelineConfig pipeline;
  std::vector<std::string> inputs;
  std::string output;
  std::string format = "json";
  std::string input_format = "auto";
  std::string params_path;
  std::string config_path;
  bool keep_going = false;
  bool emit_dist_matrix = false;
  bool force_dist_matrix = false;
  unsigned threads = 0;
  // validate only
  int relabelings = 5;
  std::string inject_fault = "none";
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<InputItem> split_input(const std::string& source, const std::string& content, bool json) {
  std::vector<InputItem> items;
  if (json) {
    const std::string body = trim(content);
    if (!body.empty() && body.front() == '[') {
      const auto arr = nlohmann::json::parse(body);
      for (const auto& doc : arr) items.push_back({source, 0, doc.dump(), "", true});
      return items;
    }
  }
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    InputItem item{source, lineno, t, "", json};
    if (!json) {
      const auto ws = t.find_first_of(" \t");
      if (ws != std::string::npos) {
        item.text = t.substr(0, ws);
        item.name = trim(t.substr(ws));
      }
    }
    items.push_back(std::move(item));
  }
  return items;
}

inline bool looks_like_json_path(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".json" || ext == ".jsonl" || ext == ".ndjson";
}

inline std::vector<InputItem> read_inputs(const Settings& s, std::istream& stdin_stream) {
  std::vector<InputItem> all;
  std::vector<std::string> inputs = s.inputs;
  if (inputs.empty()) inputs.push_back("-");
  for (const std::string& path : inputs) {
    std::string content;
    if (path == "-") {
      std::stringstream ss;
      ss << stdin_stream.rdbuf();
      content = ss.str();
    } else {
      std::ifstream f(path, std::ios::binary);
      if (!f) throw Error("cannot open input file " + path);
      std::stringstream ss;
      ss << f.rdbuf();
      content = ss.str();
    }
    bool json = s.input_format == "json";
    if (s.input_format == "auto") json = path != "-" && looks_like_json_path(path);
    auto items = split_input(path, content, json);
    std::move(items.begin(), items.end(), std::back_inserter(all));
  }
  return all;
}

inline MolecularGraph parse_item(const InputItem& item, Warnings* warnings) {
  return item.json ? parse_json(item.text) : parse_smiles(item.text, warnings);
}

inline nlohmann::json item_header(const InputItem& item, std::size_t index) {
  nlohmann::json h = {{"index", index}, {"source", item.source}, {"line", item.line}, {"input", item.text}};
  if (!item.name.empty()) h["name"] = item.name;
  return h;
}

/// Runs `work(i)` for i in [0, n) on a small pool. Results are written by
/// index, so output order does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& work) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) work(i);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

struct Outcome {
  nlohmann::json doc;
  bool error = false;
  std::optional<MoleculeResult> result;
};

inline void write_f32_le(std::ostream& out, const MatrixD& m) {
  for (double v : m.data()) {
    float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    unsigned char bytes[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                              static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
  }
}

inline int cmd_featurize(const Settings& s, std::istream& in, std::ostream& out, std::ostream& err) {
  const BondParams params = s.params_path.empty() ? BondParams::builtin() : BondParams::from_file(s.params_path);
  const auto items = read_inputs(s, in);
  const bool with_bin = s.format == "json+bin";
  if (with_bin && s.output.empty()) {
    err << "error: --format json+bin requires --output\n";
    return kExitUsage;
  }

  std::vector<Outcome> outcomes(items.size());
  const RecordOptions rec{s.emit_dist_matrix, s.force_dist_matrix};
  parallel_for(items.size(), s.threads, [&](std::size_t i) {
    Outcome& o = outcomes[i];
    Warnings parse_warnings;
    try {
      const MolecularGraph g = parse_item(items[i], &parse_warnings);
      MoleculeResult r = run_pipeline(g, s.pipeline, params);
      r.warnings.insert(r.warnings.begin(), parse_warnings.begin(), parse_warnings.end());
      o.doc = item_header(items[i], i);
      o.doc.update(result_to_json(r, s.pipeline, rec));
      if (with_bin) o.result = std::move(r);
    } catch (const std::exception& e) {
      o.error = true;
      o.doc = item_header(items[i], i);
      auto m = manifest_json(s.pipeline, "error", parse_warnings);
      m["error"] = e.what();
      o.doc["manifest"] = std::move(m);
    }
  });

  std::ofstream file;
  std::ostream* sink = &out;
  if (!s.output.empty()) {
    file.open(s.output, std::ios::binary);
    if (!file) throw Error("cannot open output file " + s.output);
    sink = &file;
  }
  std::ofstream bin;
  const std::string bin_path = s.output + ".bin";
  if (with_bin) {
    bin.open(bin_path, std::ios::binary);
    if (!bin) throw Error("cannot open tensor sidecar " + bin_path);
  }

  std::size_t offset = 0;
  bool any_error = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    Outcome& o = outcomes[i];
    any_error |= o.error;
    if (o.error) err << items[i].source << ":" << items[i].line << ": " << o.doc["manifest"]["error"].get<std::string>() << "\n";
    if (with_bin && o.result) {
      nlohmann::json tensors = nlohmann::json::array();
      for (const auto& [name, m] : {std::pair<const char*, const MatrixD*>{"node_features", &o.result->features.node_features},
                                    {"edge_features", &o.result->features.edge_features}}) {
        tensors.push_back({{"name", name},
                           {"file", std::filesystem::path(bin_path).filename().string()},
                           {"dtype", "float32"},
                           {"byte_order", "little"},
                           {"layout", "row-major"},
                           {"shape", {m->rows(), m->cols()}},
                           {"offset", offset}});
        write_f32_le(bin, *m);
        offset += m->data().size() * 4;
      }
      o.doc["tensors"] = std::move(tensors);
    }
    *sink << o.doc.dump() << '\n';
  }
  return any_error && !s.keep_going ? kExitMoleculeErrors : kExitOk;
}

inline int cmd_validate(const Settings& s, std::istream& in, std::ostream& out, std::ostream& err) {
  const BondParams params = s.params_path.empty() ? BondParams::builtin() : BondParams::from_file(s.params_path);
  const auto items = read_inputs(s, in);
  ValidateOptions vopts;
  vopts.relabelings = s.relabelings;
  if (s.inject_fault == "angle-order") vopts.fault = InjectedFault::ANGLE_ORDER;

  struct PerMolecule {
    std::vector<CheckResult> checks;
    std::vector<double> pooled;
    std::string error;
  };
  std::vector<PerMolecule> per(items.size());
  parallel_for(items.size(), s.threads, [&](std::size_t i) {
    try {
      const MolecularGraph g = parse_item(items[i], nullptr);
      per[i].checks = validate_molecule(g, s.pipeline, vopts, params);
      per[i].pooled = forward(run_pipeline(g, s.pipeline, params).features, s.pipeline.refnet).pooled;
    } catch (const std::exception& e) {
      per[i].error = e.what();
    }
  });

  nlohmann::json summary_checks = nlohmann::json::object();
  nlohmann::json molecules = nlohmann::json::array();
  bool ok = true;
  for (std::size_t i = 0; i < items.size(); ++i) {
    nlohmann::json m = item_header(items[i], i);
    if (!per[i].error.empty()) {
      ok = false;
      m["error"] = per[i].error;
      err << items[i].source << ":" << items[i].line << ": " << per[i].error << "\n";
    } else {
      m["pooled"] = per[i].pooled;
      nlohmann::json failed = nlohmann::json::array();
      for (const CheckResult& c : per[i].checks) {
        auto& entry = summary_checks[c.name];
        if (entry.is_null()) entry = {{"passed", true}, {"checked", 0}, {"molecules_failed", 0}};
        entry["checked"] = entry["checked"].get<std::size_t>() + c.checked;
        if (!c.passed) {
          ok = false;
          entry["passed"] = false;
          entry["molecules_failed"] = entry["molecules_failed"].get<int>() + 1;
          if (!entry.contains("first_failure")) entry["first_failure"] = items[i].text + ": " + c.detail;
          failed.push_back({{"check", c.name}, {"detail", c.detail}});
        }
      }
      m["failed_checks"] = std::move(failed);
    }
    molecules.push_back(std::move(m));
  }
  for (auto& [name, entry] : summary_checks.items())
    err << (entry["passed"].get<bool>() ? "PASS " : "FAIL ") << name << "\n";

  nlohmann::json report = {{"tool", kToolName},
                           {"version", kToolVersion},
                           {"config", config_to_json(s.pipeline)},
                           {"molecules", std::move(molecules)},
                           {"checks", std::move(summary_checks)},
                           {"passed", ok}};
  if (!s.output.empty()) {
    std::ofstream f(s.output, std::ios::binary);
    f << report.dump(2) << '\n';
  } else {
    out << report.dump(2) << '\n';
  }
  return ok ? kExitOk : kExitMoleculeErrors;
}

/// Applies keys from a JSON settings file (same names as the manifest config).
inline void apply_config_file(const std::string& path, Settings& s) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("config", "cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ValidationError("config", std::string("invalid config file: ") + e.what());
  }
  auto& p = s.pipeline;
  if (j.contains("alpha")) p.sppr.alpha = j["alpha"].get<double>();
  if (j.contains("weighted_adjacency")) p.sppr.weighted = j["weighted_adjacency"].get<bool>();
  if (j.contains("n_rbf")) p.featurize.n_rbf = j["n_rbf"].get<int>();
  if (j.contains("n_abf")) p.featurize.n_abf = j["n_abf"].get<int>();
  if (j.contains("angle_mode")) {
    auto m = angle_mode_from_string(j["angle_mode"].get<std::string>());
    if (!m) throw CLI::ValidationError("config", "bad angle_mode");
    p.featurize.angle_mode = *m;
  }
  if (j.contains("coords")) {
    auto c = coord_sources_from_string(j["coords"].get<std::string>());
    if (!c) throw CLI::ValidationError("config", "bad coords");
    p.sources = *c;
  }
  if (j.contains("include_backtrack")) p.line_graph.include_backtrack = j["include_backtrack"].get<bool>();
  if (j.contains("full_matrix_smoothing")) p.bounds.refine.full_matrix = j["full_matrix_smoothing"].get<bool>();
  if (j.contains("d_max_global")) {
    const auto& d = j["d_max_global"];
    if (d.contains("bounds")) p.featurize.d_max_bounds = d["bounds"].get<double>();
    if (d.contains("ppr")) p.featurize.d_max_sppr = d["ppr"].get<double>();
  }
  if (j.contains("seed")) p.refnet.seed = j["seed"].get<std::uint64_t>();
}

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic coordinates and featurized line graphs for molecular graphs", "syncoord"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Settings s;
  struct Flags {
    std::optional<double> alpha;
    std::optional<int> n_rbf, n_abf;
    std::optional<std::string> angle_mode, coords;
    std::optional<std::uint64_t> seed;
    std::optional<double> d_max_bounds, d_max_ppr;
    bool include_backtrack = false;
    bool weighted = false;
    bool full_smoothing = false;
  } flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("inputs", s.inputs, "Input files ('-' for stdin). SMILES lines or JSON graphs.");
    sub->add_option("-o,--output", s.output, "Output file (default stdout)");
    sub->add_option("--input-format", s.input_format, "auto | smiles | json")
        ->check(CLI::IsMember({"auto", "smiles", "json"}));
    sub->add_option("--alpha", flags.alpha, "PPR teleport probability in (0, 1]");
    sub->add_option("--n-rbf", flags.n_rbf, "Distance basis size per source");
    sub->add_option("--n-abf", flags.n_abf, "Angle basis size per source");
    sub->add_option("--angle-mode", flags.angle_mode, "center | min | max | min_max | center_min_max")
        ->check(CLI::IsMember({"center", "min", "max", "min_max", "center_min_max"}));
    sub->add_option("--coords", flags.coords, "bounds | ppr | both")->check(CLI::IsMember({"bounds", "ppr", "both"}));
    sub->add_flag("--include-backtrack", flags.include_backtrack, "Keep ((u,v),(v,u)) line edges");
    sub->add_option("--seed", flags.seed, "Reference network seed");
    sub->add_option("--d-max-bounds", flags.d_max_bounds, "RBF range for bounds distances (Angstrom)");
    sub->add_option("--d-max-ppr", flags.d_max_ppr, "RBF range for PPR distances");
    sub->add_flag("--weighted-adjacency", flags.weighted, "Weight PPR adjacency by bond order");
    sub->add_flag("--full-smoothing", flags.full_smoothing, "Smooth bounds over the full distance matrix");
    sub->add_option("--params", s.params_path, "UFF bond parameter CSV");
    sub->add_option("--config", s.config_path, std::string("JSON settings file (default: $") + kConfigEnvVar + ")");
    sub->add_option("--threads", s.threads, "Worker threads (0 = hardware)");
  };

  CLI::App* featurize = app.add_subcommand("featurize", "Emit featurized line graphs as JSON Lines");
  add_common(featurize);
  featurize->add_option("--format", s.format, "json | json+bin")->check(CLI::IsMember({"json", "json+bin"}));
  featurize->add_flag("--keep-going", s.keep_going, "Exit 0 even if some molecules fail");
  featurize->add_flag("--emit-dist-matrix", s.emit_dist_matrix, "Include dense PPR and distance matrices");
  featurize->add_flag("--force-dist-matrix", s.force_dist_matrix, "Emit dense matrices beyond the size gate");

  CLI::App* validate = app.add_subcommand("validate", "Run the property suite and print a JSON report");
  add_common(validate);
  validate->add_option("--relabelings", s.relabelings, "Random relabelings per molecule");
  validate->add_option("--inject-fault", s.inject_fault, "Negative control: none | angle-order")
      ->check(CLI::IsMember({"none", "angle-order"}));

  try {
    app.parse(argc, argv);
    std::string cfg_path = s.config_path;
    if (cfg_path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') cfg_path = env;
    }
    if (!cfg_path.empty()) apply_config_file(cfg_path, s);
    auto& p = s.pipeline;
    if (flags.alpha) p.sppr.alpha = *flags.alpha;
    if (flags.n_rbf) p.featurize.n_rbf = *flags.n_rbf;
    if (flags.n_abf) p.featurize.n_abf = *flags.n_abf;
    if (flags.angle_mode) p.featurize.angle_mode = *angle_mode_from_string(*flags.angle_mode);
    if (flags.coords) p.sources = *coord_sources_from_string(*flags.coords);
    if (flags.seed) p.refnet.seed = *flags.seed;
    if (flags.d_max_bounds) p.featurize.d_max_bounds = *flags.d_max_bounds;
    if (flags.d_max_ppr) p.featurize.d_max_sppr = *flags.d_max_ppr;
    if (flags.include_backtrack) p.line_graph.include_backtrack = true;
    if (flags.weighted) p.sppr.weighted = true;
    if (flags.full_smoothing) p.bounds.refine.full_matrix = true;
    try {
      p.validate();
    } catch (const Error& e) {
      throw CLI::ValidationError("config", e.what());
    }
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (featurize->parsed()) return cmd_featurize(s, in, out, err);
    return cmd_validate(s, in, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace syncoord::cli
