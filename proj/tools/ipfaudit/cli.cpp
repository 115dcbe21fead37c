#include "ipfaudit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipfaudit/audit.hpp"
#include "ipfaudit/complexity.hpp"
#include "ipfaudit/csv_ingest.hpp"
#include "ipfaudit/errors.hpp"
#include "ipfaudit/manifest.hpp"
#include "ipfaudit/pcap.hpp"
#include "ipfaudit/probe.hpp"
#include "ipfaudit/report.hpp"
#include "ipfaudit/rng.hpp"
#include "ipfaudit/split.hpp"
#include "ipfaudit/sweep.hpp"
#include "ipfaudit/synth.hpp"

namespace fs = std::filesystem;

namespace ipfaudit {
namespace {

struct Common {
  std::uint32_t k = 10;
  std::uint32_t repeats = 10;
  std::uint64_t seed = 0;
  double high = 0.90;
  double gap = 0.20;
  double critical = 45.0;
  std::vector<std::string> features;
  std::string out = ".";
  unsigned threads = 0;
  std::optional<std::size_t> max_depth;
  std::size_t max_samples = 2000;
};

struct Options {
  Common common;
  std::string input;
  std::string format;  // extract: pcap | csv (default from extension)
  std::string schema_map;
  std::string split = "cv";
  std::vector<std::uint32_t> train_sessions;
  std::vector<std::uint32_t> test_sessions;
  std::size_t points = 10;
  std::string feature = "frame_len";
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

nlohmann::json common_json(const Common& c) {
  nlohmann::json j{{"k", c.k},
                   {"repeats", c.repeats},
                   {"seed", c.seed},
                   {"high_threshold", c.high},
                   {"gap_threshold", c.gap},
                   {"critical_complexity", c.critical},
                   {"features", c.features},
                   {"out", c.out},
                   {"complexity_max_samples", c.max_samples}};
  j["max_depth"] = c.max_depth ? nlohmann::json(*c.max_depth) : nlohmann::json();
  return j;
}

AuditConfig audit_config(const Common& c) {
  AuditConfig cfg;
  cfg.k = c.k;
  cfg.repeats = c.repeats;
  cfg.seed = c.seed;
  cfg.thresholds = {c.high, c.gap, c.critical};
  cfg.tree.max_depth = c.max_depth;
  cfg.complexity.max_samples = c.max_samples;
  cfg.threads = c.threads;
  cfg.features = c.features;
  return cfg;
}

std::vector<std::string> features_or_catalogue(const std::vector<std::string>& f) {
  if (f.empty()) return catalogue_names();
  for (const auto& name : f) feature(name);
  return f;
}

LabeledDataset load_dataset(const std::string& path) {
  auto loaded = build_dataset(load_manifest(path));
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return std::move(loaded.dataset);
}

// Training sessions default to the lowest id, test sessions to the rest.
std::pair<std::set<SessionId>, std::set<SessionId>> pick_sessions(
    const LabeledDataset& d, const Options& o) {
  const auto ids = d.session_ids();
  if (ids.size() < 2)
    throw PreconditionError(
        "session-isolated evaluation needs at least two sessions; the manifest declares " +
        std::to_string(ids.size()));
  std::set<SessionId> train, test;
  for (auto v : o.train_sessions) train.insert(SessionId{v});
  for (auto v : o.test_sessions) test.insert(SessionId{v});
  if (train.empty()) train.insert(ids.front());
  if (test.empty())
    for (auto id : ids)
      if (!train.contains(id)) test.insert(id);
  return {train, test};
}

int cmd_extract(const Options& o) {
  const fs::path in = o.input;
  std::string format = o.format;
  if (format.empty()) format = in.extension() == ".csv" ? "csv" : "pcap";
  std::vector<PacketRecord> records;
  if (format == "pcap") {
    auto parsed = parse_capture(read_file_bytes(in.string()));
    for (const auto& w : parsed.warnings)
      std::cerr << "warning: frame " << w.frame_index << ": " << w.message << "\n";
    records = std::move(parsed.records);
  } else if (format == "csv") {
    const CsvTable table = parse_csv_table(read_text(in));
    SchemaMap map = identity_schema(table);
    if (!o.schema_map.empty())
      map = read_json(o.schema_map).get<std::map<std::string, std::string>>();
    records = ingest_csv(table, map);
  } else {
    throw FormatError("unknown input format '" + format + "'");
  }
  RunConfig rc{"extract", {{"input", o.input}, {"format", format}, {"out", o.common.out}}};
  const std::string text = csv_comment_header(rc) + to_canonical_csv(records);
  if (o.common.out == "-")
    std::cout << text;
  else
    write_text_file(o.common.out, text);
  std::cerr << records.size() << " records\n";
  return kExitOk;
}

void write_session(const GeneratedSession& g, const fs::path& dir, const RunConfig& rc,
                   nlohmann::json& entries) {
  const std::string stem = "session_" + std::to_string(g.spec.session);
  const auto bytes = write_pcap(g.dataset.records());
  {
    std::ofstream out(dir / (stem + ".pcap"), std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + (dir / (stem + ".pcap")).string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  write_text_file(dir / (stem + ".manifest.json"), dump_json(with_run_config(rc, manifest_json(g))));
  write_text_file(dir / (stem + ".labels.csv"),
                  csv_comment_header(rc) + labels_csv(g.dataset.labels()));
  entries.push_back({{"path", stem + ".pcap"},
                     {"format", "pcap"},
                     {"session", g.spec.session},
                     {"label_rule", to_json(g.rule)}});
}

int cmd_synth(const Options& o) {
  const ScenarioSpec spec = scenario_from_json(read_json(o.input));
  const fs::path dir = o.common.out;
  fs::create_directories(dir);
  RunConfig rc{"synth", {{"scenario", o.input}, {"out", o.common.out}, {"spec", to_json(spec)}}};
  nlohmann::json entries = nlohmann::json::array();
  if (spec.pair) {
    const auto [a, b] = generate_pair(spec, spec.pair->similarity, spec.pair->seed);
    write_session(a, dir, rc, entries);
    write_session(b, dir, rc, entries);
  } else {
    write_session(generate(spec), dir, rc, entries);
  }
  nlohmann::json manifest{{"format_version", kManifestFormatVersion},
                          {"description", std::string(to_string(spec.kind)) + " scenario"},
                          {"entries", entries}};
  write_text_file(dir / "dataset.json", dump_json(with_run_config(rc, manifest)));
  std::cerr << "wrote " << entries.size() << " session(s) to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_probe(const Options& o) {
  const LabeledDataset d = load_dataset(o.input);
  const auto features = o.common.features.empty() ? std::vector<std::string>{o.feature}
                                                  : features_or_catalogue(o.common.features);
  if (!d.has_both_classes()) throw PreconditionError("probe: input has a single class");
  std::vector<SplitPlan> plans;
  if (o.split == "cv") {
    plans = make_cv_splits(d, o.common.k, o.common.repeats, derive_seed(o.common.seed, "cv"));
  } else if (o.split == "isolated") {
    const auto [train, test] = pick_sessions(d, o);
    plans.push_back(make_isolated_split(d, train, test));
  } else {
    throw SchemaError("unknown split '" + o.split + "' (expected cv or isolated)");
  }
  ProbeOptions popt;
  popt.tree.max_depth = o.common.max_depth;
  popt.threads = o.common.threads;
  const ProbeResult r = run_probe(d, features, plans, popt);

  nlohmann::json params = common_json(o.common);
  params["input"] = o.input;
  params["split"] = o.split;
  params["probe_features"] = features;
  RunConfig rc{"probe", params};
  const fs::path dir = o.common.out;
  nlohmann::json body = to_json(r);
  body["tree"] = to_json(r.first_tree);
  body["leakage_findings"] = leakage_check(plans.front(), d).size();
  write_text_file(dir / "probe.json", dump_json(with_run_config(rc, body)));
  write_text_file(dir / "probe.csv", csv_comment_header(rc) + probe_csv_header() + "\n" +
                                         probe_csv_row(r, o.split) + "\n");
  write_text_file(dir / "tree.dot", "// " + to_json(rc).dump() + "\n" +
                                        export_dot(r.first_tree, r.features));
  std::cout << probe_csv_row(r, o.split) << "\n";
  return kExitOk;
}

int cmd_complexity(const Options& o) {
  const LabeledDataset d = load_dataset(o.input);
  const auto features = features_or_catalogue(o.common.features);
  ComplexityOptions copt;
  copt.max_samples = o.common.max_samples;
  copt.seed = derive_seed(o.common.seed, "complexity");
  const ComplexityReport joint = compute_report(project(d.records(), features), d.labels(), copt);
  nlohmann::json per = nlohmann::json::object();
  std::string rows = "scope," + complexity_csv_header() + "\n";
  rows += "joint," + complexity_csv_row(joint) + "\n";
  for (const auto& f : features) {
    const std::string cols[] = {f};
    const auto r = compute_report(project(d.records(), cols), d.labels(), copt);
    per[f] = to_json(r);
    rows += f + "," + complexity_csv_row(r) + "\n";
  }
  nlohmann::json params = common_json(o.common);
  params["input"] = o.input;
  RunConfig rc{"complexity", params};
  const fs::path dir = o.common.out;
  write_text_file(dir / "complexity.json",
                  dump_json(with_run_config(
                      rc, {{"features", features}, {"joint", to_json(joint)}, {"per_feature", per}})));
  write_text_file(dir / "complexity.csv", csv_comment_header(rc) + rows);
  std::cout << "aggregate " << format_double(joint.aggregate) << "\n";
  return kExitOk;
}

int cmd_audit(const Options& o) {
  const LabeledDataset all = load_dataset(o.input);
  const auto [train, test] = pick_sessions(all, o);
  std::set<SessionId> keep = train;
  keep.insert(test.begin(), test.end());
  AuditInput input{all.select_sessions(keep), train, test};
  const AuditConfig cfg = audit_config(o.common);
  const AuditReport report = run_audit(input, cfg, read_json(o.input).value("description", ""));

  nlohmann::json params = common_json(o.common);
  params["input"] = o.input;
  std::vector<std::uint32_t> tr, te;
  for (auto s : train) tr.push_back(s.value);
  for (auto s : test) te.push_back(s.value);
  params["train_sessions"] = tr;
  params["test_sessions"] = te;
  RunConfig rc{"audit", params};
  const fs::path dir = o.common.out;
  write_text_file(dir / "audit.json", dump_json(with_run_config(rc, to_json(report))));
  write_text_file(dir / "metrics.csv", csv_comment_header(rc) + audit_metrics_csv(report));
  std::vector<std::string> names;
  for (const auto& v : report.features) names.push_back(v.feature);
  write_text_file(dir / "histograms.csv",
                  csv_comment_header(rc) + histograms_csv(input.merged, names));
  for (const auto& v : report.features)
    write_text_file(dir / "trees" / (v.feature + ".dot"),
                    "// " + to_json(rc).dump() + "\n" +
                        export_dot(v.cv.first_tree, v.cv.features));
  const std::string table = audit_table(report);
  write_text_file(dir / "audit.txt", csv_comment_header(rc) + table);
  std::cout << table;
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  const ScenarioSpec tmpl = scenario_from_json(read_json(o.input));
  const AuditConfig cfg = audit_config(o.common);
  const SweepResult r = run_sweep(tmpl, o.points, o.common.seed, cfg, o.feature);
  nlohmann::json params = common_json(o.common);
  params["input"] = o.input;
  params["points"] = o.points;
  params["feature"] = o.feature;
  params["template"] = to_json(tmpl);
  RunConfig rc{"sweep", params};
  const fs::path dir = o.common.out;
  write_text_file(dir / "sweep.csv", csv_comment_header(rc) + sweep_csv(r));
  write_text_file(dir / "sweep.json", dump_json(with_run_config(rc, to_json(r))));
  std::cout << "spearman " << format_double(r.correlation.spearman) << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& c, bool cv, bool thresholds) {
  if (cv) {
    cmd->add_option("--k", c.k, "Folds per cross-validation repeat")->capture_default_str();
    cmd->add_option("--repeats", c.repeats, "Cross-validation repeats")->capture_default_str();
    cmd->add_option("--max-depth", c.max_depth, "Tree depth limit (default: none)");
    cmd->add_option("--threads", c.threads, "Worker threads, 0 for all cores")
        ->capture_default_str();
  }
  cmd->add_option("--seed", c.seed, "Top-level random seed")->capture_default_str();
  if (thresholds) {
    cmd->add_option("--high-threshold", c.high, "F1 treated as high")->capture_default_str();
    cmd->add_option("--gap-threshold", c.gap, "CV minus isolated F1 treated as leakage")
        ->capture_default_str();
    cmd->add_option("--critical-complexity", c.critical, "Low-complexity boundary")
        ->capture_default_str();
  }
  cmd->add_option("--max-samples", c.max_samples, "Sample cap for complexity measures")
      ->capture_default_str();
  cmd->add_option("--features", c.features, "Comma-separated feature names")->delimiter(',');
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Leakage and generalisation auditor for packet-feature intrusion datasets",
               "ipfaudit"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  Options o;

  auto* extract = app.add_subcommand("extract", "Decode a capture or table to canonical CSV");
  extract->add_option("input", o.input, "pcap or csv file")->required();
  extract->add_option("--format", o.format, "pcap or csv (default: from extension)");
  extract->add_option("--schema-map", o.schema_map, "JSON column -> feature map for csv");
  extract->add_option("--out", o.common.out, "Output CSV path, - for stdout")->required();

  auto* synth = app.add_subcommand("synth", "Generate labelled sessions from a scenario");
  synth->add_option("scenario", o.input, "Scenario JSON")->required();
  synth->add_option("--out", o.common.out, "Output directory")->required();

  auto* probe = app.add_subcommand("probe", "Train and score a decision-tree probe");
  probe->add_option("manifest", o.input, "Dataset manifest JSON")->required();
  probe->add_option("--feature", o.feature, "Feature to probe")->capture_default_str();
  probe->add_option("--split", o.split, "cv or isolated")->capture_default_str();
  probe->add_option("--train-sessions", o.train_sessions)->delimiter(',');
  probe->add_option("--test-sessions", o.test_sessions)->delimiter(',');
  add_common(probe, o.common, true, false);

  auto* complexity = app.add_subcommand("complexity", "Compute the 22 complexity measures");
  complexity->add_option("manifest", o.input, "Dataset manifest JSON")->required();
  add_common(complexity, o.common, false, false);

  auto* audit = app.add_subcommand("audit", "Cross-validated vs session-isolated audit");
  audit->add_option("manifest", o.input, "Dataset manifest JSON")->required();
  audit->add_option("--train-sessions", o.train_sessions)->delimiter(',');
  audit->add_option("--test-sessions", o.test_sessions)->delimiter(',');
  add_common(audit, o.common, true, true);

  auto* sweep = app.add_subcommand("sweep", "Complexity versus isolated F1 over scenarios");
  sweep->add_option("scenario", o.input, "Scenario template JSON")->required();
  sweep->add_option("--points", o.points, "Number of scenarios")->capture_default_str();
  sweep->add_option("--feature", o.feature, "Feature to audit")->capture_default_str();
  add_common(sweep, o.common, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*extract) return cmd_extract(o);
    if (*synth) return cmd_synth(o);
    if (*probe) return cmd_probe(o);
    if (*complexity) return cmd_complexity(o);
    if (*audit) return cmd_audit(o);
    if (*sweep) return cmd_sweep(o);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace ipfaudit
