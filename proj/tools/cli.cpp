// Copyright 2026 The dialsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dialsum/dialsum.hpp"

namespace dialsum::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Flag sets
// ---------------------------------------------------------------------------

struct BuildFlags {
  std::string input;
  std::string output;
  std::string summaries;
  std::string strategy = "better-rouge";
  std::string selector = "gsg-plus";
  double compression_ratio = 0.15;
  double copy_prob = 0.15;
  std::string order = "dialogue";
  std::size_t max_tokens = 512;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: DIONYSUS_WORKERS, else logical cores
  std::string stats;
  std::string format = "text";
  std::string config;
};

void add_build_options(CLI::App* app, BuildFlags& f, bool output_required) {
  app->add_option("--input", f.input, "Dialogue NDJSON file")->required();
  auto* out = app->add_option("--output", f.output, "Example NDJSON file");
  if (output_required) out->required();
  app->add_option("--summaries", f.summaries, "Helper summary NDJSON file");
  app->add_option("--strategy", f.strategy, "all-g | all-p | better-rouge")
      ->check(CLI::IsMember({"all-g", "all-p", "better-rouge"}));
  app->add_option("--selector", f.selector, "gsg-plus | gsg-star")
      ->check(CLI::IsMember({"gsg-plus", "gsg-star"}));
  app->add_option("--compression-ratio", f.compression_ratio,
                  "Principal turns over dialogue turns, in (0, 1)");
  app->add_option("--copy-prob", f.copy_prob,
                  "Probability of keeping each principal turn in the input");
  app->add_option("--order", f.order, "dialogue | score")
      ->check(CLI::IsMember({"dialogue", "score"}));
  app->add_option("--max-tokens", f.max_tokens,
                  "Whitespace-token budget for inputs");
  app->add_option("--seed", f.seed, "Global seed for the copy mechanism");
  app->add_option("--workers", f.workers, "Worker threads");
  app->add_option("--stats", f.stats, "Write pipeline stats JSON here");
  app->add_option("--format", f.format, "Report format: text | json")
      ->check(CLI::IsMember({"text", "json"}));
  app->add_option("--config", f.config,
                  "JSON file of flag values; command-line flags win");
}

StrategyConfig to_config(const BuildFlags& f) {
  StrategyConfig c;
  c.strategy = parse_strategy(f.strategy);
  c.selector = parse_selector(f.selector);
  c.principal_order = parse_principal_order(f.order);
  c.compression_ratio = f.compression_ratio;
  c.copy_probability = f.copy_prob;
  c.max_tokens = f.max_tokens;
  c.global_seed = f.seed;
  c.validate();
  if (c.requires_summary() && f.summaries.empty()) {
    throw UsageError("--summaries is required unless --strategy all-p is "
                     "combined with --selector gsg-star");
  }
  return c;
}

std::size_t resolve_workers(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("DIONYSUS_WORKERS"); env && *env) {
    try {
      const long long n = std::stoll(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    throw ConfigError("DIONYSUS_WORKERS", "must be a positive integer");
  }
  return default_worker_count();
}

ReportFormat parse_format(const std::string& f) {
  return f == "json" ? ReportFormat::kJson : ReportFormat::kText;
}

// Splices values from a --config JSON file into the argument list for every
// flag not already given on the command line. Keys are flag names with or
// without the leading dashes; underscores are read as dashes.
std::vector<std::string> splice_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;

  std::ifstream in(*path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + *path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw UsageError("config file " + *path + " is not a JSON object");
  }
  for (const auto& [raw_key, value] : j.items()) {
    std::string key = raw_key;
    key.erase(0, key.find_first_not_of('-'));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") continue;
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const auto& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number() || value.is_boolean()) {
      text = value.dump();
    } else {
      throw UsageError("config key '" + raw_key + "' must be a scalar");
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& field) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw ConfigError(field, "'" + item + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError(field, "empty list");
  return values;
}

std::vector<IdText> read_id_texts(const std::string& path,
                                  const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  LineReader reader(in, path);
  std::vector<IdText> rows;
  while (auto line = reader.next()) {
    rows.push_back(parse_record_line(*line, path, reader.line(),
                                     [&](const Json& j) {
                                       return IdText{
                                           detail::require_string(j, "id"),
                                           record_text(j, field)};
                                     }));
  }
  return rows;
}

void write_stats_file(const std::string& path, const PipelineStats& stats) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path);
  out << to_json(stats).dump(2) << '\n';
  if (!out) throw Error("write failed: " + path);
}

PipelineStats run_build(const BuildFlags& f, const StrategyConfig& config,
                        const std::string& output, std::ostream& err) {
  PipelineFiles files;
  files.dialogues = f.input;
  if (!f.summaries.empty()) files.summaries = f.summaries;
  files.output = output;
  StreamOptions options;
  options.workers = resolve_workers(f.workers);
  options.log = &err;
  const auto start = std::chrono::steady_clock::now();
  PipelineStats stats = run_pipeline(config, files, options);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  err << "processed " << stats.dialogues_in << " dialogues in " << std::fixed
      << std::setprecision(2) << seconds << " s ("
      << std::setprecision(0)
      << (seconds > 0 ? stats.dialogues_in / seconds : 0.0)
      << " dialogues/s, " << options.workers << " workers)\n";
  err.unsetf(std::ios::floatfield);
  return stats;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_build(const BuildFlags& f, std::ostream& out, std::ostream& err) {
  const StrategyConfig config = to_config(f);
  resolve_workers(f.workers);
  const PipelineStats stats = run_build(f, config, f.output, err);
  if (!f.stats.empty()) write_stats_file(f.stats, stats);
  out << compute_stats_report(stats, parse_format(f.format));
  return kExitOk;
}

struct SweepFlags {
  std::string param;
  std::string values;
  std::string output_dir;
};

int cmd_sweep(const BuildFlags& f, const SweepFlags& s, std::ostream& out,
              std::ostream& err) {
  const std::vector<double> values = parse_number_list(s.values, "values");
  std::vector<StrategyConfig> configs;
  for (const double v : values) {
    BuildFlags row = f;
    (s.param == "compression-ratio" ? row.compression_ratio : row.copy_prob) =
        v;
    configs.push_back(to_config(row));
  }
  resolve_workers(f.workers);

  fs::path dir;
  bool scratch = false;
  if (!s.output_dir.empty()) {
    dir = s.output_dir;
    fs::create_directories(dir);
  } else {
    dir = fs::temp_directory_path() /
          ("dialsum-sweep-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    scratch = true;
  }

  const ReportFormat format = parse_format(f.format);
  if (format == ReportFormat::kText) {
    out << std::left << std::setw(20) << s.param << std::setw(10)
        << "examples" << std::setw(8) << "G" << std::setw(8) << "P"
        << std::setw(12) << "p_fraction" << std::setw(10) << "mean_m"
        << "copied\n";
  }
  try {
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::ostringstream name;
      name << "examples." << s.param << "=" << values[i] << ".jsonl";
      const PipelineStats stats =
          run_build(f, configs[i], (dir / name.str()).string(), err);
      if (format == ReportFormat::kJson) {
        OrderedJson row = OrderedJson::object();
        row["param"] = s.param;
        row["value"] = values[i];
        const OrderedJson fields = to_json(stats);
        for (const auto& [k, v] : fields.items()) row[k] = v;
        out << row.dump() << '\n';
      } else {
        std::ostringstream value;
        value << values[i];
        out << std::setw(20) << value.str() << std::setw(10)
            << stats.examples_out << std::setw(8) << stats.source_counts.g
            << std::setw(8) << stats.source_counts.p << std::fixed
            << std::setprecision(4) << std::setw(12) << stats.p_fraction()
            << std::setw(10) << stats.mean_m << stats.copied_turn_total
            << '\n';
        out.unsetf(std::ios::floatfield);
      }
    }
  } catch (...) {
    if (scratch) fs::remove_all(dir);
    throw;
  }
  if (scratch) fs::remove_all(dir);
  return kExitOk;
}

struct RougeFlags {
  std::string candidates;
  std::string references;
  std::string metrics = "r1,r2,rl,rlsum";
  std::string candidates_field;
  std::string references_field;
};

int cmd_rouge(const RougeFlags& f, std::ostream& out) {
  std::vector<std::string> metrics;
  {
    std::stringstream ss(f.metrics);
    std::string m;
    while (std::getline(ss, m, ',')) {
      if (m.empty()) continue;
      if (m != "r1" && m != "r2" && m != "rl" && m != "rlsum") {
        throw ConfigError("metrics", "unknown metric '" + m + "'");
      }
      if (std::find(metrics.begin(), metrics.end(), m) == metrics.end()) {
        metrics.push_back(m);
      }
    }
    if (metrics.empty()) throw ConfigError("metrics", "empty list");
  }
  const Evaluation eval =
      evaluate_summaries(read_id_texts(f.candidates, f.candidates_field),
                         read_id_texts(f.references, f.references_field));

  auto render = [&](const SummaryScores& s) {
    OrderedJson j = OrderedJson::object();
    for (const auto& m : metrics) {
      if (m == "r1") j["rouge1"] = s.rouge1;
      if (m == "r2") j["rouge2"] = s.rouge2;
      if (m == "rl") j["rougeL"] = s.rouge_l;
      if (m == "rlsum") j["rougeLsum"] = s.rouge_lsum;
    }
    return j;
  };
  OrderedJson per = OrderedJson::array();
  for (const auto& [id, s] : eval.per_id) {
    OrderedJson row = OrderedJson::object();
    row["id"] = id;
    const OrderedJson scores = render(s);
    for (const auto& [k, v] : scores.items()) row[k] = v;
    per.push_back(std::move(row));
  }
  OrderedJson doc = OrderedJson::object();
  doc["count"] = eval.per_id.size();
  doc["mean"] = render(eval.mean);
  doc["per_id"] = std::move(per);
  out << doc.dump() << '\n';
  return kExitOk;
}

struct OverlapFlags {
  std::string targets;
  std::string docs;
  std::string thresholds = "1.0,0.8,0.6,0.4";
  double sample = 1.0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string format = "json";
  std::string targets_field;
  std::string docs_field;
};

int cmd_overlap(const OverlapFlags& f, std::ostream& out) {
  const std::vector<double> thresholds =
      parse_number_list(f.thresholds, "thresholds");
  if (!(f.sample > 0.0 && f.sample <= 1.0)) {
    throw ConfigError("sample", "must lie in (0, 1]");
  }
  std::vector<std::string> targets, docs;
  for (auto& [id, text] : read_id_texts(f.targets, f.targets_field)) {
    targets.push_back(std::move(text));
  }
  for (auto& [id, text] : read_id_texts(f.docs, f.docs_field)) {
    docs.push_back(std::move(text));
  }
  const OverlapReport report = overlap_report(
      targets, docs, thresholds, f.sample, f.seed, resolve_workers(f.workers));
  if (f.format == "text") {
    out << overlap_table(report);
  } else {
    out << to_json(report).dump() << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Pseudo-summary pre-training example construction"};
  app.name("dialsum");
  app.require_subcommand(1);

  BuildFlags build_flags;
  auto* build = app.add_subcommand("build", "Build pre-training examples");
  add_build_options(build, build_flags, true);

  BuildFlags sweep_build;
  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand(
      "sweep", "Run the pipeline once per parameter value, one stats row each");
  add_build_options(sweep, sweep_build, false);
  sweep->add_option("--param", sweep_flags.param,
                    "compression-ratio | copy-prob")
      ->required()
      ->check(CLI::IsMember({"compression-ratio", "copy-prob"}));
  sweep->add_option("--values", sweep_flags.values, "Comma-separated values")
      ->required();
  sweep->add_option("--output-dir", sweep_flags.output_dir,
                    "Keep per-value example files here");

  RougeFlags rouge_flags;
  auto* rouge = app.add_subcommand("rouge", "Score candidates against references");
  rouge->add_option("--candidates", rouge_flags.candidates)->required();
  rouge->add_option("--references", rouge_flags.references)->required();
  rouge->add_option("--metrics", rouge_flags.metrics, "Subset of r1,r2,rl,rlsum");
  rouge->add_option("--candidates-field", rouge_flags.candidates_field);
  rouge->add_option("--references-field", rouge_flags.references_field);

  OverlapFlags overlap_flags;
  auto* overlap = app.add_subcommand(
      "overlap", "ROUGE-2 recall overlap of targets against documents");
  overlap->add_option("--targets", overlap_flags.targets)->required();
  overlap->add_option("--docs", overlap_flags.docs)->required();
  overlap->add_option("--thresholds", overlap_flags.thresholds);
  overlap->add_option("--sample", overlap_flags.sample,
                      "Fraction of documents sampled, in (0, 1]");
  overlap->add_option("--seed", overlap_flags.seed);
  overlap->add_option("--workers", overlap_flags.workers);
  overlap->add_option("--format", overlap_flags.format, "json | text")
      ->check(CLI::IsMember({"json", "text"}));
  overlap->add_option("--targets-field", overlap_flags.targets_field);
  overlap->add_option("--docs-field", overlap_flags.docs_field);

  try {
    std::vector<std::string> args = splice_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*build) return cmd_build(build_flags, out, err);
    if (*sweep) return cmd_sweep(sweep_build, sweep_flags, out, err);
    if (*rouge) return cmd_rouge(rouge_flags, out);
    if (*overlap) return cmd_overlap(overlap_flags, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dialsum::cli
