#include "helmex/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "helmex/decision_tree.hpp"
#include "helmex/errors.hpp"
#include "helmex/explanation.hpp"
#include "helmex/helm.hpp"
#include "helmex/lexicon.hpp"
#include "helmex/manifest.hpp"
#include "helmex/trace_io.hpp"
#include "helmex/verbalizer.hpp"

namespace helmex::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void require_input_file(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("input file not found: " + path);
}

json load_json_file(const std::string& path) {
  require_input_file(path);
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json o = json::parse(buf.str(), nullptr, false);
  if (o.is_discarded()) throw ConfigError("not valid JSON: " + path);
  return o;
}

void merge_json(json& base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base.at(key).is_object() && value.is_object())
      merge_json(base.at(key), value);
    else
      base[key] = value;
  }
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

TimeMode parse_time_mode(const std::string& mode) {
  if (mode == "mission") return TimeMode::Mission;
  if (mode == "wall") return TimeMode::Wall;
  throw ConfigError("--time must be \"mission\" or \"wall\"");
}

Lexicon load_lexicon_arg(const std::string& path) {
  if (path.empty()) return Lexicon::defaults();
  require_input_file(path);
  return Lexicon::load(path);
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string config_path;
};

int cmd_simulate(const SimulateOpts& opts, std::ostream& out, std::ostream& err) {
  Stopwatch timer;
  require_input_file(opts.scenario_path);
  json doc = load_json_file(opts.scenario_path);
  RunManifest manifest;
  manifest.subcommand = "simulate";
  manifest.inputs = {opts.scenario_path};
  manifest.output = opts.out_path;
  if (!opts.config_path.empty()) {
    merge_json(doc, load_json_file(opts.config_path));
    manifest.overrides["config"] = opts.config_path;
  }
  Scenario scenario = parse_scenario(doc.dump());
  if (opts.seed) {
    scenario.seed = *opts.seed;
    manifest.overrides["seed"] = std::to_string(*opts.seed);
  }
  manifest.seed = scenario.seed;
  manifest.seed_set = true;

  RunMeta meta;
  const std::vector<TraceRecord> trace = run_mission(scenario, &meta);
  write_trace_file(opts.out_path, trace);

  manifest.extra["scenario"] = scenario.name;
  manifest.extra["ticks"] = std::to_string(meta.ticks);
  manifest.extra["final_t"] = format_number(meta.final_t);
  manifest.extra["timed_out"] = meta.timed_out ? "true" : "false";
  manifest.extra["mission_complete"] = meta.mission_complete ? "true" : "false";
  manifest.wall_time_s = timer.seconds();
  manifest.write();

  err << "simulate: " << meta.ticks << " ticks -> " << opts.out_path << "\n";
  (void)out;
  return kExitOk;
}

// ----------------------------------------------------------------- distill

struct DistillOpts {
  std::vector<std::string> trace_paths;
  std::string out_path;
  FitParams params;
  std::string config_path;
  std::vector<std::string> explicit_flags;
};

int cmd_distill(DistillOpts opts, std::ostream& out, std::ostream& err) {
  Stopwatch timer;
  RunManifest manifest;
  manifest.subcommand = "distill";
  manifest.inputs = opts.trace_paths;
  manifest.output = opts.out_path;

  if (!opts.config_path.empty()) {
    const json cfg = load_json_file(opts.config_path);
    if (cfg.contains("max_depth")) opts.params.max_depth = cfg.at("max_depth").get<int>();
    if (cfg.contains("min_samples_leaf"))
      opts.params.min_samples_leaf = cfg.at("min_samples_leaf").get<int>();
    if (cfg.contains("min_impurity_decrease"))
      opts.params.min_impurity_decrease = cfg.at("min_impurity_decrease").get<double>();
    manifest.overrides["config"] = opts.config_path;
  }
  for (const std::string& flag : opts.explicit_flags) manifest.overrides[flag] = "set";
  opts.params.validate();

  std::vector<TraceRecord> records;
  for (const std::string& path : opts.trace_paths) {
    require_input_file(path);
    std::vector<TraceRecord> part = read_trace_file(path);
    records.insert(records.end(), part.begin(), part.end());
  }
  if (records.empty()) throw ConfigError("no labelled records in input trace(s)");

  const TrainingSet data = build_training_set(records);
  const DecisionTree tree = fit_tree(data, opts.params);
  save_tree(opts.out_path, tree);
  const double train_fidelity = fidelity(tree, data);

  out << "fidelity=" << fixed6(train_fidelity) << "\n";
  manifest.extra["records"] = std::to_string(records.size());
  manifest.extra["files"] = std::to_string(opts.trace_paths.size());
  manifest.extra["training_fidelity"] = fixed6(train_fidelity);
  manifest.extra["depth"] = std::to_string(tree.depth());
  manifest.extra["leaves"] = std::to_string(tree.leaf_count());
  manifest.extra["max_depth"] = std::to_string(opts.params.max_depth);
  manifest.extra["min_samples_leaf"] = std::to_string(opts.params.min_samples_leaf);
  manifest.extra["min_impurity_decrease"] = format_number(opts.params.min_impurity_decrease);
  manifest.wall_time_s = timer.seconds();
  manifest.write();

  err << "distill: " << records.size() << " records -> " << opts.out_path << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- explain

struct ExplainOpts {
  std::string tree_path;
  std::string trace_path;  // "-" = stdin
  std::string lexicon_path;
  std::string time_mode = "mission";
  bool follow = false;
  int min_dwell = 1;
  int poll_ms = 200;
  int idle_timeout_ms = 0;  // 0 = follow forever
  std::string out_path;     // optional file output instead of stdout
};

void emit_event(ExplanationEvent event, const Lexicon& lexicon, TimeMode mode,
                std::ostream& sink, bool flush_each) {
  event.sentence = realize(event.concept_set, lexicon, mode).text;
  sink << event_to_json(event) << '\n';
  if (flush_each) sink.flush();
}

int cmd_explain(const ExplainOpts& opts, std::ostream& out, std::ostream& err) {
  Stopwatch timer;
  require_input_file(opts.tree_path);
  const DecisionTree tree = load_tree(opts.tree_path);
  const Lexicon lexicon = load_lexicon_arg(opts.lexicon_path);
  lexicon.ensure_covers(tree.schema());
  const TimeMode mode = parse_time_mode(opts.time_mode);
  if (opts.min_dwell < 1) throw ConfigError("--min-dwell must be >= 1");

  std::ofstream file_out;
  std::ostream* sink = &out;
  if (!opts.out_path.empty()) {
    file_out.open(opts.out_path);
    if (!file_out) throw Error("cannot open output file: " + opts.out_path);
    sink = &file_out;
  }

  EventDetector detector(tree, opts.min_dwell);
  std::size_t ticks = 0;
  std::size_t events = 0;

  const auto push_line = [&](const std::string& line, long line_number) {
    if (line.empty()) return;
    const StreamRecord rec = parse_stream_record(line, line_number);
    ++ticks;
    if (auto ev = detector.push(rec.state, featurize(rec.state)))
      emit_event(std::move(*ev), lexicon, mode, *sink, opts.follow), ++events;
  };

  if (opts.trace_path == "-") {
    std::string line;
    long n = 0;
    while (std::getline(std::cin, line)) push_line(line, ++n);
  } else {
    require_input_file(opts.trace_path);
    if (!opts.follow) {
      std::ifstream in(opts.trace_path);
      std::string line;
      long n = 0;
      while (std::getline(in, line)) push_line(line, ++n);
      if (in.bad()) throw Error("I/O failure while reading " + opts.trace_path);
    } else {
      // Poll for appended lines; a partial trailing line is kept in the
      // buffer until its newline arrives.
      std::ifstream in(opts.trace_path, std::ios::binary);
      std::string buffer;
      long n = 0;
      int idle_ms = 0;
      while (true) {
        char chunk[4096];
        in.read(chunk, sizeof chunk);
        const std::streamsize got = in.gcount();
        if (got > 0) {
          idle_ms = 0;
          buffer.append(chunk, static_cast<std::size_t>(got));
          std::size_t start = 0;
          std::size_t nl;
          while ((nl = buffer.find('\n', start)) != std::string::npos) {
            push_line(buffer.substr(start, nl - start), ++n);
            start = nl + 1;
          }
          buffer.erase(0, start);
        } else {
          if (opts.idle_timeout_ms > 0 && idle_ms >= opts.idle_timeout_ms) break;
          std::this_thread::sleep_for(std::chrono::milliseconds(opts.poll_ms));
          idle_ms += opts.poll_ms;
          in.clear();  // clear EOF so appended data becomes readable
        }
      }
    }
  }

  if (!opts.out_path.empty()) {
    RunManifest manifest;
    manifest.subcommand = "explain";
    manifest.inputs = {opts.tree_path, opts.trace_path};
    manifest.output = opts.out_path;
    manifest.extra["ticks"] = std::to_string(ticks);
    manifest.extra["events"] = std::to_string(events);
    manifest.extra["time_mode"] = opts.time_mode;
    manifest.extra["min_dwell"] = std::to_string(opts.min_dwell);
    manifest.wall_time_s = timer.seconds();
    manifest.write();
  }
  err << "explain: " << events << " events from " << ticks << " ticks\n";
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOpts {
  std::string tree_path;
  std::string trace_path;
  std::string out_path;  // optional metrics file
};

int cmd_evaluate(const EvaluateOpts& opts, std::ostream& out, std::ostream& err) {
  Stopwatch timer;
  require_input_file(opts.tree_path);
  require_input_file(opts.trace_path);
  const DecisionTree tree = load_tree(opts.tree_path);
  const std::vector<TraceRecord> records = read_trace_file(opts.trace_path);
  if (records.empty()) throw ConfigError("trace is empty: " + opts.trace_path);

  std::array<std::size_t, kBehaviourCount> truth_counts{};
  std::array<std::size_t, kBehaviourCount> truth_hits{};
  std::size_t hits = 0;
  std::size_t transitions = 0;
  std::size_t transition_hits = 0;

  std::vector<Behaviour> predicted;
  predicted.reserve(records.size());
  for (const TraceRecord& r : records)
    predicted.push_back(predict(tree, featurize(r.state)).label);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const Behaviour truth = records[i].behaviour;
    const bool hit = predicted[i] == truth;
    hits += hit;
    ++truth_counts[static_cast<std::size_t>(truth)];
    truth_hits[static_cast<std::size_t>(truth)] += hit;
    if (i > 0 && truth != records[i - 1].behaviour) {
      ++transitions;
      transition_hits += hit;
    }
  }

  std::ostringstream report;
  report << "fidelity=" << fixed6(static_cast<double>(hits) / records.size()) << "\n";
  for (Behaviour b : kAllBehaviours) {
    const std::size_t n = truth_counts[static_cast<std::size_t>(b)];
    if (n == 0) continue;
    report << "recall_" << to_string(b) << "="
           << fixed6(static_cast<double>(truth_hits[static_cast<std::size_t>(b)]) / n) << "\n";
  }
  const double transition_fidelity =
      transitions == 0 ? 1.0 : static_cast<double>(transition_hits) / transitions;
  report << "transition_fidelity=" << fixed6(transition_fidelity) << "\n";
  report << "ticks=" << records.size() << "\n";
  report << "transitions=" << transitions << "\n";
  out << report.str();

  if (!opts.out_path.empty()) {
    std::ofstream file_out(opts.out_path);
    if (!file_out) throw Error("cannot open output file: " + opts.out_path);
    file_out << report.str();
    RunManifest manifest;
    manifest.subcommand = "evaluate";
    manifest.inputs = {opts.tree_path, opts.trace_path};
    manifest.output = opts.out_path;
    manifest.wall_time_s = timer.seconds();
    manifest.write();
  }
  (void)err;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"behaviour-autonomy distillation and explanation pipeline"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and write a labelled trace");
  simulate->add_option("scenario", sim.scenario_path, "scenario JSON file")->required();
  simulate->add_option("out", sim.out_path, "output trace path (JSON-lines)")->required();
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt = simulate->add_option("--seed", seed_value, "override the scenario seed");
  simulate->add_option("--config", sim.config_path, "JSON overrides merged onto the scenario");

  DistillOpts dis;
  CLI::App* distill = app.add_subcommand("distill", "fit a decision tree from labelled traces");
  distill->add_option("traces", dis.trace_paths, "labelled trace file(s)")->required();
  distill->add_option("-o,--out", dis.out_path, "output tree path (JSON)")->required();
  CLI::Option* d_depth = distill->add_option("--max-depth", dis.params.max_depth);
  CLI::Option* d_leaf = distill->add_option("--min-samples-leaf", dis.params.min_samples_leaf);
  CLI::Option* d_dec =
      distill->add_option("--min-impurity-decrease", dis.params.min_impurity_decrease);
  distill->add_option("--config", dis.config_path, "JSON file with fit parameters");

  ExplainOpts exp;
  CLI::App* explain = app.add_subcommand("explain", "emit verbalized explanation events");
  explain->add_option("tree", exp.tree_path, "distilled tree file")->required();
  explain->add_option("trace", exp.trace_path, "state stream file, or - for stdin")->required();
  explain->add_option("--lexicon", exp.lexicon_path, "lexicon JSON (default: built-in English)");
  explain->add_option("--time", exp.time_mode, "timestamp style: mission|wall");
  explain->add_flag("--follow", exp.follow, "tail a growing trace file");
  explain->add_option("--min-dwell", exp.min_dwell,
                      "ticks a new prediction must persist before an event is emitted");
  explain->add_option("--poll-ms", exp.poll_ms, "polling interval for --follow");
  explain->add_option("--idle-timeout-ms", exp.idle_timeout_ms,
                      "stop following after this idle period (0 = never)");
  explain->add_option("--out", exp.out_path, "write events to a file instead of stdout");

  EvaluateOpts ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a tree against a labelled trace");
  evaluate->add_option("tree", ev.tree_path, "distilled tree file")->required();
  evaluate->add_option("trace", ev.trace_path, "labelled trace file")->required();
  evaluate->add_option("--out", ev.out_path, "also write the metrics to a file");

  std::vector<const char*> argv;
  argv.push_back("helmex");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      if (*seed_opt) sim.seed = seed_value;
      return cmd_simulate(sim, out, err);
    }
    if (distill->parsed()) {
      if (*d_depth) dis.explicit_flags.push_back("max_depth");
      if (*d_leaf) dis.explicit_flags.push_back("min_samples_leaf");
      if (*d_dec) dis.explicit_flags.push_back("min_impurity_decrease");
      return cmd_distill(std::move(dis), out, err);
    }
    if (explain->parsed()) return cmd_explain(exp, out, err);
    if (evaluate->parsed()) return cmd_evaluate(ev, out, err);
    err << "error: no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LexiconError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace helmex::cli
