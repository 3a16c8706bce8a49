#pragma once

// The `dropwarp` command line. Everything lives in run_cli so the tests can
// drive it in-process with string streams.

#include "dropwarp/dropwarp.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dropwarp::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kUsageError = 2, kExpectationFailed = 3 };

/// Metric flags shared by every command that compares sequences.
struct MetricFlags {
  std::optional<double> p_t, p_e, tau, t_max;
  std::optional<std::string> delta;
  std::optional<std::size_t> band;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--p-t", p_t, "weight of the time term");
    cmd.add_option("--p-e", p_e, "weight of the event-type term");
    cmd.add_option("--delta", delta, "drop cost, a number or 'inf'");
    cmd.add_option("--tau", tau, "largest matchable time gap in days; with --t-max also sets default weights");
    cmd.add_option("--t-max", t_max, "largest time distance of interest, used with --tau");
    cmd.add_option("--band", band, "Sakoe-Chiba band width");
  }

  DropDtwParams resolve() const {
    DropDtwParams p;
    const bool explicit_all = p_t && p_e && delta;
    if (tau && !explicit_all) {
      if (!t_max) throw PreconditionError("--tau needs --t-max to derive the missing metric weights");
      p = suggest_parameters(*tau, *t_max).metric();
    } else if (tau) {
      p.max_gap = *tau;
    }
    if (p_t) p.weights.time = *p_t;
    if (p_e) p.weights.event = *p_e;
    if (delta) p.drop_cost = parse_cost(*delta);
    p.band = band;
    p.validate();
    return p;
  }

  static double parse_cost(const std::string& text) {
    if (text == "inf" || text == "+inf" || text == "Inf") return kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty()) throw ValidationError("bad drop cost '" + text + "'");
    return v;
  }
};

inline json number_json(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

inline json metric_json(const DropDtwParams& p) {
  return {{"p_t", p.weights.time},
          {"p_e", p.weights.event},
          {"delta", number_json(p.drop_cost)},
          {"tau", number_json(p.max_gap)},
          {"band", p.band ? json(*p.band) : json(nullptr)}};
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------- dist

struct DistArgs {
  std::string input, id_a, id_b;
  MetricFlags metric;
};

inline int cmd_dist(const DistArgs& a, std::ostream& out, std::ostream& err) {
  const auto params = a.metric.resolve();
  const auto corpus = parse_sequences_file(a.input);
  for (const auto& w : corpus.warnings) err << "warning: " << w << "\n";
  const auto* x = corpus.find(a.id_a);
  const auto* z = corpus.find(a.id_b);
  if (!x) throw PreconditionError("no sequence with id '" + a.id_a + "'");
  if (!z) throw PreconditionError("no sequence with id '" + a.id_b + "'");
  const auto ex = embed(*x, corpus.alphabet);
  const auto ez = embed(*z, corpus.alphabet);
  const auto result = drop_dtw(ex, ez, params);
  const auto alignment = get_alignment(result.tables, ex, ez, params);

  json pairs = json::array(), rows = json::array(), cols = json::array();
  for (auto [i, j] : alignment.pairs) pairs.push_back({i, j});
  for (std::size_t i = 0; i < alignment.row_drops.size(); ++i)
    if (alignment.row_drops[i]) rows.push_back(i);
  for (std::size_t j = 0; j < alignment.col_drops.size(); ++j)
    if (alignment.col_drops[j]) cols.push_back(j);
  out << dump({{"id_a", a.id_a},
               {"id_b", a.id_b},
               {"cost", number_json(result.cost)},
               {"pairs", pairs},
               {"row_drops", rows},
               {"col_drops", cols}});
  return kOk;
}

// ---------------------------------------------------------------- average

struct AverageArgs {
  std::string input, ids, init = "longest", out_path;
  std::size_t index = 0, max_iterations = 10, threads = 1;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  MetricFlags metric;
};

inline int cmd_average(const AverageArgs& a, std::ostream& out, std::ostream& err) {
  const auto params = a.metric.resolve();
  const auto corpus = parse_sequences_file(a.input);
  for (const auto& w : corpus.warnings) err << "warning: " << w << "\n";
  std::vector<TimedSequence> chosen;
  if (a.ids.empty()) {
    chosen = corpus.sequences;
  } else {
    for (const auto& id : split_list(a.ids)) {
      const auto* s = corpus.find(id);
      if (!s) throw PreconditionError("no sequence with id '" + id + "'");
      chosen.push_back(*s);
    }
  }
  TsrConfig cfg;
  cfg.max_iterations = a.max_iterations;
  cfg.rel_tol = a.rel_tol;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  if (a.init == "index") {
    if (a.index >= chosen.size()) throw PreconditionError("--index is out of range");
    cfg.init = FromIndex{a.index};
  }
  const auto result = tsr_average(std::span<const TimedSequence>(chosen), corpus.alphabet, params, cfg);

  json trace = json::array();
  for (double v : result.inertia_trace) trace.push_back(number_json(v));
  const json summary = {{"sequences", chosen.size()},
                        {"length", result.center.size()},
                        {"inertia", number_json(result.inertia())},
                        {"inertia_trace", trace},
                        {"iterations", result.iterations},
                        {"metric", metric_json(params)},
                        {"seed", a.seed}};
  const auto center = barycenter_to_json(result.center, corpus.alphabet);
  if (a.out_path.empty()) {
    out << dump(center);
  } else {
    write_file_atomic(a.out_path, dump(center));
    out << dump(summary);
  }
  return kOk;
}

// ---------------------------------------------------------------- histogram helpers

inline std::string histogram_csv(const std::vector<HistogramRow>& rows, const Alphabet& alphabet) {
  std::ostringstream csv;
  csv << "cluster,type,bin_start,count\n";
  for (const auto& r : rows)
    csv << r.cluster << ',' << alphabet.symbol(r.type) << ',' << format_number(r.bin_start) << ',' << r.count
        << '\n';
  return csv.str();
}

// One panel per cluster; each bin is a bar stacked by event type.
inline std::string histogram_svg(const std::vector<HistogramRow>& rows, const Alphabet& alphabet,
                                 double bin_width) {
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  std::map<std::size_t, std::map<double, std::vector<const HistogramRow*>>> panels;
  double lo = kInf, hi = -kInf;
  std::size_t tallest = 1;
  for (const auto& r : rows) {
    panels[r.cluster][r.bin_start].push_back(&r);
    lo = std::min(lo, r.bin_start);
    hi = std::max(hi, r.bin_start + bin_width);
  }
  for (const auto& [c, bins] : panels)
    for (const auto& [b, cells] : bins) {
      std::size_t h = 0;
      for (const auto* cell : cells) h += cell->count;
      tallest = std::max(tallest, h);
    }
  const double width = 640, panel = 160, margin = 30;
  const double legend = 20.0 * static_cast<double>(alphabet.size());
  const double height = margin + static_cast<double>(panels.size()) * (panel + margin) + legend;
  const double span = panels.empty() ? 1.0 : hi - lo;
  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 2 * margin << "\" height=\"" << height
      << "\">\n";
  double top = margin;
  for (const auto& [cluster, bins] : panels) {
    svg << "<text x=\"" << margin << "\" y=\"" << top - 8 << "\" font-size=\"12\">cluster " << cluster
        << "</text>\n";
    svg << "<rect x=\"" << margin << "\" y=\"" << top << "\" width=\"" << width << "\" height=\"" << panel
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (const auto& [bin, cells] : bins) {
      const double x = margin + (bin - lo) / span * width;
      const double w = std::max(1.0, bin_width / span * width - 1.0);
      double y = top + panel;
      for (const auto* cell : cells) {
        const double h = static_cast<double>(cell->count) / static_cast<double>(tallest) * panel;
        y -= h;
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h << "\" fill=\""
            << palette[cell->type % 10] << "\"><title>" << alphabet.symbol(cell->type) << ": " << cell->count
            << "</title></rect>\n";
      }
    }
    top += panel + margin;
  }
  for (std::size_t k = 0; k < alphabet.size(); ++k) {
    const double y = top + 20.0 * static_cast<double>(k);
    svg << "<rect x=\"" << margin << "\" y=\"" << y - 10 << "\" width=\"10\" height=\"10\" fill=\""
        << palette[k % 10] << "\"/><text x=\"" << margin + 16 << "\" y=\"" << y << "\" font-size=\"12\">"
        << alphabet.symbol(k) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
  std::string input, method = "hac", out_dir, svg;
  std::size_t k = 2, max_rounds = 20, restarts = 1, threads = 1, max_iterations = 10;
  std::uint64_t seed = 0;
  double bin_width = 1.0;
  MetricFlags metric;
};

inline int cmd_cluster(const ClusterArgs& a, std::ostream& out, std::ostream& err) {
  if (a.method != "hac" && a.method != "kmeans") throw PreconditionError("--method must be hac or kmeans");
  if (!(a.bin_width > 0.0)) throw ValidationError("--bin-width must be positive");
  const auto params = a.metric.resolve();
  const auto corpus = parse_sequences_file(a.input);
  for (const auto& w : corpus.warnings) err << "warning: " << w << "\n";

  ClusterParams cp;
  cp.k = a.k;
  cp.metric = params;
  cp.max_rounds = a.max_rounds;
  cp.restarts = a.restarts;
  cp.seed = a.seed;
  cp.threads = a.threads;
  cp.tsr.seed = a.seed;
  cp.tsr.max_iterations = a.max_iterations;
  const auto seqs = std::span<const TimedSequence>(corpus.sequences);
  const auto c = a.method == "hac" ? hac_cluster(seqs, corpus.alphabet, cp) : kmeans_cluster(seqs, corpus.alphabet, cp);

  LabelTable assignments;
  for (std::size_t i = 0; i < c.ids.size(); ++i) assignments.emplace_back(c.ids[i], std::to_string(c.labels[i]));
  std::ostringstream csv;
  write_label_csv(csv, "cluster", assignments);

  json centroids = json::array();
  for (const auto& center : c.centroids) centroids.push_back(barycenter_to_json(center, corpus.alphabet));
  json trace = json::array();
  for (double v : c.inertia_trace) trace.push_back(number_json(v));
  const json metrics = {{"method", a.method},
                        {"k", a.k},
                        {"sequences", c.ids.size()},
                        {"sizes", c.sizes()},
                        {"total_inertia", number_json(c.total_inertia)},
                        {"inertia_trace", trace},
                        {"steps", c.steps},
                        {"seed", a.seed},
                        {"restarts", a.restarts},
                        {"metric", metric_json(params)}};
  const auto hist = histogram_export(seqs, c.labels, a.bin_width);

  std::filesystem::create_directories(a.out_dir);
  const std::filesystem::path dir(a.out_dir);
  write_file_atomic(dir / "assignments.csv", csv.str());
  write_file_atomic(dir / "centroids.json", dump(centroids));
  write_file_atomic(dir / "metrics.json", dump(metrics));
  write_file_atomic(dir / "histogram.csv", histogram_csv(hist, corpus.alphabet));
  if (!a.svg.empty()) write_file_atomic(a.svg, histogram_svg(hist, corpus.alphabet, a.bin_width));
  out << dump(metrics);
  return kOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string scenario, out_path, labels_path;
  std::uint64_t seed = 0;
  std::size_t count = 500;
};

inline LabeledDataset make_dataset(const std::string& scenario, std::uint64_t seed, std::size_t count) {
  if (scenario == "ratio") return generate_ratio_dataset(seed);
  if (scenario == "extra") return generate_extra_event_dataset(seed);
  if (scenario == "missing") return generate_missing_event_dataset(seed);
  if (scenario == "mixture") return generate_mixture_dataset(count, seed);
  throw PreconditionError("unknown scenario '" + scenario + "'");
}

inline int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  const auto ds = make_dataset(a.scenario, a.seed, a.count);
  std::ostringstream jsonl, csv;
  write_sequences(jsonl, ds.sequences, ds.alphabet);
  LabelTable labels;
  for (std::size_t i = 0; i < ds.sequences.size(); ++i)
    labels.emplace_back(ds.sequences[i].id, std::to_string(ds.labels[i]));
  write_label_csv(csv, "label", labels);

  std::filesystem::path labels_path = a.labels_path;
  if (labels_path.empty()) {
    labels_path = a.out_path;
    labels_path.replace_extension(".labels.csv");
  }
  write_file_atomic(a.out_path, jsonl.str());
  write_file_atomic(labels_path, csv.str());
  out << dump({{"scenario", a.scenario},
               {"seed", a.seed},
               {"sequences", ds.sequences.size()},
               {"out", a.out_path},
               {"labels", labels_path.string()}});
  return kOk;
}

// ---------------------------------------------------------------- eval

inline std::string confusion_csv(const ConfusionMatrix& m) {
  std::ostringstream csv;
  csv << "truth";
  for (const auto& c : m.col_labels) csv << ',' << c;
  csv << '\n';
  for (std::size_t i = 0; i < m.counts.size(); ++i) {
    csv << m.row_labels[i];
    for (auto v : m.counts[i]) csv << ',' << v;
    csv << '\n';
  }
  return csv.str();
}

inline json kappa_json(const KappaReport& r) {
  return {{"kappa", r.kappa},
          {"kappa_best_match", r.kappa_best_match},
          {"truth_labels", r.matrix.row_labels},
          {"cluster_labels", r.matrix.col_labels},
          {"confusion", r.matrix.counts}};
}

struct EvalArgs {
  std::string pred, truth, merge, out_dir;
};

inline int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  auto truth = read_label_csv_file(a.truth);
  const auto pred = read_label_csv_file(a.pred);
  if (!a.merge.empty()) apply_label_merges(truth, parse_label_merges(a.merge));
  const auto report = confusion_and_kappa(truth, pred);
  auto metrics = kappa_json(report);
  metrics["sequences"] = truth.size();
  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
    const std::filesystem::path dir(a.out_dir);
    write_file_atomic(dir / "eval.json", dump(metrics));
    write_file_atomic(dir / "confusion.csv", confusion_csv(report.matrix));
  }
  out << dump(metrics);
  return kOk;
}

// ---------------------------------------------------------------- hist

struct HistArgs {
  std::string input, assignments, out_path, svg;
  double bin_width = 1.0;
};

inline int cmd_hist(const HistArgs& a, std::ostream& out, std::ostream& err) {
  const auto corpus = parse_sequences_file(a.input);
  for (const auto& w : corpus.warnings) err << "warning: " << w << "\n";
  std::vector<std::size_t> clusters(corpus.sequences.size(), 0);
  if (!a.assignments.empty()) {
    std::map<std::string, std::size_t> by_id;
    for (const auto& [id, label] : read_label_csv_file(a.assignments)) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(label, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != label.size()) throw ValidationError("cluster '" + label + "' is not an index");
      if (!by_id.emplace(id, v).second) throw PreconditionError("duplicate id in assignments: " + id);
    }
    if (by_id.size() != corpus.sequences.size()) throw PreconditionError("assignments and input ids differ");
    for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
      auto it = by_id.find(corpus.sequences[i].id);
      if (it == by_id.end()) throw PreconditionError("no assignment for '" + corpus.sequences[i].id + "'");
      clusters[i] = it->second;
    }
  }
  const auto rows = histogram_export(std::span<const TimedSequence>(corpus.sequences), clusters, a.bin_width);
  const auto csv = histogram_csv(rows, corpus.alphabet);
  if (a.out_path.empty())
    out << csv;
  else
    write_file_atomic(a.out_path, csv);
  if (!a.svg.empty()) write_file_atomic(a.svg, histogram_svg(rows, corpus.alphabet, a.bin_width));
  return kOk;
}

// ---------------------------------------------------------------- repro

struct ReproArgs {
  std::string experiment, delta, out_path;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct ReproRun {
  std::string name;
  DropDtwParams metric;
  KappaReport report;
  std::vector<std::size_t> sizes;
  double seconds = 0.0;
};

// Runs one clustering of `ds` and scores it against the (optionally merged) truth.
inline ReproRun repro_run(const std::string& name, const LabeledDataset& ds, const DropDtwParams& metric,
                          std::size_t k, bool kmeans, bool merge_1_3, std::uint64_t seed, std::size_t threads,
                          std::size_t restarts = 1) {
  const auto start = std::chrono::steady_clock::now();
  ClusterParams cp;
  cp.k = k;
  cp.metric = metric;
  cp.seed = seed;
  cp.tsr.seed = seed;
  cp.threads = threads;
  cp.restarts = restarts;
  const auto seqs = std::span<const TimedSequence>(ds.sequences);
  const auto c = kmeans ? kmeans_cluster(seqs, ds.alphabet, cp) : hac_cluster(seqs, ds.alphabet, cp);
  std::vector<std::string> truth, pred;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    const int label = merge_1_3 && ds.labels[i] == 3 ? 1 : ds.labels[i];
    truth.push_back(std::to_string(label));
    pred.push_back(std::to_string(c.labels[i]));
  }
  ReproRun run{name, metric, confusion_and_kappa(std::span<const std::string>(truth), std::span<const std::string>(pred)),
               c.sizes(), 0.0};
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

inline DropDtwParams repro_metric(double time_weight, double drop_cost) {
  DropDtwParams p;
  p.weights = {1.0, time_weight};
  p.drop_cost = drop_cost;
  return p;
}

struct ReproOutcome {
  std::vector<ReproRun> runs;
  std::vector<std::pair<std::string, bool>> checks; // expectation text, held?

  bool passed() const {
    for (const auto& [text, ok] : checks)
      if (!ok) return false;
    return true;
  }
};

/// The synthetic experiments with their reference settings and expected outcomes.
/// `only_delta` restricts extra/missing to one drop cost.
inline ReproOutcome run_experiment(const std::string& name, std::uint64_t seed, std::size_t threads,
                                   std::optional<double> only_delta = std::nullopt) {
  ReproOutcome o;
  if (name == "extra" || name == "missing") {
    const auto ds = name == "extra" ? generate_extra_event_dataset(seed) : generate_missing_event_dataset(seed);
    for (double delta : {4.0, kInf}) {
      if (only_delta && *only_delta != delta) continue;
      auto run = repro_run(name + " delta=" + format_number(delta), ds, repro_metric(1.0 / 9.0, delta), 2, false,
                           true, seed, threads);
      if (std::isfinite(delta))
        o.checks.emplace_back(run.name + ": kappa == 1", run.report.kappa == 1.0);
      else
        o.checks.emplace_back(run.name + ": kappa <= 0", run.report.kappa <= 0.0);
      o.runs.push_back(std::move(run));
    }
  } else if (name == "ratio1" || name == "ratio2") {
    const auto ds = generate_ratio_dataset(seed);
    auto first = repro_run("ratio1", ds, repro_metric(1.0 / 9.0, kInf), 9, false, false, seed, threads);
    if (name == "ratio1") {
      o.checks.emplace_back("ratio1: kappa >= 0.9", first.report.kappa >= 0.9);
      o.runs.push_back(std::move(first));
    } else {
      auto second = repro_run("ratio2", ds, repro_metric(1.0 / 400.0, kInf), 9, false, false, seed, threads);
      o.checks.emplace_back("ratio2: kappa < ratio1 kappa", second.report.kappa < first.report.kappa);
      o.runs.push_back(std::move(first));
      o.runs.push_back(std::move(second));
    }
  } else if (name == "mixture") {
    const auto ds = generate_mixture_dataset(500, seed);
    auto run = repro_run("mixture kmeans", ds, repro_metric(1.0 / 9.0, 4.0), 3, true, false, seed, threads, 5);
    o.checks.emplace_back("mixture: kappa >= 0.9", run.report.kappa >= 0.9);
    o.runs.push_back(std::move(run));
  } else {
    throw PreconditionError("unknown experiment '" + name + "'");
  }
  return o;
}

inline int cmd_repro(const ReproArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<double> only;
  if (!a.delta.empty()) only = MetricFlags::parse_cost(a.delta);
  const auto o = run_experiment(a.experiment, a.seed, a.threads, only);
  if (o.runs.empty()) throw PreconditionError("--delta must be 4 or inf for this experiment");
  json runs = json::array();
  for (const auto& r : o.runs) {
    auto entry = kappa_json(r.report);
    entry["name"] = r.name;
    entry["metric"] = metric_json(r.metric);
    entry["cluster_sizes"] = r.sizes;
    runs.push_back(std::move(entry));
  }
  json checks = json::array();
  for (const auto& [text, ok] : o.checks) checks.push_back({{"expectation", text}, {"held", ok}});
  const json summary = {{"experiment", a.experiment}, {"seed", a.seed}, {"runs", runs}, {"checks", checks},
                        {"passed", o.passed()}};
  if (!a.out_path.empty()) write_file_atomic(a.out_path, dump(summary));
  out << dump(summary);
  for (const auto& [text, ok] : o.checks)
    if (!ok) err << "expectation not met: " << text << "\n";
  return o.passed() ? kOk : kExpectationFailed;
}

// ---------------------------------------------------------------- entry point

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drop-DTW distances, averages and clustering for timed event sequences", "dropwarp"};
  app.require_subcommand(1);

  DistArgs dist;
  auto* c_dist = app.add_subcommand("dist", "drop-DTW cost and alignment between two sequences");
  c_dist->add_option("input", dist.input, "JSON Lines sequences")->required();
  c_dist->add_option("--id-a", dist.id_a)->required();
  c_dist->add_option("--id-b", dist.id_b)->required();
  dist.metric.add_to(*c_dist);

  AverageArgs avg;
  auto* c_avg = app.add_subcommand("average", "TSR average of a set of sequences");
  c_avg->add_option("input", avg.input, "JSON Lines sequences")->required();
  c_avg->add_option("--ids", avg.ids, "comma-separated subset of ids (default: all)");
  c_avg->add_option("--init", avg.init, "longest | index")->check(CLI::IsMember({"longest", "index"}));
  c_avg->add_option("--index", avg.index, "start from this sequence when --init index");
  c_avg->add_option("--max-iter", avg.max_iterations)->check(CLI::PositiveNumber);
  c_avg->add_option("--rel-tol", avg.rel_tol)->check(CLI::NonNegativeNumber);
  c_avg->add_option("--seed", avg.seed);
  c_avg->add_option("--threads", avg.threads)->check(CLI::PositiveNumber);
  c_avg->add_option("--out", avg.out_path, "write the barycenter here and a summary to stdout");
  avg.metric.add_to(*c_avg);

  ClusterArgs cl;
  auto* c_cl = app.add_subcommand("cluster", "hierarchical or K-means clustering");
  c_cl->add_option("input", cl.input, "JSON Lines sequences")->required();
  c_cl->add_option("--method", cl.method)->check(CLI::IsMember({"hac", "kmeans"}));
  c_cl->add_option("--k", cl.k)->required();
  c_cl->add_option("--max-rounds", cl.max_rounds)->check(CLI::PositiveNumber);
  c_cl->add_option("--restarts", cl.restarts)->check(CLI::PositiveNumber);
  c_cl->add_option("--max-iter", cl.max_iterations, "TSR iterations per update")->check(CLI::PositiveNumber);
  c_cl->add_option("--seed", cl.seed);
  c_cl->add_option("--threads", cl.threads)->check(CLI::PositiveNumber);
  c_cl->add_option("--bin-width", cl.bin_width, "histogram bin width in days");
  c_cl->add_option("--out-dir", cl.out_dir)->required();
  c_cl->add_option("--svg", cl.svg, "also draw the histogram as SVG");
  cl.metric.add_to(*c_cl);

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "generate a labelled synthetic corpus");
  c_syn->add_option("--scenario", syn.scenario)
      ->required()
      ->check(CLI::IsMember({"ratio", "extra", "missing", "mixture"}));
  c_syn->add_option("--seed", syn.seed);
  c_syn->add_option("--count", syn.count, "corpus size for the mixture scenario")->check(CLI::PositiveNumber);
  c_syn->add_option("--out", syn.out_path, "JSON Lines output")->required();
  c_syn->add_option("--labels", syn.labels_path, "labels CSV (default: <out>.labels.csv)");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "confusion matrix and Cohen's kappa");
  c_ev->add_option("--pred", ev.pred, "id,cluster CSV")->required();
  c_ev->add_option("--truth", ev.truth, "id,label CSV")->required();
  c_ev->add_option("--merge", ev.merge, "merge truth labels, e.g. 1=3");
  c_ev->add_option("--out-dir", ev.out_dir, "also write eval.json and confusion.csv here");

  HistArgs hi;
  auto* c_hi = app.add_subcommand("hist", "event-type histogram per cluster");
  c_hi->add_option("input", hi.input, "JSON Lines sequences")->required();
  c_hi->add_option("--assignments", hi.assignments, "id,cluster CSV (default: one cluster)");
  c_hi->add_option("--bin-width", hi.bin_width);
  c_hi->add_option("--out", hi.out_path, "CSV output (default: stdout)");
  c_hi->add_option("--svg", hi.svg, "stacked-bar chart");

  ReproArgs re;
  auto* c_re = app.add_subcommand("repro", "rerun a synthetic experiment and check its expected outcome");
  c_re->add_option("--experiment", re.experiment)
      ->required()
      ->check(CLI::IsMember({"ratio1", "ratio2", "extra", "missing", "mixture"}));
  c_re->add_option("--delta", re.delta, "extra/missing only: run just this drop cost (4 or inf)");
  c_re->add_option("--seed", re.seed);
  c_re->add_option("--threads", re.threads)->check(CLI::PositiveNumber);
  c_re->add_option("--out", re.out_path, "also write the summary JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*c_dist) return cmd_dist(dist, out, err);
    if (*c_avg) return cmd_average(avg, out, err);
    if (*c_cl) return cmd_cluster(cl, out, err);
    if (*c_syn) return cmd_synth(syn, out, err);
    if (*c_ev) return cmd_eval(ev, out, err);
    if (*c_hi) return cmd_hist(hi, out, err);
    if (*c_re) return cmd_repro(re, out, err);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsageError;
}

} // namespace dropwarp::cli
