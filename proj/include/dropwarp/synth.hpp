#pragma once

// Seeded generators for the labelled synthetic corpora.

#include "dropwarp/core_types.hpp"

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace dropwarp {

enum class Scenario { Ratio, ExtraEvents, MissingEvents, Mixture };

inline const char* scenario_name(Scenario s) {
  switch (s) {
  case Scenario::Ratio: return "ratio";
  case Scenario::ExtraEvents: return "extra";
  case Scenario::MissingEvents: return "missing";
  case Scenario::Mixture: return "mixture";
  }
  return "?";
}

struct TemplateEvent {
  std::string symbol;
  double t = 0.0;
};

struct SequenceTemplate {
  int label = 0;
  std::vector<TemplateEvent> events;
};

struct DateNoise {
  enum class Kind { Uniform, Normal } kind = Kind::Normal;
  double a = 0.0; // uniform lower bound, or normal mean
  double b = 1.0; // uniform upper bound, or normal standard deviation

  static DateNoise uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static DateNoise normal(double mean, double stddev) { return {Kind::Normal, mean, stddev}; }
};

struct LabeledDataset {
  Alphabet alphabet;
  std::vector<TimedSequence> sequences;
  std::vector<int> labels; // labels[i] is the category of sequences[i]
  Scenario scenario = Scenario::Ratio;
};

/// `per_template` noisy copies of each template, templates in order. Ids are
/// "<prefix>-<label>-<copy>".
inline LabeledDataset generate_from_templates(const std::vector<SequenceTemplate>& templates,
                                              std::size_t per_template, DateNoise noise,
                                              std::uint64_t seed, const std::string& prefix,
                                              Scenario scenario) {
  std::vector<std::string> names;
  for (const auto& tpl : templates)
    for (const auto& ev : tpl.events) names.push_back(ev.symbol);

  LabeledDataset ds;
  ds.alphabet = Alphabet::sorted(std::move(names));
  ds.scenario = scenario;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(noise.a, noise.b);
  std::normal_distribution<double> normal(noise.a, noise.b);

  for (const auto& tpl : templates) {
    for (std::size_t copy = 0; copy < per_template; ++copy) {
      char id[96];
      std::snprintf(id, sizeof id, "%s-%d-%03zu", prefix.c_str(), tpl.label, copy);
      TimedSequence seq{id, {}};
      for (const auto& ev : tpl.events) {
        const double jitter = noise.kind == DateNoise::Kind::Uniform ? uniform(rng) : normal(rng);
        seq.events.push_back({ds.alphabet.require(ev.symbol), ev.t + jitter});
      }
      canonicalize(seq);
      ds.sequences.push_back(std::move(seq));
      ds.labels.push_back(tpl.label);
    }
  }
  return ds;
}

/// Base sequence plus eight variants. Each variant alters all three studied
/// dimensions (length, event nature, dates), choosing one of two levels per
/// dimension; the first level of each is the single toggle (append (D,14),
/// B -> E, +6 days), the second goes one step further (append (D,14),(D,22),
/// B -> F, +12 days).
inline std::vector<SequenceTemplate> ratio_templates() {
  std::vector<SequenceTemplate> out;
  out.push_back({1, {{"A", 0.0}, {"B", 5.0}, {"C", 10.0}}});
  int label = 2;
  for (int length = 0; length < 2; ++length) {
    for (int nature = 0; nature < 2; ++nature) {
      for (int dates = 0; dates < 2; ++dates) {
        const double shift = dates == 0 ? 6.0 : 12.0;
        const std::string middle = nature == 0 ? "E" : "F";
        SequenceTemplate tpl{label++, {{"A", 0.0}, {middle, 5.0}, {"C", 10.0}, {"D", 14.0}}};
        if (length == 1) tpl.events.push_back({"D", 22.0});
        for (auto& ev : tpl.events) ev.t += shift;
        out.push_back(std::move(tpl));
      }
    }
  }
  return out;
}

inline std::vector<SequenceTemplate> extra_event_templates() {
  return {
      {1, {{"D", 0.0}, {"E", 3.0}, {"F", 5.0}, {"D", 7.0}, {"D", 10.0}, {"E", 12.0}, {"F", 15.0}}},
      {2, {{"E", 2.0}, {"A", 4.0}, {"D", 8.0}, {"C", 12.0}}},
      {3, {{"D", 0.0}, {"E", 3.0}, {"F", 5.0}, {"D", 7.0}, {"D", 10.0}, {"E", 12.0}, {"F", 15.0}, {"D", 1500.0}}},
  };
}

inline std::vector<SequenceTemplate> missing_event_templates() {
  return {
      {1, {{"D", 0.0}, {"E", 3.0}, {"F", 5.0}, {"D", 7.0}}},
      {2, {{"E", 2.0}, {"A", 4.0}, {"E", 7.0}, {"D", 8.0}, {"D", 10.0}, {"E", 12.0}}},
      {3, {{"D", 0.0}, {"E", 2.0}, {"E", 3.0}, {"F", 5.0}, {"D", 7.0}, {"F", 9.0}, {"A", 13.0}}},
  };
}

/// 9 categories x 15 copies, dates jittered by U(-1, 1).
inline LabeledDataset generate_ratio_dataset(std::uint64_t seed) {
  return generate_from_templates(ratio_templates(), 15, DateNoise::uniform(-1.0, 1.0), seed, "ratio",
                                 Scenario::Ratio);
}

/// 3 models x 15 copies, dates jittered by N(0, 1). Model 3 is model 1 plus an aberrant late event.
inline LabeledDataset generate_extra_event_dataset(std::uint64_t seed) {
  return generate_from_templates(extra_event_templates(), 15, DateNoise::normal(0.0, 1.0), seed, "extra",
                                 Scenario::ExtraEvents);
}

/// 3 models x 15 copies, dates jittered by N(0, 1). Model 1's events all occur in model 3.
inline LabeledDataset generate_missing_event_dataset(std::uint64_t seed) {
  return generate_from_templates(missing_event_templates(), 15, DateNoise::normal(0.0, 1.0), seed,
                                 "missing", Scenario::MissingEvents);
}

/// Larger corpus drawn from the extra-event models: `total` sequences split as
/// evenly as possible, then shuffled.
inline LabeledDataset generate_mixture_dataset(std::size_t total, std::uint64_t seed) {
  const auto templates = extra_event_templates();
  const std::size_t per = (total + templates.size() - 1) / templates.size();
  auto ds = generate_from_templates(templates, per, DateNoise::normal(0.0, 1.0), seed, "mixture",
                                    Scenario::Mixture);
  std::vector<std::size_t> order(ds.sequences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  order.resize(total);
  LabeledDataset out{ds.alphabet, {}, {}, Scenario::Mixture};
  for (auto i : order) {
    out.sequences.push_back(std::move(ds.sequences[i]));
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

} // namespace dropwarp
