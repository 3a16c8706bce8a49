#pragma once

// Average of a set of timed sequences under drop-DTW (TSR).
//
// Each iteration aligns every sequence to the current center, replaces each
// center event by the vertical average (mean distribution, mean date) of the
// events aligned to it, drops center events that received nothing, and
// re-sorts by date. An update that would raise the inertia is discarded and the
// iteration stops, so the recorded inertia trace never increases.

#include "dropwarp/core_types.hpp"
#include "dropwarp/metric.hpp"
#include "dropwarp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace dropwarp {

/// Start from a uniformly drawn sequence among the longest ones.
struct LongestRandom {};
/// Start from input sequence `index`.
struct FromIndex {
  std::size_t index = 0;
};
/// Start from a given center (warm start).
struct FromCenter {
  ProbTimedSequence center;
};

using TsrInit = std::variant<LongestRandom, FromIndex, FromCenter>;

struct TsrConfig {
  std::size_t max_iterations = 10;
  double rel_tol = 1e-6;
  TsrInit init = LongestRandom{};
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const {
    if (max_iterations < 1) throw ValidationError("max iterations must be >= 1");
    if (!(rel_tol >= 0.0)) throw ValidationError("relative tolerance must be >= 0");
  }
};

struct TsrResult {
  ProbTimedSequence center;
  std::vector<double> inertia_trace; // inertia of every accepted center, initial one first
  std::vector<std::size_t> length_trace; // matching center lengths
  std::vector<double> costs;         // drop-DTW cost from the final center to each input
  std::size_t iterations = 0;        // update steps attempted
  bool reverted = false;             // last update raised the inertia and was discarded

  double inertia() const { return inertia_trace.back(); }
};

namespace detail {

inline double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

struct CenterFit {
  std::vector<double> costs;
  std::vector<Alignment> alignments;
  double inertia = 0.0;
};

inline CenterFit fit_center(const ProbTimedSequence& center, std::span<const ProbTimedSequence> seqs,
                            const DropDtwParams& params, std::size_t threads) {
  CenterFit fit;
  fit.costs.resize(seqs.size());
  fit.alignments.resize(seqs.size());
  parallel_for(seqs.size(), threads, [&](std::size_t i) {
    auto result = drop_dtw(center, seqs[i], params);
    fit.costs[i] = result.cost;
    fit.alignments[i] = get_alignment(result.tables, center, seqs[i], params);
  });
  fit.inertia = mean_of(fit.costs);
  return fit;
}

/// Vertical averages per center position; positions nothing was aligned to are removed.
inline ProbTimedSequence refine_center(const ProbTimedSequence& center,
                                       std::span<const ProbTimedSequence> seqs,
                                       const CenterFit& fit, std::size_t dimension) {
  std::vector<std::vector<double>> dist_sum(center.size(), std::vector<double>(dimension, 0.0));
  std::vector<double> date_sum(center.size(), 0.0);
  std::vector<std::size_t> count(center.size(), 0);
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    for (auto [row, col] : fit.alignments[s].pairs) {
      const auto& ev = seqs[s][col];
      for (std::size_t k = 0; k < dimension; ++k) dist_sum[row][k] += ev.dist[k];
      date_sum[row] += ev.t;
      ++count[row];
    }
  }
  ProbTimedSequence next;
  for (std::size_t p = 0; p < center.size(); ++p) {
    if (count[p] == 0) continue;
    const double n = static_cast<double>(count[p]);
    ProbEvent ev{std::move(dist_sum[p]), date_sum[p] / n};
    for (double& d : ev.dist) d /= n;
    next.events.push_back(std::move(ev));
  }
  std::stable_sort(next.events.begin(), next.events.end(),
                   [](const ProbEvent& a, const ProbEvent& b) { return a.t < b.t; });
  return next;
}

inline bool improved_enough(double before, double after, double rel_tol) {
  if (before == 0.0) return false;
  if (std::isinf(before)) return std::isfinite(after);
  return (before - after) / before >= rel_tol;
}

} // namespace detail

/// Mean drop-DTW cost from `center` to every sequence.
inline double inertia(const ProbTimedSequence& center, std::span<const ProbTimedSequence> seqs,
                      const DropDtwParams& params) {
  if (seqs.empty()) throw PreconditionError("inertia of an empty set");
  std::vector<double> costs;
  costs.reserve(seqs.size());
  for (const auto& s : seqs) costs.push_back(drop_dtw_cost(center, s, params));
  return detail::mean_of(costs);
}

inline ProbTimedSequence initial_center(std::span<const ProbTimedSequence> seqs, const TsrConfig& cfg) {
  if (const auto* from = std::get_if<FromCenter>(&cfg.init)) return from->center;
  if (const auto* idx = std::get_if<FromIndex>(&cfg.init)) {
    if (idx->index >= seqs.size()) throw PreconditionError("initial index out of range");
    return seqs[idx->index];
  }
  std::size_t longest = 0;
  for (const auto& s : seqs) longest = std::max(longest, s.size());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < seqs.size(); ++i)
    if (seqs[i].size() == longest) candidates.push_back(i);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return seqs[candidates[pick(rng)]];
}

inline TsrResult tsr_average(std::span<const ProbTimedSequence> seqs, const DropDtwParams& params,
                             const TsrConfig& cfg = {}) {
  if (seqs.empty()) throw PreconditionError("cannot average an empty set of sequences");
  params.validate();
  cfg.validate();
  std::size_t dimension = 0;
  for (const auto& s : seqs)
    if (!s.empty()) dimension = s[0].dist.size();

  TsrResult out;
  out.center = initial_center(seqs, cfg);
  auto fit = detail::fit_center(out.center, seqs, params, cfg.threads);
  out.inertia_trace.push_back(fit.inertia);
  out.length_trace.push_back(out.center.size());

  while (out.iterations < cfg.max_iterations) {
    ++out.iterations;
    auto candidate = detail::refine_center(out.center, seqs, fit, dimension);
    if (candidate.empty() && !out.center.empty()) break; // everything dropped: keep the previous center
    auto candidate_fit = detail::fit_center(candidate, seqs, params, cfg.threads);
    if (candidate_fit.inertia > fit.inertia) {
      out.reverted = true;
      break;
    }
    const double before = fit.inertia;
    out.center = std::move(candidate);
    fit = std::move(candidate_fit);
    out.inertia_trace.push_back(fit.inertia);
    out.length_trace.push_back(out.center.size());
    if (!detail::improved_enough(before, fit.inertia, cfg.rel_tol)) break;
  }
  out.costs = std::move(fit.costs);
  return out;
}

inline TsrResult tsr_average(std::span<const TimedSequence> seqs, const Alphabet& alphabet,
                             const DropDtwParams& params, const TsrConfig& cfg = {}) {
  const auto embedded = embed_all(seqs, alphabet);
  return tsr_average(std::span<const ProbTimedSequence>(embedded), params, cfg);
}

} // namespace dropwarp
