#pragma once

// Timed sequences over a finite alphabet and their probabilistic embedding.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dropwarp {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Caller asked for something the inputs cannot satisfy (k > n, unknown id, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Ordered set of event-type names. Index lookup is a bijection with [0, size).
class Alphabet {
public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    index_.reserve(symbols_.size());
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!index_.emplace(symbols_[i], i).second)
        throw ValidationError("duplicate symbol in alphabet: " + symbols_[i]);
    }
  }

  /// Lexicographically sorted alphabet over the given (possibly repeated) names.
  static Alphabet sorted(std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return Alphabet(std::move(names));
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const std::string& symbol(std::size_t index) const { return symbols_.at(index); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw ValidationError("symbol not in alphabet: " + name);
    return *idx;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TimedEvent {
  std::size_t type = 0;
  double t = 0.0; // days

  friend bool operator==(const TimedEvent&, const TimedEvent&) = default;
};

struct TimedSequence {
  std::string id;
  std::vector<TimedEvent> events;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }
  friend bool operator==(const TimedSequence&, const TimedSequence&) = default;
};

struct ProbEvent {
  std::vector<double> dist;
  double t = 0.0;

  friend bool operator==(const ProbEvent&, const ProbEvent&) = default;
};

struct ProbTimedSequence {
  std::vector<ProbEvent> events;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }
  const ProbEvent& operator[](std::size_t i) const { return events[i]; }
  friend bool operator==(const ProbTimedSequence&, const ProbTimedSequence&) = default;
};

inline constexpr double kDistributionTolerance = 1e-9;

inline bool is_distribution(std::span<const double> dist, double tol = kDistributionTolerance) {
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= -tol && p <= 1.0 + tol)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

/// Sorts events by time (stable, so ties keep input order) and removes repeated
/// (type, t) pairs. Returns the number of events removed.
inline std::size_t canonicalize(TimedSequence& seq) {
  std::stable_sort(seq.events.begin(), seq.events.end(),
                   [](const TimedEvent& a, const TimedEvent& b) { return a.t < b.t; });
  const std::size_t before = seq.events.size();
  std::vector<TimedEvent> kept;
  kept.reserve(before);
  for (const auto& ev : seq.events) {
    bool seen = false;
    // duplicates can only sit among the events sharing this timestamp
    for (auto it = kept.rbegin(); it != kept.rend() && it->t == ev.t; ++it) {
      if (it->type == ev.type) {
        seen = true;
        break;
      }
    }
    if (!seen) kept.push_back(ev);
  }
  seq.events = std::move(kept);
  return before - seq.events.size();
}

inline void validate(const TimedSequence& seq, const Alphabet& alphabet) {
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const auto& ev = seq.events[i];
    if (ev.type >= alphabet.size())
      throw ValidationError("sequence '" + seq.id + "': type index " + std::to_string(ev.type) +
                            " outside alphabet of size " + std::to_string(alphabet.size()));
    if (!std::isfinite(ev.t))
      throw ValidationError("sequence '" + seq.id + "': non-finite timestamp");
    if (i > 0) {
      const auto& prev = seq.events[i - 1];
      if (ev.t < prev.t) throw ValidationError("sequence '" + seq.id + "': events not sorted by time");
      for (std::size_t j = i; j-- > 0 && seq.events[j].t == ev.t;) {
        if (seq.events[j].type == ev.type)
          throw ValidationError("sequence '" + seq.id + "': repeated (type, time) pair");
      }
    }
  }
}

inline void validate(const ProbTimedSequence& seq, std::size_t dimension) {
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const auto& ev = seq.events[i];
    if (ev.dist.size() != dimension) throw ValidationError("probabilistic event has wrong dimension");
    if (!is_distribution(ev.dist)) throw ValidationError("probabilistic event is not a distribution");
    if (!std::isfinite(ev.t)) throw ValidationError("non-finite timestamp");
    if (i > 0 && ev.t < seq.events[i - 1].t) throw ValidationError("events not sorted by time");
  }
}

/// One-hot embedding of a timed sequence into the probabilistic space.
inline ProbTimedSequence embed(const TimedSequence& seq, const Alphabet& alphabet) {
  ProbTimedSequence out;
  out.events.reserve(seq.size());
  for (const auto& ev : seq.events) {
    if (ev.type >= alphabet.size())
      throw ValidationError("invalid alphabet: type index " + std::to_string(ev.type) +
                            " for alphabet of size " + std::to_string(alphabet.size()));
    ProbEvent pe{std::vector<double>(alphabet.size(), 0.0), ev.t};
    pe.dist[ev.type] = 1.0;
    out.events.push_back(std::move(pe));
  }
  return out;
}

inline std::vector<ProbTimedSequence> embed_all(std::span<const TimedSequence> seqs,
                                                const Alphabet& alphabet) {
  std::vector<ProbTimedSequence> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(embed(s, alphabet));
  return out;
}

/// Most likely type per event (first maximum on ties). Inverse of `embed` on one-hot input.
inline TimedSequence extract_argmax(const ProbTimedSequence& seq, std::string id = {}) {
  TimedSequence out{std::move(id), {}};
  out.events.reserve(seq.size());
  for (const auto& ev : seq.events) {
    const auto best = std::max_element(ev.dist.begin(), ev.dist.end());
    out.events.push_back({static_cast<std::size_t>(best - ev.dist.begin()), ev.t});
  }
  return out;
}

} // namespace dropwarp
