#pragma once

// File formats: JSON Lines sequences, barycenter JSON, id/label CSV tables.

#include "dropwarp/core_types.hpp"
#include "dropwarp/eval.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dropwarp {

using json = nlohmann::json;

struct Corpus {
  Alphabet alphabet;
  std::vector<TimedSequence> sequences;
  std::vector<std::string> warnings;

  const TimedSequence* find(const std::string& id) const {
    for (const auto& s : sequences)
      if (s.id == id) return &s;
    return nullptr;
  }
};

/// Reads `{"id": ..., "events": [{"e": ..., "t": ...}, ...]}` objects, one per
/// non-blank line. The alphabet is the sorted set of event names; events are
/// sorted by time and repeated (type, time) pairs dropped with a warning.
inline Corpus parse_sequences(std::istream& in) {
  struct RawEvent {
    std::string name;
    double t;
  };
  struct RawSequence {
    std::string id;
    std::vector<RawEvent> events;
  };
  std::vector<RawSequence> raw;
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
    if (!obj.contains("id") || !obj["id"].is_string()) throw ParseError(line_no, "missing string field 'id'");
    if (!obj.contains("events") || !obj["events"].is_array())
      throw ParseError(line_no, "missing array field 'events'");
    RawSequence seq{obj["id"].get<std::string>(), {}};
    for (const auto& ev : obj["events"]) {
      if (!ev.is_object() || !ev.contains("e") || !ev["e"].is_string())
        throw ParseError(line_no, "event needs a string field 'e'");
      if (!ev.contains("t") || !ev["t"].is_number()) throw ParseError(line_no, "event needs a numeric field 't'");
      const double t = ev["t"].get<double>();
      if (!std::isfinite(t)) throw ValidationError("line " + std::to_string(line_no) + ": non-finite timestamp");
      seq.events.push_back({ev["e"].get<std::string>(), t});
      names.push_back(seq.events.back().name);
    }
    raw.push_back(std::move(seq));
  }

  Corpus corpus;
  corpus.alphabet = Alphabet::sorted(std::move(names));
  std::vector<std::string> ids;
  for (auto& r : raw) {
    TimedSequence seq{std::move(r.id), {}};
    for (const auto& ev : r.events) seq.events.push_back({corpus.alphabet.require(ev.name), ev.t});
    if (const auto removed = canonicalize(seq))
      corpus.warnings.push_back("sequence '" + seq.id + "': dropped " + std::to_string(removed) +
                                " repeated event(s)");
    ids.push_back(seq.id);
    corpus.sequences.push_back(std::move(seq));
  }
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end())
    throw ValidationError("duplicate sequence id: " + *dup);
  return corpus;
}

inline Corpus parse_sequences_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return parse_sequences(in);
}

inline json sequence_to_json(const TimedSequence& seq, const Alphabet& alphabet) {
  json events = json::array();
  for (const auto& ev : seq.events) events.push_back({{"e", alphabet.symbol(ev.type)}, {"t", ev.t}});
  return {{"id", seq.id}, {"events", std::move(events)}};
}

inline void write_sequences(std::ostream& out, std::span<const TimedSequence> seqs, const Alphabet& alphabet) {
  for (const auto& s : seqs) out << sequence_to_json(s, alphabet).dump() << '\n';
}

/// `{"events": [{"t": ..., "dist": {"<symbol>": p, ...}}]}`, zero entries omitted.
inline json barycenter_to_json(const ProbTimedSequence& center, const Alphabet& alphabet) {
  json events = json::array();
  for (const auto& ev : center.events) {
    json dist = json::object();
    for (std::size_t k = 0; k < ev.dist.size(); ++k)
      if (ev.dist[k] != 0.0) dist[alphabet.symbol(k)] = ev.dist[k];
    events.push_back({{"t", ev.t}, {"dist", std::move(dist)}});
  }
  return {{"events", std::move(events)}};
}

inline ProbTimedSequence barycenter_from_json(const json& doc, const Alphabet& alphabet) {
  if (!doc.is_object() || !doc.contains("events") || !doc["events"].is_array())
    throw ParseError(0, "barycenter needs an 'events' array");
  ProbTimedSequence out;
  for (const auto& ev : doc["events"]) {
    if (!ev.contains("t") || !ev["t"].is_number() || !ev.contains("dist") || !ev["dist"].is_object())
      throw ParseError(0, "barycenter event needs numeric 't' and object 'dist'");
    ProbEvent pe{std::vector<double>(alphabet.size(), 0.0), ev["t"].get<double>()};
    for (const auto& [symbol, p] : ev["dist"].items()) {
      if (!p.is_number()) throw ParseError(0, "distribution entries must be numbers");
      pe.dist[alphabet.require(symbol)] = p.get<double>();
    }
    out.events.push_back(std::move(pe));
  }
  validate(out, alphabet.size());
  return out;
}

/// Two-column CSV with a header row, e.g. `id,cluster` or `id,label`.
inline LabelTable read_label_csv(std::istream& in) {
  LabelTable rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ParseError(line_no, "expected two comma-separated columns");
    rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  if (header) throw ParseError(0, "missing CSV header");
  return rows;
}

inline LabelTable read_label_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return read_label_csv(in);
}

inline void write_label_csv(std::ostream& out, const std::string& value_column, const LabelTable& rows) {
  out << "id," << value_column << '\n';
  for (const auto& [id, label] : rows) out << id << ',' << label << '\n';
}

/// Shortest round-trip decimal form, as used in the JSON outputs.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return json(v).dump();
}

/// Writes `content` next to `path` and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

} // namespace dropwarp
