#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rpys/clustering.hpp"
#include "rpys/corpus.hpp"
#include "rpys/segments.hpp"
#include "rpys/spectrum.hpp"

namespace rpys {

inline constexpr int kSessionFormatVersion = 1;

struct SessionConfig {
  double threshold = kDefaultThreshold;
  int window = 5;
  bool dedup_pairs = true;
  double min_deviation = 0.0;
  int k_max = 6;
  int min_len = 5;
  Scale scale = Scale::Log1p;

  SpectrumOptions spectrum_options() const { return {window, dedup_pairs}; }
  SegmentOptions segment_options() const { return {min_len, scale, Exec::Parallel}; }
  // Throws Error(InvalidThreshold) / Error(InvalidArgument).
  void validate() const;

  bool operator==(const SessionConfig&) const = default;
};

// One step of the session's event log: the version it produced and either a
// curation decision or a configuration change.
struct HistoryEntry {
  std::int64_t version = 0;
  std::variant<MergeDecision, SessionConfig> change;

  bool operator==(const HistoryEntry&) const = default;
};

// Immutable analysis state. Each snapshot shares the corpus and parsed refs
// with its predecessors; advancing yields a new snapshot.
struct SessionSnapshot {
  std::int64_t version = 1;
  std::shared_ptr<const Corpus> corpus;
  std::string corpus_ref;
  std::shared_ptr<const std::vector<ParsedCitedRef>> refs;
  std::shared_ptr<const Partition> partition;
  std::vector<HistoryEntry> history;
  SessionConfig config;

  std::vector<MergeDecision> decisions() const;
};

bool operator==(const SessionSnapshot& a, const SessionSnapshot& b);

// Content hash of the corpus (publications and diagnostics).
std::string corpus_hash(const Corpus& corpus);

// Throws Error(EmptyCorpus) if the corpus has no publications.
SessionSnapshot create_session(Corpus corpus, const SessionConfig& config = {});

// Applies one decision; the input snapshot is untouched.
SessionSnapshot advance(const SessionSnapshot& s, const MergeDecision& d);

// Records a configuration change. A new threshold re-clusters and replays
// every decision; if one no longer applies the change is rejected with the
// decision's error.
SessionSnapshot with_config(const SessionSnapshot& s, const SessionConfig& config);

// Decisions replayed over a fresh auto-clustering of the session's refs.
Partition replay(const SessionSnapshot& s);

std::vector<SpectrumPoint> session_spectrum(const SessionSnapshot& s);

// Fixed 6-decimal rendering, rounding half to even on exact ties.
std::string format_fixed6(double value);

// "rpy,ncr,deviation" rows; a session with no dated refs writes only the header.
std::size_t export_spectrum_csv(const SessionSnapshot& s, std::ostream& out);
// "cluster_id,canonical,rpy,n_cr,perc_yr,perc_all,n_top10,n_top25,n_top50"
// rows sorted by rpy then cluster_id.
std::size_t export_clusters_csv(const SessionSnapshot& s, std::ostream& out);

std::string serialize_session(const SessionSnapshot& s);
// Throws Error(CorruptSession) or Error(UnsupportedVersion).
SessionSnapshot deserialize_session(std::string_view document);

void save(const SessionSnapshot& s, const std::filesystem::path& path);
SessionSnapshot load(const std::filesystem::path& path);

}  // namespace rpys
