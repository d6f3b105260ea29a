#include "rpys/session.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rpys/csv.hpp"
#include "rpys/error.hpp"
#include "rpys/hash.hpp"
#include "rpys/json_io.hpp"

namespace rpys {
namespace {

constexpr std::string_view kFormatName = "rpyslab-session";

json history_to_json(const HistoryEntry& e) {
  if (const auto* d = std::get_if<MergeDecision>(&e.change)) {
    return json{{"version", e.version}, {"kind", "decision"}, {"decision", *d}};
  }
  return json{{"version", e.version}, {"kind", "config"}, {"config", std::get<SessionConfig>(e.change)}};
}

HistoryEntry history_from_json(const json& j) {
  HistoryEntry e;
  j.at("version").get_to(e.version);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "decision") {
    e.change = j.at("decision").get<MergeDecision>();
  } else if (kind == "config") {
    e.change = j.at("config").get<SessionConfig>();
  } else {
    throw Error(ErrorCode::CorruptSession, "unknown history entry kind '" + kind + "'");
  }
  return e;
}

json partition_to_json(const Partition& p) {
  json out = json::array();
  for (const auto& c : p.clusters) {
    json members = json::array();
    for (const auto& m : c.members) members.push_back(m.raw_id);
    out.push_back({{"cluster_id", c.cluster_id}, {"members", std::move(members)}});
  }
  return out;
}

}  // namespace

void SessionConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "threshold must be in (0, 1]");
  }
  if (window < 1 || window % 2 == 0) throw Error(ErrorCode::InvalidArgument, "window must be a positive odd number");
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be at least 1");
  if (min_len < 1) throw Error(ErrorCode::InvalidArgument, "min_len must be at least 1");
}

std::vector<MergeDecision> SessionSnapshot::decisions() const {
  std::vector<MergeDecision> out;
  for (const auto& e : history) {
    if (const auto* d = std::get_if<MergeDecision>(&e.change)) out.push_back(*d);
  }
  return out;
}

bool operator==(const SessionSnapshot& a, const SessionSnapshot& b) {
  return a.version == b.version && a.corpus_ref == b.corpus_ref && a.history == b.history && a.config == b.config &&
         *a.corpus == *b.corpus && *a.refs == *b.refs && *a.partition == *b.partition;
}

std::string corpus_hash(const Corpus& corpus) { return to_hex(fnv1a(json(corpus).dump())); }

SessionSnapshot create_session(Corpus corpus, const SessionConfig& config) {
  config.validate();
  if (corpus.publications.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no publications");
  SessionSnapshot s;
  s.version = 1;
  s.corpus_ref = corpus_hash(corpus);
  s.corpus = std::make_shared<const Corpus>(std::move(corpus));
  s.refs = std::make_shared<const std::vector<ParsedCitedRef>>(parse_corpus_refs(*s.corpus));
  s.partition = std::make_shared<const Partition>(cluster_refs(*s.refs, config.threshold));
  s.config = config;
  return s;
}

SessionSnapshot advance(const SessionSnapshot& s, const MergeDecision& d) {
  SessionSnapshot next = s;
  next.partition = std::make_shared<const Partition>(apply_decision(*s.partition, d));
  next.version = s.version + 1;
  next.history.push_back({next.version, d});
  return next;
}

Partition replay(const SessionSnapshot& s) {
  Partition p = cluster_refs(*s.refs, s.config.threshold);
  for (const auto& e : s.history) {
    if (const auto* d = std::get_if<MergeDecision>(&e.change)) p = apply_decision(p, *d);
  }
  return p;
}

SessionSnapshot with_config(const SessionSnapshot& s, const SessionConfig& config) {
  config.validate();
  SessionSnapshot next = s;
  next.config = config;
  next.version = s.version + 1;
  next.history.push_back({next.version, config});
  if (config.threshold != s.config.threshold) next.partition = std::make_shared<const Partition>(replay(next));
  return next;
}

std::vector<SpectrumPoint> session_spectrum(const SessionSnapshot& s) {
  return compute_spectrum(*s.partition, *s.corpus, s.config.spectrum_options());
}

std::string format_fixed6(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format value");
  std::string out(buf, ptr);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::size_t export_spectrum_csv(const SessionSnapshot& s, std::ostream& out) {
  std::size_t bytes = csv::write_row(out, {"rpy", "ncr", "deviation"});
  std::vector<SpectrumPoint> spectrum;
  try {
    spectrum = session_spectrum(s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyCorpus) throw;
  }
  for (const auto& p : spectrum) {
    bytes += csv::write_row(out, {std::to_string(p.rpy), std::to_string(p.ncr), format_fixed6(p.deviation)});
  }
  return bytes;
}

std::size_t export_clusters_csv(const SessionSnapshot& s, std::ostream& out) {
  std::size_t bytes = csv::write_row(
      out, {"cluster_id", "canonical", "rpy", "n_cr", "perc_yr", "perc_all", "n_top10", "n_top25", "n_top50"});
  std::vector<ClusterIndicators> indicators;
  try {
    indicators = compute_indicators(*s.partition, *s.corpus, s.config.spectrum_options());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyPartition) throw;
  }
  std::sort(indicators.begin(), indicators.end(), [](const ClusterIndicators& a, const ClusterIndicators& b) {
    return a.rpy != b.rpy ? a.rpy < b.rpy : a.cluster_id < b.cluster_id;
  });
  for (const auto& ind : indicators) {
    const RefCluster* c = s.partition->find(ind.cluster_id);
    bytes += csv::write_row(out, {ind.cluster_id, c->canonical().raw, std::to_string(ind.rpy), std::to_string(ind.n_cr),
                                  format_fixed6(ind.perc_yr), format_fixed6(ind.perc_all), std::to_string(ind.n_top10),
                                  std::to_string(ind.n_top25), std::to_string(ind.n_top50)});
  }
  return bytes;
}

std::string serialize_session(const SessionSnapshot& s) {
  json history = json::array();
  for (const auto& e : s.history) history.push_back(history_to_json(e));
  json payload = {{"version", s.version},      {"corpus_ref", s.corpus_ref}, {"config", s.config},
                  {"corpus", *s.corpus},       {"history", std::move(history)},
                  {"partition", partition_to_json(*s.partition)}};
  json doc = {{"format", kFormatName},
              {"format_version", kSessionFormatVersion},
              {"checksum", to_hex(fnv1a(payload.dump()))},
              {"payload", std::move(payload)}};
  return doc.dump(1) + "\n";
}

SessionSnapshot deserialize_session(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptSession, std::string("session file is not valid: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", std::string()) != kFormatName) {
      throw Error(ErrorCode::CorruptSession, "not a session file");
    }
    const int format_version = doc.at("format_version").get<int>();
    if (format_version != kSessionFormatVersion) {
      throw Error(ErrorCode::UnsupportedVersion,
                  "session format version " + std::to_string(format_version) + " is not supported");
    }
    const json& payload = doc.at("payload");
    if (to_hex(fnv1a(payload.dump())) != doc.at("checksum").get<std::string>()) {
      throw Error(ErrorCode::CorruptSession, "session checksum mismatch");
    }
    SessionSnapshot s;
    payload.at("version").get_to(s.version);
    payload.at("corpus_ref").get_to(s.corpus_ref);
    s.config = payload.at("config").get<SessionConfig>();
    auto corpus = payload.at("corpus").get<Corpus>();
    if (corpus_hash(corpus) != s.corpus_ref) throw Error(ErrorCode::CorruptSession, "corpus does not match corpus_ref");
    s.corpus = std::make_shared<const Corpus>(std::move(corpus));
    for (const auto& e : payload.at("history")) s.history.push_back(history_from_json(e));
    if (s.version != 1 + static_cast<std::int64_t>(s.history.size())) {
      throw Error(ErrorCode::CorruptSession, "version does not match history length");
    }
    s.refs = std::make_shared<const std::vector<ParsedCitedRef>>(parse_corpus_refs(*s.corpus));
    // decisions are authoritative; the cached partition only documents the
    // state at save time
    try {
      s.partition = std::make_shared<const Partition>(replay(s));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptSession, std::string("decision replay failed: ") + e.what());
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptSession, std::string("malformed session document: ") + e.what());
  }
}

void save(const SessionSnapshot& s, const std::filesystem::path& path) {
  const std::string doc = serialize_session(s);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out.write(doc.data(), static_cast<std::streamsize>(doc.size()));
    if (!out) throw Error(ErrorCode::Io, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot replace " + path.string() + ": " + ec.message());
}

SessionSnapshot load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open session file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_session(buf.str());
}

}  // namespace rpys
