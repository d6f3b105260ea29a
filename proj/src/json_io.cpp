#include "rpys/json_io.hpp"

#include "rpys/error.hpp"

namespace rpys {

void to_json(json& j, const RawId& id) { j = json{{"citing_id", id.citing_id}, {"position", id.position}}; }

void from_json(const json& j, RawId& id) {
  j.at("citing_id").get_to(id.citing_id);
  j.at("position").get_to(id.position);
}

void to_json(json& j, const Corpus& c) {
  json pubs = json::array();
  for (const auto& p : c.publications) {
    json refs = json::array();
    for (const auto& r : p.raw_refs) refs.push_back(r.raw);
    pubs.push_back({{"id", p.id},
                    {"title", p.title},
                    {"authors", p.authors},
                    {"pub_year", p.pub_year},
                    {"source_title", p.source_title},
                    {"doi", p.doi ? json(*p.doi) : json(nullptr)},
                    {"raw_refs", std::move(refs)}});
  }
  json diags = json::array();
  for (const auto& d : c.diagnostics) diags.push_back({{"line", d.line}, {"message", d.message}});
  j = json{{"format", to_string(c.format)}, {"publications", std::move(pubs)}, {"diagnostics", std::move(diags)}};
}

void from_json(const json& j, Corpus& c) {
  c = Corpus{};
  const auto format = corpus_format_from_string(j.at("format").get<std::string>());
  if (!format) throw Error(ErrorCode::CorruptSession, "unknown corpus format");
  c.format = *format;
  for (const auto& pj : j.at("publications")) {
    Publication p;
    pj.at("id").get_to(p.id);
    pj.at("title").get_to(p.title);
    pj.at("authors").get_to(p.authors);
    pj.at("pub_year").get_to(p.pub_year);
    pj.at("source_title").get_to(p.source_title);
    if (!pj.at("doi").is_null()) p.doi = pj.at("doi").get<std::string>();
    for (const auto& r : pj.at("raw_refs")) p.raw_refs.push_back({r.get<std::string>(), p.id, p.raw_refs.size()});
    c.publications.push_back(std::move(p));
  }
  for (const auto& d : j.at("diagnostics")) {
    c.diagnostics.push_back({d.at("line").get<std::size_t>(), d.at("message").get<std::string>()});
  }
}

namespace {
json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
}  // namespace

void to_json(json& j, const ParsedCitedRef& r) {
  j = json{{"citing_id", r.raw_id.citing_id},
           {"position", r.raw_id.position},
           {"raw", r.raw},
           {"first_author", r.first_author},
           {"rpy", r.rpy ? json(*r.rpy) : json(nullptr)},
           {"source", r.source.empty() ? json(nullptr) : json(r.source)},
           {"volume", optional_json(r.volume)},
           {"page", optional_json(r.page)},
           {"doi", optional_json(r.doi)}};
}

void to_json(json& j, const MergeDecision& d) {
  j = json{{"kind", d.kind == DecisionKind::Merge ? "merge" : "split"},
           {"targets", d.targets},
           {"timestamp", d.timestamp},
           {"note", optional_json(d.note)}};
  if (d.kind == DecisionKind::Split) j["subset"] = d.subset;
}

void from_json(const json& j, MergeDecision& d) {
  d = MergeDecision{};
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "merge") {
    d.kind = DecisionKind::Merge;
  } else if (kind == "split") {
    d.kind = DecisionKind::Split;
    j.at("subset").get_to(d.subset);
  } else {
    throw Error(ErrorCode::InvalidDecision, "decision kind must be 'merge' or 'split'");
  }
  j.at("targets").get_to(d.targets);
  if (j.contains("timestamp")) j.at("timestamp").get_to(d.timestamp);
  if (j.contains("note") && !j.at("note").is_null()) d.note = j.at("note").get<std::string>();
}

void to_json(json& j, const SessionConfig& c) {
  j = json{{"threshold", c.threshold}, {"window", c.window},   {"dedup_pairs", c.dedup_pairs},
           {"min_deviation", c.min_deviation}, {"k_max", c.k_max}, {"min_len", c.min_len},
           {"scale", to_string(c.scale)}};
}

void from_json(const json& j, SessionConfig& c) {
  c = SessionConfig{};
  if (j.contains("threshold")) j.at("threshold").get_to(c.threshold);
  if (j.contains("window")) j.at("window").get_to(c.window);
  if (j.contains("dedup_pairs")) j.at("dedup_pairs").get_to(c.dedup_pairs);
  if (j.contains("min_deviation")) j.at("min_deviation").get_to(c.min_deviation);
  if (j.contains("k_max")) j.at("k_max").get_to(c.k_max);
  if (j.contains("min_len")) j.at("min_len").get_to(c.min_len);
  if (j.contains("scale")) {
    const auto s = scale_from_string(j.at("scale").get<std::string>());
    if (!s) throw Error(ErrorCode::InvalidArgument, "scale must be 'linear' or 'log1p'");
    c.scale = *s;
  }
}

void to_json(json& j, const SpectrumPoint& p) { j = json{{"rpy", p.rpy}, {"ncr", p.ncr}, {"deviation", p.deviation}}; }

void to_json(json& j, const RankedCluster& r) {
  j = json{{"cluster_id", r.cluster_id}, {"n_cr", r.n_cr}, {"canonical", r.canonical}};
}

void to_json(json& j, const Peak& p) {
  j = json{{"rpy", p.rpy}, {"deviation", p.deviation}, {"ncr", p.ncr}, {"top_clusters", p.top_clusters}};
}

void to_json(json& j, const ClusterIndicators& i) {
  json profile = json::object();
  for (const auto& [year, n] : i.citing_year_profile) profile[std::to_string(year)] = n;
  j = json{{"cluster_id", i.cluster_id}, {"rpy", i.rpy},         {"n_cr", i.n_cr},
           {"perc_yr", i.perc_yr},       {"perc_all", i.perc_all}, {"n_top10", i.n_top10},
           {"n_top25", i.n_top25},       {"n_top50", i.n_top50},   {"citing_year_profile", std::move(profile)}};
}

void to_json(json& j, const Segment& s) {
  j = json{{"start_rpy", s.start_rpy}, {"end_rpy", s.end_rpy}, {"slope", s.slope},
           {"intercept", s.intercept}, {"sse", s.sse}};
}

void to_json(json& j, const SegmentFit& f) {
  j = json{{"segments", f.segments}, {"k", f.k}, {"total_sse", f.total_sse}, {"bic", f.bic},
           {"scale", to_string(f.scale)}};
}

}  // namespace rpys
