#include "rpys/service.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <regex>
#include <sstream>

#include "rpys/error.hpp"
#include "rpys/json_io.hpp"

namespace rpys {
namespace {

class ApiError : public std::runtime_error {
 public:
  ApiError(ApiErrorCode code, const std::string& message, json detail = nullptr)
      : std::runtime_error(message), code(code), detail(std::move(detail)) {}
  ApiErrorCode code;
  json detail;
};

ApiErrorCode classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCluster: return ApiErrorCode::NotFound;
    case ErrorCode::StaleVersion: return ApiErrorCode::Conflict;
    case ErrorCode::Io:
    case ErrorCode::CorruptSession:
    case ErrorCode::UnsupportedVersion: return ApiErrorCode::Internal;
    default: return ApiErrorCode::BadRequest;
  }
}

ApiResponse json_response(int status, const json& body) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump();
  return r;
}

ApiResponse error_response(ApiErrorCode code, const std::string& message, const json& detail = nullptr) {
  json body = {{"code", to_string(code)}, {"message", message}};
  if (!detail.is_null()) body["detail"] = detail;
  return json_response(http_status(code), body);
}

template <typename T>
std::optional<T> query_number(const ApiRequest& req, const std::string& key) {
  auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) return std::nullopt;
  T value{};
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ApiError(ApiErrorCode::BadRequest, "query parameter '" + key + "' is not a valid number");
  }
  return value;
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ApiError(ApiErrorCode::BadRequest, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_of(const SessionSnapshot& s, bool clusters) {
  std::ostringstream out;
  if (clusters) {
    export_clusters_csv(s, out);
  } else {
    export_spectrum_csv(s, out);
  }
  return out.str();
}

json indicators_json(const ClusterIndicators& ind, const RefCluster& c) {
  json j = ind;
  j["canonical"] = c.canonical().raw;
  return j;
}

}  // namespace

std::string_view to_string(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::BadRequest: return "BadRequest";
    case ApiErrorCode::NotFound: return "NotFound";
    case ApiErrorCode::Conflict: return "Conflict";
    case ApiErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

int http_status(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::BadRequest: return 400;
    case ApiErrorCode::NotFound: return 404;
    case ApiErrorCode::Conflict: return 409;
    case ApiErrorCode::Internal: return 500;
  }
  return 500;
}

ApiService::ApiService(ServiceOptions options) : options_(std::move(options)) {}

std::string ApiService::add_dataset(SessionSnapshot snapshot, std::optional<std::filesystem::path> backing_file) {
  auto ds = std::make_shared<Dataset>();
  ds->current = std::make_shared<const SessionSnapshot>(std::move(snapshot));
  const std::string id = "ds" + std::to_string(next_id_++);
  if (!backing_file && options_.data_dir) backing_file = *options_.data_dir / (id + ".session.json");
  ds->file = std::move(backing_file);
  if (ds->file) save(*ds->current, *ds->file);
  std::unique_lock lock(datasets_mutex_);
  datasets_.emplace(id, std::move(ds));
  return id;
}

std::shared_ptr<ApiService::Dataset> ApiService::find(const std::string& id) const {
  std::shared_lock lock(datasets_mutex_);
  auto it = datasets_.find(id);
  return it == datasets_.end() ? nullptr : it->second;
}

std::shared_ptr<const SessionSnapshot> ApiService::snapshot(const std::string& dataset_id) const {
  auto ds = find(dataset_id);
  return ds ? ds->get() : nullptr;
}

ApiResponse ApiService::handle(const ApiRequest& request) {
  ApiResponse response;
  try {
    response = route(request);
  } catch (const ApiError& e) {
    response = error_response(e.code, e.what(), e.detail);
  } catch (const Error& e) {
    response = error_response(classify(e.code()), e.what(), json{{"error", to_string(e.code())}});
  } catch (const json::exception& e) {
    response = error_response(ApiErrorCode::BadRequest, std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    response = error_response(ApiErrorCode::Internal, e.what());
  }
  if (!options_.cors_origin.empty()) {
    response.headers["Access-Control-Allow-Origin"] = options_.cors_origin;
    response.headers["Access-Control-Expose-Headers"] = "X-Snapshot-Version";
  }
  return response;
}

ApiResponse ApiService::create_dataset(const ApiRequest& request) {
  const json body = parse_body(request.body);
  if (!body.is_object() || !body.contains("content") || !body["content"].is_string()) {
    throw ApiError(ApiErrorCode::BadRequest, "body must be an object with a string 'content'");
  }
  const std::string format = body.value("format", std::string("auto"));
  std::optional<CorpusFormat> fmt;
  if (format != "auto") {
    fmt = corpus_format_from_string(format);
    if (!fmt) throw ApiError(ApiErrorCode::BadRequest, "format must be auto, wos or scopus");
  }
  SessionConfig config = options_.default_config;
  if (body.contains("config")) config = body["config"].get<SessionConfig>();
  Corpus corpus = parse_corpus(body["content"].get_ref<const std::string&>(), fmt);
  const std::size_t n_pubs = corpus.publications.size();
  const std::size_t n_refs = corpus.ref_count();
  const std::size_t n_rejected = corpus.diagnostics.size();
  const std::string id = add_dataset(create_session(std::move(corpus), config));
  ApiResponse r = json_response(201, {{"dataset_id", id},
                                      {"version", 1},
                                      {"n_publications", n_pubs},
                                      {"n_refs", n_refs},
                                      {"n_rejected", n_rejected}});
  r.headers["X-Snapshot-Version"] = "1";
  return r;
}

ApiResponse ApiService::post_decision(Dataset& ds, const ApiRequest& request) {
  const json body = parse_body(request.body);
  if (!body.is_object()) throw ApiError(ApiErrorCode::BadRequest, "decision body must be an object");
  MergeDecision decision = body.get<MergeDecision>();
  if (decision.timestamp.empty()) decision.timestamp = utc_timestamp();
  std::optional<std::int64_t> expected;
  if (body.contains("expected_version") && !body["expected_version"].is_null()) {
    expected = body["expected_version"].get<std::int64_t>();
  }

  std::lock_guard write_lock(ds.write_mutex);
  const auto current = ds.get();
  if (expected && *expected != current->version) {
    throw ApiError(ApiErrorCode::Conflict,
                   "decision pinned to version " + std::to_string(*expected) + " but the dataset is at version " +
                       std::to_string(current->version),
                   json{{"current_version", current->version}});
  }
  auto next = std::make_shared<const SessionSnapshot>(advance(*current, decision));
  if (ds.file) save(*next, *ds.file);
  {
    std::lock_guard lock(ds.read_mutex);
    ds.current = next;
  }
  ApiResponse r = json_response(200, {{"version", next->version}});
  r.headers["X-Snapshot-Version"] = std::to_string(next->version);
  return r;
}

ApiResponse ApiService::route(const ApiRequest& request) {
  static const std::regex kDatasetPath(R"(^/datasets/([^/]+)(/.*)?$)");
  static const std::regex kYearClusters(R"(^/years/(-?[0-9]+)/clusters$)");
  static const std::regex kCluster(R"(^/clusters/([^/]+)$)");

  if (request.method == "OPTIONS") {
    ApiResponse r;
    r.status = 204;
    r.content_type.clear();
    r.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
    r.headers["Access-Control-Allow-Headers"] = "Content-Type";
    return r;
  }
  if (request.path == "/datasets") {
    if (request.method == "POST") return create_dataset(request);
    throw ApiError(ApiErrorCode::NotFound, "no route for " + request.method + " " + request.path);
  }

  std::smatch m;
  if (!std::regex_match(request.path, m, kDatasetPath)) {
    throw ApiError(ApiErrorCode::NotFound, "no route for " + request.method + " " + request.path);
  }
  const std::string id = m[1];
  const std::string sub = m[2];
  auto ds = find(id);
  if (!ds) throw ApiError(ApiErrorCode::NotFound, "unknown dataset '" + id + "'");

  if (request.method == "POST" && sub == "/decisions") return post_decision(*ds, request);
  if (request.method != "GET") throw ApiError(ApiErrorCode::NotFound, "no route for " + request.method + " " + request.path);

  const auto snap = ds->get();
  const SessionSnapshot& s = *snap;
  const auto opts = s.config.spectrum_options();
  ApiResponse response;
  std::smatch sm;

  if (sub == "/spectrum") {
    const auto min_rpy = query_number<int>(request, "min_rpy");
    const auto max_rpy = query_number<int>(request, "max_rpy");
    json points = json::array();
    for (const auto& p : session_spectrum(s)) {
      if ((min_rpy && p.rpy < *min_rpy) || (max_rpy && p.rpy > *max_rpy)) continue;
      points.push_back(p);
    }
    response = json_response(200, {{"version", s.version}, {"points", std::move(points)}});
  } else if (sub == "/peaks") {
    const double min_dev = query_number<double>(request, "min_deviation").value_or(s.config.min_deviation);
    const auto max_rpy = query_number<int>(request, "max_rpy");
    const int top = query_number<int>(request, "top").value_or(5);
    if (top < 1) throw ApiError(ApiErrorCode::BadRequest, "top must be at least 1");
    const auto spectrum = session_spectrum(s);
    auto peaks = detect_peaks(spectrum, min_dev, max_rpy);
    attach_top_clusters(peaks, static_cast<std::size_t>(top), *s.partition, *s.corpus, opts);
    response = json_response(200, {{"version", s.version}, {"peaks", peaks}});
  } else if (std::regex_match(sub, sm, kYearClusters)) {
    const int rpy = std::stoi(sm[1]);
    const int top = query_number<int>(request, "top").value_or(10);
    if (top < 1) throw ApiError(ApiErrorCode::BadRequest, "top must be at least 1");
    const auto ranked = top_clusters_for_year(rpy, static_cast<std::size_t>(top), *s.partition, *s.corpus, opts);
    json clusters = json::array();
    if (!ranked.empty()) {
      const auto indicators = compute_indicators(*s.partition, *s.corpus, opts);
      for (const auto& rc : ranked) {
        auto it = std::find_if(indicators.begin(), indicators.end(),
                               [&](const ClusterIndicators& i) { return i.cluster_id == rc.cluster_id; });
        clusters.push_back(indicators_json(*it, *s.partition->find(rc.cluster_id)));
      }
    }
    response = json_response(200, {{"version", s.version}, {"rpy", rpy}, {"clusters", std::move(clusters)}});
  } else if (std::regex_match(sub, sm, kCluster)) {
    const std::string cid = sm[1];
    const RefCluster* c = s.partition->find(cid);
    if (!c) throw ApiError(ApiErrorCode::NotFound, "unknown cluster '" + cid + "'");
    json profile = json::object();
    for (const auto& [year, n] : citing_year_profile(*c, *s.corpus, opts.dedup_pairs)) profile[std::to_string(year)] = n;
    response = json_response(200, {{"version", s.version},
                                   {"cluster_id", c->cluster_id},
                                   {"rpy", c->rpy ? json(*c->rpy) : json(nullptr)},
                                   {"canonical", c->canonical().raw},
                                   {"n_cr", cluster_ncr(*c, opts.dedup_pairs)},
                                   {"members", c->members},
                                   {"citing_year_profile", std::move(profile)}});
  } else if (sub == "/segments") {
    const int k_max = query_number<int>(request, "k_max").value_or(s.config.k_max);
    SegmentOptions seg = s.config.segment_options();
    seg.min_len = query_number<int>(request, "min_len").value_or(seg.min_len);
    if (auto it = request.query.find("scale"); it != request.query.end()) {
      const auto scale = scale_from_string(it->second);
      if (!scale) throw ApiError(ApiErrorCode::BadRequest, "scale must be linear or log1p");
      seg.scale = *scale;
    }
    const auto spectrum = session_spectrum(s);
    const SegmentFit fit = select_k(series_from_spectrum(spectrum), k_max, seg);
    json body = fit;
    body["version"] = s.version;
    body["landmarks"] = segment_landmarks(fit, *s.partition, *s.corpus, 3, opts);
    response = json_response(200, body);
  } else if (sub == "/export/spectrum.csv" || sub == "/export/clusters.csv") {
    response.content_type = "text/csv; charset=utf-8";
    response.body = csv_of(s, sub == "/export/clusters.csv");
  } else if (sub == "/versions") {
    json history = json::array();
    history.push_back({{"version", 1}, {"kind", "create"}});
    for (const auto& e : s.history) {
      if (const auto* d = std::get_if<MergeDecision>(&e.change)) {
        history.push_back({{"version", e.version}, {"kind", "decision"}, {"decision", *d}});
      } else {
        history.push_back({{"version", e.version}, {"kind", "config"}, {"config", std::get<SessionConfig>(e.change)}});
      }
    }
    response = json_response(200, {{"version", s.version}, {"history", std::move(history)}});
  } else {
    throw ApiError(ApiErrorCode::NotFound, "no route for GET " + request.path);
  }
  response.headers["X-Snapshot-Version"] = std::to_string(s.version);
  return response;
}

}  // namespace rpys
