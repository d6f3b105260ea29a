#include "rpys/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rpys/error.hpp"
#include "rpys/json_io.hpp"
#include "rpys/service.hpp"
#include "rpys/session.hpp"

namespace rpys {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SessionConfig read_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    return json::parse(read_file(path)).get<SessionConfig>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config file " + path + ": " + e.what());
  }
}

struct Options {
  std::string config_file;
  std::string format = "auto";
  std::string in;
  std::string session;
  std::string csv;
  std::optional<double> min_deviation;
  std::optional<int> max_rpy;
  std::optional<int> k_max;
  std::optional<int> min_len;
  std::optional<std::string> scale;
  int rpy = 0;
  int top = 10;
  int peak_top = 1;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string cors_origin;
};

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  std::optional<CorpusFormat> format;
  if (o.format != "auto") format = corpus_format_from_string(o.format);
  Corpus corpus = parse_corpus(read_file(o.in), format);
  for (const auto& d : corpus.diagnostics) err << o.in << ":" << d.line << ": rejected: " << d.message << "\n";
  const std::size_t pubs = corpus.publications.size();
  const std::size_t refs = corpus.ref_count();
  const std::size_t rejected = corpus.diagnostics.size();
  const std::string fmt(to_string(corpus.format));
  const SessionSnapshot s = create_session(std::move(corpus), read_config(o.config_file));
  save(s, o.session);
  out << "format\t" << fmt << "\npublications\t" << pubs << "\nrefs\t" << refs << "\nrejected\t" << rejected
      << "\nclusters\t" << s.partition->clusters.size() << "\n";
  return kExitOk;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
  const SessionSnapshot s = load(o.session);
  if (o.csv.empty()) {
    export_spectrum_csv(s, out);
    return kExitOk;
  }
  std::ofstream file(o.csv, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot open " + o.csv + " for writing");
  export_spectrum_csv(s, file);
  return kExitOk;
}

int cmd_peaks(const Options& o, std::ostream& out) {
  const SessionSnapshot s = load(o.session);
  const auto spectrum = session_spectrum(s);
  auto peaks = detect_peaks(spectrum, o.min_deviation.value_or(s.config.min_deviation), o.max_rpy);
  attach_top_clusters(peaks, static_cast<std::size_t>(o.peak_top), *s.partition, *s.corpus,
                      s.config.spectrum_options());
  for (const auto& p : peaks) {
    out << p.rpy << '\t' << p.ncr << '\t' << format_fixed6(p.deviation);
    for (const auto& c : p.top_clusters) out << '\t' << c.n_cr << ' ' << c.canonical;
    out << '\n';
  }
  return kExitOk;
}

int cmd_segments(const Options& o, std::ostream& out) {
  const SessionSnapshot s = load(o.session);
  SegmentOptions seg = s.config.segment_options();
  if (o.min_len) seg.min_len = *o.min_len;
  if (o.scale) seg.scale = *scale_from_string(*o.scale);
  const auto spectrum = session_spectrum(s);
  const SegmentFit fit = select_k(series_from_spectrum(spectrum), o.k_max.value_or(s.config.k_max), seg);
  const auto landmarks = segment_landmarks(fit, *s.partition, *s.corpus, 1, s.config.spectrum_options());
  out << "k\t" << fit.k << "\tbic\t" << format_fixed6(fit.bic) << "\ttotal_sse\t" << format_fixed6(fit.total_sse)
      << "\tscale\t" << to_string(fit.scale) << '\n';
  for (std::size_t i = 0; i < fit.segments.size(); ++i) {
    const auto& seg_i = fit.segments[i];
    out << seg_i.start_rpy << '\t' << seg_i.end_rpy << '\t' << format_fixed6(seg_i.slope) << '\t'
        << format_fixed6(seg_i.intercept) << '\t' << format_fixed6(seg_i.sse);
    if (!landmarks[i].empty()) out << '\t' << landmarks[i].front().n_cr << ' ' << landmarks[i].front().canonical;
    out << '\n';
  }
  return kExitOk;
}

int cmd_clusters(const Options& o, std::ostream& out) {
  const SessionSnapshot s = load(o.session);
  const auto opts = s.config.spectrum_options();
  const auto ranked = top_clusters_for_year(o.rpy, static_cast<std::size_t>(o.top), *s.partition, *s.corpus, opts);
  if (ranked.empty()) return kExitOk;
  const auto indicators = compute_indicators(*s.partition, *s.corpus, opts);
  for (const auto& rc : ranked) {
    auto it = std::find_if(indicators.begin(), indicators.end(),
                           [&](const ClusterIndicators& i) { return i.cluster_id == rc.cluster_id; });
    out << rc.cluster_id << '\t' << rc.n_cr << '\t' << format_fixed6(it->perc_yr) << '\t'
        << format_fixed6(it->perc_all) << '\t' << rc.canonical << '\n';
  }
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& err) {
  int port = o.port;
  if (const char* env = std::getenv("RPYS_LAB_PORT"); env && *env) {
    try {
      port = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, std::string("RPYS_LAB_PORT is not a port number: ") + env);
    }
  }
  ServiceOptions options;
  options.cors_origin = o.cors_origin;
  const std::filesystem::path session_path(o.session);
  options.data_dir = session_path.has_parent_path() ? session_path.parent_path() : std::filesystem::path(".");
  SessionSnapshot s = load(session_path);
  options.default_config = s.config;
  ApiService service(options);
  const std::string id = service.add_dataset(std::move(s), session_path);
  err << "serving dataset " << id << " from " << o.session << " on http://" << o.host << ":" << port << "\n";
  HttpServer server(service);
  server.listen_blocking(o.host, port);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference publication year spectroscopy workbench", "rpyslab"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_file, "JSON file with analysis settings")->check(CLI::ExistingFile);

  auto* ingest = app.add_subcommand("ingest", "Parse a bibliographic export into a new session file");
  ingest->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"auto", "wos", "scopus"}));
  ingest->add_option("--in", o.in, "Export file")->required();
  ingest->add_option("--session", o.session, "Session file to write")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Write the RPYS spectrum as CSV");
  spectrum->add_option("--session", o.session, "Session file")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--csv", o.csv, "Output file (default: standard output)");

  auto* peaks = app.add_subcommand("peaks", "List peak years: rpy, ncr, deviation, top clusters");
  peaks->add_option("--session", o.session, "Session file")->required()->check(CLI::ExistingFile);
  peaks->add_option("--min-deviation", o.min_deviation, "Minimum median deviation");
  peaks->add_option("--max-rpy", o.max_rpy, "Ignore years after this one");
  peaks->add_option("--top", o.peak_top, "Clusters listed per peak")->check(CLI::PositiveNumber);

  auto* segments = app.add_subcommand("segments", "Fit growth segments to the spectrum");
  segments->add_option("--session", o.session, "Session file")->required()->check(CLI::ExistingFile);
  segments->add_option("--k-max", o.k_max, "Largest segment count considered")->check(CLI::PositiveNumber);
  segments->add_option("--min-len", o.min_len, "Minimum segment length in years")->check(CLI::PositiveNumber);
  segments->add_option("--scale", o.scale, "Fitting scale")->check(CLI::IsMember({"linear", "log1p"}));

  auto* clusters = app.add_subcommand("clusters", "Rank the clusters of one referenced year");
  clusters->add_option("--session", o.session, "Session file")->required()->check(CLI::ExistingFile);
  clusters->add_option("--rpy", o.rpy, "Referenced publication year")->required();
  clusters->add_option("--top", o.top, "Number of clusters")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve the JSON API for a session");
  serve->add_option("--session", o.session, "Session file")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", o.port, "Port (RPYS_LAB_PORT overrides)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--cors-origin", o.cors_origin, "Origin allowed to call the API from a browser");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(o, out, err);
    if (*spectrum) return cmd_spectrum(o, out);
    if (*peaks) return cmd_peaks(o, out);
    if (*segments) return cmd_segments(o, out);
    if (*clusters) return cmd_clusters(o, out);
    if (*serve) return cmd_serve(o, err);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace rpys
