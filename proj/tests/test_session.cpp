#include <doctest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rpys/error.hpp"
#include "rpys/hash.hpp"
#include "rpys/json_io.hpp"
#include "rpys/session.hpp"

using namespace rpys;
namespace fs = std::filesystem;

namespace {

SessionSnapshot fixture_session(const std::string& name = "sample_wos.txt") {
  return create_session(parse_corpus(oracle::read_fixture(name)));
}

std::string spectrum_csv(const SessionSnapshot& s) {
  std::ostringstream out;
  export_spectrum_csv(s, out);
  return out.str();
}

std::string clusters_csv(const SessionSnapshot& s) {
  std::ostringstream out;
  export_clusters_csv(s, out);
  return out.str();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

// Picks a random valid decision against the snapshot's partition.
MergeDecision random_decision(std::mt19937_64& rng, const Partition& p, int step) {
  const auto& a = p.clusters[rng() % p.clusters.size()];
  if (rng() % 3 != 0 || a.members.size() < 2) {
    const auto& b = p.clusters[rng() % p.clusters.size()];
    return {DecisionKind::Merge, {a.cluster_id, b.cluster_id}, {}, "2026-01-01T00:00:" + std::to_string(step), "m"};
  }
  return {DecisionKind::Split, {a.cluster_id}, {a.members.back().raw_id}, "t" + std::to_string(step), std::nullopt};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("rpys_session_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("fresh session") {
  const auto s = fixture_session();
  CHECK(s.version == 1);
  CHECK(s.history.empty());
  CHECK(s.corpus->publications.size() == 3);
  CHECK(s.refs->size() == 12);
  CHECK(*s.partition == cluster_refs(*s.refs, s.config.threshold));
  CHECK(fixture_session() == s);
  CHECK(s.corpus_ref == corpus_hash(*s.corpus));
}

TEST_CASE("empty corpus and corpus without refs") {
  CHECK(code_of([] { create_session(Corpus{}); }) == ErrorCode::EmptyCorpus);
  const auto s = create_session(parse_wos_export("PT J\nPY 2001\nTI none\nER\n"));
  CHECK(code_of([&] { session_spectrum(s); }) == ErrorCode::EmptyCorpus);
  CHECK(spectrum_csv(s) == "rpy,ncr,deviation\n");
}

TEST_CASE("advance applies one decision and leaves its input alone") {
  const auto s = fixture_session();
  const std::string before = serialize_session(s);
  const auto& marx14 = s.partition->clusters;
  std::vector<std::string> marx;
  for (const auto& c : marx14) {
    if (c.canonical().first_author == "MARX W") marx.push_back(c.cluster_id);
  }
  REQUIRE(marx.size() == 2);
  const auto next = advance(s, {DecisionKind::Merge, marx, {}, "t", "same paper"});
  CHECK(next.version == 2);
  CHECK(next.decisions().size() == 1);
  CHECK(next.partition->clusters.size() == s.partition->clusters.size() - 1);
  CHECK(serialize_session(s) == before);

  const auto spec = session_spectrum(next);
  auto at = [&](int y) { return spec[static_cast<std::size_t>(y - spec.front().rpy)].ncr; };
  CHECK(at(2014) == 3);
  CHECK(at(2015) == 0);

  CHECK(code_of([&] { advance(s, {DecisionKind::Merge, {"c0"}, {}, "t", {}}); }) == ErrorCode::UnknownCluster);
  CHECK(s.version == 1);
}

TEST_CASE("merge then split returns to the version-1 partition") {
  const auto s = fixture_session();
  const auto& c1 = s.partition->clusters[0];
  const auto& c2 = s.partition->clusters[1];
  const auto merged = advance(s, {DecisionKind::Merge, {c1.cluster_id, c2.cluster_id}, {}, "t", {}});
  std::vector<RawId> subset;
  for (const auto& m : c2.members) subset.push_back(m.raw_id);
  std::string merged_id;
  for (const auto& c : merged.partition->clusters) {
    if (c.members.size() == c1.members.size() + c2.members.size()) {
      for (const auto& m : c.members) {
        if (m.raw_id == c1.members[0].raw_id) merged_id = c.cluster_id;
      }
    }
  }
  REQUIRE_FALSE(merged_id.empty());
  const auto back = advance(merged, {DecisionKind::Split, {merged_id}, subset, "t", {}});
  CHECK(*back.partition == *s.partition);
  CHECK(back.version == 3);
}

TEST_CASE("property: replay equals the incremental partition") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = fixture_session();
    for (int step = 0; step < 10; ++step) s = advance(s, random_decision(rng, *s.partition, step));
    CHECK(s.version == 11);
    CHECK(replay(s) == *s.partition);
    CHECK(*deserialize_session(serialize_session(s)).partition == *s.partition);
  }
}

TEST_CASE("config change is a version and replays decisions") {
  auto s = fixture_session();
  const auto& c = s.partition->clusters;
  s = advance(s, {DecisionKind::Merge, {c[0].cluster_id, c[1].cluster_id}, {}, "t", {}});
  SessionConfig cfg = s.config;
  cfg.window = 3;
  const auto w = with_config(s, cfg);
  CHECK(w.version == 3);
  CHECK(*w.partition == *s.partition);
  CHECK(w.decisions().size() == 1);

  cfg.threshold = 0.9;
  const auto t = with_config(w, cfg);
  CHECK(t.version == 4);
  CHECK(replay(t) == *t.partition);

  cfg.window = 4;
  CHECK(code_of([&] { with_config(t, cfg); }) == ErrorCode::InvalidArgument);
  cfg.window = 5;
  cfg.threshold = 0.0;
  CHECK(code_of([&] { with_config(t, cfg); }) == ErrorCode::InvalidThreshold);
}

TEST_CASE("save and load round trip") {
  TempDir dir;
  std::mt19937_64 rng(3);
  auto s = fixture_session();
  const auto file = dir.path / "fresh.json";
  save(s, file);
  CHECK(load(file) == s);
  CHECK_FALSE(fs::exists(dir.path / "fresh.json.tmp"));

  for (int i = 0; i < 3; ++i) s = advance(s, random_decision(rng, *s.partition, i));
  save(s, file);
  const auto loaded = load(file);
  CHECK(loaded == s);
  CHECK(loaded.decisions() == s.decisions());
  CHECK(loaded.version == 4);
}

TEST_CASE("corrupt and unsupported session files") {
  const auto s = advance(fixture_session(), {DecisionKind::Merge, {fixture_session().partition->clusters[0].cluster_id}, {}, "t", {}});
  const std::string doc = serialize_session(s);

  CHECK(code_of([&] { deserialize_session(doc.substr(0, doc.size() / 2)); }) == ErrorCode::CorruptSession);
  CHECK(code_of([&] { deserialize_session(""); }) == ErrorCode::CorruptSession);
  CHECK(code_of([&] { deserialize_session("{\"format\":\"other\"}"); }) == ErrorCode::CorruptSession);

  auto j = nlohmann::json::parse(doc);
  auto tampered = j;
  tampered["payload"]["version"] = 7;
  CHECK(code_of([&] { deserialize_session(tampered.dump()); }) == ErrorCode::CorruptSession);

  auto future = j;
  future["format_version"] = 2;
  CHECK(code_of([&] { deserialize_session(future.dump()); }) == ErrorCode::UnsupportedVersion);

  TempDir dir;
  CHECK(code_of([&] { load(dir.path / "missing.json"); }) == ErrorCode::Io);
}

TEST_CASE("spectrum CSV for the spike fixture") {
  const auto s = fixture_session("spike_wos.txt");
  CHECK(spectrum_csv(s) ==
        "rpy,ncr,deviation\n"
        "1960,1,0.000000\n"
        "1961,1,0.000000\n"
        "1962,5,4.000000\n"
        "1963,1,0.000000\n"
        "1964,1,0.000000\n");
  std::ostringstream out;
  const std::size_t n = export_spectrum_csv(s, out);
  CHECK(n == out.str().size());
}

TEST_CASE("fixed six decimals") {
  CHECK(format_fixed6(0.0) == "0.000000");
  CHECK(format_fixed6(-0.0) == "0.000000");
  CHECK(format_fixed6(2.5) == "2.500000");
  CHECK(format_fixed6(-1.5) == "-1.500000");
  CHECK(format_fixed6(100.0 / 3.0) == "33.333333");
  CHECK(format_fixed6(0.0000005) == "0.000000");  // below the exact tie: binary value is slightly under
  CHECK(format_fixed6(0.0000015) == "0.000002");
  CHECK(format_fixed6(0.0078125) == "0.007812");  // exact binary tie goes to even
  CHECK(format_fixed6(0.0234375) == "0.023438");
  CHECK(format_fixed6(1e-9) == "0.000000");
  CHECK(format_fixed6(-1e-9) == "0.000000");
}

TEST_CASE("clusters CSV layout and quoting") {
  const auto s = fixture_session();
  const std::string csv = clusters_csv(s);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "cluster_id,canonical,rpy,n_cr,perc_yr,perc_all,n_top10,n_top25,n_top50");
  std::size_t rows = 0;
  int prev_year = 0;
  for (std::string line; std::getline(in, line); ++rows) {
    CHECK(line.front() == 'c');
    CHECK(line.find("\"") != std::string::npos);  // canonical strings contain commas
    const auto tail = line.substr(line.rfind('"') + 2);
    const int year = std::stoi(tail.substr(0, tail.find(',')));
    CHECK(year >= prev_year);
    prev_year = year;
  }
  CHECK(rows == s.partition->clusters.size());
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("exports are byte-identical across runs") {
  std::mt19937_64 a(5), b(5);
  auto s1 = fixture_session();
  auto s2 = fixture_session();
  for (int i = 0; i < 4; ++i) {
    s1 = advance(s1, random_decision(a, *s1.partition, i));
    s2 = advance(s2, random_decision(b, *s2.partition, i));
  }
  CHECK(spectrum_csv(s1) == spectrum_csv(s2));
  CHECK(clusters_csv(s1) == clusters_csv(s2));
  CHECK(clusters_csv(s1) == clusters_csv(deserialize_session(serialize_session(s1))));
}

TEST_CASE("write failure surfaces") {
  const auto s = fixture_session();
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  CHECK(code_of([&] { export_spectrum_csv(s, out); }) == ErrorCode::Io);
}
