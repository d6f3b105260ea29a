#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rpys/error.hpp"
#include "rpys/spectrum.hpp"

using namespace rpys;

namespace {

// Median of the truncated window around index i, by sorting a copy.
double naive_deviation(const std::vector<long>& v, std::size_t i, int window) {
  const long half = window / 2;
  const long lo = std::max<long>(0, static_cast<long>(i) - half);
  const long hi = std::min<long>(static_cast<long>(v.size()) - 1, static_cast<long>(i) + half);
  std::vector<long> w(v.begin() + lo, v.begin() + hi + 1);
  std::sort(w.begin(), w.end());
  const double med = w.size() % 2 ? w[w.size() / 2] : (w[w.size() / 2 - 1] + w[w.size() / 2]) / 2.0;
  return static_cast<double>(v[i]) - med;
}

Publication pub(const std::string& id, int year, std::vector<std::string> refs) {
  Publication p;
  p.id = id;
  p.pub_year = year;
  for (std::size_t i = 0; i < refs.size(); ++i) p.raw_refs.push_back({refs[i], id, i});
  return p;
}

// Builds a corpus whose clusters have the given citing counts in one year.
struct Planted {
  Corpus corpus;
  Partition partition;
};

Planted planted_year(int rpy, const std::vector<std::pair<std::string, int>>& works) {
  Planted out;
  int next = 0;
  for (const auto& [author, count] : works) {
    std::vector<ParsedCitedRef> members;
    for (int i = 0; i < count; ++i) {
      const std::string id = "p" + std::to_string(next++);
      const std::string raw = author + ", " + std::to_string(rpy) + ", J X, V1, P1";
      out.corpus.publications.push_back(pub(id, 2000 + i % 4, {raw}));
      members.push_back(parse_cr_string(raw, {id, 0}));
    }
    out.partition.clusters.push_back(make_cluster(std::move(members)));
  }
  std::sort(out.partition.clusters.begin(), out.partition.clusters.end(),
            [](const auto& a, const auto& b) { return a.cluster_id < b.cluster_id; });
  return out;
}

std::vector<long> ncr_of(const std::vector<SpectrumPoint>& s) {
  std::vector<long> v;
  for (const auto& p : s) v.push_back(p.ncr);
  return v;
}

}  // namespace

TEST_CASE("spike spectrum") {
  const std::vector<long> ncr = {1, 1, 5, 1, 1};
  const auto s = spectrum_from_counts(1960, ncr);
  REQUIRE(s.size() == 5);
  const std::vector<double> expected = {0, 0, 4, 0, 0};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(s[i].rpy == 1960 + static_cast<int>(i));
    CHECK(s[i].deviation == expected[i]);
    CHECK(s[i].deviation == naive_deviation(ncr, i, 5));
  }
  const auto peaks = detect_peaks(s, 1.0);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].rpy == 1962);
  CHECK(peaks[0].deviation == 4.0);
}

TEST_CASE("spike fixture end to end") {
  const Corpus c = parse_wos_export(oracle::read_fixture("spike_wos.txt"));
  const Partition p = cluster_refs(parse_corpus_refs(c));
  const auto s = compute_spectrum(p, c);
  CHECK(ncr_of(s) == std::vector<long>{1, 1, 5, 1, 1});
  CHECK(s.front().rpy == 1960);
}

TEST_CASE("constant spectrum has zero deviation and no peaks") {
  const std::vector<long> ncr(12, 7);
  const auto s = spectrum_from_counts(1900, ncr);
  for (const auto& p : s) CHECK(p.deviation == 0.0);
  CHECK(detect_peaks(s).empty());
}

TEST_CASE("plateau is not a peak, edges compare to one neighbor") {
  CHECK(detect_peaks(spectrum_from_counts(1900, std::vector<long>{1, 5, 5, 1})).empty());
  const auto s = spectrum_from_counts(1900, std::vector<long>{9, 1, 1, 1, 1});
  const auto peaks = detect_peaks(s);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].rpy == 1900);
  CHECK(detect_peaks(s, 0.0, 1899).empty());
}

TEST_CASE("even window is rejected") {
  CHECK_THROWS_AS(spectrum_from_counts(1900, std::vector<long>{1, 2}, 4), Error);
  CHECK_THROWS_AS(spectrum_from_counts(1900, std::vector<long>{1, 2}, 0), Error);
}

TEST_CASE("duplicate citation from one publication counts once") {
  Corpus c;
  c.publications.push_back(pub("a", 2000, {"Smith J, 1990, J X, V1, P1", "Smith J, 1990, J X, V1, P1"}));
  const Partition p = cluster_refs(parse_corpus_refs(c));
  CHECK(compute_spectrum(p, c)[0].ncr == 1);
  CHECK(compute_spectrum(p, c, {5, false})[0].ncr == 2);
}

TEST_CASE("empty corpus error") {
  Corpus c;
  c.publications.push_back(pub("a", 2000, {"ANONYMOUS"}));
  const Partition p = cluster_refs(parse_corpus_refs(c));
  try {
    compute_spectrum(p, c);
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCorpus);
  }
}

TEST_CASE("WoS fixture spectrum") {
  const Corpus c = parse_wos_export(oracle::read_fixture("sample_wos.txt"));
  const Partition p = cluster_refs(parse_corpus_refs(c));
  const auto s = compute_spectrum(p, c);
  REQUIRE(s.size() == 2018 - 1955 + 1);
  auto at = [&](int y) { return s[static_cast<std::size_t>(y - 1955)].ncr; };
  CHECK(at(1955) == 2);
  CHECK(at(1965) == 2);
  CHECK(at(2013) == 3);
  CHECK(at(2014) == 2);
  CHECK(at(2015) == 1);
  CHECK(at(2016) == 1);
  CHECK(at(2018) == 1);
  CHECK(at(1990) == 0);
  long total = 0;
  for (const auto& pt : s) total += pt.ncr;
  CHECK(total == 12);
}

TEST_CASE("top clusters: planted counts 9, 9, 3") {
  const auto pl = planted_year(1970, {{"Zeta A", 9}, {"Alpha B", 3}, {"Kappa C", 9}});
  const auto top = top_clusters_for_year(1970, 10, pl.partition, pl.corpus);
  REQUIRE(top.size() == 3);
  CHECK(top[0].n_cr == 9);
  CHECK(top[0].canonical.starts_with("Kappa"));
  CHECK(top[1].canonical.starts_with("Zeta"));
  CHECK(top[2].n_cr == 3);
  CHECK(top_clusters_for_year(1970, 1, pl.partition, pl.corpus).size() == 1);
  CHECK(top_clusters_for_year(1971, 5, pl.partition, pl.corpus).empty());

  const auto one = planted_year(1980, {{"Solo A", 7}});
  const auto t1 = top_clusters_for_year(1980, 3, one.partition, one.corpus);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].n_cr == 7);
}

TEST_CASE("peaks get top clusters attached") {
  const Corpus c = parse_wos_export(oracle::read_fixture("spike_wos.txt"));
  const Partition p = cluster_refs(parse_corpus_refs(c));
  auto peaks = detect_peaks(compute_spectrum(p, c), 1.0);
  attach_top_clusters(peaks, 3, p, c);
  REQUIRE(peaks.size() == 1);
  REQUIRE(peaks[0].top_clusters.size() == 1);
  CHECK(peaks[0].top_clusters[0].n_cr == 5);
}

TEST_CASE("percentile rank formula") {
  const std::vector<long> one = {4};
  CHECK(percentile_rank(4, one) == 100.0);
  const std::vector<long> three = {1, 2, 3};
  CHECK(percentile_rank(1, three) == 0.0);
  CHECK(percentile_rank(2, three) == 50.0);
  CHECK(percentile_rank(3, three) == 100.0);
  const std::vector<long> sorted = {1, 2, 3, 4, 5};
  CHECK(percentile_value(sorted, 50) == 3.0);
  CHECK(percentile_value(sorted, 90) == doctest::Approx(4.6));
}

TEST_CASE("indicators: single cluster and n_cr 1, 2, 3") {
  const auto one = planted_year(1990, {{"Solo A", 2}});
  const auto ind1 = compute_indicators(one.partition, one.corpus);
  REQUIRE(ind1.size() == 1);
  CHECK(ind1[0].perc_yr == 100.0);
  CHECK(ind1[0].perc_all == 100.0);

  const auto three = planted_year(1990, {{"A A", 1}, {"B B", 2}, {"C C", 3}});
  for (const auto& ind : compute_indicators(three.partition, three.corpus)) {
    CHECK(ind.perc_yr == 50.0 * static_cast<double>(ind.n_cr - 1));
  }

  Partition empty;
  CHECK_THROWS_AS(compute_indicators(empty, one.corpus), Error);
}

TEST_CASE("indicators: always most cited in four citing years") {
  Corpus c;
  std::vector<ParsedCitedRef> star, other;
  int n = 0;
  for (int year = 2001; year <= 2004; ++year) {
    for (int i = 0; i < 3; ++i) {
      const std::string id = "s" + std::to_string(n++);
      c.publications.push_back(pub(id, year, {"Star A, 1950, J, V1, P1"}));
      star.push_back(parse_cr_string("Star A, 1950, J, V1, P1", {id, 0}));
    }
    const std::string id = "o" + std::to_string(n++);
    c.publications.push_back(pub(id, year, {"Other B, 1951, J, V2, P2"}));
    other.push_back(parse_cr_string("Other B, 1951, J, V2, P2", {id, 0}));
  }
  Partition p{{make_cluster(star), make_cluster(other)}};
  std::sort(p.clusters.begin(), p.clusters.end(), [](auto& a, auto& b) { return a.cluster_id < b.cluster_id; });
  for (const auto& ind : compute_indicators(p, c)) {
    if (ind.n_cr == 12) {
      CHECK(ind.n_top10 == 4);
      CHECK(ind.n_top25 == 4);
      CHECK(ind.n_top50 == 4);
      CHECK(ind.citing_year_profile.size() == 4);
    } else {
      CHECK(ind.n_top10 == 0);
    }
  }
}

TEST_CASE("property: deviation matches the naive median for random windows") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<long> v(1 + rng() % 40);
    for (auto& x : v) x = static_cast<long>(rng() % 20);
    const int window = 1 + 2 * static_cast<int>(rng() % 4);
    const auto s = spectrum_from_counts(1800, v, window);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(s[i].deviation == naive_deviation(v, i, window));
    for (const auto& pk : detect_peaks(s)) CHECK(pk.deviation > 0.0);
  }
}

TEST_CASE("property: deviation locality") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<long> v(10 + rng() % 30);
    for (auto& x : v) x = static_cast<long>(rng() % 20);
    const auto before = spectrum_from_counts(1900, v);
    const std::size_t y = rng() % v.size();
    v[y] += 1 + static_cast<long>(rng() % 10);
    const auto after = spectrum_from_counts(1900, v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i + 2 < y || i > y + 2) CHECK(after[i].deviation == before[i].deviation);
    }
  }
}

TEST_CASE("property: mass conservation, translation invariance, merge monotonicity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<oracle::CitingRecord> recs;
    const int shift = static_cast<int>(rng() % 50);
    std::vector<oracle::CitingRecord> shifted;
    for (int r = 0; r < 25; ++r) {
      oracle::CitingRecord rec{1990 + r % 10, "T" + std::to_string(r), {}}, sh = rec;
      const int nrefs = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < nrefs; ++i) {
        const int w = static_cast<int>(rng() % 15);
        const int year = 1900 + w * 3;
        auto render = [&](int y) {
          return "Auth" + std::to_string(w) + " Q, " + std::to_string(y) + ", J " + std::to_string(w) + ", V" +
                 std::to_string(w) + ", P" + std::to_string(w);
        };
        rec.refs.push_back(render(year));
        sh.refs.push_back(render(year + shift));
      }
      recs.push_back(rec);
      shifted.push_back(sh);
    }
    const Corpus c = parse_wos_export(oracle::wos_text(recs));
    const Partition p = cluster_refs(parse_corpus_refs(c));
    const auto s = compute_spectrum(p, c);
    long total = 0;
    for (const auto& pt : s) total += pt.ncr;
    CHECK(static_cast<std::size_t>(total) == oracle::distinct_pair_count(p));

    const Corpus cs = parse_wos_export(oracle::wos_text(shifted));
    const auto ss = compute_spectrum(cluster_refs(parse_corpus_refs(cs)), cs);
    REQUIRE(ss.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(ss[i].rpy == s[i].rpy + shift);
      CHECK(ss[i].ncr == s[i].ncr);
      CHECK(ss[i].deviation == s[i].deviation);
    }

    // merge two clusters sharing a year
    for (std::size_t i = 0; i < p.clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < p.clusters.size(); ++j) {
        if (p.clusters[i].rpy && p.clusters[i].rpy == p.clusters[j].rpy) {
          const Partition m =
              apply_decision(p, {DecisionKind::Merge, {p.clusters[i].cluster_id, p.clusters[j].cluster_id}, {}, "t", {}});
          const auto sm = compute_spectrum(m, c);
          for (std::size_t k = 0; k < s.size(); ++k) {
            if (s[k].rpy == *p.clusters[i].rpy) CHECK(sm[k].ncr <= s[k].ncr);
            else CHECK(sm[k].ncr == s[k].ncr);
          }
          i = j = p.clusters.size();
        }
      }
    }
  }
}

TEST_CASE("property: indicator ranges and ordering") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<oracle::CitingRecord> recs;
    for (int r = 0; r < 40; ++r) {
      oracle::CitingRecord rec{2000 + static_cast<int>(rng() % 6), "T" + std::to_string(r), {}};
      for (int i = 0; i < 6; ++i) {
        const int w = static_cast<int>(rng() % 20);
        rec.refs.push_back("W" + std::to_string(w) + " A, " + std::to_string(1950 + w % 4) + ", J" + std::to_string(w) + ", V1, P" + std::to_string(w));
      }
      recs.push_back(rec);
    }
    const Corpus c = parse_wos_export(oracle::wos_text(recs));
    const Partition p = cluster_refs(parse_corpus_refs(c));
    const auto inds = compute_indicators(p, c);
    for (const auto& a : inds) {
      CHECK(a.perc_yr >= 0.0);
      CHECK(a.perc_yr <= 100.0);
      CHECK(a.perc_all >= 0.0);
      CHECK(a.perc_all <= 100.0);
      CHECK(a.n_top10 <= a.n_top25);
      CHECK(a.n_top25 <= a.n_top50);
      CHECK(a.n_top50 <= static_cast<int>(a.citing_year_profile.size()));
      for (const auto& b : inds) {
        if (a.rpy == b.rpy && a.n_cr <= b.n_cr) CHECK(a.perc_yr <= b.perc_yr);
      }
    }
  }
}
