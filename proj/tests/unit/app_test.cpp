#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "support.hpp"
#include "webcfg/app/corpus.hpp"
#include "webcfg/app/evaluation.hpp"
#include "webcfg/app/generator.hpp"
#include "webcfg/app/report.hpp"
#include "webcfg/error.hpp"
#include "webcfg/features/extract.hpp"
#include "webcfg/stats.hpp"

using namespace webcfg::app;
using webcfg::device::Core;
using webcfg::device::CostModelParams;
using webcfg::device::Metric;
using webcfg::test::TempDir;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

std::vector<webcfg::learn::PageFeatures> generated_features(std::size_t n, std::uint64_t seed,
                                                            const SizeProfile& profile = {}) {
  std::vector<webcfg::learn::PageFeatures> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto page = webcfg::webparse::parse_page(generate_page(seed, i, profile));
    out.push_back({page_id(i), webcfg::features::extract_features(page)});
  }
  return out;
}

SizeProfile small_profile() { return {4, 600, 40, 200}; }

}  // namespace

TEST_CASE("geometric mean") {
  std::vector<double> v = {1.0, 4.0};
  CHECK(webcfg::geometric_mean(v) == doctest::Approx(2.0));
  std::vector<double> bad = {1.0, 0.0};
  CHECK_THROWS(webcfg::geometric_mean(bad));
}

TEST_CASE("generated pages are deterministic and well formed") {
  SizeProfile profile;
  PagePlan plan;
  auto a = generate_page(1, 0, profile, &plan);
  auto b = generate_page(1, 0, profile);
  CHECK(a.html == b.html);
  CHECK(a.stylesheets == b.stylesheets);
  CHECK(generate_page(2, 0, profile).html != a.html);
  CHECK(plan.nodes >= 4);
  CHECK(plan.nodes <= 8000);

  for (std::size_t i = 0; i < 12; ++i) {
    PagePlan p;
    auto page = generate_page(21, i, small_profile(), &p);
    auto parsed = webcfg::webparse::parse_page(page);
    CAPTURE(i);
    CHECK(parsed.recovery_events == 0);
    CHECK(parsed.tree.node_count() == p.nodes);
    CHECK(parsed.tree.depth() <= p.depth);
    CHECK(static_cast<double>(page.total_bytes()) >= p.target_kb * 1024 * 0.98);
  }

  CHECK_THROWS_AS((SizeProfile{3, 10, 40, 50}.validate()), webcfg::ValidationError);
  CHECK_THROWS_AS((SizeProfile{10, 5, 40, 50}.validate()), webcfg::ValidationError);
  CHECK_THROWS_AS((SizeProfile{4, 10, 60, 50}.validate()), webcfg::ValidationError);
  CHECK(page_id(7) == "page-0007");
}

TEST_CASE("default corpus spans the size range") {
  std::size_t min_nodes = SIZE_MAX, max_nodes = 0, events = 0;
  double min_kb = 1e9, max_kb = 0;
  for (std::size_t i = 0; i < 400; ++i) {
    auto page = generate_page(7, i, SizeProfile{});
    auto parsed = webcfg::webparse::parse_page(page);
    min_nodes = std::min(min_nodes, parsed.tree.node_count());
    max_nodes = std::max(max_nodes, parsed.tree.node_count());
    min_kb = std::min(min_kb, page.total_bytes() / 1024.0);
    max_kb = std::max(max_kb, page.total_bytes() / 1024.0);
    events += parsed.recovery_events;
  }
  CHECK(min_nodes <= 50);
  CHECK(max_nodes >= 4000);
  CHECK(min_kb < 60);
  CHECK(max_kb > 4096);
  CHECK(events == 0);
}

TEST_CASE("corpus on disk") {
  TempDir dir("corpus");
  auto manifest = gen_corpus(dir.path() / "c", 3, 1, small_profile());
  REQUIRE(manifest.pages.size() == 3);
  CHECK(manifest.seed == 1u);
  CHECK(std::filesystem::exists(dir.path() / "c" / kManifestName));

  TempDir again("corpus-again");
  gen_corpus(again.path() / "c", 3, 1, small_profile());
  for (const auto& e : manifest.pages) {
    CHECK(webcfg::test::read_file(manifest.page_dir(e) / "index.html") ==
          webcfg::test::read_file(again.path() / "c" / e.dir / "index.html"));
  }

  auto loaded = load_corpus(dir.path() / "c");
  CHECK(loaded.pages.size() == 3);
  CHECK(loaded.pages[0].id == "page-0000");
  CHECK(loaded.pages[0].bytes == manifest.pages[0].bytes);
  auto features = extract_corpus(loaded);
  REQUIRE(features.size() == 3);
  CHECK(features[1].id == "page-0001");
  CHECK(features[1].raw[webcfg::features::index::page_size_kb()] ==
        doctest::Approx(manifest.pages[1].bytes / 1024.0));

  // without a manifest, subdirectories holding index.html are pages
  std::filesystem::remove(dir.path() / "c" / kManifestName);
  std::filesystem::create_directories(dir.path() / "c" / "not-a-page");
  auto scanned = load_corpus(dir.path() / "c");
  CHECK(scanned.pages.size() == 3);
  CHECK_FALSE(scanned.seed.has_value());

  std::ofstream(dir.path() / "c" / kManifestName)
      << R"({"pages":[{"id":"a","dir":"page-0000"},{"id":"a","dir":"page-0001"}]})";
  CHECK_THROWS_AS(load_corpus(dir.path() / "c"), webcfg::ValidationError);
  std::ofstream(dir.path() / "c" / kManifestName) << R"({"pages":[{"id":"a","dir":"missing"}]})";
  CHECK_THROWS_AS(load_corpus(dir.path() / "c"), webcfg::ValidationError);
  CHECK_THROWS_AS(gen_corpus(dir.path() / "z", 0, 1), webcfg::ValidationError);
}

TEST_CASE("measurement protocol") {
  auto corpus = generated_features(1, 3, small_profile());
  const auto& raw = corpus[0].raw;
  webcfg::device::ProcessorConfig c{Core::kBig, 1500, 1000};
  CostModelParams quiet;
  Measurement m = measure(raw, c, quiet, 1);
  CHECK(m.repetitions == 1);
  CHECK(m.met);
  CHECK(m.mean.load_time == webcfg::device::evaluate(raw, c, quiet).load_time);

  CostModelParams noisy;
  noisy.noise_sigma = 0.05;
  Measurement n = measure(raw, c, noisy, 1);
  CHECK(n.repetitions >= 2);
  CHECK(n.repetitions <= 50);
  CHECK(n.met == (n.ci_ratio < 0.05));
  CHECK(n.mean.edp == doctest::Approx(n.mean.energy * n.mean.load_time));
  CHECK(measure(raw, c, noisy, 1) == n);

  CostModelParams loud = noisy;
  loud.noise_sigma = 0.5;
  Measurement l = measure(raw, c, loud, 1);
  CHECK(l.repetitions == 50);
  CHECK_FALSE(l.met);

  // Student t with 2 samples {0, 2}: mean 1, s = sqrt(2), t(0.975, 1) = 12.7062
  std::vector<double> two = {0.0, 2.0};
  CHECK(ci_width(two, 0.95) == doctest::Approx(2 * 12.7062 * 1.0).epsilon(1e-4));
  std::vector<double> one = {1.0};
  CHECK(std::isinf(ci_width(one, 0.95)));
}

TEST_CASE("evaluation report") {
  auto corpus = generated_features(24, 5, small_profile());
  CostModelParams p;
  std::vector<Metric> metrics(std::begin(webcfg::device::kAllMetrics), std::end(webcfg::device::kAllMetrics));
  auto reports = evaluate(corpus, metrics, p);
  REQUIRE(reports.size() == 3);

  for (const auto& r : reports) {
    CAPTURE(webcfg::device::to_string(r.metric));
    REQUIRE(r.rows.size() == corpus.size());
    CHECK(std::is_sorted(r.rows.begin(), r.rows.end(),
                         [](const auto& a, const auto& b) { return a.page_id < b.page_id; }));
    for (const auto& row : r.rows) {
      CHECK(row.oracle_fraction <= 1.0);
      CHECK(row.predicted_cost.repetitions == 1);
    }
    CHECK(r.aggregates.repetitions_max == 1);

    std::size_t oracle_total = 0, predicted_total = 0;
    for (const auto& h : r.histogram) {
      oracle_total += h.oracle_count;
      predicted_total += h.predicted_count;
    }
    CHECK(oracle_total == corpus.size());
    CHECK(predicted_total == corpus.size());
    CHECK(r.importance.size() == 73);
    CHECK(r.sweep.size() == r.labels.size());

    // aggregates recomputed from the CSV alone
    std::istringstream csv(rows_csv(r));
    std::string line;
    std::getline(csv, line);
    auto header = split_csv_line(line);
    auto col = [&](const char* name) {
      return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    std::vector<double> ratios, fractions;
    double hits = 0;
    while (std::getline(csv, line)) {
      auto cells = split_csv_line(line);
      REQUIRE(cells.size() == header.size());
      double hmp = std::stod(cells[col("hmp_value")]);
      double pred = std::stod(cells[col("predicted_value")]);
      ratios.push_back(pred / hmp);
      CHECK(std::stod(cells[col("ratio_vs_hmp")]) == pred / hmp);
      fractions.push_back(std::stod(cells[col("oracle_fraction")]));
      hits += std::stod(cells[col("correct")]);
      CHECK(webcfg::device::parse_config(cells[col("predicted")]).render_core ==
            webcfg::device::parse_config(cells[col("predicted")]).render_core);
    }
    REQUIRE(ratios.size() == corpus.size());
    CHECK(std::abs(webcfg::geometric_mean(ratios) - r.aggregates.predicted_vs_hmp) < 1e-9);
    CHECK(std::abs(webcfg::geometric_mean(fractions) - r.aggregates.oracle_fraction) < 1e-9);
    CHECK(std::abs(hits / corpus.size() - r.aggregates.accuracy) < 1e-9);
    CHECK(*std::min_element(ratios.begin(), ratios.end()) == doctest::Approx(r.aggregates.min_ratio));

    auto back = report_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
  }

  auto again = evaluate(corpus, metrics, p);
  for (std::size_t m = 0; m < 3; ++m) CHECK(to_json(again[m]).dump() == to_json(reports[m]).dump());

  EvaluationOptions holdout;
  holdout.mode = EvalMode::kHoldout;
  auto h = evaluate(corpus, metrics, p, holdout);
  CHECK(h[0].rows.size() == corpus.size() / 4);
  CHECK(h[0].mode == EvalMode::kHoldout);

  auto broken = to_json(reports[0]);
  broken.erase("rows");
  CHECK_THROWS_AS(report_from_json(broken), webcfg::ValidationError);
}

TEST_CASE("single page report equals its row") {
  auto corpus = generated_features(4, 8, small_profile());
  CostModelParams p;
  std::vector<Metric> metrics = {Metric::kEnergy};
  auto report = evaluate(corpus, metrics, p)[0];
  report.rows.resize(1);
  report.aggregates = aggregate(report.metric, report.rows);
  const auto& row = report.rows[0];
  double ratio = row.predicted_cost.mean.energy / row.hmp.mean.energy;
  CHECK(report.aggregates.predicted_vs_hmp == doctest::Approx(ratio));
  CHECK(report.aggregates.min_ratio == ratio);
  CHECK(report.aggregates.max_ratio == ratio);
  CHECK(report.aggregates.oracle_fraction == doctest::Approx(row.oracle_fraction));
  CHECK(report.aggregates.accuracy == (row.correct ? 1.0 : 0.0));
  CHECK_THROWS_AS(aggregate(Metric::kEnergy, {}), webcfg::ValidationError);
}

TEST_CASE("report files") {
  auto corpus = generated_features(12, 4, small_profile());
  CostModelParams p;
  std::vector<Metric> metrics = {Metric::kLoadTime, Metric::kEdp};
  auto reports = evaluate(corpus, metrics, p);
  TempDir dir("report");
  OverheadProfile prof;
  prof.sessions = 2;
  prof.mean_ms = {{"feature_extraction", 1.0}, {"prediction", 0.5}};
  prof.max_ms = prof.mean_ms;
  prof.max_decision_ms = 3.0;
  prof.largest_page = "page-0003";
  prof.largest_page_kb = 120.0;
  prof.largest_page_decision_ms = 2.5;
  CHECK(overhead_profile_from_json(to_json(prof)).largest_page == "page-0003");

  std::string summary = write_report(reports, &prof, dir.path());
  CHECK(summary.find("time") != std::string::npos);
  for (const char* f : {"summary.txt", "improvement.dat", "sweep_time.dat", "histogram_edp.dat",
                        "importance_edp.dat", "overheads.dat"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir.path() / f), f);
  }
  std::istringstream imp(webcfg::test::read_file(dir.path() / "importance_time.dat"));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(imp, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  CHECK(rows == 73);

  CHECK(describe_improvement(Metric::kLoadTime, 0.5) == "2.000x speedup");
  CHECK(describe_improvement(Metric::kEnergy, 0.25) == "75.0% reduction");
}
