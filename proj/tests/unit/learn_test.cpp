#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "support.hpp"
#include "webcfg/device/oracle.hpp"
#include "webcfg/error.hpp"
#include "webcfg/learn/model_io.hpp"
#include "webcfg/learn/multiclass.hpp"
#include "webcfg/learn/svm.hpp"
#include "webcfg/learn/training.hpp"

using namespace webcfg::learn;
using webcfg::device::Core;
using webcfg::device::CostModelParams;
using webcfg::device::Metric;
using webcfg::device::ProcessorConfig;
using webcfg::features::FeatureVector;
namespace fidx = webcfg::features::index;

namespace {

using Points = std::vector<std::vector<double>>;

const Points kXor = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
const std::vector<int> kXorLabels = {-1, -1, 1, 1};

FeatureVector raw_page(double nodes, double rules, double kb, double depth) {
  FeatureVector v;
  v[fidx::dom_nodes()] = nodes;
  v[fidx::style_rules()] = rules;
  v[fidx::page_size_kb()] = kb;
  v[fidx::dom_depth()] = depth;
  v[fidx::tag("div")] = std::floor(nodes / 3);
  return v;
}

std::vector<PageFeatures> spread_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<PageFeatures> out;
  for (std::size_t i = 0; i < n; ++i) {
    double nodes = std::floor(std::exp(std::log(4.0) + u(rng) * std::log(2000.0)));
    double kb = std::exp(std::log(40.0) + u(rng) * std::log(128.0));
    out.push_back({"p" + std::to_string(i),
                   raw_page(nodes, std::floor(kb * 0.2), kb, 3 + std::floor(std::log2(nodes)))});
  }
  return out;
}

/// Energy optimum of the wikipedia-like page is (big, 0.9, 0.4) under these
/// parameters; tiny pages move to the little core because of the wake cost.
CostModelParams crafted_params() {
  auto doc = nlohmann::ordered_json::parse(
      webcfg::test::read_file(webcfg::test::fixture("crafted_params.json")));
  return webcfg::device::params_from_json(doc);
}

std::pair<Points, std::vector<int>> random_problem(std::uint64_t seed, std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  Points x(n, std::vector<double>(dim));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x[i]) v = u(rng);
    double s = x[i][0] + 0.5 * x[i][1] + 0.3 * (u(rng) - 0.5);
    y[i] = s > 0.75 ? 1 : -1;
  }
  y[0] = 1;
  y[1] = -1;
  return {x, y};
}

}  // namespace

TEST_CASE("rbf kernel") {
  std::vector<double> x = {0.2, 0.4}, y = {1.2, 0.4};
  CHECK(rbf_kernel(x, x, 3.0) == 1.0);
  CHECK(rbf_kernel(x, y, 1.0) == doctest::Approx(0.3679).epsilon(1e-4));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> a(73), b(73);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    CHECK(rbf_kernel(a, b, 0.1) == rbf_kernel(b, a, 0.1));
  }
  std::vector<double> shorter = {1.0};
  CHECK_THROWS_AS(rbf_kernel(x, shorter, 1.0), webcfg::ValidationError);

  KernelMatrix k(kXor, 0.5);
  DistanceMatrix d(kXor);
  KernelMatrix k2(d, 0.5);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(k(i, j) == doctest::Approx(rbf_kernel(kXor[i], kXor[j], 0.5)));
      CHECK(k(i, j) == k2(i, j));
    }
  }
}

TEST_CASE("two points in one dimension split at the midpoint") {
  Points x = {{0.0}, {1.0}};
  std::vector<int> y = {-1, 1};
  BinarySvm svm = smo_train(x, y, {.C = 1000, .gamma = 1});
  CHECK(std::abs(svm.decision(std::vector{0.5})) < 1e-9);
  CHECK(svm.predict(std::vector{0.25}) == -1);
  CHECK(svm.predict(std::vector{0.75}) == 1);
}

TEST_CASE("xor is separable") {
  BinarySvm svm = smo_train(kXor, kXorLabels, {.C = 10, .gamma = 1});
  for (std::size_t i = 0; i < kXor.size(); ++i) CHECK(svm.predict(kXor[i]) == kXorLabels[i]);
  for (double c : svm.coefficients) CHECK(std::abs(c) <= 10.0);
}

TEST_CASE("single class input is rejected") {
  std::vector<int> y = {1, 1, 1, 1};
  CHECK_THROWS_AS(smo_train(kXor, y, {}), webcfg::ValidationError);
  CHECK_THROWS_AS(smo_train(kXor, kXorLabels, {.C = 0}), webcfg::ValidationError);
}

TEST_CASE("kkt conditions hold on random problems") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto [x, y] = random_problem(seed, 60, 4);
    for (double C : {0.5, 10.0}) {
      KernelMatrix k(x, 2.0);
      std::vector<std::size_t> rows(x.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      DualSolution sol = solve_dual(k, rows, y, C, 1e-3);
      CHECK(sol.converged);
      BinarySvm svm = make_machine(x, rows, y, sol, C, 2.0);
      CHECK(max_kkt_violation(svm, x, y, sol.alpha) <= 1e-3);
      double balance = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(sol.alpha[i] >= 0.0);
        CHECK(sol.alpha[i] <= C);
        balance += y[i] * sol.alpha[i];
      }
      CHECK(std::abs(balance) < 1e-9);
    }
  }
}

TEST_CASE("duplicating the training set halves the effective penalty") {
  auto [x, y] = random_problem(3, 40, 3);
  Points x2 = x;
  std::vector<int> y2 = y;
  x2.insert(x2.end(), x.begin(), x.end());
  y2.insert(y2.end(), y.begin(), y.end());
  BinarySvm once = smo_train(x, y, {.C = 4, .gamma = 1, .tol = 1e-6});
  BinarySvm twice = smo_train(x2, y2, {.C = 2, .gamma = 1, .tol = 1e-6});
  auto [q, unused] = random_problem(99, 200, 3);
  for (const auto& p : q) CHECK(std::abs(once.decision(p) - twice.decision(p)) < 1e-3);
}

TEST_CASE("solver is deterministic") {
  auto [x, y] = random_problem(8, 50, 5);
  CHECK(smo_train(x, y, {.C = 3, .gamma = 0.7}) == smo_train(x, y, {.C = 3, .gamma = 0.7}));
}

TEST_CASE("label set") {
  LabelSet s{Metric::kEdp, {}};
  CHECK(s.intern({Core::kBig, 1000, 400}) == 0);
  CHECK(s.intern({Core::kLittle, 1000, 400}) == 1);
  CHECK(s.intern({Core::kBig, 1000, 400}) == 0);
  CHECK(s.size() == 2);
  CHECK(s.find({Core::kLittle, 1000, 400}) == 1u);
  CHECK_FALSE(s.find({Core::kLittle, 1100, 400}).has_value());
}

TEST_CASE("one-vs-one machines and voting") {
  LabelSet labels{Metric::kLoadTime, {{Core::kBig, 1000, 400}, {Core::kBig, 1100, 400},
                                      {Core::kBig, 1200, 400}, {Core::kBig, 1300, 400}}};
  std::vector<LabeledExample> ex;
  for (std::size_t l = 0; l < 4; ++l) {
    for (int j = 0; j < 3; ++j) {
      FeatureVector v;
      v.normalized = true;
      v[0] = 0.25 * static_cast<double>(l) + 0.02 * j;
      v[1] = l % 2 ? 0.9 : 0.1;
      ex.push_back({"e", v, l});
    }
  }
  webcfg::features::NormalizationTable identity;
  for (auto& r : identity.ranges) r = {0, 1};
  auto model = train_multiclass(ex, labels, 100, 5, identity);
  CHECK(model.machines.size() == 6);
  for (const auto& e : ex) CHECK(model.predict_index(as_point(e.features)) == e.label);

  std::vector<LabeledExample> two(ex.begin(), ex.begin() + 6);
  CHECK(train_multiclass(two, labels, 100, 5, identity).machines.size() == 1);

  std::vector<LabeledExample> one(ex.begin(), ex.begin() + 3);
  auto constant = train_multiclass(one, labels, 100, 5, identity);
  CHECK(constant.machines.empty());
  CHECK(constant.constant_label == 0u);
  CHECK(predict_label(constant, FeatureVector{}) == labels.configs[0]);

  CHECK_THROWS_AS(train_multiclass(std::span<const LabeledExample>{}, labels, 1, 1, identity),
                  webcfg::ValidationError);
  auto bad = ex;
  bad[0].label = 9;
  CHECK_THROWS_AS(train_multiclass(bad, labels, 1, 1, identity), webcfg::ValidationError);

  // every prediction is a member of the label set
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    FeatureVector v;
    for (auto& x : v.values) x = u(rng);
    CHECK(labels.find(predict_label(model, v)).has_value());
  }
  CHECK(labels.find(predict_label(model, FeatureVector{})).has_value());

  FeatureVector other;
  other.schema_version = "other-v2";
  CHECK_THROWS_AS(predict_label(model, other), webcfg::SchemaMismatch);
}

TEST_CASE("vote ties go to the lowest label index") {
  // three labels, each machine has a fixed sign: 0 beats 1, 1 beats 2, 2 beats 0
  auto fixed = [](double sign) {
    BinarySvm svm;
    svm.bias = sign;
    svm.gamma = 1;
    svm.C = 1;
    return svm;
  };
  MulticlassSvmModel m;
  m.label_set.configs = {{Core::kBig, 400, 400}, {Core::kBig, 500, 400}, {Core::kBig, 600, 400}};
  m.machines = {{0, 1, fixed(1)}, {0, 2, fixed(-1)}, {1, 2, fixed(1)}};
  std::vector<double> x(73, 0.0);
  CHECK(m.predict_index(x) == 0);
  m.machines = {{0, 1, fixed(-1)}, {0, 2, fixed(-1)}, {1, 2, fixed(1)}};
  CHECK(m.predict_index(x) == 1);
}

TEST_CASE("training data labels") {
  CostModelParams p;
  CHECK_THROWS_AS(generate_training_data({}, Metric::kEdp, p), webcfg::ValidationError);

  std::vector<PageFeatures> same = {{"a", raw_page(100, 20, 50, 8)}, {"b", raw_page(100, 20, 50, 8)}};
  auto data = generate_training_data(same, Metric::kEdp, p);
  CHECK(data.labels.size() == 1);

  std::vector<PageFeatures> two = {{"a", FeatureVector{}}, {"b", raw_page(4000, 800, 3000, 18)}};
  data = generate_training_data(two, Metric::kEnergy, p);
  REQUIRE(data.labels.size() == 2);
  CHECK(data.examples[0].label == 0);
  CHECK(data.examples[1].label == 1);
  CHECK(data.labels.configs[0] == webcfg::device::oracle_best(two[0].raw, Metric::kEnergy, p).config);
  for (const auto& e : data.examples) CHECK(e.features.normalized);
}

TEST_CASE("stratified folds") {
  std::vector<std::size_t> labels = {0, 1, 0, 0, 1, 2, 0};
  auto f = stratified_folds(labels, 3);
  // label 0 at 0,2,3,6 -> 0,1,2,0; label 1 at 1,4 -> 1,2; label 2 at 5 -> 0
  CHECK(f == std::vector<std::size_t>{0, 1, 1, 2, 2, 0, 0});
}

TEST_CASE("grid search") {
  Points x;
  std::vector<std::size_t> y;
  for (int r = 0; r < 25; ++r) {
    for (std::size_t i = 0; i < 4; ++i) {
      x.push_back(kXor[i]);
      y.push_back(kXorLabels[i] > 0 ? 1 : 0);
    }
  }
  LabelSet labels{Metric::kLoadTime, {{Core::kBig, 1000, 400}, {Core::kLittle, 1000, 400}}};
  DistanceMatrix d(x);

  HyperGrid grid{.C = {10, 1}, .gamma = {1, 0.1}, .folds = 5};
  GridChoice best = grid_search(x, d, y, labels, grid);
  CHECK(best.accuracy == 1.0);
  // replay every point alone; no smaller (C, gamma) reaches the chosen accuracy
  for (double C : {1.0, 10.0}) {
    for (double g : {0.1, 1.0}) {
      GridChoice alone = grid_search(x, d, y, labels, {.C = {C}, .gamma = {g}, .folds = 5});
      CHECK(alone.C == C);
      CHECK(alone.gamma == g);
      bool earlier = C < best.C || (C == best.C && g < best.gamma);
      if (earlier) CHECK(alone.accuracy < best.accuracy);
    }
  }

  Points easy = {{0.0}, {0.05}, {0.1}, {0.9}, {0.95}, {1.0}};
  std::vector<std::size_t> easy_y = {0, 0, 0, 1, 1, 1};
  GridChoice tie = grid_search(easy, DistanceMatrix(easy), easy_y, labels,
                               {.C = {50, 5}, .gamma = {20, 2}, .folds = 3});
  CHECK(tie.accuracy == 1.0);
  CHECK(tie.C == 5);
  CHECK(tie.gamma == 2);

  CHECK_THROWS_AS(grid_search(easy, DistanceMatrix(easy), easy_y, labels, {.C = {1}, .gamma = {1}, .folds = 7}),
                  webcfg::ValidationError);
  CHECK_THROWS_AS(grid_search(easy, DistanceMatrix(easy), easy_y, labels, {.C = {}, .gamma = {1}, .folds = 3}),
                  webcfg::ValidationError);
}

TEST_CASE("crafted parameters predict the wikipedia-like page on big at 900 MHz") {
  CostModelParams p = crafted_params();
  FeatureVector wiki = raw_page(754, 645, 2448, 13);
  const ProcessorConfig target{Core::kBig, 900, 400};
  REQUIRE(webcfg::device::oracle_best(wiki, Metric::kEnergy, p).config == target);

  auto corpus = spread_corpus(40, 2);
  corpus.push_back({"empty", FeatureVector{}});
  corpus.push_back({"tiny", raw_page(4, 0, 0.5, 2)});
  GridChoice choice;
  auto model = train_model(corpus, Metric::kEnergy, p, HyperGrid{}, &choice);
  REQUIRE(model.label_set.find(target).has_value());
  CHECK(model.label_set.size() >= 2);
  CHECK(predict_label(model, wiki) == target);
}

TEST_CASE("loocv degenerate corpora") {
  CostModelParams p;
  CHECK_THROWS_AS(loocv(std::vector<PageFeatures>{{"a", FeatureVector{}}}, Metric::kEdp, p),
                  webcfg::ValidationError);

  std::vector<PageFeatures> two = {{"a", FeatureVector{}}, {"b", raw_page(4000, 800, 3000, 18)}};
  auto r = loocv(two, Metric::kEnergy, p);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.accuracy == 0.0);
  CHECK(r.rows[0].predicted == r.rows[1].oracle);
  CHECK(r.rows[1].predicted == r.rows[0].oracle);

  std::vector<PageFeatures> same(5, {"x", raw_page(300, 80, 200, 9)});
  for (Metric m : webcfg::device::kAllMetrics) CHECK(loocv(same, m, p).accuracy == 1.0);
}

TEST_CASE("loocv refits normalization per fold") {
  CostModelParams p;
  auto corpus = spread_corpus(30, 5);
  LoocvResult r = loocv(corpus, Metric::kLoadTime, p);
  const std::size_t nodes = fidx::dom_nodes();
  auto extreme = std::max_element(corpus.begin(), corpus.end(), [&](const auto& a, const auto& b) {
    return a.raw[nodes] < b.raw[nodes];
  });
  CHECK(r.rows[static_cast<std::size_t>(extreme - corpus.begin())].normalization_refit);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].page_id == corpus[i].id);
    CHECK(r.rows[i].oracle_cost.load_time <= r.rows[i].predicted_cost.load_time);
    CHECK(r.rows[i].correct == (r.rows[i].predicted == r.rows[i].oracle));
  }

  std::vector<Metric> metrics = {Metric::kLoadTime, Metric::kEdp};
  auto both = loocv(corpus, metrics, p);
  REQUIRE(both.size() == 2);
  CHECK(both[0].accuracy == r.accuracy);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(both[0].rows[i].predicted == r.rows[i].predicted);

  LoocvOptions nested;
  nested.nested_search = true;
  auto n = loocv(corpus, Metric::kLoadTime, p, nested);
  CHECK(n.rows.size() == corpus.size());
  CHECK(n.accuracy >= 0.0);
}

TEST_CASE("model json round trip") {
  CostModelParams p;
  auto corpus = spread_corpus(40, 9);
  auto model = train_model(corpus, Metric::kEdp, p, HyperGrid{});
  auto doc = to_json(model);
  CHECK(doc["format"] == kModelFormat);
  auto back = model_from_json(doc);
  CHECK(back == model);

  webcfg::test::TempDir dir("model");
  auto path = dir.path() / "m.json";
  save_model(model, path);
  auto loaded = load_model(path);
  CHECK(loaded == model);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    FeatureVector v = raw_page(std::floor(u(rng) * 3000), std::floor(u(rng) * 500), u(rng) * 4000,
                               std::floor(u(rng) * 25));
    CHECK(predict_label(loaded, v) == predict_label(model, v));
  }

  CHECK_THROWS_AS(load_model(dir.path() / "missing.json"), webcfg::IoError);
  auto broken = doc;
  broken["format"] = "something-else";
  CHECK_THROWS_AS(model_from_json(broken), webcfg::ValidationError);
  broken = doc;
  broken["schema_version"] = "other-v2";
  CHECK_THROWS_AS(model_from_json(broken), webcfg::SchemaMismatch);
  broken = doc;
  broken.erase("machines");
  CHECK_THROWS_AS(model_from_json(broken), webcfg::ValidationError);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
}
