/*******************************************************************************
 * Copyright 2026 The sketchov Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *******************************************************************************/
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "sketchov/experiments.hpp"
#include "sketchov/operator.hpp"
#include "test_util.hpp"

using namespace sketchov;

TEST_CASE("modality names") {
  for (Modality m : {Modality::OO, Modality::OM, Modality::MM})
    CHECK(parse_modality(to_string(m)) == m);
  CHECK_FALSE(parse_modality("XX").has_value());
  CHECK(rank_for_ratio(2048, 0.05) == 102);
  CHECK(rank_for_ratio(10, 0.001) == 1);
  CHECK(rank_for_ratio(10, 1.0) == 10);
}

TEST_CASE("summaries") {
  const DistributionSummary s = summarize({4.0, 1.0, 3.0, 2.0, 5.0});
  CHECK(s.median == 3.0);
  CHECK(s.mean == 3.0);
  CHECK(s.p5 == doctest::Approx(1.2));
  CHECK(s.p95 == doctest::Approx(4.8));
  CHECK(s.stddev == doctest::Approx(std::sqrt(2.5)));
  CHECK(summarize({}).mean == 0.0);
}

TEST_CASE("full-rank cells are exactly one") {
  BaselineConfig cfg;
  cfg.dims = {12};
  cfg.rhos = {1.0};
  cfg.samples = 5;
  const BaselineResult r = run_baseline(cfg);
  CHECK(r.rows.size() == 3 * kAllMetricKinds.size());
  for (const auto& row : r.rows) {
    CAPTURE(to_string(row.metric));
    CHECK(row.k == 12);
    CHECK(row.mean == 1.0);
    CHECK(row.median == 1.0);
  }
}

TEST_CASE("baseline is deterministic across worker counts") {
  BaselineConfig cfg;
  cfg.dims = {16, 40};
  cfg.rhos = {0.2, 0.5};
  cfg.samples = 12;
  cfg.seed = 77;
  cfg.keep_samples = true;
  const BaselineResult one = run_baseline(cfg);
  cfg.workers = 3;
  const BaselineResult three = run_baseline(cfg);
  REQUIRE(one.rows.size() == three.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].values == three.rows[i].values);
    CHECK(one.rows[i].p5 <= one.rows[i].median);
    CHECK(one.rows[i].median <= one.rows[i].p95);
    for (double v : one.rows[i].values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  cfg.seed = 78;
  CHECK(run_baseline(cfg).rows[0].values != one.rows[0].values);
  const BaselineRow* row = one.find(Modality::OM, MetricKind::overlap, 40, 0.2);
  REQUIRE(row != nullptr);
  CHECK(row->k == 8);
  CHECK(one.find(Modality::OM, MetricKind::overlap, 41, 0.2) == nullptr);
}

TEST_CASE("mask pairs spread wider than Stiefel pairs") {
  BaselineConfig cfg;
  cfg.dims = {32, 64, 128, 256, 512};
  cfg.rhos = {0.1};
  cfg.modalities = {Modality::OO, Modality::MM};
  cfg.metrics = {MetricKind::overlap};
  cfg.samples = 40;
  cfg.seed = 3;
  const BaselineResult r = run_baseline(cfg);
  int wider = 0;
  for (Index d : cfg.dims) {
    const auto* oo = r.find(Modality::OO, MetricKind::overlap, d, 0.1);
    const auto* mm = r.find(Modality::MM, MetricKind::overlap, d, 0.1);
    REQUIRE(oo != nullptr);
    REQUIRE(mm != nullptr);
    if (mm->stddev > oo->stddev) ++wider;
  }
  CHECK(wider >= 4);
}

TEST_CASE("baseline validation") {
  BaselineConfig cfg;
  cfg.dims = {10};
  cfg.rhos = {0.0};
  CHECK_THROWS_AS(run_baseline(cfg), ParameterError);
  cfg.rhos = {0.5};
  cfg.samples = 1;
  CHECK_THROWS_AS(run_baseline(cfg), ParameterError);
}

TEST_CASE("lemma checks") {
  const LemmaCheck c = verify_lemma(128, 6, 200, 1);
  CHECK(c.pass);
  CHECK(c.expected == doctest::Approx(6.0 / 128.0));
  CHECK(c.stderr_ > 0.0);
  const LemmaCheck full = verify_lemma(20, 20, 30, 1);
  CHECK(full.mean == 1.0);
  CHECK(full.pass);
  CHECK_THROWS_AS(verify_lemma(20, 5, 29, 1), ParameterError);
}

TEST_CASE("overlap curve on an aligned planted operator") {
  const Index dim = 300;
  const SparseMask mask = sample_mask(dim, 20, 4);
  Vector ev(20);
  for (Index i = 0; i < 20; ++i) ev[i] = 20.0 - static_cast<double>(i);
  const PlantedOperator op = make_planted_operator(dim, ev, mask, 1.0, 6);
  const ParameterVector theta = make_ranked_theta(dim, mask.indices(), 2);
  const OverlapCurve curve = overlap_curve(op, theta, 30, 61, 20, 8, {}, "planted");
  REQUIRE(curve.rows.size() == 20);
  for (const auto& row : curve.rows) {
    CHECK(row.baseline == static_cast<double>(row.k) / static_cast<double>(dim));
    REQUIRE(row.exact.has_value());
    CHECK(std::abs(*row.exact - row.sketched) <= 1e-8);
  }
  CHECK(curve.rows.back().sketched == doctest::Approx(1.0));
  const auto ratios = overlap_ratio_report(curve);
  CHECK(ratios.back().sketched_ratio == doctest::Approx(dim / 20.0));

  CurveOptions no_exact;
  no_exact.exact = false;
  const OverlapCurve skip = overlap_curve(op, theta, 30, 61, 5, 8, no_exact);
  CHECK_FALSE(skip.rows[0].exact.has_value());
  CHECK_THROWS_AS(overlap_curve(op, theta, 30, 20, 5, 8), ParameterError);
  CHECK_THROWS_AS(overlap_curve(op, theta, 30, 61, 31, 8), ParameterError);

  std::ostringstream csv;
  write_curve_csv(csv, curve);
  const std::string text = csv.str();
  CHECK(text.rfind("# sketchov curve seed=8", 0) == 0);
  CHECK(text.find("\nk,exact,sketched,baseline,ratio\n") != std::string::npos);
}

TEST_CASE("ranked theta orders the leading indices first") {
  const std::vector<std::int64_t> lead{7, 2, 9};
  const ParameterVector theta = make_ranked_theta(20, lead, 1);
  CHECK(topk_magnitude_mask(theta, 3).indices() == std::vector<std::int64_t>{2, 7, 9});
  CHECK(topk_magnitude_mask(theta, 1).indices() == std::vector<std::int64_t>{7});
}

TEST_CASE("bijection suite") {
  const BijectionReport r = bijection_suite(100, 200, 1);
  CHECK(r.trials == 200);
  CHECK(r.mask_projection <= 1e-12);
  CHECK(r.mask_iou <= 1e-12);
  CHECK(r.mask_hamming <= 1e-12);
  CHECK(r.mask_count <= 1e-12);
  CHECK(r.basis_projection <= 1e-10);
  CHECK(r.basis_angles <= 1e-10);
}

TEST_CASE("baseline csv") {
  BaselineConfig cfg;
  cfg.dims = {16};
  cfg.rhos = {0.25};
  cfg.modalities = {Modality::OO};
  cfg.metrics = {MetricKind::overlap, MetricKind::geodesic};
  cfg.samples = 4;
  cfg.seed = 11;
  std::ostringstream csv;
  write_baseline_csv(csv, run_baseline(cfg));
  const std::string text = csv.str();
  CHECK(text.rfind("# sketchov baseline seed=11 T=4\n", 0) == 0);
  CHECK(text.find("modality,metric,D,k,rho,T,median,p5,p95,mean,std\n") != std::string::npos);
  CHECK(text.find("OO,overlap,16,4,") != std::string::npos);
}
