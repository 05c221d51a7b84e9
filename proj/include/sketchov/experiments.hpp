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
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sketchov/common.hpp"
#include "sketchov/grassmann.hpp"
#include "sketchov/masks.hpp"
#include "sketchov/operator.hpp"
#include "sketchov/sketch.hpp"

namespace sketchov {

/// Which manifolds the two random elements of a pair are drawn from:
/// O = Stiefel (Haar), M = binary masks.
enum class Modality { OO, OM, MM };

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view name);

struct BaselineConfig {
  std::vector<Index> dims;
  std::vector<double> rhos;
  std::vector<Modality> modalities{Modality::OO, Modality::OM, Modality::MM};
  std::vector<MetricKind> metrics{kAllMetricKinds.begin(), kAllMetricKinds.end()};
  int samples = 50;  ///< T
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Keep every normalized sample in the result rows.
  bool keep_samples = false;
};

struct BaselineRow {
  Modality modality = Modality::OO;
  MetricKind metric = MetricKind::overlap;
  Index dim = 0;
  Index k = 0;
  double rho = 0.0;
  int samples = 0;
  double median = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;  ///< normalized similarities when keep_samples
};

struct BaselineResult {
  BaselineConfig config;
  std::vector<BaselineRow> rows;

  /// Row for a cell, or nullptr.
  const BaselineRow* find(Modality modality, MetricKind metric, Index dim, double rho) const;
};

/// k = max(1, round(rho * D)).
Index rank_for_ratio(Index dim, double rho);

/// Grid experiment: T random pairs per (D, rho, modality) cell, every
/// requested metric normalized to a [0, 1] similarity. Deterministic per seed
/// regardless of worker count.
BaselineResult run_baseline(const BaselineConfig& config);

struct DistributionSummary {
  double median = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Sample statistics; quantiles by linear interpolation on the sorted sample.
DistributionSummary summarize(std::vector<double> values);

struct LemmaCheck {
  Index dim = 0;
  Index k = 0;
  int samples = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double expected = 0.0;
  bool pass = false;
};

/// Monte Carlo check of E[overlap] = k / D over T >= 30 uniform pairs;
/// passes iff |mean - k/D| <= 4 standard errors.
LemmaCheck verify_lemma(Index dim, Index k, int samples, std::uint64_t seed);

struct CurveRow {
  Index k = 0;
  std::optional<double> exact;
  double sketched = 0.0;
  double baseline = 0.0;
};

struct OverlapCurve {
  std::string operator_description;
  Index dim = 0;
  Index n_outer = 0;
  Index n_inner = 0;
  std::uint64_t seed = 0;
  std::vector<CurveRow> rows;
  Vector sketched_eigvals;
};

/// Dense eigendecompositions are only attempted up to this dimension.
inline constexpr Index kDenseOracleCap = 4000;

struct CurveOptions {
  /// Compute the exact branch when D <= kDenseOracleCap.
  bool exact = true;
  MeasureOptions measure;
};

/// For k = 1..k_max: mask = top-k magnitudes of theta; exact overlap against
/// the dense top-k eigenbasis, sketched overlap against truncate(seigh, k).
OverlapCurve overlap_curve(const LinearOperator& op, const ParameterVector& theta, Index n_outer,
                           Index n_inner, Index k_max, std::uint64_t seed,
                           const CurveOptions& options = {}, std::string description = {});

struct RatioRow {
  Index k = 0;
  double sketched_ratio = 0.0;
  std::optional<double> exact_ratio;
};

/// overlap / baseline per k.
std::vector<RatioRow> overlap_ratio_report(const OverlapCurve& curve);

/// theta whose magnitude ranking starts with `leading` (in that order),
/// the remaining entries smaller and randomly ordered.
ParameterVector make_ranked_theta(Index dim, const std::vector<std::int64_t>& leading,
                                  std::uint64_t seed);

/// Largest deviations across the equal-k overlap identities on random pairs.
struct BijectionReport {
  int trials = 0;
  double mask_projection = 0.0;  ///< |overlap - (1 - projF^2/k)| on mask pairs
  double mask_iou = 0.0;         ///< |overlap - 2 IoU / (1 + IoU)|
  double mask_hamming = 0.0;     ///< |overlap - (1 - bitflips / (2k))|
  double mask_count = 0.0;       ///< |overlap - |m1 & m2| / k|
  double basis_projection = 0.0; ///< |overlap - (1 - projF^2/k)| on Stiefel pairs
  double basis_angles = 0.0;     ///< |overlap - ||cos sigma||^2 / k| on Stiefel pairs
};

BijectionReport bijection_suite(Index dim, int trials, std::uint64_t seed);

// CSV emitters. Each file starts with a `#` comment line carrying the seed.
void write_baseline_csv(std::ostream& out, const BaselineResult& result);
void write_curve_csv(std::ostream& out, const OverlapCurve& curve);

}  // namespace sketchov
