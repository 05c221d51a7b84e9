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
#include "sketchov/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>
#include <tuple>

#include "sketchov/dense.hpp"
#include "sketchov/kernels.hpp"
#include "sketchov/random.hpp"

namespace sketchov {

namespace {

// One random element: either a dense Stiefel basis or a mask.
struct Draw {
  std::optional<OrthonormalBasis> basis;
  std::optional<SparseMask> mask;
};

Draw draw_element(bool from_masks, Index dim, Index k, Engine& engine) {
  Draw d;
  if (from_masks) {
    d.mask = sample_mask(dim, k, engine);
  } else {
    d.basis = sample_stiefel(dim, k, engine);
  }
  return d;
}

// k x k matrix Q1^T Q2 for any combination of bases and masks.
Matrix cross_gram(const Draw& a, const Draw& b, Index k) {
  if (a.basis && b.basis) return a.basis->columns().transpose() * b.basis->columns();
  if (a.basis && b.mask) {
    Matrix g(k, k);
    for (Index j = 0; j < k; ++j) g.col(j) = a.basis->columns().row(b.mask->indices()[j]).transpose();
    return g;
  }
  if (a.mask && b.basis) return cross_gram(b, a, k).transpose();
  Matrix g = Matrix::Zero(k, k);
  const auto& ia = a.mask->indices();
  const auto& ib = b.mask->indices();
  for (Index i = 0, j = 0; i < k && j < k;) {
    if (ia[i] < ib[j]) {
      ++i;
    } else if (ib[j] < ia[i]) {
      ++j;
    } else {
      g(i++, j++) = 1.0;
    }
  }
  return g;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::uint64_t cell_stream(Index dim, Index k, Modality m, int t) {
  std::uint64_t h = static_cast<std::uint64_t>(dim);
  h = derive_seed(h, static_cast<std::uint64_t>(k));
  h = derive_seed(h, static_cast<std::uint64_t>(m));
  return derive_seed(h, static_cast<std::uint64_t>(t));
}

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::OO: return "OO";
    case Modality::OM: return "OM";
    case Modality::MM: return "MM";
  }
  return "??";
}

std::optional<Modality> parse_modality(std::string_view name) {
  for (Modality m : {Modality::OO, Modality::OM, Modality::MM})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

const BaselineRow* BaselineResult::find(Modality modality, MetricKind metric, Index dim,
                                        double rho) const {
  for (const auto& r : rows)
    if (r.modality == modality && r.metric == metric && r.dim == dim && r.rho == rho) return &r;
  return nullptr;
}

Index rank_for_ratio(Index dim, double rho) {
  const auto k = static_cast<Index>(std::llround(rho * static_cast<double>(dim)));
  return std::clamp<Index>(k, 1, dim);
}

DistributionSummary summarize(std::vector<double> values) {
  DistributionSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.median = quantile_sorted(values, 0.5);
  s.p5 = quantile_sorted(values, 0.05);
  s.p95 = quantile_sorted(values, 0.95);
  return s;
}

BaselineResult run_baseline(const BaselineConfig& config) {
  if (config.dims.empty() || config.rhos.empty() || config.modalities.empty() ||
      config.metrics.empty())
    throw ParameterError("run_baseline: grids must be nonempty");
  if (config.samples < 2) throw ParameterError("run_baseline: T must be >= 2");
  for (Index d : config.dims)
    if (d < 1) throw ParameterError("run_baseline: dimensions must be positive");
  for (double r : config.rhos)
    if (!(r > 0.0 && r <= 1.0)) throw ParameterError("run_baseline: rho must lie in (0, 1]");

  const bool need_angles = std::any_of(config.metrics.begin(), config.metrics.end(),
                                       [](MetricKind m) { return m != MetricKind::overlap; });

  struct Job {
    Index dim;
    double rho;
    Index k;
    Modality modality;
    int t;
  };
  std::vector<Job> jobs;
  for (Index d : config.dims)
    for (double r : config.rhos)
      for (Modality m : config.modalities)
        for (int t = 0; t < config.samples; ++t) jobs.push_back({d, r, rank_for_ratio(d, r), m, t});

  // values[job][metric]
  std::vector<std::vector<double>> values(jobs.size(),
                                          std::vector<double>(config.metrics.size()));
  auto evaluate = [&](std::size_t j) {
    const Job& job = jobs[j];
    Engine engine = make_engine(config.seed, cell_stream(job.dim, job.k, job.modality, job.t));
    const bool first_mask = job.modality == Modality::MM;
    const bool second_mask = job.modality != Modality::OO;
    const Draw a = draw_element(first_mask, job.dim, job.k, engine);
    const Draw b = draw_element(second_mask, job.dim, job.k, engine);
    double ov = 1.0;
    std::optional<PrincipalAngles> angles;
    if (job.k == job.dim) {
      angles.emplace(Vector::Zero(job.k));
    } else {
      const Matrix g = cross_gram(a, b, job.k);
      ov = kernels::sum_squares({g.data(), static_cast<std::size_t>(g.size())}) /
           static_cast<double>(job.k);
      if (need_angles) {
        Eigen::BDCSVD<Matrix> svd(g);
        angles.emplace(PrincipalAngles::from_cosines(svd.singularValues()));
      }
    }
    for (std::size_t m = 0; m < config.metrics.size(); ++m) {
      const MetricKind kind = config.metrics[m];
      const double raw = kind == MetricKind::overlap ? ov : metric(kind, *angles);
      values[j][m] = similarity(kind, raw, job.k);
    }
  };

  const unsigned workers = std::max(1u, config.workers);
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) evaluate(j);
  } else {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = w; j < jobs.size(); j += workers) evaluate(j);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  BaselineResult result;
  result.config = config;
  std::size_t cursor = 0;
  for (Index d : config.dims) {
    for (double r : config.rhos) {
      for (Modality mod : config.modalities) {
        const std::size_t first = cursor;
        cursor += static_cast<std::size_t>(config.samples);
        for (std::size_t m = 0; m < config.metrics.size(); ++m) {
          std::vector<double> sample;
          sample.reserve(static_cast<std::size_t>(config.samples));
          for (std::size_t j = first; j < cursor; ++j) sample.push_back(values[j][m]);
          const DistributionSummary s = summarize(sample);
          BaselineRow row;
          row.modality = mod;
          row.metric = config.metrics[m];
          row.dim = d;
          row.k = rank_for_ratio(d, r);
          row.rho = r;
          row.samples = config.samples;
          row.median = s.median;
          row.p5 = s.p5;
          row.p95 = s.p95;
          row.mean = s.mean;
          row.stddev = s.stddev;
          if (config.keep_samples) row.values = std::move(sample);
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
  return result;
}

LemmaCheck verify_lemma(Index dim, Index k, int samples, std::uint64_t seed) {
  if (samples < 30) throw ParameterError("verify_lemma: T must be >= 30");
  if (k < 1 || k > dim) throw ParameterError("verify_lemma: need 1 <= k <= D");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(samples));
  for (int t = 0; t < samples; ++t) {
    Engine engine = make_engine(seed, cell_stream(dim, k, Modality::OO, t));
    const OrthonormalBasis a = sample_stiefel(dim, k, engine);
    const OrthonormalBasis b = sample_stiefel(dim, k, engine);
    values.push_back(overlap(a, b));
  }
  const DistributionSummary s = summarize(values);
  LemmaCheck out;
  out.dim = dim;
  out.k = k;
  out.samples = samples;
  out.mean = s.mean;
  out.stderr_ = s.stddev / std::sqrt(static_cast<double>(samples));
  out.expected = overlap_baseline(dim, k);
  out.pass = std::abs(out.mean - out.expected) <= 4.0 * out.stderr_;
  return out;
}

OverlapCurve overlap_curve(const LinearOperator& op, const ParameterVector& theta, Index n_outer,
                           Index n_inner, Index k_max, std::uint64_t seed,
                           const CurveOptions& options, std::string description) {
  const Index dim = op.rows();
  if (theta.dim() != dim) throw ShapeError("overlap_curve: theta dimension != operator dimension");
  if (k_max < 1 || k_max > n_outer || n_outer > n_inner || n_inner > dim)
    throw ParameterError("overlap_curve: need 1 <= k_max <= n_o <= n_i <= D");

  OverlapCurve curve;
  curve.operator_description = std::move(description);
  curve.dim = dim;
  curve.n_outer = n_outer;
  curve.n_inner = n_inner;
  curve.seed = seed;

  const SketchedEigh dec = seigh(op, draw_measurements(dim, n_inner, n_outer, seed),
                                 options.measure);
  curve.sketched_eigvals = dec.eigvals;
  const Matrix sketched_basis = dec.eigenbasis();

  std::optional<Matrix> exact_basis;
  if (options.exact) {
    if (dim > kDenseOracleCap) {
      warn("overlap_curve: D=" + std::to_string(dim) + " exceeds the dense oracle cap (" +
           std::to_string(kDenseOracleCap) + "); exact column omitted");
    } else {
      const Matrix dense = op.apply(Matrix::Identity(dim, dim));
      exact_basis = dense_top_eigh(0.5 * (dense + dense.transpose()), k_max).eigvecs;
    }
  }

  for (Index k = 1; k <= k_max; ++k) {
    const SparseMask mask = topk_magnitude_mask(theta, k);
    CurveRow row;
    row.k = k;
    row.baseline = overlap_baseline(dim, k);
    row.sketched = mask_eigenspace_overlap(
        mask, OrthonormalBasis::unchecked(sketched_basis.leftCols(k)), k);
    if (exact_basis)
      row.exact =
          mask_eigenspace_overlap(mask, OrthonormalBasis::unchecked(exact_basis->leftCols(k)), k);
    curve.rows.push_back(row);
  }
  return curve;
}

std::vector<RatioRow> overlap_ratio_report(const OverlapCurve& curve) {
  std::vector<RatioRow> out;
  out.reserve(curve.rows.size());
  for (const auto& r : curve.rows) {
    if (!(r.baseline > 0.0)) throw DomainError("overlap_ratio_report: nonpositive baseline");
    RatioRow row;
    row.k = r.k;
    row.sketched_ratio = r.sketched / r.baseline;
    if (r.exact) row.exact_ratio = *r.exact / r.baseline;
    out.push_back(row);
  }
  return out;
}

ParameterVector make_ranked_theta(Index dim, const std::vector<std::int64_t>& leading,
                                  std::uint64_t seed) {
  if (static_cast<Index>(leading.size()) > dim)
    throw ParameterError("make_ranked_theta: more leading indices than D");
  Engine engine = make_engine(seed, 0x7e7a);
  std::uniform_real_distribution<double> small(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Vector theta(dim);
  for (Index i = 0; i < dim; ++i) theta[i] = (coin(engine) ? 1.0 : -1.0) * small(engine);
  std::vector<char> seen(static_cast<std::size_t>(dim), 0);
  const double m = static_cast<double>(std::max<std::size_t>(leading.size(), 1));
  for (std::size_t j = 0; j < leading.size(); ++j) {
    const auto i = leading[j];
    if (i < 0 || i >= dim || seen[static_cast<std::size_t>(i)])
      throw ParameterError("make_ranked_theta: bad or repeated leading index");
    seen[static_cast<std::size_t>(i)] = 1;
    theta[i] = (coin(engine) ? 1.0 : -1.0) * (2.0 + (m - static_cast<double>(j)) / m);
  }
  return ParameterVector(std::move(theta));
}

BijectionReport bijection_suite(Index dim, int trials, std::uint64_t seed) {
  BijectionReport rep;
  rep.trials = trials;
  Engine engine = make_engine(seed, 0xb1);
  std::uniform_int_distribution<Index> pick_k(1, std::max<Index>(1, dim / 2));
  for (int t = 0; t < trials; ++t) {
    const Index k = pick_k(engine);
    const SparseMask m1 = sample_mask(dim, k, engine);
    const SparseMask m2 = sample_mask(dim, k, engine);
    const OrthonormalBasis b1 = mask_basis(m1);
    const OrthonormalBasis b2 = mask_basis(m2);
    const double ov = overlap(b1, b2);
    const double kd = static_cast<double>(k);
    const double proj_f = metric(MetricKind::projF, principal_angles(b1, b2));
    const double j = iou(m1, m2);
    rep.mask_projection = std::max(rep.mask_projection, std::abs(ov - (1.0 - proj_f * proj_f / kd)));
    rep.mask_iou = std::max(rep.mask_iou, std::abs(ov - 2.0 * j / (1.0 + j)));
    rep.mask_hamming = std::max(
        rep.mask_hamming, std::abs(ov - (1.0 - static_cast<double>(hamming(m1, m2)) / (2.0 * kd))));
    rep.mask_count = std::max(
        rep.mask_count, std::abs(ov - static_cast<double>(intersection_size(m1, m2)) / kd));

    const OrthonormalBasis q1 = sample_stiefel(dim, k, engine);
    const OrthonormalBasis q2 = sample_stiefel(dim, k, engine);
    const double qov = overlap(q1, q2);
    const PrincipalAngles ang = principal_angles(q1, q2);
    const double qproj = metric(MetricKind::projF, ang);
    rep.basis_projection = std::max(rep.basis_projection, std::abs(qov - (1.0 - qproj * qproj / kd)));
    rep.basis_angles =
        std::max(rep.basis_angles, std::abs(qov - metric(MetricKind::overlap, ang)));
  }
  return rep;
}

void write_baseline_csv(std::ostream& out, const BaselineResult& result) {
  out << "# sketchov baseline seed=" << result.config.seed << " T=" << result.config.samples
      << '\n';
  out << "modality,metric,D,k,rho,T,median,p5,p95,mean,std\n";
  out << std::setprecision(10);
  for (const auto& r : result.rows) {
    out << to_string(r.modality) << ',' << to_string(r.metric) << ',' << r.dim << ',' << r.k
        << ',' << r.rho << ',' << r.samples << ',' << r.median << ',' << r.p5 << ',' << r.p95
        << ',' << r.mean << ',' << r.stddev << '\n';
  }
}

void write_curve_csv(std::ostream& out, const OverlapCurve& curve) {
  out << "# sketchov curve seed=" << curve.seed << " D=" << curve.dim
      << " n_outer=" << curve.n_outer << " n_inner=" << curve.n_inner;
  if (!curve.operator_description.empty()) out << " operator=" << curve.operator_description;
  out << '\n';
  out << "k,exact,sketched,baseline,ratio\n";
  out << std::setprecision(12);
  const auto ratios = overlap_ratio_report(curve);
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const auto& r = curve.rows[i];
    out << r.k << ',';
    if (r.exact) out << *r.exact;
    out << ',' << r.sketched << ',' << r.baseline << ',' << ratios[i].sketched_ratio << '\n';
  }
}

}  // namespace sketchov
