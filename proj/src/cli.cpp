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
#include "sketchov/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sketchov/experiments.hpp"
#include "sketchov/grassmann.hpp"
#include "sketchov/kernels.hpp"
#include "sketchov/masks.hpp"
#include "sketchov/operator.hpp"
#include "sketchov/random.hpp"
#include "sketchov/sketch.hpp"
#include "sketchov/storage.hpp"

namespace sketchov {

namespace {

namespace fs = std::filesystem;
using storage::Json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kDefaultOutputDir = "sketchov-out";

// ---------------------------------------------------------------------------
// Shared option groups

struct OperatorFlags {
  std::string dense_path;
  bool nonhermitian = false;
  Index dim = 1000;
  Index rank = 50;
  std::string spectrum = "linear";
  double exponent = 2.0;
  Index bulk_rank = 0;
  double bulk_scale = 0.25;
  double alignment = 0.0;
  Index mask_k = 0;
  std::uint64_t operator_seed = 1;
  std::string theta_path;
};

void add_operator_flags(CLI::App* sub, OperatorFlags& f) {
  sub->add_option("--dense", f.dense_path,
                  "Load the operator from a stored matrix (chunked dir or merged file) "
                  "instead of building a planted one");
  sub->add_flag("--nonhermitian", f.nonhermitian,
                "Treat a --dense matrix as non-hermitian (rejected by the eigensolver)");
  sub->add_option("--dim,-D", f.dim, "Planted operator dimension D")->capture_default_str();
  sub->add_option("--rank,-r", f.rank, "Planted signal rank r")->capture_default_str();
  sub->add_option("--spectrum", f.spectrum,
                  "Signal eigenvalues: linear (r, r-1, ..., 1) or power (i^-exponent)")
      ->check(CLI::IsMember({"linear", "power"}))
      ->capture_default_str();
  sub->add_option("--exponent", f.exponent, "Decay exponent for --spectrum power")
      ->capture_default_str();
  sub->add_option("--bulk-rank", f.bulk_rank,
                  "Extra bulk eigenvalues below the signal, linearly spaced in "
                  "(0, bulk-scale * lambda_r]")
      ->capture_default_str();
  sub->add_option("--bulk-scale", f.bulk_scale, "Largest bulk eigenvalue relative to lambda_r")
      ->capture_default_str();
  sub->add_option("--alignment", f.alignment,
                  "Concentration of the leading eigenvectors on the mask target, in [0, 1]")
      ->capture_default_str();
  sub->add_option("--mask-k", f.mask_k, "Mask target size (0 = rank)")->capture_default_str();
  sub->add_option("--operator-seed", f.operator_seed, "Seed of the planted basis and mask target")
      ->capture_default_str();
  sub->add_option("--theta", f.theta_path,
                  "Parameter vector file (whitespace separated decimals); default derives "
                  "theta from the mask target");
}

struct BuiltOperator {
  OperatorPtr op;
  std::optional<SparseMask> mask_target;
  Json json;
};

Vector planted_spectrum(const OperatorFlags& f) {
  if (f.rank < 1) throw ParameterError("--rank must be >= 1");
  if (f.bulk_rank < 0) throw ParameterError("--bulk-rank must be >= 0");
  if (!(f.bulk_scale > 0.0 && f.bulk_scale <= 1.0))
    throw ParameterError("--bulk-scale must lie in (0, 1]");
  if (f.rank + f.bulk_rank > f.dim) throw ParameterError("--rank + --bulk-rank exceeds --dim");
  Vector ev(f.rank + f.bulk_rank);
  for (Index i = 0; i < f.rank; ++i) {
    ev[i] = f.spectrum == "linear" ? static_cast<double>(f.rank - i)
                                   : std::pow(static_cast<double>(i + 1), -f.exponent);
  }
  const double top_bulk = f.bulk_scale * ev[f.rank - 1];
  for (Index j = 0; j < f.bulk_rank; ++j)
    ev[f.rank + j] = top_bulk * static_cast<double>(f.bulk_rank - j) /
                     static_cast<double>(f.bulk_rank);
  return ev;
}

BuiltOperator build_operator(const OperatorFlags& f) {
  BuiltOperator b;
  if (!f.dense_path.empty()) {
    auto dense = std::make_shared<DenseOperator>(
        storage::load_dense_operator(f.dense_path, !f.nonhermitian));
    b.json = {{"source", "dense"},
              {"path", f.dense_path},
              {"hermitian", !f.nonhermitian},
              {"rows", dense->rows()},
              {"cols", dense->cols()}};
    b.op = std::move(dense);
    return b;
  }
  if (f.dim < 1) throw ParameterError("--dim must be >= 1");
  if (!(f.alignment >= 0.0 && f.alignment <= 1.0))
    throw ParameterError("--alignment must lie in [0, 1]");
  const Index mask_k = f.mask_k == 0 ? f.rank : f.mask_k;
  if (mask_k < 1 || mask_k > f.dim) throw ParameterError("--mask-k must lie in [1, D]");
  const Vector ev = planted_spectrum(f);
  SparseMask target = sample_mask(f.dim, mask_k, f.operator_seed);
  b.op = std::make_shared<PlantedOperator>(
      make_planted_operator(f.dim, ev, target, f.alignment, f.operator_seed));
  b.json = {{"source", "planted"},   {"dim", f.dim},
            {"rank", f.rank},        {"spectrum", f.spectrum},
            {"exponent", f.exponent}, {"bulk_rank", f.bulk_rank},
            {"bulk_scale", f.bulk_scale}, {"alignment", f.alignment},
            {"mask_k", mask_k},      {"operator_seed", f.operator_seed}};
  b.mask_target = std::move(target);
  return b;
}

ParameterVector load_theta(const fs::path& path, Index dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open theta file " + path.string());
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw IntegrityError("theta file: bad value '" + token + "'");
    values.push_back(v);
  }
  if (static_cast<Index>(values.size()) != dim)
    throw ShapeError("theta file has " + std::to_string(values.size()) + " values, operator D=" +
                     std::to_string(dim));
  return ParameterVector(Eigen::Map<const Vector>(values.data(), dim));
}

ParameterVector resolve_theta(const OperatorFlags& f, const BuiltOperator& b, std::uint64_t seed) {
  const Index dim = b.op->rows();
  if (!f.theta_path.empty()) return load_theta(f.theta_path, dim);
  if (b.mask_target) return make_ranked_theta(dim, b.mask_target->indices(), seed);
  return make_ranked_theta(dim, {}, seed);
}

struct OutputFlags {
  std::string out_dir;
  bool overwrite = false;
};

void add_output_flags(CLI::App* sub, OutputFlags& f) {
  sub->add_option("--out,-o", f.out_dir,
                  std::string("Output directory (default: $") + kOutputDirEnv + " or " +
                      kDefaultOutputDir + ")");
  sub->add_flag("--overwrite", f.overwrite, "Replace existing outputs");
}

fs::path resolve_output_dir(const OutputFlags& f) {
  if (!f.out_dir.empty()) return f.out_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return kDefaultOutputDir;
}

// Creates the directory and refuses to clobber any of `files` unless overwrite.
void prepare_output_dir(const fs::path& dir, const std::vector<std::string>& files,
                        bool overwrite) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& name : files) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) continue;
    if (!overwrite) throw IoError(p.string() + " exists (use --overwrite)");
    fs::remove_all(p, ec);
    if (ec) throw IoError("cannot remove " + p.string() + ": " + ec.message());
  }
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + p.string());
  f << std::setprecision(17);
  return f;
}

void close_output(std::ofstream& f, const fs::path& p) {
  f.close();
  if (!f) throw IoError("write failed: " + p.string());
}

Json base_config(const std::string& subcommand, std::uint64_t seed) {
  return {{"tool", "sketchov"},
          {"version", kVersion},
          {"subcommand", subcommand},
          {"seed", seed},
          {"simd", std::string(kernels::to_string(kernels::active_level()))}};
}

void write_config(const fs::path& dir, const Json& config) {
  const fs::path p = dir / "config.json";
  auto f = open_output(p);
  f << config.dump(2) << '\n';
  close_output(f, p);
}

Index resolve_inner(Index n_inner, Index n_outer, Index dim) {
  return n_inner > 0 ? n_inner : default_inner(n_outer, dim);
}

void check_sketch_sizes(Index n_outer, Index n_inner, Index dim) {
  if (n_outer < 1) throw ParameterError("--n-outer must be >= 1");
  if (n_inner < n_outer)
    throw ParameterError("--n-inner (" + std::to_string(n_inner) + ") must be >= --n-outer (" +
                         std::to_string(n_outer) + ")");
  if (n_inner > dim)
    throw ParameterError("--n-inner (" + std::to_string(n_inner) + ") exceeds D=" +
                         std::to_string(dim));
}

// Runs `job(i)` for i in [0, n) on up to `workers` threads, rethrowing the
// first failure.
template <typename Job>
void parallel_for(std::size_t n, unsigned workers, Job job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n; i = next++) job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeFlags {
  OperatorFlags op;
  OutputFlags output;
  Index n_outer = 0;
  Index n_inner = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  Index chunk_cols = 0;
  bool keep_chunks = false;
};

int cmd_decompose(const DecomposeFlags& f, std::ostream& out) {
  const BuiltOperator built = build_operator(f.op);
  const LinearOperator& op = *built.op;
  if (!op.hermitian()) throw ContractError("decompose: operator is not hermitian");
  const Index dim = op.rows();
  const Index n_inner = resolve_inner(f.n_inner, f.n_outer, dim);
  check_sketch_sizes(f.n_outer, n_inner, dim);
  if (f.chunk_cols < 0) throw ParameterError("--chunk-cols must be >= 0");
  if (f.workers < 1) throw ParameterError("--workers must be >= 1");
  const MeasurementEnsemble ens = draw_measurements(dim, n_inner, f.n_outer, f.seed);

  const fs::path dir = resolve_output_dir(f.output);
  prepare_output_dir(dir,
                     {"measurements", "measurements.skm", "q", "u", "eigvals.csv", "config.json"},
                     f.output.overwrite);

  // Pass over the operator: columns [0, n_o) are A * Omega_O, the rest
  // A * Omega_I. Workers own disjoint chunks of the store.
  Matrix test(dim, n_inner);
  test.leftCols(f.n_outer) = ens.omega_outer;
  test.rightCols(n_inner - f.n_outer) = ens.omega_inner;
  const Index chunk_cols = f.chunk_cols > 0 ? f.chunk_cols : storage::default_chunk_cols(n_inner);
  const fs::path chunk_dir = dir / "measurements";
  const fs::path merged_file = dir / "measurements.skm";
  Json meta = {{"kind", "seigh-measurements"}, {"seed", f.seed}, {"n_outer", f.n_outer},
               {"n_inner", n_inner}};
  auto store = storage::ChunkedMatrixStore::create(chunk_dir, dim, n_inner, chunk_cols,
                                                   f.output.overwrite, meta);
  const auto& chunks = store.manifest().chunks;
  parallel_for(chunks.size(), f.workers, [&](std::size_t i) {
    const auto& c = chunks[i];
    store.write_columns(c.col_start, op.apply(test.middleCols(c.col_start, c.col_count)));
  });
  store.seal();
  storage::merge(store, merged_file, f.output.overwrite);
  if (!f.keep_chunks) fs::remove_all(chunk_dir);

  const storage::MonolithicMatrix merged = storage::MonolithicMatrix::open(merged_file);
  EighMeasurements meas;
  meas.outer = merged.read_columns(0, f.n_outer);
  meas.inner = merged.read_columns(f.n_outer, n_inner - f.n_outer);
  const SketchedEigh dec = seigh_from_measurements(ens, meas);

  Json dec_meta = {{"seed", f.seed}, {"n_outer", f.n_outer}, {"n_inner", n_inner}};
  storage::save_matrix(dir / "q", dec.q, storage::default_chunk_cols(dec.q.cols()), f.output.overwrite,
                       dec_meta);
  storage::save_matrix(dir / "u", dec.u, storage::default_chunk_cols(dec.u.cols()), f.output.overwrite,
                       dec_meta);

  const fs::path ev_path = dir / "eigvals.csv";
  auto ev = open_output(ev_path);
  ev << "# sketchov decompose seed=" << f.seed << " n_outer=" << f.n_outer
     << " n_inner=" << n_inner << '\n';
  ev << "index,eigenvalue\n";
  for (Index i = 0; i < dec.eigvals.size(); ++i) ev << i << ',' << dec.eigvals[i] << '\n';
  close_output(ev, ev_path);

  Json config = base_config("decompose", f.seed);
  config["operator"] = built.json;
  config["n_outer"] = f.n_outer;
  config["n_inner"] = n_inner;
  config["workers"] = f.workers;
  config["chunk_cols"] = chunk_cols;
  config["keep_chunks"] = f.keep_chunks;
  config["output_dir"] = dir.string();
  config["operator_columns_applied"] = n_inner;
  config["diagnostics"] = {{"degenerate_columns", dec.diagnostics.degenerate_columns},
                           {"left_solve_rank", dec.diagnostics.left_solve_rank},
                           {"right_solve_rank", dec.diagnostics.right_solve_rank},
                           {"core_asymmetry", dec.diagnostics.core_asymmetry},
                           {"warnings", dec.diagnostics.warnings}};
  write_config(dir, config);

  out << "decompose: D=" << dim << " n_outer=" << f.n_outer << " n_inner=" << n_inner
      << " |lambda_1|=" << std::abs(dec.eigvals[0]) << " -> " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// baseline

struct BaselineFlags {
  OutputFlags output;
  std::vector<Index> dims{16, 32, 64, 128, 256, 512, 1024, 2048};
  std::vector<double> rhos{0.4, 0.2, 0.05, 0.01};
  std::vector<std::string> modalities{"OO", "OM", "MM"};
  std::vector<std::string> metrics;
  int samples = 50;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

int cmd_baseline(const BaselineFlags& f, std::ostream& out) {
  BaselineConfig cfg;
  cfg.dims = f.dims;
  cfg.rhos = f.rhos;
  cfg.samples = f.samples;
  cfg.seed = f.seed;
  cfg.workers = f.workers;
  cfg.modalities.clear();
  for (const auto& m : f.modalities) {
    const auto parsed = parse_modality(m);
    if (!parsed) throw ParameterError("unknown modality '" + m + "'");
    cfg.modalities.push_back(*parsed);
  }
  if (!f.metrics.empty()) {
    cfg.metrics.clear();
    for (const auto& m : f.metrics) {
      const auto parsed = parse_metric_kind(m);
      if (!parsed) throw ParameterError("unknown metric '" + m + "'");
      cfg.metrics.push_back(*parsed);
    }
  }
  if (f.workers < 1) throw ParameterError("--workers must be >= 1");
  // Validate before touching the filesystem.
  if (cfg.samples < 2) throw ParameterError("--samples must be >= 2");
  for (Index d : cfg.dims)
    if (d < 1) throw ParameterError("--dims entries must be >= 1");
  for (double r : cfg.rhos)
    if (!(r > 0.0 && r <= 1.0)) throw ParameterError("--rho entries must lie in (0, 1]");

  const fs::path dir = resolve_output_dir(f.output);
  prepare_output_dir(dir, {"baseline.csv", "config.json"}, f.output.overwrite);
  const BaselineResult result = run_baseline(cfg);

  const fs::path csv = dir / "baseline.csv";
  auto file = open_output(csv);
  write_baseline_csv(file, result);
  close_output(file, csv);

  Json config = base_config("baseline", f.seed);
  config["dims"] = f.dims;
  config["rhos"] = f.rhos;
  config["modalities"] = f.modalities;
  std::vector<std::string> metric_names;
  for (MetricKind m : cfg.metrics) metric_names.emplace_back(to_string(m));
  config["metrics"] = metric_names;
  config["samples"] = f.samples;
  config["workers"] = f.workers;
  config["output_dir"] = dir.string();
  write_config(dir, config);

  out << "baseline: " << result.rows.size() << " rows -> " << csv.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// curve

struct CurveFlags {
  OperatorFlags op;
  OutputFlags output;
  Index n_outer = 0;
  Index n_inner = 0;
  Index top_k = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool no_exact = false;
};

int cmd_curve(const CurveFlags& f, std::ostream& out) {
  const BuiltOperator built = build_operator(f.op);
  const LinearOperator& op = *built.op;
  if (!op.hermitian()) throw ContractError("curve: operator is not hermitian");
  const Index dim = op.rows();
  const Index n_inner = resolve_inner(f.n_inner, f.n_outer, dim);
  check_sketch_sizes(f.n_outer, n_inner, dim);
  const Index k_max = f.top_k > 0 ? f.top_k : f.n_outer;
  if (k_max > f.n_outer) throw ParameterError("--top-k must be <= --n-outer");
  if (f.workers < 1) throw ParameterError("--workers must be >= 1");
  const ParameterVector theta = resolve_theta(f.op, built, f.seed);

  const fs::path dir = resolve_output_dir(f.output);
  prepare_output_dir(dir, {"curve.csv", "ratio.csv", "config.json"}, f.output.overwrite);

  CurveOptions options;
  options.exact = !f.no_exact;
  options.measure.workers = f.workers;
  const OverlapCurve curve =
      overlap_curve(op, theta, f.n_outer, n_inner, k_max, f.seed, options, built.json.dump());

  const fs::path csv = dir / "curve.csv";
  auto file = open_output(csv);
  write_curve_csv(file, curve);
  close_output(file, csv);

  const fs::path ratio_path = dir / "ratio.csv";
  auto ratio = open_output(ratio_path);
  ratio << "# sketchov curve ratio seed=" << f.seed << '\n';
  ratio << "k,sketched_ratio,exact_ratio\n";
  for (const auto& r : overlap_ratio_report(curve)) {
    ratio << r.k << ',' << r.sketched_ratio << ',';
    if (r.exact_ratio) ratio << *r.exact_ratio;
    ratio << '\n';
  }
  close_output(ratio, ratio_path);

  Json config = base_config("curve", f.seed);
  config["operator"] = built.json;
  config["theta"] = f.op.theta_path.empty() ? Json("derived") : Json(f.op.theta_path);
  config["n_outer"] = f.n_outer;
  config["n_inner"] = n_inner;
  config["top_k"] = k_max;
  config["exact"] = options.exact && dim <= kDenseOracleCap;
  config["workers"] = f.workers;
  config["output_dir"] = dir.string();
  write_config(dir, config);

  const auto& last = curve.rows.back();
  out << "curve: k_max=" << k_max << " sketched=" << last.sketched;
  if (last.exact) out << " exact=" << *last.exact;
  out << " baseline=" << last.baseline << " -> " << csv.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyFlags {
  OutputFlags output;
  int samples = 200;
  int trials = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> stores;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

void lemma_checks(const VerifyFlags& f, std::vector<Check>& checks) {
  const std::pair<Index, Index> cells[] = {{128, 6}, {512, 26}, {2048, 102}, {64, 64}};
  for (const auto& [d, k] : cells) {
    const LemmaCheck l = verify_lemma(d, k, f.samples, f.seed);
    checks.push_back({"lemma D=" + std::to_string(d) + " k=" + std::to_string(k), l.pass,
                      "mean=" + fmt(l.mean) + " expected=" + fmt(l.expected) +
                          " stderr=" + fmt(l.stderr_)});
  }
}

void bijection_checks(const VerifyFlags& f, std::vector<Check>& checks) {
  const BijectionReport r = bijection_suite(100, f.trials, f.seed);
  auto add = [&](const std::string& name, double dev, double tol) {
    checks.push_back({"bijection " + name, dev <= tol,
                      "max deviation " + fmt(dev) + " (tol " + fmt(tol) + ", " +
                          std::to_string(r.trials) + " pairs)"});
  };
  add("mask projF", r.mask_projection, 1e-12);
  add("mask IoU", r.mask_iou, 1e-12);
  add("mask bitflips", r.mask_hamming, 1e-12);
  add("mask intersection", r.mask_count, 1e-12);
  add("basis projF", r.basis_projection, 1e-10);
  add("basis angles", r.basis_angles, 1e-10);
}

void kernel_checks(std::vector<Check>& checks) {
  Engine engine = make_engine(0x6b, 0);
  std::normal_distribution<double> normal;
  std::vector<double> x(1027), y(1027);
  for (auto& v : x) v = normal(engine);
  for (auto& v : y) v = normal(engine);
  std::vector<std::int64_t> idx;
  for (std::int64_t i = 0; i < 1027; i += 3) idx.push_back(i);
  double dev = 0.0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  dev = std::max(dev, rel(kernels::dot(x, y), kernels::scalar::dot(x, y)));
  dev = std::max(dev, rel(kernels::sum_squares(x), kernels::scalar::sum_squares(x)));
  dev = std::max(dev, rel(kernels::gather_sum_squares(x, idx),
                          kernels::scalar::gather_sum_squares(x, idx)));
  checks.push_back({std::string("kernels ") + std::string(kernels::to_string(kernels::active_level())) +
                        " vs scalar",
                    dev <= 1e-12, "max relative deviation " + fmt(dev)});
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void format_checks(const fs::path& scratch, std::uint64_t seed, std::vector<Check>& checks) {
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  Matrix m = gaussian_matrix(37, 23, seed, 0xf0);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(1, 0) = -std::numeric_limits<double>::denorm_min() * 12345.0;
  m(2, 0) = -0.0;
  const fs::path chunked = scratch / "roundtrip";
  const fs::path merged = scratch / "roundtrip.skm";
  storage::save_matrix(chunked, m, 5);
  checks.push_back({"storage chunked round trip", bit_equal(storage::load_matrix(chunked), m), ""});
  storage::merge(storage::ChunkedMatrixStore::open(chunked), merged);
  checks.push_back({"storage merged round trip", bit_equal(storage::load_matrix(merged), m), ""});
  const bool clean = storage::verify(chunked).ok && storage::verify(merged).ok;
  checks.push_back({"storage verify clean", clean, ""});

  // Flip one bit in chunk 2 and expect verify to name it.
  const fs::path victim = chunked / storage::read_manifest(chunked).chunks.at(2).file;
  {
    std::fstream io(victim, std::ios::in | std::ios::out | std::ios::binary);
    io.seekg(17);
    char byte = 0;
    io.read(&byte, 1);
    byte = static_cast<char>(byte ^ 0x10);
    io.seekp(17);
    io.write(&byte, 1);
  }
  const storage::VerifyReport bad = storage::verify(chunked);
  bool names_chunk = false;
  for (const auto& p : bad.problems)
    if (p.find("chunk 2") != std::string::npos) names_chunk = true;
  checks.push_back({"storage bit flip detected", !bad.ok && names_chunk,
                    bad.problems.empty() ? "no problem reported" : bad.problems.front()});

  const SparseMask mask = sample_mask(50, 7, seed);
  std::stringstream text;
  write_mask(text, mask);
  checks.push_back({"mask text round trip", read_mask(text) == mask, ""});
  fs::remove_all(scratch);
}

int cmd_verify(const VerifyFlags& f, std::ostream& out) {
  if (f.samples < 30) throw ParameterError("--samples must be >= 30");
  if (f.trials < 1) throw ParameterError("--trials must be >= 1");
  const fs::path dir = resolve_output_dir(f.output);
  prepare_output_dir(dir, {"verify.txt", "config.json", "selftest"}, f.output.overwrite);

  std::vector<Check> checks;
  lemma_checks(f, checks);
  bijection_checks(f, checks);
  kernel_checks(checks);
  format_checks(dir / "selftest", f.seed, checks);
  for (const auto& s : f.stores) {
    const storage::VerifyReport r = storage::verify(s);
    std::string detail;
    for (const auto& p : r.problems) detail += (detail.empty() ? "" : "; ") + p;
    checks.push_back({"store " + s, r.ok, detail});
  }

  int failures = 0;
  const fs::path report_path = dir / "verify.txt";
  auto report = open_output(report_path);
  report << "# sketchov verify seed=" << f.seed << '\n';
  for (const auto& c : checks) {
    if (!c.pass) ++failures;
    std::string line = std::string(c.pass ? "PASS " : "FAIL ") + c.name;
    if (!c.detail.empty()) line += ": " + c.detail;
    report << line << '\n';
    out << line << '\n';
  }
  close_output(report, report_path);

  Json config = base_config("verify", f.seed);
  config["samples"] = f.samples;
  config["trials"] = f.trials;
  config["stores"] = f.stores;
  config["output_dir"] = dir.string();
  config["failures"] = failures;
  write_config(dir, config);

  out << failures << " of " << checks.size() << " checks failed\n";
  return std::min(failures, 255);
}

// ---------------------------------------------------------------------------
// store

struct StoreCreateFlags {
  std::string path;
  Index rows = 0;
  Index cols = 0;
  Index chunk_cols = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool overwrite = false;
};

int cmd_store_create(const StoreCreateFlags& f, std::ostream& out) {
  if (f.rows < 1 || f.cols < 1) throw ParameterError("--rows and --cols must be >= 1");
  if (f.chunk_cols < 0) throw ParameterError("--chunk-cols must be >= 0");
  if (f.workers < 1) throw ParameterError("--workers must be >= 1");
  const Index chunk_cols = f.chunk_cols > 0 ? f.chunk_cols : storage::default_chunk_cols(f.cols);
  Json meta = base_config("store create", f.seed);
  meta["content"] = "gaussian";
  meta["workers"] = f.workers;
  auto store = storage::ChunkedMatrixStore::create(f.path, f.rows, f.cols, chunk_cols,
                                                   f.overwrite, meta);
  const auto& chunks = store.manifest().chunks;
  // Each chunk draws from its own stream so the content is independent of
  // the worker count.
  parallel_for(chunks.size(), f.workers, [&](std::size_t i) {
    const auto& c = chunks[i];
    store.write_columns(c.col_start, gaussian_matrix(f.rows, c.col_count, f.seed,
                                                     0x5000 + static_cast<std::uint64_t>(c.id)));
  });
  store.seal();
  out << "store create: " << f.rows << "x" << f.cols << " in " << chunks.size() << " chunks -> "
      << f.path << '\n';
  return kExitOk;
}

int cmd_store_merge(const std::string& in, const std::string& out_file, bool overwrite,
                    std::ostream& out) {
  const auto store = storage::ChunkedMatrixStore::open(in);
  const storage::MergeReport r = storage::merge(store, out_file, overwrite);
  out << "store merge: " << r.bytes_written << " bytes -> " << out_file << '\n';
  return kExitOk;
}

int cmd_store_verify(const std::vector<std::string>& paths, std::ostream& out) {
  bool ok = true;
  for (const auto& p : paths) {
    const storage::VerifyReport r = storage::verify(p);
    out << (r.ok ? "OK   " : "FAIL ") << p << '\n';
    for (const auto& problem : r.problems) out << "  " << problem << '\n';
    ok = ok && r.ok;
  }
  return ok ? kExitOk : kExitIo;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsFlags {
  OutputFlags output;
  std::string a;
  std::string b;
  Index k = 0;
};

bool is_mask_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) return false;
  std::ifstream in(p);
  std::string head(5, '\0');
  in.read(head.data(), 5);
  return in && head == "mask ";
}

OrthonormalBasis load_basis(const fs::path& p, Index k) {
  if (is_mask_file(p)) {
    const SparseMask m = load_mask(p);
    if (k > 0 && k != m.k()) throw ShapeError("--k must equal the mask size for mask inputs");
    return mask_basis(m);
  }
  Matrix cols = storage::load_matrix(p);
  if (k > 0) {
    if (k > cols.cols()) throw ShapeError("--k exceeds the stored column count");
    cols.conservativeResize(Eigen::NoChange, k);
  }
  return OrthonormalBasis::from_columns(std::move(cols), 1e-8);
}

int cmd_metrics(const MetricsFlags& f, std::ostream& out) {
  if (f.k < 0) throw ParameterError("--k must be >= 0");
  const OrthonormalBasis q1 = load_basis(f.a, f.k);
  const OrthonormalBasis q2 = load_basis(f.b, f.k);
  const PrincipalAngles angles = principal_angles(q1, q2);

  const fs::path dir = resolve_output_dir(f.output);
  prepare_output_dir(dir, {"metrics.csv", "config.json"}, f.output.overwrite);
  const fs::path csv = dir / "metrics.csv";
  auto file = open_output(csv);
  file << "# sketchov metrics seed=none a=" << f.a << " b=" << f.b << '\n';
  file << "kind,D,k,value,similarity\n";
  for (MetricKind kind : kAllMetricKinds) {
    const double v = metric(kind, angles);
    file << to_string(kind) << ',' << q1.dim() << ',' << q1.rank() << ',' << v << ','
         << similarity(kind, v, q1.rank()) << '\n';
  }
  close_output(file, csv);

  Json config = base_config("metrics", 0);
  config["seed"] = nullptr;
  config["a"] = f.a;
  config["b"] = f.b;
  config["k"] = q1.rank();
  config["output_dir"] = dir.string();
  write_config(dir, config);
  out << "metrics: D=" << q1.dim() << " k=" << q1.rank() << " -> " << csv.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ErrorClass {
  const char* kind;
  int code;
};

ErrorClass classify(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ParameterError&) {
    return {"parameter", kExitUsage};
  } catch (const ShapeError&) {
    return {"shape", kExitNumerical};
  } catch (const DomainError&) {
    return {"domain", kExitNumerical};
  } catch (const ContractError&) {
    return {"contract", kExitNumerical};
  } catch (const IntegrityError&) {
    return {"integrity", kExitIo};
  } catch (const IoError&) {
    return {"io", kExitIo};
  } catch (const fs::filesystem_error&) {
    return {"io", kExitIo};
  } catch (const nlohmann::json::exception&) {
    return {"integrity", kExitIo};
  } catch (...) {
    return {"internal", kExitNumerical};
  }
}

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c == '\n' ? ' ' : c;
  }
  return q + '"';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sketchov: sketched eigendecompositions and mask/eigenspace overlaps"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DecomposeFlags dec;
  auto* decompose = app.add_subcommand("decompose", "Sketched eigendecomposition of an operator");
  add_operator_flags(decompose, dec.op);
  add_output_flags(decompose, dec.output);
  decompose->add_option("--n-outer", dec.n_outer, "Outer sketch size n_o")->required();
  decompose->add_option("--n-inner", dec.n_inner, "Inner sketch size n_i (default min(2 n_o + 1, D))");
  decompose->add_option("--seed", dec.seed, "Measurement seed")->capture_default_str();
  decompose->add_option("--workers", dec.workers, "Measurement threads")->capture_default_str();
  decompose->add_option("--chunk-cols", dec.chunk_cols,
                        "Columns per measurement chunk (0 = automatic)");
  decompose->add_flag("--keep-chunks", dec.keep_chunks, "Keep the chunked measurement store");

  BaselineFlags base;
  auto* baseline = app.add_subcommand("baseline", "Random-pair metric baselines");
  add_output_flags(baseline, base.output);
  baseline->add_option("--dims", base.dims, "Dimension grid")->delimiter(',')->capture_default_str();
  baseline->add_option("--rho", base.rhos, "Ratio grid, k = max(1, round(rho D))")
      ->delimiter(',')
      ->capture_default_str();
  baseline->add_option("--modalities", base.modalities, "Pair modalities (OO, OM, MM)")
      ->delimiter(',')
      ->capture_default_str();
  baseline->add_option("--metrics", base.metrics,
                       "Metric kinds (geodesic, chordal2, chordalF, proj2, projF, "
                       "fubini_study, overlap; default all)")
      ->delimiter(',');
  baseline->add_option("--samples,-T", base.samples, "Pairs per cell T")->capture_default_str();
  baseline->add_option("--seed", base.seed, "Seed")->capture_default_str();
  baseline->add_option("--workers", base.workers, "Threads")->capture_default_str();

  CurveFlags cur;
  auto* curve = app.add_subcommand("curve", "Exact vs sketched mask/eigenspace overlap curve");
  add_operator_flags(curve, cur.op);
  add_output_flags(curve, cur.output);
  curve->add_option("--n-outer", cur.n_outer, "Outer sketch size n_o")->required();
  curve->add_option("--n-inner", cur.n_inner, "Inner sketch size n_i (default min(2 n_o + 1, D))");
  curve->add_option("--top-k", cur.top_k, "Largest k on the curve (default n_o)");
  curve->add_option("--seed", cur.seed, "Measurement seed")->capture_default_str();
  curve->add_option("--workers", cur.workers, "Measurement threads")->capture_default_str();
  curve->add_flag("--no-exact", cur.no_exact, "Skip the dense oracle column");

  VerifyFlags ver;
  auto* verify = app.add_subcommand("verify", "Self-tests; exit code = failed checks");
  add_output_flags(verify, ver.output);
  verify->add_option("--samples,-T", ver.samples, "Pairs per lemma cell")->capture_default_str();
  verify->add_option("--trials", ver.trials, "Pairs per bijection family")->capture_default_str();
  verify->add_option("--seed", ver.seed, "Seed")->capture_default_str();
  verify->add_option("--store", ver.stores, "Also integrity-check these stored matrices");

  MetricsFlags met;
  auto* metrics = app.add_subcommand("metrics", "All subspace metrics between two stored bases or masks");
  add_output_flags(metrics, met.output);
  metrics->add_option("a", met.a, "First basis (stored matrix or mask file)")->required();
  metrics->add_option("b", met.b, "Second basis (stored matrix or mask file)")->required();
  metrics->add_option("--k", met.k, "Use the first k columns (0 = all)");

  auto* store = app.add_subcommand("store", "Chunked matrix storage");
  store->require_subcommand(1);
  StoreCreateFlags sc;
  auto* create = store->add_subcommand("create", "Create a sealed store of Gaussian columns");
  create->add_option("path", sc.path, "Store directory")->required();
  create->add_option("--rows", sc.rows, "Rows")->required();
  create->add_option("--cols", sc.cols, "Columns")->required();
  create->add_option("--chunk-cols", sc.chunk_cols, "Columns per chunk (0 = automatic)");
  create->add_option("--seed", sc.seed, "Seed")->capture_default_str();
  create->add_option("--workers", sc.workers, "Writer threads")->capture_default_str();
  create->add_flag("--overwrite", sc.overwrite, "Replace an existing store");
  std::string merge_in;
  std::string merge_out;
  bool merge_overwrite = false;
  auto* merge = store->add_subcommand("merge", "Merge a chunked store into one file");
  merge->add_option("store", merge_in, "Chunked store directory")->required();
  merge->add_option("output", merge_out, "Merged file")->required();
  merge->add_flag("--overwrite", merge_overwrite, "Replace an existing file");
  std::vector<std::string> verify_paths;
  auto* sverify = store->add_subcommand("verify", "Check stores or merged files");
  sverify->add_option("paths", verify_paths, "Stores or merged files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  set_warning_sink([&err](const std::string& m) { err << "warning: " << m << '\n'; });
  int code = kExitOk;
  try {
    if (*decompose) {
      code = cmd_decompose(dec, out);
    } else if (*baseline) {
      code = cmd_baseline(base, out);
    } else if (*curve) {
      code = cmd_curve(cur, out);
    } else if (*verify) {
      code = cmd_verify(ver, out);
    } else if (*metrics) {
      code = cmd_metrics(met, out);
    } else if (*create) {
      code = cmd_store_create(sc, out);
    } else if (*merge) {
      code = cmd_store_merge(merge_in, merge_out, merge_overwrite, out);
    } else if (*sverify) {
      code = cmd_store_verify(verify_paths, out);
    }
  } catch (const std::exception& e) {
    const ErrorClass c = classify(std::current_exception());
    err << "error: code=" << c.code << " kind=" << c.kind << " message=" << quote(e.what())
        << '\n';
    code = c.code;
  }
  set_warning_sink(nullptr);
  return code;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace sketchov
