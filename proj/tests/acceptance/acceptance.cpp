// Acceptance harness: runs criteria 1-10 and prints one PASS/FAIL line each.
// Usage: spatialcv_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spatialcv/aoa.hpp"
#include "spatialcv/ecdf.hpp"
#include "spatialcv/error_profile.hpp"
#include "spatialcv/ffs.hpp"
#include "spatialcv/folds.hpp"
#include "spatialcv/geodist.hpp"
#include "spatialcv/geom.hpp"
#include "spatialcv/log.hpp"
#include "spatialcv/model.hpp"
#include "spatialcv/nn_index.hpp"
#include "spatialcv/rng.hpp"
#include "spatialcv/serialization.hpp"
#include "spatialcv/stats.hpp"
#include "spatialcv/synthetic.hpp"

#ifndef SPCV_CLI_PATH
#define SPCV_CLI_PATH "spcv"
#endif

using namespace spcv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Parallel all_threads() {
  return Parallel{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- oracles

double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> brute_nnd_within(const PointSet& a) {
  std::vector<double> out(a.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) out[i] = std::min(out[i], distance(a.coords[i], a.coords[j], a.crs));
  return out;
}

std::vector<double> brute_nnd_between(const PointSet& a, const PointSet& b) {
  std::vector<double> out(a.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (const auto& q : b.coords) out[i] = std::min(out[i], distance(a.coords[i], q, a.crs));
  return out;
}

// W1 as the integral of |F^-1 - G^-1| over (0, 1), with piecewise-constant quantiles.
double wasserstein_quantile(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> cuts;
  for (std::size_t i = 0; i <= a.size(); ++i) cuts.push_back(static_cast<double>(i) / a.size());
  for (std::size_t i = 0; i <= b.size(); ++i) cuts.push_back(static_cast<double>(i) / b.size());
  std::sort(cuts.begin(), cuts.end());
  double w = 0.0;
  for (std::size_t c = 1; c < cuts.size(); ++c) {
    const double lo = cuts[c - 1], hi = cuts[c];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    const auto ia = std::min(a.size() - 1, static_cast<std::size_t>(mid * a.size()));
    const auto ib = std::min(b.size() - 1, static_cast<std::size_t>(mid * b.size()));
    w += (hi - lo) * std::abs(a[ia] - b[ib]);
  }
  return w;
}

double ecdf_at(const std::vector<double>& sorted, double r) {
  return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), r) - sorted.begin()) / sorted.size();
}

double wasserstein_trapezoid(std::vector<double> a, std::vector<double> b, std::size_t points) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double lo = std::min(a.front(), b.front()), hi = std::max(a.back(), b.back());
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double sum = 0.0, prev = std::abs(ecdf_at(a, lo) - ecdf_at(b, lo));
  for (std::size_t i = 1; i < points; ++i) {
    const double x = i + 1 == points ? hi : lo + h * static_cast<double>(i);
    const double cur = std::abs(ecdf_at(a, x) - ecdf_at(b, x));
    sum += 0.5 * h * (prev + cur);
    prev = cur;
  }
  return sum;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = mean(ra), mb = mean(rb);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

PointSet random_points(Rng& rng, std::size_t n, bool clustered) {
  PointSet p;
  if (!clustered) {
    for (std::size_t i = 0; i < n; ++i) p.coords.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
    return p;
  }
  std::vector<Point> centers(1 + rng.below(8));
  for (auto& c : centers) c = {rng.uniform(0, 100), rng.uniform(0, 100)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centers[rng.below(centers.size())];
    p.coords.push_back({c.x + 3.0 * rng.normal(), c.y + 3.0 * rng.normal()});
  }
  return p;
}

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
  Rng rng(derive_seed(1, "acceptance-1"));
  const Parallel par = all_threads();
  double worst = 0.0;
  std::size_t mismatches = 0;
  for (std::size_t inst = 0; inst < 50; ++inst) {
    const std::size_t n = 50 + rng.below(951);
    // Planar and geographic point sets.
    PointSet a = random_points(rng, n, inst % 2 == 0);
    PointSet b = random_points(rng, 1 + rng.below(n), inst % 3 == 0);
    if (inst % 5 == 4) {
      a.crs = b.crs = CrsKind::geographic;
      for (auto* s : {&a, &b})
        for (auto& p : s->coords) p = {std::clamp(p.x * 3.6 - 180.0, -180.0, 180.0), std::clamp(p.y * 1.8 - 90.0, -90.0, 90.0)};
    }
    const auto w = nnd_within(a, par), w0 = brute_nnd_within(a);
    const auto bt = nnd_between(a, b, par), b0 = brute_nnd_between(a, b);
    for (std::size_t i = 0; i < n; ++i) {
      const double e1 = std::abs(w[i] - w0[i]), e2 = std::abs(bt[i] - b0[i]);
      worst = std::max({worst, e1, e2});
      mismatches += (e1 > 1e-12) + (e2 > 1e-12);
    }
    // Feature-space index in dimension 1..12.
    const std::size_t dim = 1 + inst % 12;
    Matrix ref(n, dim), q(200, dim);
    for (auto& v : ref.data()) v = inst % 4 == 0 ? std::round(rng.normal() * 3.0) : rng.normal();
    for (auto& v : q.data()) v = rng.normal();
    const NnIndex index(ref);
    for (std::size_t r = 0; r < q.rows(); ++r) {
      const auto hit = index.nearest(q.row(r), [](std::size_t) { return true; });
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = euclid(q.row(r), ref.row(j));
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      const double e = std::abs(hit.distance - best);
      worst = std::max(worst, e);
      mismatches += e > 1e-12 || hit.index != arg;
    }
  }
  return {mismatches == 0, "max abs error " + fmt(worst) + ", mismatches " + std::to_string(mismatches)};
}

Outcome criterion2() {
  Rng rng(derive_seed(2, "acceptance-2"));
  double worst_q = 0.0, worst_t = 0.0;
  bool self_zero = true;
  for (int pair = 0; pair < 20; ++pair) {
    std::vector<double> a(5 + rng.below(200)), b(5 + rng.below(200));
    const double shift = rng.uniform(0.0, 2.0), scale = rng.uniform(0.5, 2.0);
    for (auto& v : a) v = std::abs(rng.normal());
    for (auto& v : b) v = shift + scale * std::abs(rng.normal());
    const double w = wasserstein1(Ecdf(a), Ecdf(b));
    worst_q = std::max(worst_q, std::abs(w - wasserstein_quantile(a, b)) / w);
    worst_t = std::max(worst_t, std::abs(w - wasserstein_trapezoid(a, b, 1'000'000)) / w);
    self_zero = self_zero && wasserstein1(Ecdf(a), Ecdf(a)) == 0.0;
  }
  return {worst_q <= 1e-6 && worst_t <= 1e-6 && self_zero,
          "rel err quantile " + fmt(worst_q) + ", trapezoid " + fmt(worst_t) + ", W(F,F)=0 " + (self_zero ? "yes" : "no")};
}

SyntheticScenario clustered_scenario(std::uint64_t seed, std::size_t informative, std::size_t noise) {
  SyntheticScenario s;
  s.ncols = s.nrows = 100;
  s.informative = informative;
  s.noise = noise;
  s.samples = 200;
  s.design = SamplingDesign::clustered;
  s.clusters = 8;
  s.seed = seed;
  return s;
}

ModelSpec rf_spec(std::uint64_t seed, std::size_t trees = 100) {
  ModelSpec spec;
  spec.rf.num_trees = trees;
  spec.rf.seed = seed;
  return spec;
}

Outcome criterion3() {
  const Parallel par = all_threads();
  std::size_t ok_a = 0, ok_b = 0, ok_both = 0;
  std::string rows;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto syn = generate_synthetic(clustered_scenario(seed, 3, 3));
    const Dataset& d = syn.training.data;
    const auto domain = sample_prediction_points(syn.predictors, 1000, seed);
    const auto spec = rf_spec(derive_seed(seed, "rf"));
    const auto rnd = random_kfold(d.rows(), 5, derive_seed(seed, "random"));
    const auto knn = knndm(*d.points, domain.points, 5, derive_seed(seed, "knndm"), par);
    const double rmse_random = cross_validate(d, spec, rnd, par).metrics.rmse;
    const double rmse_knndm = cross_validate(d, spec, knn, par).metrics.rmse;
    const FittedModel model = fit_model(d, spec, par);
    const Grid pred = predict_raster(model, syn.predictors, par);
    const TrainDI t = train_di(d, model, knn, {}, par);
    const AOAResult area = aoa(syn.predictors, t, d, false, par);
    double sq = 0.0;
    std::size_t cells = 0;
    for (std::size_t c = 0; c < pred.values.size(); ++c)
      if (area.aoa.values[c] == 1.0) {
        sq += (pred.values[c] - syn.truth.values[c]) * (pred.values[c] - syn.truth.values[c]);
        ++cells;
      }
    const double truth = std::sqrt(sq / static_cast<double>(cells));
    const bool a = rmse_random < rmse_knndm;
    const bool b = std::abs(rmse_knndm - truth) < std::abs(rmse_random - truth);
    ok_a += a;
    ok_b += b;
    ok_both += a && b;
    rows += " [" + fmt(rmse_random, 3) + "/" + fmt(rmse_knndm, 3) + "/" + fmt(truth, 3) + "]";
  }
  return {ok_a >= 8 && ok_b >= 8,
          "(a) " + std::to_string(ok_a) + "/10, (b) " + std::to_string(ok_b) + "/10; random/kNNDM/true RMSE:" + rows};
}

Outcome criterion4() {
  const Parallel par = all_threads();
  std::size_t never_worse = 0, halved = 0;
  std::string ratios;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto syn = generate_synthetic(clustered_scenario(seed, 3, 3));
    const PointSet& tp = *syn.training.data.points;
    const auto domain = sample_prediction_points(syn.predictors, 1000, seed);
    const auto pred_nnd = nnd_between(domain.points, tp, par);
    const std::uint64_t fold_seed = derive_seed(seed, "knndm");
    const auto res = knndm_search(tp, domain.points, 5, fold_seed, par);
    const double w_knndm = scheme_wasserstein(tp, pred_nnd, res.folds, par);
    const double w_random = scheme_wasserstein(tp, pred_nnd, random_kfold(tp.size(), 5, fold_seed), par);
    never_worse += w_knndm <= w_random;
    halved += w_knndm < 0.5 * w_random;
    ratios += " " + fmt(w_knndm / w_random, 2);
  }
  return {never_worse == 20 && halved >= 16, "W(kNNDM) <= W(random) " + std::to_string(never_worse) +
                                                 "/20, < 0.5 W(random) " + std::to_string(halved) + "/20; ratios" + ratios};
}

Outcome criterion5() {
  const Parallel par = all_threads();
  std::size_t not_worse = 0, strict = 0, small_train = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto s = clustered_scenario(seed, 2, 2);
    s.samples = 150;
    const auto syn = generate_synthetic(s);
    const PointSet& tp = *syn.training.data.points;
    const auto domain = sample_prediction_points(syn.predictors, 1000, seed);
    const auto pred_nnd = nnd_between(domain.points, tp, par);
    const NNDMExclusion ex = nndm(tp, domain.points, 0.5, par);
    std::vector<std::size_t> labels(tp.size());
    std::iota(labels.begin(), labels.end(), std::size_t{0});
    const auto loo = FoldAssignment::from_labels(labels, tp.size(), "loo", 0);
    const double w_cv = scheme_wasserstein(tp, pred_nnd, ex, par);
    const double w_loo = scheme_wasserstein(tp, pred_nnd, loo, par);
    not_worse += w_cv <= w_loo;
    strict += w_cv < w_loo;
    for (std::size_t i = 0; i < tp.size(); ++i) small_train += ex.training_rows(i).size() * 2 < tp.size();
  }
  return {not_worse == 20 && strict >= 18 && small_train == 0,
          "W(NNDM) <= W(LOO) " + std::to_string(not_worse) + "/20, strict " + std::to_string(strict) +
              "/20, iterations below 0.5n training rows " + std::to_string(small_train)};
}

Outcome criterion6() {
  const Parallel par = all_threads();
  std::size_t recovered = 0, simpler_better = 0, both = 0;
  std::string sets;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto scenario = clustered_scenario(seed, 2, 5);
    scenario.clusters = 15;
    scenario.cluster_radius = 10;
    const auto syn = generate_synthetic(scenario);
    const Dataset& d = syn.training.data;
    const auto domain = sample_prediction_points(syn.predictors, 1000, seed);
    const auto folds = knndm(*d.points, domain.points, 5, derive_seed(seed, "knndm"), par);
    const auto spec = rf_spec(derive_seed(seed, "rf"));
    FfsOptions opt;
    opt.retune_final = false;
    const SelectionPath path = ffs(d, spec, folds, opt, par);
    const double full = cross_validate(d, spec, folds, par).metrics.rmse;
    std::size_t informative = 0, noise = 0;
    for (const auto& name : path.final_set)
      (std::binary_search(syn.informative_names.begin(), syn.informative_names.end(), name) ? informative : noise)++;
    const bool rec = informative == syn.informative_names.size() && noise <= 1;
    const bool better = path.final_cv.metrics.rmse <= full;
    recovered += rec;
    simpler_better += better;
    both += rec && better;
    std::string joined;
    for (const auto& name : path.final_set) joined += (joined.empty() ? "" : "+") + name;
    sets += " " + joined + (rec ? "" : "(miss)") + (better ? "" : "(worse)");
  }
  return {both >= 8, "recovered " + std::to_string(recovered) + "/10, simplified <= full " +
                         std::to_string(simpler_better) + "/10, both " + std::to_string(both) + "/10;" + sets};
}

Dataset normal_dataset(std::size_t n, std::size_t p, Rng& rng) {
  Dataset d;
  d.X = Matrix(n, p);
  for (auto& v : d.X.data()) v = rng.normal();
  for (std::size_t j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j + 1));
  for (std::size_t i = 0; i < n; ++i) d.y.push_back(2.0 * d.X(i, 0) + std::sin(d.X(i, 1)) + 0.2 * rng.normal());
  return d;
}

RasterStack stack_of(const Matrix& rows, const std::vector<std::string>& names, std::size_t ncols) {
  RasterStack s;
  s.geometry.ncols = ncols;
  s.geometry.nrows = rows.rows() / ncols;
  for (std::size_t c = 0; c < names.size(); ++c) s.bands.push_back({names[c], rows.column(c)});
  return s;
}

Outcome criterion7() {
  Rng rng(derive_seed(7, "acceptance-7"));
  const Parallel par = all_threads();
  const Dataset d = normal_dataset(300, 4, rng);
  RFParams p;
  p.num_trees = 100;
  p.seed = 7;
  const FittedModel model = fit_rf(d, p, par);
  const TrainDI t = train_di(d, model, random_kfold(300, 5, 7), {}, par);
  Matrix held(900, 4);
  for (auto& v : held.data()) v = rng.normal();
  const AOAResult res = aoa(stack_of(held, d.names, 30), t, d, true, par);

  // Exhaustive scan in the weighted standardized space, built from scratch.
  const double mean_imp = mean(model.importance);
  auto standardize = [&](const Matrix& x) {
    Matrix z(x.rows(), x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const auto col = d.X.column(j);
      const double mu = mean(col), sd = sample_sd(col), w = model.importance[j] / mean_imp;
      for (std::size_t i = 0; i < x.rows(); ++i) z(i, j) = w * (x(i, j) - mu) / sd;
    }
    return z;
  };
  const Matrix zt = standardize(d.X);
  const Matrix zq = standardize(held);
  double worst = 0.0;
  std::size_t lpd_mismatch = 0, equiv_violations = 0, inside = 0;
  for (std::size_t c = 0; c < 900; ++c) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t lpd = 0;
    for (std::size_t j = 0; j < zt.rows(); ++j) {
      const double dist = euclid(zq.row(c), zt.row(j));
      best = std::min(best, dist);
      lpd += dist / t.d_bar <= t.threshold;
    }
    worst = std::max(worst, std::abs(res.di.values[c] - best / t.d_bar));
    lpd_mismatch += res.lpd->values[c] != static_cast<double>(lpd);
    equiv_violations += (res.lpd->values[c] == 0.0) != (res.aoa.values[c] == 0.0);
    inside += res.aoa.values[c] == 1.0;
  }
  Matrix shifted = held;
  for (std::size_t c = 0; c < 900; ++c)
    for (std::size_t j = 0; j < 4; ++j) shifted(c, j) += 10.0 * t.sds[j];
  const AOAResult out = aoa(stack_of(shifted, d.names, 30), t, d, true, par);
  std::size_t outside = 0;
  for (std::size_t c = 0; c < 900; ++c) {
    outside += out.aoa.values[c] == 0.0;
    equiv_violations += (out.lpd->values[c] == 0.0) != (out.aoa.values[c] == 0.0);
  }
  const double frac_in = inside / 900.0;
  return {worst <= 1e-10 && lpd_mismatch == 0 && equiv_violations == 0 && frac_in >= 0.9 && outside == 900,
          "DI max err " + fmt(worst) + ", LPD mismatches " + std::to_string(lpd_mismatch) + ", held-out inside " +
              fmt(100.0 * frac_in, 4) + "%, shifted outside " + std::to_string(outside) + "/900, LPD=0<=>outside violations " +
              std::to_string(equiv_violations)};
}

Outcome criterion8() {
  const Parallel par = all_threads();
  SyntheticScenario s;
  s.ncols = s.nrows = 30;
  s.informative = 2;
  s.noise = 2;
  s.samples = 120;
  s.seed = 8;
  const auto syn = generate_synthetic(s);
  const Dataset& d = syn.training.data;
  const auto folds = random_kfold(d.rows(), 5, 8);
  RFParams base;
  base.num_trees = 60;
  base.seed = 8;
  const auto grid = default_tuning_grid(d.cols(), base);
  const TuneResult tuned = tune(d, folds, grid, par);
  const TrainDI t = train_di(d, tuned.final_model, folds, {}, par);
  const AOAResult ref = aoa(syn.predictors, t, d, true, par);
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (std::size_t col = 0; col < d.cols(); ++col) {
    Dataset d2 = d;
    for (std::size_t i = 0; i < d2.rows(); ++i) d2.X(i, col) = 3.0 * d2.X(i, col) - 7.0;
    RasterStack st = syn.predictors;
    auto& band = *std::find_if(st.bands.begin(), st.bands.end(), [&](const Band& b) { return b.name == d.names[col]; });
    for (auto& v : band.values) v = 3.0 * v - 7.0;
    const TuneResult tuned2 = tune(d2, folds, grid, par);
    const TrainDI t2 = train_di(d2, tuned2.final_model, folds, {}, par);
    const AOAResult r2 = aoa(st, t2, d2, true, par);
    for (std::size_t c = 0; c < ref.di.values.size(); ++c) {
      worst = std::max(worst, std::abs(ref.di.values[c] - r2.di.values[c]));
      ok = ok && ref.aoa.values[c] == r2.aoa.values[c] && ref.lpd->values[c] == r2.lpd->values[c];
    }
    ok = ok && tuned2.best_index == tuned.best_index;
    detail += " " + d.names[col] + ":mtry " + std::to_string(tuned2.best.resolved_mtry(d.cols()));
  }
  ok = ok && worst <= 1e-10;
  return {ok, "DI max diff " + fmt(worst) + ", reference mtry " + std::to_string(tuned.best.resolved_mtry(d.cols())) +
                  ";" + detail};
}

Outcome criterion9() {
  const Parallel par = all_threads();
  Rng rng(derive_seed(9, "acceptance-9"));
  // Residual sd proportional to DI.
  const Dataset d = normal_dataset(1000, 3, rng);
  FittedModel knn = fit_knn(d, 5);
  knn.importance = {1.0, 1.0, 1.0};
  const TrainDI t = train_di(d, knn, random_kfold(1000, 5, 9), {}, par);
  std::vector<PooledPrediction> pooled;
  for (std::size_t i = 0; i < 1000; ++i) pooled.push_back({i, 0, 0.0, 2.0 * t.train_di[i] * rng.normal()});
  const ErrorProfile prof = error_profile(pooled, t.train_di);
  bool monotone = true;
  for (std::size_t k = 0; k <= 10000; ++k) {
    const double x = prof.valid_min - 1.0 + (prof.valid_max - prof.valid_min + 2.0) * k / 10000.0;
    const double x2 = x + (prof.valid_max - prof.valid_min + 2.0) / 10000.0;
    monotone = monotone && prof(x2) >= prof(x);
  }
  std::vector<double> fitted, scale;
  for (double v : t.train_di)
    if (v >= prof.valid_min && v <= prof.valid_max) {
      fitted.push_back(prof(v));
      scale.push_back(2.0 * v);
    }
  const double rho = spearman(fitted, scale);

  // c = n is leave-one-out in predictor space.
  Dataset small = d.select_rows(std::vector<std::size_t>(
      [] {
        std::vector<std::size_t> r(60);
        std::iota(r.begin(), r.end(), std::size_t{0});
        return r;
      }()));
  ModelSpec kspec;
  kspec.kind = ModelKind::knn;
  FittedModel ksmall = fit_knn(small, 5);
  ksmall.importance = {1.0, 1.0, 1.0};
  const TrainDI ts = train_di(small, ksmall, random_kfold(60, 5, 1), {}, par);
  const MultiCv loo = multicv_calibrate(small, kspec, ts, {60}, 9, par);
  std::set<std::size_t> labels;
  for (const auto& pp : loo.runs.front().cv.pooled) labels.insert(pp.fold);
  std::vector<std::size_t> iota_labels(60);
  std::iota(iota_labels.begin(), iota_labels.end(), std::size_t{0});
  const auto iota_folds = FoldAssignment::from_labels(iota_labels, 60, "loo", 0);
  const CVResult direct = cross_validate(small, kspec, iota_folds, par);
  bool same = labels.size() == 60 && loo.runs.front().cv.pooled.size() == 60;
  for (std::size_t i = 0; same && i < 60; ++i)
    same = loo.runs.front().cv.pooled[i].predicted == direct.pooled[i].predicted;

  // Pooled-DI threshold versus the single-CV threshold.
  std::size_t larger = 0;
  std::string thresholds;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto syn = generate_synthetic(clustered_scenario(seed, 3, 3));
    const Dataset& sd = syn.training.data;
    const auto domain = sample_prediction_points(syn.predictors, 1000, seed);
    const auto folds = knndm(*sd.points, domain.points, 5, derive_seed(seed, "knndm"), par);
    const auto spec = rf_spec(derive_seed(seed, "rf"), 50);
    const FittedModel model = fit_model(sd, spec, par);
    const TrainDI single = train_di(sd, model, folds, {}, par);
    const MultiCv mc = multicv_calibrate(sd, spec, single, default_cluster_counts(sd.rows()), seed, par);
    const double pooled_threshold = update_threshold(single, mc.di).threshold;
    larger += pooled_threshold >= single.threshold;
    thresholds += " " + fmt(single.threshold, 3) + "->" + fmt(pooled_threshold, 3);
  }
  return {monotone && rho >= 0.9 && same && larger >= 8,
          std::string("monotone ") + (monotone ? "yes" : "no") + ", Spearman " + fmt(rho) + ", c=n LOO " +
              (same ? "yes" : "no") + ", pooled threshold >= single " + std::to_string(larger) + "/10;" + thresholds};
}

int run(const std::string& cmd) {
  return std::system((cmd + " > /dev/null 2>&1").c_str());
}

bool cli_pipeline(const fs::path& dir, int threads, std::string& error) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    auto s = clustered_scenario(42, 3, 3);
    std::ofstream(dir / "scenario.json") << scenario_json(s);
  }
  const std::string cli = SPCV_CLI_PATH;
  const std::string common = " --seed 42 --threads " + std::to_string(threads);
  const std::string d = dir.string();
  const std::vector<std::string> steps = {
      cli + " synth --scenario " + d + "/scenario.json --out " + d + "/synth" + common,
      cli + " geodist --train " + d + "/synth/training.csv --raster " + d + "/synth/predictors/manifest.json --out " + d +
          "/geodist" + common,
      cli + " folds knndm --train " + d + "/synth/training.csv --raster " + d +
          "/synth/predictors/manifest.json -k 5 --out " + d + "/folds" + common,
      cli + " geodist --train " + d + "/synth/training.csv --raster " + d + "/synth/predictors/manifest.json --folds " +
          d + "/folds/folds.json --out " + d + "/geodist_folds" + common,
      cli + " train --train " + d + "/synth/training.csv --folds " + d + "/folds/folds.json --ffs --num-trees 100 --out " +
          d + "/train" + common,
      cli + " aoa --model " + d + "/train/model.json --train " + d + "/synth/training.csv --folds " + d +
          "/folds/folds.json --raster " + d + "/synth/predictors/manifest.json --lpd --out " + d + "/aoa" + common,
      cli + " predict --model " + d + "/train/model.json --raster " + d + "/synth/predictors/manifest.json --mask " + d +
          "/aoa/aoa.asc --out " + d + "/predict" + common,
      cli + " errorprofile --model " + d + "/train/model.json --train " + d + "/synth/training.csv --aoa " + d +
          "/aoa --out " + d + "/profile" + common,
      cli + " render --grid " + d + "/predict/prediction.asc --mask " + d + "/aoa/aoa.asc --out " + d + "/render" +
          common,
      cli + " render --grid " + d + "/aoa/di.asc --palette magma --out " + d + "/render" + common,
  };
  for (const auto& step : steps)
    if (run(step) != 0) {
      error = "command failed: " + step;
      return false;
    }
  return true;
}

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion10() {
  const fs::path root = fs::temp_directory_path() / "spcv_acceptance_10";
  std::string error;
  if (!cli_pipeline(root / "a", 1, error) || !cli_pipeline(root / "b", 1, error) || !cli_pipeline(root / "c", 8, error))
    return {false, error};
  const auto files_a = files_under(root / "a"), files_b = files_under(root / "b");
  std::size_t differing = 0;
  std::string first_diff;
  for (const auto& f : files_a)
    if (slurp(root / "a" / f) != slurp(root / "b" / f)) {
      ++differing;
      if (first_diff.empty()) first_diff = f.string();
    }
  const bool same_set = files_a == files_b;
  const Json m1 = read_json(root / "a" / "train" / "metrics.json");
  const Json m8 = read_json(root / "c" / "train" / "metrics.json");
  const bool metrics_equal = m1 == m8;
  std::size_t differing8 = 0;
  for (const auto& f : files_a)
    if (fs::exists(root / "c" / f) && slurp(root / "a" / f) != slurp(root / "c" / f)) ++differing8;
  fs::remove_all(root);
  return {same_set && differing == 0 && metrics_equal,
          std::to_string(files_a.size()) + " artifacts, differing across --threads 1 runs " + std::to_string(differing) +
              (first_diff.empty() ? "" : " (" + first_diff + ")") + ", metrics.json equal with --threads 8 " +
              (metrics_equal ? "yes" : "no") + " (artifacts differing with 8 threads: " + std::to_string(differing8) + ")"};
}

struct Criterion {
  int id;
  double budget_seconds;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  set_warning_handler([](const std::string&) {});
  const std::vector<Criterion> criteria = {
      {1, 10, criterion1},  {2, 5, criterion2},   {3, 180, criterion3}, {4, 120, criterion4}, {5, 120, criterion5},
      {6, 300, criterion6}, {7, 60, criterion7},  {8, 60, criterion8},  {9, 180, criterion9}, {10, 300, criterion10},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < c.budget_seconds;
    const bool pass = o.pass && in_budget;
    failures += !pass;
    std::printf("criterion %2d: %s  %s; %.1f s (budget %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs, c.budget_seconds, in_budget ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
