#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spatialcv/model.hpp"

namespace spcv {

struct FfsOptions {
  /// A candidate is accepted only if it lowers pooled RMSE by more than this
  /// fraction of the current RMSE.
  double rel_tol = 1e-4;
  /// Re-tune mtry on the final predictor set (random forest only).
  bool retune_final = true;
};

struct FfsEvaluation {
  std::size_t round = 0;  // 0 = pair screening
  std::vector<std::string> set;
  Metrics metrics;
};

struct FfsStep {
  std::string added;  // for the first step: "a+b"
  std::vector<std::string> set;
  double rmse = 0.0;
  std::optional<double> r2;
};

struct SelectionPath {
  std::vector<FfsStep> steps;
  std::vector<FfsEvaluation> evaluations;  // every cross-validation run, in order
  std::vector<std::string> final_set;
  CVResult final_cv;
  FittedModel final_model;
  std::optional<RFParams> tuned;  // set when the final set was re-tuned
};

/// Forward feature selection: screens every predictor pair with
/// cross_validate, seeds the set with the best pair, then repeatedly adds the
/// remaining predictor giving the lowest pooled RMSE while it improves by more
/// than `rel_tol`. Candidates are visited in name order, so RMSE ties go to the
/// lexicographically first set. The same scheme is reused for every candidate.
SelectionPath ffs(const Dataset& data, const ModelSpec& spec, const CvScheme& scheme, const FfsOptions& options = {},
                  const Parallel& par = {});

/// CSV "step,action,candidate_set,RMSE,R2" (sets joined with '+').
std::string selection_log_csv(const SelectionPath& path);

/// RMSE of the accepted steps against the number of predictors.
std::string plot_selection(const SelectionPath& path);

}  // namespace spcv
