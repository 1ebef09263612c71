#include "spatialcv/ffs.hpp"

#include <algorithm>

#include "spatialcv/error.hpp"
#include "spatialcv/raster.hpp"
#include "spatialcv/svg.hpp"

namespace spcv {
namespace {

std::string join(const std::vector<std::string>& set) {
  std::string out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += '+';
    out += set[i];
  }
  return out;
}

ModelSpec spec_for(const ModelSpec& spec, std::size_t p) {
  ModelSpec s = spec;
  if (s.kind == ModelKind::rf && s.rf.mtry > p) s.rf.mtry = p;
  return s;
}

}  // namespace

SelectionPath ffs(const Dataset& data, const ModelSpec& spec, const CvScheme& scheme, const FfsOptions& options,
                  const Parallel& par) {
  data.validate();
  require(data.cols() >= 2, "ffs: need at least 2 predictors");
  std::vector<std::string> names = data.names;
  std::sort(names.begin(), names.end());

  SelectionPath path;
  auto evaluate = [&](std::size_t round, const std::vector<std::string>& set) -> const FfsEvaluation& {
    try {
      CVResult cv = cross_validate(data.select_columns(set), spec_for(spec, set.size()), scheme, par);
      path.evaluations.push_back({round, set, cv.metrics});
    } catch (const std::exception& e) {
      throw std::runtime_error("ffs: cross-validation failed for predictor set " + join(set) + ": " + e.what());
    }
    return path.evaluations.back();
  };

  // Pair screening.
  std::vector<std::string> current;
  double current_rmse = 0.0;
  std::optional<double> current_r2;
  bool have = false;
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      const auto& ev = evaluate(0, {names[a], names[b]});
      if (!have || ev.metrics.rmse < current_rmse) {
        current = ev.set;
        current_rmse = ev.metrics.rmse;
        current_r2 = ev.metrics.r2;
        have = true;
      }
    }
  path.steps.push_back({current[0] + "+" + current[1], current, current_rmse, current_r2});

  for (std::size_t round = 1; current.size() < names.size(); ++round) {
    std::optional<FfsEvaluation> best;
    std::string best_name;
    for (const auto& nm : names) {
      if (std::find(current.begin(), current.end(), nm) != current.end()) continue;
      std::vector<std::string> set = current;
      set.push_back(nm);
      const auto& ev = evaluate(round, set);
      if (!best || ev.metrics.rmse < best->metrics.rmse) {
        best = ev;
        best_name = nm;
      }
    }
    if (!(best->metrics.rmse < current_rmse * (1.0 - options.rel_tol))) break;
    current = best->set;
    current_rmse = best->metrics.rmse;
    current_r2 = best->metrics.r2;
    path.steps.push_back({best_name, current, current_rmse, current_r2});
  }

  path.final_set = current;
  const Dataset final_data = data.select_columns(current);
  if (spec.kind == ModelKind::rf && options.retune_final) {
    TuneResult t = tune(final_data, scheme, default_tuning_grid(current.size(), spec.rf), par);
    path.tuned = t.best;
    path.final_cv = std::move(t.best_cv);
    path.final_model = std::move(t.final_model);
  } else {
    const ModelSpec s = spec_for(spec, current.size());
    path.final_cv = cross_validate(final_data, s, scheme, par);
    path.final_model = fit_model(final_data, s, par);
  }
  return path;
}

std::string selection_log_csv(const SelectionPath& path) {
  auto fmt_r2 = [](const std::optional<double>& r2) { return r2 ? format_double(*r2) : std::string("NA"); };
  std::string out = "step,action,candidate_set,RMSE,R2\n";
  for (const auto& ev : path.evaluations)
    out += std::to_string(ev.round) + ",evaluate," + join(ev.set) + "," + format_double(ev.metrics.rmse) + "," +
           fmt_r2(ev.metrics.r2) + "\n";
  for (std::size_t s = 0; s < path.steps.size(); ++s) {
    const auto& st = path.steps[s];
    out += std::to_string(s) + ",accept," + join(st.set) + "," + format_double(st.rmse) + "," + fmt_r2(st.r2) + "\n";
  }
  return out;
}

std::string plot_selection(const SelectionPath& path) {
  LinePlot plot;
  plot.title = "Forward feature selection";
  plot.x_label = "number of predictors";
  plot.y_label = "cross-validated RMSE";
  Series evaluated{"evaluated", {}, {}, true};
  for (const auto& ev : path.evaluations) {
    evaluated.x.push_back(static_cast<double>(ev.set.size()));
    evaluated.y.push_back(ev.metrics.rmse);
  }
  Series selected{"selected", {}, {}, false};
  for (const auto& st : path.steps) {
    selected.x.push_back(static_cast<double>(st.set.size()));
    selected.y.push_back(st.rmse);
  }
  plot.series = {std::move(evaluated), std::move(selected)};
  return render_line_plot(plot);
}

}  // namespace spcv
