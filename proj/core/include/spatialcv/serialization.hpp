#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "spatialcv/aoa.hpp"
#include "spatialcv/error_profile.hpp"
#include "spatialcv/ffs.hpp"
#include "spatialcv/folds.hpp"
#include "spatialcv/geodist.hpp"
#include "spatialcv/model.hpp"

namespace spcv {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const FoldAssignment& folds);
Json to_json(const NNDMExclusion& nndm, std::optional<double> W = std::nullopt);
Json to_json(const CvScheme& scheme);
/// Accepts either document kind; NNDM documents carry an "exclude" array.
CvScheme scheme_from_json(const Json& j);

Json to_json(const FittedModel& model);
FittedModel model_from_json(const Json& j);

Json to_json(const TrainDI& trained);
TrainDI train_di_from_json(const Json& j);

Json to_json(const ErrorProfile& profile);
ErrorProfile profile_from_json(const Json& j);

Json to_json(const Metrics& m);
Json to_json(const SelectionPath& path);
Json to_json(const DistanceDistributions& d);

Json read_json(const std::filesystem::path& path);
/// Two-space indented, newline-terminated.
void write_json(const Json& j, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace spcv
