#pragma once

#include <filesystem>
#include <optional>

#include "ftir/json_io.hpp"
#include "ftir/nn/train.hpp"
#include "ftir/nn/unet.hpp"

namespace ftir::nn {

inline constexpr const char* kModelFormatVersion = "ftir-model-v1";

Json to_json(const UnetConfig& cfg);
UnetConfig unet_config_from_json(const Json& j);

Json to_json(const AdadeltaConfig& cfg);
AdadeltaConfig adadelta_config_from_json(const Json& j);

/// on_epoch is not serialized.
Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

Json to_json(const std::vector<EpochRecord>& history);

/// Writes dir/model.json and dir/weights.f32. Weights are stored as
/// float32, so a loaded model equals the saved one rounded to float.
void save_model(const ModelParams& params, const std::filesystem::path& dir);

/// With `expected`, the stored fingerprint must match it.
ModelParams load_model(const std::filesystem::path& dir, const std::optional<UnetConfig>& expected = std::nullopt);

/// Rounds every weight to float32 (what a save/load round trip yields).
ModelParams round_to_f32(ModelParams params);

}  // namespace ftir::nn
