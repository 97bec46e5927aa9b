#include "ftir/nn/model_io.hpp"

#include "ftir/f32_io.hpp"

namespace ftir::nn {

namespace fs = std::filesystem;

Json to_json(const UnetConfig& c) {
  return {{"depth", c.depth},
          {"base_channels", c.base_channels},
          {"kernel", c.kernel},
          {"residual_bottleneck", c.residual_bottleneck},
          {"channel_attention", c.channel_attention},
          {"input_residual", c.input_residual},
          {"seed", c.seed}};
}

UnetConfig unet_config_from_json(const Json& j) {
  UnetConfig c;
  try {
    c.depth = j.value("depth", c.depth);
    c.base_channels = j.value("base_channels", c.base_channels);
    c.kernel = j.value("kernel", c.kernel);
    c.residual_bottleneck = j.value("residual_bottleneck", c.residual_bottleneck);
    c.channel_attention = j.value("channel_attention", c.channel_attention);
    c.input_residual = j.value("input_residual", c.input_residual);
    c.seed = j.value("seed", c.seed);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("unet config: ") + e.what());
  }
  validate(c);
  return c;
}

Json to_json(const AdadeltaConfig& c) {
  return {{"lr", c.lr}, {"rho", c.rho}, {"eps", c.eps}, {"scale_accumulator", c.scale_accumulator}};
}

AdadeltaConfig adadelta_config_from_json(const Json& j) {
  AdadeltaConfig c;
  try {
    c.lr = j.value("lr", c.lr);
    c.rho = j.value("rho", c.rho);
    c.eps = j.value("eps", c.eps);
    c.scale_accumulator = j.value("scale_accumulator", c.scale_accumulator);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("optimizer config: ") + e.what());
  }
  return c;
}

Json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},     {"patience", c.patience},
          {"max_epochs", c.max_epochs},     {"shuffle_seed", c.shuffle_seed},
          {"val_fraction", c.val_fraction}, {"optimizer", to_json(c.optim)}};
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  try {
    c.batch_size = j.value("batch_size", c.batch_size);
    c.patience = j.value("patience", c.patience);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.shuffle_seed = j.value("shuffle_seed", c.shuffle_seed);
    c.val_fraction = j.value("val_fraction", c.val_fraction);
    if (j.contains("optimizer")) c.optim = adadelta_config_from_json(j.at("optimizer"));
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("train config: ") + e.what());
  }
  return c;
}

Json to_json(const std::vector<EpochRecord>& history) {
  Json a = Json::array();
  for (const auto& r : history) a.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}});
  return a;
}

void save_model(const ModelParams& params, const fs::path& dir) {
  check_params(params, params.config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  Json manifest = Json::array();
  std::vector<double> flat;
  flat.reserve(params.count());
  for (const auto& t : params.tensors) {
    manifest.push_back({{"name", t.name}, {"shape", t.value.shape()}, {"offset", flat.size() * 4}});
    flat.insert(flat.end(), t.value.vec().begin(), t.value.vec().end());
  }
  const Json meta{{"format_version", kModelFormatVersion},
                  {"config", to_json(params.config)},
                  {"fingerprint", fingerprint_hex(params.config)},
                  {"parameter_count", params.count()},
                  {"tensors", manifest}};
  write_json(meta, dir / "model.json");
  write_f32_file(flat, dir / "weights.f32");
}

ModelParams load_model(const fs::path& dir, const std::optional<UnetConfig>& expected) {
  const Json meta = read_json(dir / "model.json");
  if (meta.value("format_version", std::string()) != kModelFormatVersion)
    fail(ErrorCode::FormatVersionMismatch, "unsupported model format in " + (dir / "model.json").string());
  ModelParams params;
  params.config = unet_config_from_json(meta.at("config"));
  const std::string stored = meta.value("fingerprint", std::string());
  if (stored != fingerprint_hex(params.config))
    fail(ErrorCode::ConfigFingerprintMismatch, "model.json fingerprint " + stored + " disagrees with its config");
  if (expected && fingerprint(*expected) != fingerprint(params.config))
    fail(ErrorCode::ConfigFingerprintMismatch,
         "model " + stored + " was built for a different architecture than " + fingerprint_hex(*expected));

  const std::vector<double> flat = read_f32_file(dir / "weights.f32");
  try {
    for (const auto& t : meta.at("tensors")) {
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      const auto offset = t.at("offset").get<std::size_t>();
      const std::size_t n = Tensor::count(shape);
      if (offset % 4 != 0 || offset / 4 + n > flat.size())
        fail(ErrorCode::ShapeMismatch, "tensor " + t.at("name").get<std::string>() + " lies outside weights.f32");
      const auto first = flat.begin() + static_cast<std::ptrdiff_t>(offset / 4);
      params.tensors.push_back(
          {t.at("name").get<std::string>(), Tensor(shape, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)))});
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::IoError, std::string("malformed model.json: ") + e.what());
  }
  check_params(params, params.config);
  return params;
}

ModelParams round_to_f32(ModelParams params) {
  for (auto& t : params.tensors)
    for (double& v : t.value.vec()) v = static_cast<double>(static_cast<float>(v));
  return params;
}

}  // namespace ftir::nn
