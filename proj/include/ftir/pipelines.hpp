#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ftir/core.hpp"
#include "ftir/dsp.hpp"
#include "ftir/json_io.hpp"
#include "ftir/nn/train.hpp"
#include "ftir/nn/unet.hpp"
#include "ftir/prep.hpp"

namespace ftir::pipelines {

/// Aligned LQ/HQ foreground spectra of one sample after masking,
/// background subtraction and trimming. lq[i] and hq[i] share an origin.
struct PreparedSample {
  std::string sample_id;
  std::vector<Spectrum> lq;
  std::vector<Spectrum> hq;
};

/// The foreground mask comes from the HQ cube and is applied to both.
PreparedSample prepare_pair(const HyperspectralCube& lq, const HyperspectralCube& hq, const prep::TrimSpec& trim);

/// A length-preserving map over normalized spectra.
class Stage {
 public:
  enum class Kind { identity, sg, unet };

  static Stage identity();
  static Stage savgol(const dsp::SgParams& p);
  static Stage unet(nn::ModelParams params);

  Kind kind() const { return kind_; }
  const dsp::SgParams& sg() const { return sg_; }
  const nn::ModelParams& model() const;

  /// Unet stages reflect-pad each spectrum to a multiple of 2^depth and crop
  /// the output back.
  std::vector<std::vector<double>> apply(const std::vector<std::vector<double>>& batch) const;

 private:
  Kind kind_ = Kind::identity;
  dsp::SgParams sg_;
  std::shared_ptr<const nn::ModelParams> model_;
};

std::string to_string(Stage::Kind k);

/// Reflect padding (x[-k] = x[k]) at the high end up to a multiple of
/// `multiple`; the crop is the first `n` values.
std::vector<double> pad_to_multiple(std::span<const double> v, std::size_t multiple);

/// Shared (min, max) over the SNV forms of LQ, HQ and SNIP-corrected HQ.
MinMax fit_global_range(std::span<const Spectrum> lq, std::span<const Spectrum> hq, const dsp::SnipParams& snip);

/// LQ spectra in the network input domain (SNV, then global min-max).
std::vector<Spectrum> normalize_all(std::span<const Spectrum> raw, const MinMax& range);

struct TrainingTargets {
  std::vector<Spectrum> target_a;  // HQ with its baseline
  std::vector<Spectrum> target_b;  // SNIP-corrected HQ
  MinMax range;
};

TrainingTargets build_targets(std::span<const Spectrum> hq, const dsp::SnipParams& snip, const MinMax& range);

/// Raw-LQ reference in the comparison domain: normalize(snip_correct(lq)).
std::vector<Spectrum> raw_reference(std::span<const Spectrum> lq_raw, const dsp::SnipParams& snip,
                                    const MinMax& range);

/// SG in the normalized domain, bridge back to absorbance with the input's
/// own stats, SNIP, then SNV + min-max with `range`.
Spectrum traditional_restore(const Spectrum& lq_norm, const dsp::SgParams& sg, const dsp::SnipParams& snip,
                             const MinMax& range);
std::vector<Spectrum> traditional_restore(std::span<const Spectrum> lq_norm, const dsp::SgParams& sg,
                                          const dsp::SnipParams& snip, const MinMax& range);

/// One forward pass; outputs are tagged minmax01 with `range`.
std::vector<Spectrum> single_unet_restore(std::span<const Spectrum> lq_norm, const Stage& model, const MinMax& range);

struct CascadeModel {
  Stage stage1;
  Stage stage2;
  dsp::SnipParams snip;
  MinMax range;        // input/target normalization
  MinMax stage2_norm;  // re-normalization after the bridge
};

enum class Bridge { active, bypass };

/// stage1 -> bridge_invert -> snip_correct -> SNV -> stage2_norm min-max.
/// With Bridge::bypass stage1 outputs go straight to stage 2 (guard tests).
std::vector<Spectrum> cascade_bridge(std::span<const Spectrum> lq_norm, const std::vector<std::vector<double>>& stage1_out,
                                     const CascadeModel& m, Bridge bridge = Bridge::active);

std::vector<Spectrum> cascade_infer(std::span<const Spectrum> lq_norm, const CascadeModel& m,
                                    Bridge bridge = Bridge::active);

/// Loss_stage1: MSE of stage 1 outputs against target_a.
double stage1_loss(const CascadeModel& m, std::span<const Spectrum> lq_norm, std::span<const Spectrum> target_a);
/// Loss_stage2: MSE of the full cascade output against target_b.
double stage2_loss(const CascadeModel& m, std::span<const Spectrum> lq_norm, std::span<const Spectrum> target_b);

struct NetTrainConfig {
  nn::UnetConfig unet;
  nn::TrainConfig train;
};

struct SingleTrainResult {
  Stage model;
  std::vector<nn::EpochRecord> history;
};

/// Trains LQ -> target_b. The validation rows are drawn with
/// train.shuffle_seed from the given spectra.
SingleTrainResult single_unet_train(std::span<const Spectrum> lq_norm, const TrainingTargets& targets,
                                    const NetTrainConfig& cfg);

struct CascadeTrainConfig {
  NetTrainConfig stage1;
  NetTrainConfig stage2;
  dsp::SnipParams snip;
};

struct CascadeTrainResult {
  CascadeModel model;
  std::vector<nn::EpochRecord> history1;
  std::vector<nn::EpochRecord> history2;
};

/// Phase 1 fits stage 1 to target_a. Phase 2 freezes it, pushes the training
/// spectra through the bridge, fits stage2_norm on the bridge outputs and
/// fits stage 2 to target_b. Both phases share one validation split.
CascadeTrainResult cascade_train(std::span<const Spectrum> lq_norm, const TrainingTargets& targets,
                                 const CascadeTrainConfig& cfg);

void save_stage(const Stage& s, const std::filesystem::path& dir);
Stage load_stage(const std::filesystem::path& dir);

void save_cascade(const CascadeModel& m, const std::filesystem::path& dir);
CascadeModel load_cascade(const std::filesystem::path& dir);

Json to_json(const dsp::SnipParams& p);
dsp::SnipParams snip_params_from_json(const Json& j);
Json to_json(const dsp::SgParams& p);
dsp::SgParams sg_params_from_json(const Json& j);
Json to_json(const MinMax& r);
MinMax minmax_from_json(const Json& j);

}  // namespace ftir::pipelines
