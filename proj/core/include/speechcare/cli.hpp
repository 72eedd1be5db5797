#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "speechcare/model.hpp"
#include "speechcare/pipeline.hpp"
#include "speechcare/synth.hpp"
#include "speechcare/trainer.hpp"

namespace speechcare::cli {

// One training job as described by a JSON config file.
struct TrainJobConfig {
    std::string manifest;
    model::ModelConfig model;
    train::TrainConfig train;
    double val_fraction = 0.2;
    bool oversample_enabled = false;
    pipeline::GroupKey oversample_group = pipeline::GroupKey::label;
    std::uint64_t seed = 0;
};

struct AblateVariant {
    std::string name;
    std::vector<enc::Modality> modalities;
    fusion::FusionKind fusion = fusion::FusionKind::agf;
};

struct AblateConfig {
    TrainJobConfig base;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::string primary;  // variant name the others are compared against
    std::vector<AblateVariant> variants;
};

// Parsers throw DataError with a JSON field path on schema problems.
synth::SynthSpec parse_synth_spec(const std::string& config_path, std::uint64_t seed_override,
                                  bool has_seed_override);
TrainJobConfig parse_train_config(const std::string& config_path, std::uint64_t seed_override,
                                  bool has_seed_override);
AblateConfig parse_ablate_config(const std::string& config_path, std::uint64_t seed_override,
                                 bool has_seed_override);

// Deterministic run id from config bytes + seed, so identical invocations
// reuse the same run directory.
std::string run_id(const std::string& config_text, std::uint64_t seed);

// Command implementations. Each returns the primary output directory/file.
std::string cmd_synth(const synth::SynthSpec& spec, const std::string& out_dir);
std::string cmd_impute(const std::string& manifest_in, const std::string& manifest_out,
                       std::uint64_t seed);

struct PreprocessOptions {
    bool dump_spectrograms = false;
    double low_pass_hz = 8000.0;
};
std::string cmd_preprocess(const std::string& manifest_path, const std::string& out_dir,
                           const PreprocessOptions& opts);

std::string cmd_train(const TrainJobConfig& cfg, const std::string& out_dir);

std::string cmd_ablate(const AblateConfig& cfg, const std::string& out_dir);

struct EvaluateOptions {
    std::string checkpoint;
    std::string config;    // run config.json (model section is used)
    std::string manifest;
    std::optional<std::array<double, 3>> thresholds;
    bool binary_mci = false;
};
std::string cmd_evaluate(const EvaluateOptions& opts, const std::string& out_dir);

struct AuditOptions {
    std::string predictions;
    std::string baseline;  // optional second predictions file (before mitigation)
    int positive_class = 1;
    std::vector<std::string> group_attrs{"age_bucket", "gender", "education", "language"};
};
std::string cmd_audit(const AuditOptions& opts, const std::string& out_path);

struct WerOptions {
    std::string ref_path;
    std::string hyp_path;
    std::string out_path;  // optional JSON report
};
int cmd_wer(const WerOptions& opts);

}  // namespace speechcare::cli
