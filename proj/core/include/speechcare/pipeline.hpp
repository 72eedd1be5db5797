#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "speechcare/demographics.hpp"
#include "speechcare/encoders.hpp"
#include "speechcare/manifest.hpp"
#include "speechcare/split.hpp"
#include "speechcare/tensor.hpp"

namespace speechcare::pipeline {

// One record, feature-extracted and ready for the model: audio has been
// low-pass filtered, segmented, framed and CMVN-normalized; transcripts are
// hashed token ids; demographics are one-hot. Extraction runs once per
// record, so epochs only pay the network cost.
struct RecordFeatures {
    enum class AcousticKind { none, raw_frames, projected_frames, embedding };

    std::string uid;
    AcousticKind acoustic_kind = AcousticKind::none;
    Mat<float> acoustic;  // n×17, n×model_dim, or 1×model_dim
    bool has_text = false;
    std::vector<int> token_ids;
    bool has_demo = false;
    Mat<float> demo;  // 1×9
    int label = -1;   // -1 when unlabeled

    // group attributes for fairness reporting
    std::optional<data::AgeBucket> age_bucket;
    data::Gender gender = data::Gender::female;
    std::optional<data::Education> education;
    data::Language language = data::Language::english;
};

struct FeatureOptions {
    int model_dim = 32;       // expected width of precomputed sequences
    int vocab_buckets = 4096;
    bool want_acoustic = true;
    bool want_text = true;
    bool want_demo = true;
    double low_pass_hz = 8000.0;
    bool augment = false;     // frequency-mask the acoustic features
    std::uint64_t augment_seed = 0;
    std::string base_dir;     // resolves relative audio/embedding paths
};

// Extracts features for one record. Audio records run the full frontend;
// embedding_path records route by shape (1×d embedding, n×17 raw frames,
// n×model_dim projected frames).
RecordFeatures extract_features(const data::ManifestRecord& record, const FeatureOptions& opts);

std::vector<RecordFeatures> extract_features(const std::vector<data::ManifestRecord>& records,
                                             const FeatureOptions& opts);

// Duplicates records of under-represented groups until every group matches
// the majority count; the duplicates carry an augmentation flag that the
// feature extractor honors with frequency masking. Originals always come
// first, so output is a superset of the input.
enum class GroupKey { label, age_bucket, gender, education, language };

GroupKey group_key_from_string(const std::string& s);
std::string to_string(GroupKey k);
std::string group_value(const data::ManifestRecord& r, GroupKey key);

struct OversampledRecord {
    data::ManifestRecord record;
    bool augmented = false;
};

std::vector<OversampledRecord> oversample(const std::vector<data::ManifestRecord>& records,
                                          GroupKey key, std::uint64_t seed);

}  // namespace speechcare::pipeline
