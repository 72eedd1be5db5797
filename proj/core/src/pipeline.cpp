#include "speechcare/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>

#include "speechcare/dsp.hpp"
#include "speechcare/embedding_io.hpp"
#include "speechcare/rng.hpp"
#include "speechcare/segment.hpp"
#include "speechcare/waveform.hpp"

namespace speechcare::pipeline {

namespace {

std::string resolve(const std::string& base, const std::string& path) {
    namespace fs = std::filesystem;
    if (base.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base) / path).string();
}

}  // namespace

RecordFeatures extract_features(const data::ManifestRecord& record, const FeatureOptions& opts) {
    RecordFeatures f;
    f.uid = record.uid;
    f.label = record.label ? static_cast<int>(*record.label) : -1;
    if (record.age) f.age_bucket = data::bucket_age(*record.age);
    f.gender = record.gender;
    f.education = record.education;
    f.language = record.language;

    if (opts.want_acoustic) {
        if (record.embedding_path) {
            const Mat<float> m = enc::load_embedding(resolve(opts.base_dir, *record.embedding_path));
            if (m.rows == 1 && m.cols == opts.model_dim) {
                f.acoustic_kind = RecordFeatures::AcousticKind::embedding;
                f.acoustic = m;
            } else if (m.cols == audio::kFrameFeatures) {
                // Raw band-energy frames: normalize exactly like the audio path.
                Mat<double> frames(m.rows, m.cols);
                for (std::size_t i = 0; i < m.v.size(); ++i)
                    frames.v[i] = static_cast<double>(m.v[i]);
                f.acoustic_kind = RecordFeatures::AcousticKind::raw_frames;
                f.acoustic = enc::normalize_frames<float>(frames);
            } else if (m.cols == opts.model_dim) {
                f.acoustic_kind = RecordFeatures::AcousticKind::projected_frames;
                f.acoustic = m;
            } else {
                throw DataError("record " + record.uid + ": embedding width " +
                                std::to_string(m.cols) + " matches neither the frame feature " +
                                "width nor model_dim");
            }
            if (f.acoustic.rows > enc::kMaxAcousticFrames)
                throw DataError("record " + record.uid + ": embedding sequence too long");
        } else if (record.audio_path) {
            audio::Waveform wave = audio::read_wav(resolve(opts.base_dir, *record.audio_path));
            wave = audio::low_pass(wave, opts.low_pass_hz);
            const std::uint64_t mask_seed =
                opts.augment_seed ^ Rng::fnv1a64("augment/" + record.uid);
            const Mat<double> frames = audio::acoustic_frames(wave, opts.augment, mask_seed);
            f.acoustic_kind = RecordFeatures::AcousticKind::raw_frames;
            f.acoustic = enc::normalize_frames<float>(frames);
        }
    }
    if (opts.want_text) {
        f.has_text = true;
        f.token_ids = enc::hash_tokens(enc::tokenize(record.transcript), opts.vocab_buckets);
    }
    if (opts.want_demo) {
        const std::vector<double> onehot = data::encode_demographics(record);
        f.has_demo = true;
        f.demo = Mat<float>(1, data::kDemographicWidth);
        for (int j = 0; j < data::kDemographicWidth; ++j)
            f.demo.v[j] = static_cast<float>(onehot[j]);
    }
    return f;
}

std::vector<RecordFeatures> extract_features(const std::vector<data::ManifestRecord>& records,
                                             const FeatureOptions& opts) {
    std::vector<RecordFeatures> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(extract_features(r, opts));
    return out;
}

GroupKey group_key_from_string(const std::string& s) {
    if (s == "label") return GroupKey::label;
    if (s == "age_bucket") return GroupKey::age_bucket;
    if (s == "gender") return GroupKey::gender;
    if (s == "education") return GroupKey::education;
    if (s == "language") return GroupKey::language;
    throw DataError("unknown group key: " + s);
}

std::string to_string(GroupKey k) {
    switch (k) {
        case GroupKey::label: return "label";
        case GroupKey::age_bucket: return "age_bucket";
        case GroupKey::gender: return "gender";
        case GroupKey::education: return "education";
        case GroupKey::language: return "language";
    }
    return "";
}

std::string group_value(const data::ManifestRecord& r, GroupKey key) {
    switch (key) {
        case GroupKey::label: return r.label ? to_string(*r.label) : "unlabeled";
        case GroupKey::age_bucket:
            return r.age ? to_string(data::bucket_age(*r.age)) : "no_age";
        case GroupKey::gender: return to_string(r.gender);
        case GroupKey::education:
            return r.education ? to_string(*r.education) : "no_education";
        case GroupKey::language: return to_string(r.language);
    }
    return "";
}

std::vector<OversampledRecord> oversample(const std::vector<data::ManifestRecord>& records,
                                          GroupKey key, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i)
        groups[group_value(records[i], key)].push_back(i);

    std::size_t target = 0;
    for (const auto& [name, members] : groups) target = std::max(target, members.size());

    std::vector<OversampledRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r, false});
    for (auto& [name, members] : groups) {
        if (members.empty()) {
            std::cerr << "oversample: skipping empty group " << name << "\n";
            continue;
        }
        Rng rng = Rng::stream(seed, "oversample/" + name);
        std::vector<std::size_t> order = members;
        rng.shuffle(order.begin(), order.end());
        std::size_t next = 0;
        for (std::size_t need = target - members.size(); need > 0; --need) {
            out.push_back({records[order[next]], true});
            next = (next + 1) % order.size();
        }
    }
    return out;
}

}  // namespace speechcare::pipeline
