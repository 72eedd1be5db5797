#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "speechcare/manifest.hpp"
#include "speechcare/waveform.hpp"

namespace speechcare::synth {

// Synthetic-corpus recipe. Class signals are planted per modality: the
// acoustic signal shifts tone pitch and pause rate by class, the linguistic
// signal shifts filler-token rate, and demographics correlate age bucket
// with the label. Strength 0 makes every class-conditional distribution
// identical.
struct SynthSpec {
    int n_records = 600;
    std::array<double, 3> class_priors{0.5, 0.2, 0.3};  // control, mci, ad
    double acoustic_strength = 0.8;
    double linguistic_strength = 0.8;
    double demographic_strength = 0.8;
    std::array<double, 4> language_mix{0.8, 0.15, 0.05, 0.0};  // en, es, zh, other
    double duration_s = 5.0;
    double sample_rate = 16000.0;
    double education_missing_rate = 0.0;
    std::uint64_t seed = 0;
    std::string uid_prefix = "synth";

    void validate() const;
};

// Largest-remainder class counts: histogram matches priors within ±1.
std::array<int, 3> class_counts(const SynthSpec& spec);

// Deterministic per-record label assignment (counts shuffled by seed).
std::vector<data::Label> assign_labels(const SynthSpec& spec);

audio::Waveform synth_audio(const SynthSpec& spec, int record_index, data::Label label);
std::string synth_transcript(const SynthSpec& spec, int record_index, data::Label label,
                             data::Language language);
data::ManifestRecord synth_demographics(const SynthSpec& spec, int record_index,
                                        data::Label label);

// Writes wav/<uid>.wav files plus manifest.jsonl under out_dir and returns
// the records. Byte-identical output for a fixed spec.
std::vector<data::ManifestRecord> generate_corpus(const SynthSpec& spec,
                                                  const std::string& out_dir);

}  // namespace speechcare::synth
