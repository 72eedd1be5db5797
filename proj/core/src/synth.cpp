#include "speechcare/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "speechcare/rng.hpp"
#include "speechcare/waveform.hpp"

namespace speechcare::synth {

namespace fs = std::filesystem;

void SynthSpec::validate() const {
    if (n_records <= 0) throw DataError("synth spec needs a positive record count");
    double prior_sum = 0.0;
    for (const double p : class_priors) {
        if (p < 0) throw DataError("class priors must be non-negative");
        prior_sum += p;
    }
    if (std::abs(prior_sum - 1.0) > 1e-9) throw DataError("class priors must sum to 1");
    for (const double s :
         {acoustic_strength, linguistic_strength, demographic_strength, education_missing_rate})
        if (s < 0.0 || s > 1.0) throw DataError("signal strengths must lie in [0, 1]");
    double mix_sum = 0.0;
    for (const double p : language_mix) {
        if (p < 0) throw DataError("language mix must be non-negative");
        mix_sum += p;
    }
    if (std::abs(mix_sum - 1.0) > 1e-9) throw DataError("language mix must sum to 1");
    if (duration_s <= 0 || sample_rate <= 0)
        throw DataError("duration and sample rate must be positive");
}

std::array<int, 3> class_counts(const SynthSpec& spec) {
    std::array<int, 3> counts{};
    std::array<double, 3> remainder{};
    int assigned = 0;
    for (int c = 0; c < 3; ++c) {
        const double exact = spec.class_priors[c] * spec.n_records;
        counts[c] = static_cast<int>(std::floor(exact));
        remainder[c] = exact - counts[c];
        assigned += counts[c];
    }
    for (int left = spec.n_records - assigned; left > 0; --left) {
        int best = 0;
        for (int c = 1; c < 3; ++c)
            if (remainder[c] > remainder[best]) best = c;
        ++counts[best];
        remainder[best] = -1.0;
    }
    return counts;
}

std::vector<data::Label> assign_labels(const SynthSpec& spec) {
    const auto counts = class_counts(spec);
    std::vector<data::Label> labels;
    labels.reserve(spec.n_records);
    for (int c = 0; c < 3; ++c)
        labels.insert(labels.end(), counts[c], static_cast<data::Label>(c));
    Rng rng = Rng::stream(spec.seed, "labels");
    rng.shuffle(labels.begin(), labels.end());
    return labels;
}

namespace {

const std::vector<std::string>& wordlist(data::Language lang) {
    static const std::vector<std::string> en{
        "the",   "story", "went",  "house", "garden", "morning", "water",  "little",
        "woman", "man",   "child", "found", "walked", "table",   "window", "kitchen",
        "asked", "told",  "day",   "again", "hand",   "door",    "street", "remember",
        "first", "after", "before"};
    static const std::vector<std::string> es{
        "la",     "historia", "casa",   "jardin", "manana", "agua",     "mujer",
        "hombre", "nino",     "mesa",   "ventana", "cocina", "pregunto", "dijo",
        "dia",    "mano",     "puerta", "calle",   "primero", "despues", "antes",
        "fue",    "pequeno",  "otra",   "vez"};
    static const std::vector<std::string> zh{
        "wo",  "qu",   "le",  "jia",  "shui", "xiao", "nu",  "ren",  "hai", "zhuo",
        "men", "chu",  "wen", "shuo", "tian", "shou", "jie", "xian", "hou", "zai",
        "zao", "shang", "kan", "dao",  "hua"};
    static const std::vector<std::string> other{
        "toki", "suno", "telo", "tomo", "jan",  "lili", "mama", "mije", "kasi", "lape",
        "moku", "pona", "mute", "wile", "kama", "sona", "lukin", "pini", "open", "awen"};
    switch (lang) {
        case data::Language::english: return en;
        case data::Language::spanish: return es;
        case data::Language::mandarin: return zh;
        case data::Language::other: return other;
    }
    return en;
}

const std::vector<std::string>& fillers() {
    static const std::vector<std::string> f{"uh", "um", "eh", "hmm"};
    return f;
}

data::Language pick_language(const SynthSpec& spec, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int l = 0; l < 4; ++l) {
        acc += spec.language_mix[l];
        if (u < acc) return static_cast<data::Language>(l);
    }
    return data::Language::english;
}

}  // namespace

audio::Waveform synth_audio(const SynthSpec& spec, int record_index, data::Label label) {
    Rng rng = Rng::stream(spec.seed, "audio/" + std::to_string(record_index));
    const int c = static_cast<int>(label);
    const double tone_hz =
        std::max(80.0, 220.0 + 60.0 * spec.acoustic_strength * c + rng.normal(0.0, 12.0));
    const double pause_mu = std::clamp(
        0.12 + 0.15 * spec.acoustic_strength * c + rng.normal(0.0, 0.05), 0.02, 1.0);

    audio::Waveform w;
    w.sample_rate = spec.sample_rate;
    const auto n = static_cast<std::size_t>(std::lround(spec.duration_s * spec.sample_rate));
    w.samples.assign(n, 0.0);

    const double ramp_s = 0.02;
    std::size_t pos = 0;
    bool voiced = true;
    while (pos < n) {
        const double len_s = voiced ? rng.uniform(0.25, 0.45)
                                    : std::max(0.01, pause_mu * rng.uniform(0.7, 1.3));
        const auto len = static_cast<std::size_t>(std::lround(len_s * spec.sample_rate));
        if (voiced) {
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            for (std::size_t i = 0; i < len && pos + i < n; ++i) {
                const double t = static_cast<double>(i) / spec.sample_rate;
                const double edge = std::min({1.0, t / ramp_s, (len_s - t) / ramp_s});
                const double env = std::max(0.0, edge);
                w.samples[pos + i] =
                    env * (0.30 * std::sin(2.0 * std::numbers::pi * tone_hz * t + phase) +
                           0.08 * std::sin(4.0 * std::numbers::pi * tone_hz * t));
            }
        }
        pos += std::max<std::size_t>(1, len);
        voiced = !voiced;
    }
    for (double& s : w.samples) s = std::clamp(s + rng.normal(0.0, 0.01), -1.0, 1.0);
    return w;
}

std::string synth_transcript(const SynthSpec& spec, int record_index, data::Label label,
                             data::Language language) {
    Rng rng = Rng::stream(spec.seed, "text/" + std::to_string(record_index));
    const int c = static_cast<int>(label);
    const int length = std::clamp(static_cast<int>(std::lround(rng.normal(40.0, 8.0))), 15, 80);
    const double filler_prob = std::clamp(
        0.05 + 0.16 * spec.linguistic_strength * c + rng.normal(0.0, 0.03), 0.0, 0.6);
    const auto& words = wordlist(language);

    // Zipf-ish weights over the base vocabulary.
    std::vector<double> cum;
    double acc = 0.0;
    for (std::size_t k = 0; k < words.size(); ++k) {
        acc += 1.0 / static_cast<double>(k + 2);
        cum.push_back(acc);
    }

    std::string out;
    for (int i = 0; i < length; ++i) {
        if (!out.empty()) out.push_back(' ');
        if (rng.uniform() < filler_prob) {
            out += fillers()[rng.below(fillers().size())];
        } else {
            const double u = rng.uniform(0.0, acc);
            const auto it = std::lower_bound(cum.begin(), cum.end(), u);
            out += words[std::min(words.size() - 1,
                                  static_cast<std::size_t>(it - cum.begin()))];
        }
    }
    return out;
}

data::ManifestRecord synth_demographics(const SynthSpec& spec, int record_index,
                                        data::Label label) {
    Rng rng = Rng::stream(spec.seed, "demo/" + std::to_string(record_index));
    data::ManifestRecord r;
    const int c = static_cast<int>(label);
    const int bucket = rng.uniform() < 0.75 * spec.demographic_strength
                           ? c
                           : static_cast<int>(rng.below(3));
    switch (bucket) {
        case 0: r.age = std::floor(rng.uniform(46.0, 66.0)); break;
        case 1: r.age = std::floor(rng.uniform(66.0, 81.0)); break;
        default: r.age = std::floor(rng.uniform(81.0, 96.0)); break;
    }
    r.gender = rng.uniform() < 0.5 ? data::Gender::female : data::Gender::male;
    if (rng.uniform() >= spec.education_missing_rate)
        r.education = static_cast<data::Education>(rng.below(4));
    r.language = pick_language(spec, rng);
    r.label = label;
    return r;
}

std::vector<data::ManifestRecord> generate_corpus(const SynthSpec& spec,
                                                  const std::string& out_dir) {
    spec.validate();
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "wav", ec);
    if (ec) throw DataError("cannot create output directory " + out_dir + ": " + ec.message());

    const auto labels = assign_labels(spec);
    std::vector<data::ManifestRecord> records;
    records.reserve(spec.n_records);
    char uid_buf[32];
    for (int i = 0; i < spec.n_records; ++i) {
        std::snprintf(uid_buf, sizeof(uid_buf), "%s-%05d", spec.uid_prefix.c_str(), i);
        data::ManifestRecord r = synth_demographics(spec, i, labels[i]);
        r.uid = uid_buf;
        r.transcript = synth_transcript(spec, i, labels[i], r.language);
        const audio::Waveform wave = synth_audio(spec, i, labels[i]);
        const std::string rel = std::string("wav/") + uid_buf + ".wav";
        audio::write_wav((fs::path(out_dir) / rel).string(), wave);
        r.audio_path = rel;
        records.push_back(std::move(r));
    }
    data::write_manifest((fs::path(out_dir) / "manifest.jsonl").string(), records);
    return records;
}

}  // namespace speechcare::synth
