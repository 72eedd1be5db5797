#include "speechcare/segment.hpp"

#include <algorithm>
#include <cmath>

#include "speechcare/rng.hpp"

namespace speechcare::audio {

SegmentPlan plan_segments(double duration_s) {
    if (!(duration_s > 0.0)) throw DomainError("segment planning needs a positive duration");
    SegmentPlan plan;
    if (duration_s < kWindowSeconds) {
        plan.starts = {0.0};
        plan.padded = true;
        return plan;
    }
    constexpr double kTol = 1e-9;
    double start = 0.0;
    while (start + kWindowSeconds <= duration_s + kTol &&
           static_cast<int>(plan.starts.size()) < kMaxWindows) {
        plan.starts.push_back(start);
        start += kHopSeconds;
    }
    return plan;
}

Waveform extract_window(const Waveform& wave, double start_s) {
    if (wave.sample_rate <= 0) throw DomainError("waveform sample rate must be positive");
    const auto want = static_cast<std::size_t>(std::lround(kWindowSeconds * wave.sample_rate));
    const auto begin = static_cast<std::size_t>(std::lround(start_s * wave.sample_rate));
    Waveform out;
    out.sample_rate = wave.sample_rate;
    out.samples.assign(want, 0.0);
    for (std::size_t i = 0; i < want && begin + i < wave.samples.size(); ++i)
        out.samples[i] = wave.samples[begin + i];
    return out;
}

namespace {

constexpr double kLogFloor = 1e-10;
constexpr double kBandLowHz = 50.0;

// Precomputed geometric band edge -> bin ranges for one spectrogram layout.
std::vector<std::pair<int, int>> band_bins(int bins, double sample_rate, int nfft) {
    const double f_hi = sample_rate / 2.0;
    const double ratio = f_hi / kBandLowHz;
    std::vector<std::pair<int, int>> out(kBandCount, {0, 0});
    const double bin_hz = sample_rate / static_cast<double>(nfft);
    for (int b = 0; b < kBandCount; ++b) {
        const double lo = kBandLowHz * std::pow(ratio, static_cast<double>(b) / kBandCount);
        const double hi = kBandLowHz * std::pow(ratio, static_cast<double>(b + 1) / kBandCount);
        int k_lo = static_cast<int>(std::ceil(lo / bin_hz));
        int k_hi = static_cast<int>(std::ceil(hi / bin_hz));  // exclusive
        if (b == kBandCount - 1) k_hi = bins;                 // top band owns Nyquist
        k_lo = std::clamp(k_lo, 0, bins);
        k_hi = std::clamp(k_hi, k_lo, bins);
        out[b] = {k_lo, k_hi};
    }
    return out;
}

Mat<double> pool_features(const Spectrogram& spec, const Waveform& segment) {
    const int frames = spec.frames();
    const std::size_t nfft = next_pow2(static_cast<std::size_t>(spec.frame_len));
    const auto bands = band_bins(spec.bins(), spec.sample_rate, static_cast<int>(nfft));
    Mat<double> out(frames, kFrameFeatures);
    const auto n = static_cast<long>(segment.samples.size());
    for (int f = 0; f < frames; ++f) {
        const double* mag = spec.magnitude.row(f);
        double* feat = out.row(f);
        for (int b = 0; b < kBandCount; ++b) {
            double e = 0.0;
            for (int k = bands[b].first; k < bands[b].second; ++k) e += mag[k] * mag[k];
            feat[b] = std::log(kLogFloor + e);
        }
        // Zero-crossing rate over the frame's time-domain samples.
        const long start = static_cast<long>(f) * spec.hop_len;
        int crossings = 0;
        int counted = 0;
        for (long i = start + 1; i < start + spec.frame_len && i < n; ++i) {
            ++counted;
            if ((segment.samples[i - 1] >= 0.0) != (segment.samples[i] >= 0.0)) ++crossings;
        }
        feat[kBandCount] =
            counted > 0 ? static_cast<double>(crossings) / static_cast<double>(counted) : 0.0;
    }
    return out;
}

Waveform pad_to_window(const Waveform& segment) {
    if (segment.samples.empty()) throw DomainError("cannot frame an empty segment");
    if (segment.sample_rate <= 0) throw DomainError("waveform sample rate must be positive");
    const auto want = static_cast<std::size_t>(std::lround(kWindowSeconds * segment.sample_rate));
    if (segment.samples.size() > want + 1)
        throw DomainError("segment longer than the 5 s window");
    Waveform padded = segment;
    padded.samples.resize(want, 0.0);
    return padded;
}

}  // namespace

Spectrogram segment_spectrogram(const Waveform& segment) {
    const Waveform padded = pad_to_window(segment);
    const auto frame_len = static_cast<int>(std::lround(0.025 * padded.sample_rate));
    const auto hop = static_cast<int>(std::lround(0.020 * padded.sample_rate));
    // End-pad so the frame count is exactly 250: the last frames read past
    // the signal and see zeros.
    Waveform extended = padded;
    extended.samples.resize(static_cast<std::size_t>(hop) * (kFramesPerSegment - 1) + frame_len,
                            0.0);
    Spectrogram spec = spectrogram(extended, 0.025, 0.020);
    if (spec.frames() != kFramesPerSegment)
        throw StateError("segment framing produced " + std::to_string(spec.frames()) +
                         " frames instead of 250");
    return spec;
}

Mat<double> frame_segment(const Waveform& segment) {
    const Waveform padded = pad_to_window(segment);
    return pool_features(segment_spectrogram(segment), padded);
}

Mat<double> frame_segment(const Waveform& segment, int mask_max_band, std::uint64_t seed) {
    const Waveform padded = pad_to_window(segment);
    const Spectrogram masked = frequency_mask(segment_spectrogram(segment), mask_max_band, seed);
    return pool_features(masked, padded);
}

Mat<double> acoustic_frames(const Waveform& wave, bool augment, std::uint64_t seed) {
    const SegmentPlan plan = plan_segments(wave.duration());
    const int windows = static_cast<int>(plan.starts.size());
    Mat<double> out(windows * kFramesPerSegment, kFrameFeatures);
    for (int w = 0; w < windows; ++w) {
        const Waveform seg = extract_window(wave, plan.starts[w]);
        Mat<double> feats;
        if (augment) {
            const Spectrogram probe = segment_spectrogram(seg);
            const int max_band = std::max(1, probe.bins() / 6);
            feats = frame_segment(seg, max_band,
                                  seed ^ Rng::fnv1a64("window/" + std::to_string(w)));
        } else {
            feats = frame_segment(seg);
        }
        for (int i = 0; i < kFramesPerSegment; ++i)
            for (int j = 0; j < kFrameFeatures; ++j)
                out.at(w * kFramesPerSegment + i, j) = feats.at(i, j);
    }
    return out;
}

}  // namespace speechcare::audio
