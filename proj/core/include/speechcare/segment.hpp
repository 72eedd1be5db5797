#pragma once

#include <cstdint>
#include <vector>

#include "speechcare/dsp.hpp"
#include "speechcare/tensor.hpp"
#include "speechcare/waveform.hpp"

namespace speechcare::audio {

inline constexpr double kWindowSeconds = 5.0;
inline constexpr double kWindowOverlap = 0.25;                                // of window length
inline constexpr double kHopSeconds = kWindowSeconds * (1.0 - kWindowOverlap);  // 3.75 s
inline constexpr int kMaxWindows = 7;
inline constexpr int kFramesPerSegment = 250;
inline constexpr int kBandCount = 16;
inline constexpr int kFrameFeatures = kBandCount + 1;  // log band energies + ZCR

// Window starts realizing 5 s chunks with 25 % overlap. Audio shorter than
// one window gets a single zero-padded window at 0; the tail past the last
// full window is dropped; at most 7 windows.
struct SegmentPlan {
    double window_len = kWindowSeconds;
    double hop = kHopSeconds;
    std::vector<double> starts;
    bool padded = false;
};

SegmentPlan plan_segments(double duration_s);

// Cuts [start, start + 5 s) out of the waveform, zero-padding past the end.
Waveform extract_window(const Waveform& wave, double start_s);

// 250 frames (25 ms window, 20 ms hop, end-padded) of 16 geometric band log
// energies plus zero-crossing rate: a 250×17 feature matrix.
Mat<double> frame_segment(const Waveform& segment);

// Same, with a random contiguous frequency band of the underlying spectrogram
// zeroed before band pooling (oversampling augmentation).
Mat<double> frame_segment(const Waveform& segment, int mask_max_band, std::uint64_t seed);

// Spectrogram with the exact 250-frame layout frame_segment pools from.
Spectrogram segment_spectrogram(const Waveform& segment);

// Full acoustic frontend for one record: plan windows, frame each, stack.
// Output is (250 * windows)×17.
Mat<double> acoustic_frames(const Waveform& wave, bool augment = false,
                            std::uint64_t seed = 0);

}  // namespace speechcare::audio
