#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "speechcare/tensor.hpp"
#include "speechcare/waveform.hpp"

namespace speechcare::audio {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Linear-phase FIR low pass: 255-tap windowed sinc (Hamming), applied with
// symmetric delay compensation so the output is zero-phase and keeps the
// input length. When the cutoff is at or above Nyquist the input is returned
// unchanged (and *passthrough, if given, reports it).
Waveform low_pass(const Waveform& wave, double cutoff_hz = 8000.0,
                  bool* passthrough = nullptr);

// 20*log10(rms(signal)/rms(noise)). Silent noise yields +infinity.
double snr_db(const Waveform& signal, const Waveform& noise);

// Frame-averaged geometric-to-arithmetic mean ratio of the power spectrum,
// in [0, 1]; all-zero input yields 0 by convention. Frames are 25 ms with a
// 20 ms hop.
double spectral_flatness(const Waveform& wave);

// Magnitude spectrogram: rows are frames, columns are frequency bins
// (0..N/2 of an FFT sized to the frame length).
struct Spectrogram {
    Mat<double> magnitude;
    int frame_len = 0;  // samples
    int hop_len = 0;    // samples
    double sample_rate = 0.0;

    int frames() const { return magnitude.rows; }
    int bins() const { return magnitude.cols; }
};

Spectrogram spectrogram(const Waveform& wave, double frame_s = 0.025, double hop_s = 0.020);

// Zeroes one contiguous frequency band whose width is uniform in
// [0, max_band]; every other entry is bit-identical to the input.
Spectrogram frequency_mask(const Spectrogram& spec, int max_band, std::uint64_t seed);

// Debug dump, one CSV row per frame.
void write_spectrogram_csv(const Spectrogram& spec, const std::string& path);

}  // namespace speechcare::audio
