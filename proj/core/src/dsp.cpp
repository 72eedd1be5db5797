#include "speechcare/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "speechcare/rng.hpp"

namespace speechcare::audio {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw DomainError("fft size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

namespace {

constexpr int kLowPassTaps = 255;

std::vector<double> windowed_sinc(double cutoff_hz, double sample_rate) {
    const int taps = kLowPassTaps;
    const int mid = taps / 2;
    const double fc = cutoff_hz / sample_rate;  // normalized (cycles/sample)
    std::vector<double> h(taps);
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        const int k = i - mid;
        const double sinc =
            k == 0 ? 2.0 * fc
                   : std::sin(2.0 * std::numbers::pi * fc * k) / (std::numbers::pi * k);
        const double hamming =
            0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
        h[i] = sinc * hamming;
        sum += h[i];
    }
    for (double& x : h) x /= sum;  // unit DC gain
    return h;
}

double rms(const std::vector<double>& x) {
    double acc = 0.0;
    for (const double v : x) acc += v * v;
    return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace

Waveform low_pass(const Waveform& wave, double cutoff_hz, bool* passthrough) {
    if (cutoff_hz <= 0) throw DomainError("low-pass cutoff must be positive");
    if (wave.sample_rate < 2.0 * cutoff_hz) {
        if (passthrough) *passthrough = true;
        return wave;  // cutoff at/above Nyquist: nothing to remove
    }
    if (passthrough) *passthrough = false;
    const std::vector<double> h = windowed_sinc(cutoff_hz, wave.sample_rate);
    const int mid = kLowPassTaps / 2;
    const auto n = static_cast<long>(wave.samples.size());
    Waveform out;
    out.sample_rate = wave.sample_rate;
    out.samples.assign(wave.samples.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        // Centered convolution: output sample i pulls input i-mid..i+mid.
        double acc = 0.0;
        const long lo = std::max<long>(0, i - mid);
        const long hi = std::min<long>(n - 1, i + mid);
        for (long j = lo; j <= hi; ++j) acc += wave.samples[j] * h[mid + (i - j)];
        out.samples[i] = acc;
    }
    return out;
}

double snr_db(const Waveform& signal, const Waveform& noise) {
    if (signal.samples.size() != noise.samples.size())
        throw DomainError("snr needs equal-length signal and noise");
    const double rs = rms(signal.samples);
    const double rn = rms(noise.samples);
    if (rn == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(rs / rn);
}

double spectral_flatness(const Waveform& wave) {
    if (wave.sample_rate <= 0) throw DomainError("waveform sample rate must be positive");
    const auto frame_len = static_cast<std::size_t>(std::lround(0.025 * wave.sample_rate));
    const auto hop = static_cast<std::size_t>(std::lround(0.020 * wave.sample_rate));
    if (wave.samples.size() < frame_len)
        throw DomainError("waveform shorter than one analysis frame");
    const std::size_t nfft = next_pow2(frame_len);
    constexpr double kEps = 1e-20;

    double total = 0.0;
    std::size_t frames = 0;
    std::vector<std::complex<double>> buf(nfft);
    for (std::size_t start = 0; start + frame_len <= wave.samples.size(); start += hop) {
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t i = 0; i < frame_len; ++i) buf[i] = wave.samples[start + i];
        fft(buf);
        const std::size_t bins = nfft / 2 + 1;
        double log_sum = 0.0, lin_sum = 0.0;
        for (std::size_t k = 0; k < bins; ++k) {
            const double p = std::norm(buf[k]);
            log_sum += std::log(p + kEps);
            lin_sum += p;
        }
        const double am = lin_sum / static_cast<double>(bins);
        const double gm = std::exp(log_sum / static_cast<double>(bins));
        total += am <= kEps ? 0.0 : gm / am;
        ++frames;
    }
    return frames == 0 ? 0.0 : total / static_cast<double>(frames);
}

Spectrogram spectrogram(const Waveform& wave, double frame_s, double hop_s) {
    if (wave.sample_rate <= 0) throw DomainError("waveform sample rate must be positive");
    const auto frame_len = static_cast<int>(std::lround(frame_s * wave.sample_rate));
    const auto hop = static_cast<int>(std::lround(hop_s * wave.sample_rate));
    if (frame_len <= 0 || hop <= 0) throw DomainError("spectrogram frame/hop must be positive");
    const std::size_t nfft = next_pow2(static_cast<std::size_t>(frame_len));
    const int bins = static_cast<int>(nfft / 2 + 1);
    const auto n = static_cast<long>(wave.samples.size());
    const int frames = n < frame_len ? 1 : 1 + static_cast<int>((n - frame_len) / hop);

    Spectrogram out;
    out.frame_len = frame_len;
    out.hop_len = hop;
    out.sample_rate = wave.sample_rate;
    out.magnitude = Mat<double>(frames, bins);
    std::vector<std::complex<double>> buf(nfft);
    for (int f = 0; f < frames; ++f) {
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        const long start = static_cast<long>(f) * hop;
        for (int i = 0; i < frame_len && start + i < n; ++i)
            buf[i] = wave.samples[start + i];
        fft(buf);
        double* row = out.magnitude.row(f);
        for (int k = 0; k < bins; ++k) row[k] = std::abs(buf[k]);
    }
    return out;
}

Spectrogram frequency_mask(const Spectrogram& spec, int max_band, std::uint64_t seed) {
    if (max_band < 0 || max_band >= spec.bins())
        throw DomainError("mask width must be below the bin count");
    Spectrogram out = spec;
    Rng rng = Rng::stream(seed, "frequency_mask");
    const int width = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_band) + 1));
    if (width == 0) return out;
    const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.bins() - width) + 1));
    for (int f = 0; f < out.frames(); ++f) {
        double* row = out.magnitude.row(f);
        for (int k = start; k < start + width; ++k) row[k] = 0.0;
    }
    return out;
}

void write_spectrogram_csv(const Spectrogram& spec, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open csv for writing: " + path);
    for (int f = 0; f < spec.frames(); ++f) {
        const double* row = spec.magnitude.row(f);
        for (int k = 0; k < spec.bins(); ++k) {
            if (k) os << ',';
            os << row[k];
        }
        os << '\n';
    }
}

}  // namespace speechcare::audio
