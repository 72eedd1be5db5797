#pragma once

#include <string>
#include <vector>

#include "speechcare/errors.hpp"

namespace speechcare::audio {

// Mono waveform, samples in [-1, 1].
struct Waveform {
    std::vector<double> samples;
    double sample_rate = 16000.0;

    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// RIFF/WAVE reader for PCM16 and float32. Stereo input is downmixed by
// channel average; no resampling is performed.
Waveform read_wav(const std::string& path);

// Writes mono PCM16.
void write_wav(const std::string& path, const Waveform& wave);

}  // namespace speechcare::audio
