#include "speechcare/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace speechcare::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

std::uint32_t rd_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ostream& os, std::uint32_t x) {
    const unsigned char b[4] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                                static_cast<unsigned char>(x >> 16),
                                static_cast<unsigned char>(x >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void wr_u16(std::ostream& os, std::uint16_t x) {
    const unsigned char b[2] = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

Waveform read_wav(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open wav: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw FormatError("not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t chunk_len = rd_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size()) throw FormatError("truncated wav chunk: " + path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw FormatError("bad fmt chunk: " + path);
            format = rd_u16(bytes.data() + body);
            channels = rd_u16(bytes.data() + body + 2);
            rate = rd_u32(bytes.data() + body + 4);
            bits = rd_u16(bytes.data() + body + 14);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }
    if (!data || rate == 0 || channels == 0) throw FormatError("wav missing fmt/data: " + path);
    if (format != kFormatPcm && format != kFormatFloat)
        throw FormatError("unsupported wav format " + std::to_string(format) + ": " + path);
    if (format == kFormatPcm && bits != 16)
        throw FormatError("only 16-bit PCM supported: " + path);
    if (format == kFormatFloat && bits != 32)
        throw FormatError("only 32-bit float supported: " + path);

    const std::size_t bytes_per = bits / 8;
    const std::size_t frames = data_len / (bytes_per * channels);
    Waveform w;
    w.sample_rate = static_cast<double>(rate);
    w.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + (i * channels + c) * bytes_per;
            if (format == kFormatPcm) {
                const auto s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
                acc += static_cast<double>(s) / 32768.0;
            } else {
                float f;
                std::uint32_t u = rd_u32(p);
                std::memcpy(&f, &u, 4);
                acc += static_cast<double>(f);
            }
        }
        w.samples[i] = std::clamp(acc / channels, -1.0, 1.0);
    }
    return w;
}

void write_wav(const std::string& path, const Waveform& wave) {
    if (wave.sample_rate <= 0) throw DomainError("wav sample rate must be positive");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open wav for writing: " + path);
    const auto n = static_cast<std::uint32_t>(wave.samples.size());
    const std::uint32_t data_len = n * 2;
    os.write("RIFF", 4);
    wr_u32(os, 36 + data_len);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    wr_u32(os, 16);
    wr_u16(os, kFormatPcm);
    wr_u16(os, 1);  // mono
    const auto rate = static_cast<std::uint32_t>(wave.sample_rate);
    wr_u32(os, rate);
    wr_u32(os, rate * 2);  // byte rate
    wr_u16(os, 2);         // block align
    wr_u16(os, 16);        // bits
    os.write("data", 4);
    wr_u32(os, data_len);
    for (const double s : wave.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        const auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        wr_u16(os, static_cast<std::uint16_t>(q));
    }
    if (!os) throw DataError("short write to wav: " + path);
}

}  // namespace speechcare::audio
