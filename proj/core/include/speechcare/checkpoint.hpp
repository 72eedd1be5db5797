#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "speechcare/errors.hpp"
#include "speechcare/tape.hpp"

namespace speechcare::nn {

// Parameter checkpoint, magic "SCNN1\0". Per parameter: u32 LE name length,
// UTF-8 name, u32 LE rows, u32 LE cols, row-major f32 LE values.
inline constexpr char kCheckpointMagic[6] = {'S', 'C', 'N', 'N', '1', '\0'};

namespace detail {

inline void put_u32_le(std::ostream& os, std::uint32_t x) {
    const unsigned char b[4] = {static_cast<unsigned char>(x & 0xff),
                                static_cast<unsigned char>((x >> 8) & 0xff),
                                static_cast<unsigned char>((x >> 16) & 0xff),
                                static_cast<unsigned char>((x >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline bool get_u32_le(std::istream& is, std::uint32_t& x) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
    x = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

inline void put_f32_le(std::ostream& os, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    put_u32_le(os, u);
}

inline bool get_f32_le(std::istream& is, float& f) {
    std::uint32_t u;
    if (!get_u32_le(is, u)) return false;
    std::memcpy(&f, &u, 4);
    return true;
}

}  // namespace detail

template <class T>
inline void save_checkpoint(const std::string& path,
                            const std::vector<Parameter<T>*>& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open checkpoint for writing: " + path);
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    for (const Parameter<T>* p : params) {
        detail::put_u32_le(os, static_cast<std::uint32_t>(p->name.size()));
        os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        detail::put_u32_le(os, static_cast<std::uint32_t>(p->value.rows));
        detail::put_u32_le(os, static_cast<std::uint32_t>(p->value.cols));
        for (const T x : p->value.v) detail::put_f32_le(os, static_cast<float>(x));
    }
    if (!os) throw DataError("short write to checkpoint: " + path);
}

// Loads by parameter name. Every parameter in `params` must be present with a
// matching shape; entries in the file with no matching parameter are ignored.
template <class T>
inline void load_checkpoint(const std::string& path,
                            const std::vector<Parameter<T>*>& params) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint: " + path);
    char magic[sizeof(kCheckpointMagic)] = {};
    if (!is.read(magic, sizeof(magic)) ||
        std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw FormatError("bad checkpoint magic: " + path);

    std::unordered_map<std::string, Parameter<T>*> by_name;
    for (Parameter<T>* p : params) by_name[p->name] = p;

    std::size_t loaded = 0;
    for (;;) {
        std::uint32_t name_len;
        if (!detail::get_u32_le(is, name_len)) break;  // clean EOF
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) throw FormatError("truncated checkpoint: " + path);
        std::uint32_t rows, cols;
        if (!detail::get_u32_le(is, rows) || !detail::get_u32_le(is, cols))
            throw FormatError("truncated checkpoint: " + path);
        auto it = by_name.find(name);
        if (it == by_name.end()) {
            // Skip payload of an unknown parameter.
            if (!is.seekg(static_cast<std::streamoff>(4ull * rows * cols), std::ios::cur))
                throw FormatError("truncated checkpoint: " + path);
            continue;
        }
        Parameter<T>* p = it->second;
        if (p->value.rows != static_cast<int>(rows) || p->value.cols != static_cast<int>(cols))
            throw ShapeError("checkpoint shape mismatch for " + name);
        for (T& x : p->value.v) {
            float f;
            if (!detail::get_f32_le(is, f)) throw FormatError("truncated checkpoint: " + path);
            x = static_cast<T>(f);
        }
        ++loaded;
    }
    if (loaded != by_name.size())
        throw FormatError("checkpoint is missing parameters: " + path);
}

}  // namespace speechcare::nn
