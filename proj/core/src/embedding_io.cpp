#include "speechcare/embedding_io.hpp"

#include <cstring>
#include <fstream>

#include "speechcare/checkpoint.hpp"

namespace speechcare::enc {

namespace {
constexpr char kMagic[7] = {'S', 'C', 'E', 'M', 'B', '1', '\0'};
}

void save_embedding(const std::string& path, const Mat<float>& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open embedding file for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    nn::detail::put_u32_le(os, static_cast<std::uint32_t>(m.rows));
    nn::detail::put_u32_le(os, static_cast<std::uint32_t>(m.cols));
    for (const float x : m.v) nn::detail::put_f32_le(os, x);
    if (!os) throw DataError("short write to embedding file: " + path);
}

Mat<float> load_embedding(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open embedding file: " + path);
    char magic[sizeof(kMagic)] = {};
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("bad embedding magic: " + path);
    std::uint32_t rows, cols;
    if (!nn::detail::get_u32_le(is, rows) || !nn::detail::get_u32_le(is, cols))
        throw FormatError("truncated embedding header: " + path);
    if (rows == 0 || cols == 0) throw FormatError("degenerate embedding shape: " + path);
    Mat<float> m(static_cast<int>(rows), static_cast<int>(cols));
    for (float& x : m.v)
        if (!nn::detail::get_f32_le(is, x)) throw FormatError("truncated embedding payload: " + path);
    // A well-formed file ends exactly after rows*cols values.
    char extra;
    if (is.read(&extra, 1)) throw FormatError("embedding payload longer than header claims: " + path);
    return m;
}

}  // namespace speechcare::enc
