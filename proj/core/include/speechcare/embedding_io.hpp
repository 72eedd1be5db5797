#pragma once

#include <string>

#include "speechcare/tensor.hpp"

namespace speechcare::enc {

// Embedding matrix file, magic "SCEMB1\0": u32 LE rows, u32 LE cols, then
// row-major f32 LE payload. A 1×d file is a ready modality embedding; an n×d
// file is a frame/token sequence that enters a pathway after its projection
// stage (d = model_dim) or before it (d = raw feature width).
void save_embedding(const std::string& path, const Mat<float>& m);
Mat<float> load_embedding(const std::string& path);

}  // namespace speechcare::enc
