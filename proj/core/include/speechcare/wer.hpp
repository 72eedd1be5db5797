#pragma once

#include <string>
#include <vector>

#include "speechcare/errors.hpp"

namespace speechcare::eval {

struct WerResult {
    double wer = 0.0;
    long substitutions = 0;
    long insertions = 0;
    long deletions = 0;
    long ref_len = 0;

    long errors() const { return substitutions + insertions + deletions; }
};

// Levenshtein alignment with unit costs; WER = errors / |reference|.
WerResult wer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis);

}  // namespace speechcare::eval
