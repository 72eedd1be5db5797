#pragma once

#include <cstdint>
#include <vector>

#include "speechcare/manifest.hpp"

namespace speechcare::data {

// Age bands: <=65 mid-life, 66..80 older, >80 elderly. Ages below the
// corpus minimum of 46 still map to the mid-life band so bucketing stays
// total on synthetic data.
AgeBucket bucket_age(double age);

inline constexpr int kDemographicWidth = 9;  // age(3) + gender(2) + education(4)

// One-hot concatenation [age bucket | gender | education]. Requires age and
// (post-imputation) education to be present.
std::vector<double> encode_demographics(const ManifestRecord& record);

// Fills missing education by round-robin ridge regression of the ordinal
// education code (0..3) on one-hot age bucket, gender, and language.
// Observed values are never altered; imputing a complete manifest is the
// identity. Deterministic; the single imputed column makes the round-robin
// order trivial, so the seed does not influence the result.
std::vector<ManifestRecord> impute_education(const std::vector<ManifestRecord>& records,
                                             std::uint64_t seed);

}  // namespace speechcare::data
