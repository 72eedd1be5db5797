#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "speechcare/manifest.hpp"

namespace speechcare::data {

enum class SplitPart { train, validation };

struct SplitAssignment {
    std::unordered_map<std::string, SplitPart> by_uid;

    SplitPart of(const std::string& uid) const {
        auto it = by_uid.find(uid);
        if (it == by_uid.end()) throw DataError("uid not in split: " + uid);
        return it->second;
    }
};

// Stratified split over label × language × age bucket × gender. Per stratum,
// round(fraction*n) records go to validation. Strata with fewer than 5
// records merge into a language × label super-stratum so validation cells do
// not end up empty. Deterministic per seed and independent of record order.
SplitAssignment stratified_split(const std::vector<ManifestRecord>& records, double fraction,
                                 std::uint64_t seed);

}  // namespace speechcare::data
