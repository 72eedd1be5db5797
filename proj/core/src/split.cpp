#include "speechcare/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "speechcare/demographics.hpp"
#include "speechcare/rng.hpp"

namespace speechcare::data {

namespace {

std::string coarse_key(const ManifestRecord& r) {
    return to_string(r.language) + "|" + (r.label ? to_string(*r.label) : "unlabeled");
}

std::string full_key(const ManifestRecord& r) {
    const std::string bucket = r.age ? to_string(bucket_age(*r.age)) : "no_age";
    return coarse_key(r) + "|" + bucket + "|" + to_string(r.gender);
}

}  // namespace

SplitAssignment stratified_split(const std::vector<ManifestRecord>& records, double fraction,
                                 std::uint64_t seed) {
    if (records.empty()) throw DataError("cannot split an empty record list");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw DomainError("split fraction must be in (0, 1)");

    // std::map keeps stratum processing order deterministic.
    std::map<std::string, std::vector<std::string>> strata;
    for (const ManifestRecord& r : records) strata[full_key(r)].push_back(r.uid);

    constexpr std::size_t kMinStratum = 5;
    std::map<std::string, std::vector<std::string>> merged;
    for (auto& [key, uids] : strata) {
        if (uids.size() >= kMinStratum) {
            auto& dst = merged[key];
            dst.insert(dst.end(), uids.begin(), uids.end());
        }
    }
    for (const ManifestRecord& r : records) {
        const auto it = strata.find(full_key(r));
        if (it->second.size() < kMinStratum) merged[coarse_key(r)].push_back(r.uid);
    }

    SplitAssignment out;
    for (auto& [key, uids] : merged) {
        std::sort(uids.begin(), uids.end());
        Rng rng = Rng::stream(seed, "split/" + key);
        rng.shuffle(uids.begin(), uids.end());
        const auto n_val = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(uids.size())));
        for (std::size_t i = 0; i < uids.size(); ++i)
            out.by_uid[uids[i]] = i < n_val ? SplitPart::validation : SplitPart::train;
    }
    return out;
}

}  // namespace speechcare::data
