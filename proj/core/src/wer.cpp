#include "speechcare/wer.hpp"

#include <algorithm>

namespace speechcare::eval {

WerResult wer(const std::vector<std::string>& reference,
              const std::vector<std::string>& hypothesis) {
    if (reference.empty()) throw MetricError("wer needs a non-empty reference");
    const std::size_t n = reference.size(), m = hypothesis.size();

    struct Cell {
        long cost = 0;
        long sub = 0, ins = 0, del = 0;
    };
    std::vector<Cell> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = {static_cast<long>(j), 0, static_cast<long>(j), 0};

    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = {static_cast<long>(i), 0, 0, static_cast<long>(i)};
        for (std::size_t j = 1; j <= m; ++j) {
            const bool match = reference[i - 1] == hypothesis[j - 1];
            // Prefer the diagonal on ties, then deletion, then insertion.
            Cell best = prev[j - 1];
            best.cost += match ? 0 : 1;
            if (!match) ++best.sub;
            if (prev[j].cost + 1 < best.cost) {
                best = prev[j];
                ++best.cost;
                ++best.del;
            }
            if (cur[j - 1].cost + 1 < best.cost) {
                best = cur[j - 1];
                ++best.cost;
                ++best.ins;
            }
            cur[j] = best;
        }
        std::swap(prev, cur);
    }
    WerResult out;
    out.substitutions = prev[m].sub;
    out.insertions = prev[m].ins;
    out.deletions = prev[m].del;
    out.ref_len = static_cast<long>(n);
    out.wer = static_cast<double>(prev[m].cost) / static_cast<double>(n);
    return out;
}

}  // namespace speechcare::eval
