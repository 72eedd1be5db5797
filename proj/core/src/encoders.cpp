#include "speechcare/encoders.hpp"

#include <cctype>

#include "speechcare/rng.hpp"

namespace speechcare::enc {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (uc > 0x7f || std::isalnum(uc)) {
            cur.push_back(uc > 0x7f ? ch : static_cast<char>(std::tolower(uc)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<int> hash_tokens(const std::vector<std::string>& tokens, int vocab_buckets) {
    if (vocab_buckets <= 0) throw DomainError("vocab bucket count must be positive");
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const std::string& tok : tokens)
        ids.push_back(static_cast<int>(Rng::fnv1a64(tok) %
                                       static_cast<std::uint64_t>(vocab_buckets)));
    return ids;
}

}  // namespace speechcare::enc
