#pragma once

#include <optional>
#include <string>
#include <vector>

#include "speechcare/errors.hpp"

namespace speechcare::data {

enum class Gender { female, male };
enum class Education { none_elementary, high_school, technical_undergrad, advanced_graduate };
enum class Language { english, spanish, mandarin, other };
enum class Label { control, mci, ad };
enum class AgeBucket { midlife_46_65, older_66_80, elderly_over_80 };

inline constexpr int kNumClasses = 3;

std::string to_string(Gender g);
std::string to_string(Education e);
std::string to_string(Language l);
std::string to_string(Label l);
std::string to_string(AgeBucket b);

Gender gender_from_string(const std::string& s);
Education education_from_string(const std::string& s);
Language language_from_string(const std::string& s);
Label label_from_string(const std::string& s);

// One participant. Either raw audio or a precomputed embedding must be
// present; transcripts may be empty.
struct ManifestRecord {
    std::string uid;
    std::optional<std::string> audio_path;
    std::optional<std::string> embedding_path;
    std::string transcript;
    std::optional<double> age;  // years, [18, 120]
    Gender gender = Gender::female;
    std::optional<Education> education;
    Language language = Language::english;
    std::optional<Label> label;
};

// JSONL, one record per line. Unknown fields are ignored; optional fields may
// be null or absent. Throws DataError with the offending line number.
std::vector<ManifestRecord> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestRecord>& records);

}  // namespace speechcare::data
