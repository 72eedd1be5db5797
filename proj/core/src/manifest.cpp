#include "speechcare/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace speechcare::data {

using json = nlohmann::json;

std::string to_string(Gender g) { return g == Gender::female ? "female" : "male"; }

std::string to_string(Education e) {
    switch (e) {
        case Education::none_elementary: return "none_elementary";
        case Education::high_school: return "high_school";
        case Education::technical_undergrad: return "technical_undergrad";
        case Education::advanced_graduate: return "advanced_graduate";
    }
    return "";
}

std::string to_string(Language l) {
    switch (l) {
        case Language::english: return "english";
        case Language::spanish: return "spanish";
        case Language::mandarin: return "mandarin";
        case Language::other: return "other";
    }
    return "";
}

std::string to_string(Label l) {
    switch (l) {
        case Label::control: return "control";
        case Label::mci: return "mci";
        case Label::ad: return "ad";
    }
    return "";
}

std::string to_string(AgeBucket b) {
    switch (b) {
        case AgeBucket::midlife_46_65: return "midlife_46_65";
        case AgeBucket::older_66_80: return "older_66_80";
        case AgeBucket::elderly_over_80: return "elderly_over_80";
    }
    return "";
}

Gender gender_from_string(const std::string& s) {
    if (s == "female") return Gender::female;
    if (s == "male") return Gender::male;
    throw DataError("unknown gender: " + s);
}

Education education_from_string(const std::string& s) {
    if (s == "none_elementary") return Education::none_elementary;
    if (s == "high_school") return Education::high_school;
    if (s == "technical_undergrad") return Education::technical_undergrad;
    if (s == "advanced_graduate") return Education::advanced_graduate;
    throw DataError("unknown education: " + s);
}

Language language_from_string(const std::string& s) {
    if (s == "english") return Language::english;
    if (s == "spanish") return Language::spanish;
    if (s == "mandarin") return Language::mandarin;
    if (s == "other") return Language::other;
    throw DataError("unknown language: " + s);
}

Label label_from_string(const std::string& s) {
    if (s == "control") return Label::control;
    if (s == "mci") return Label::mci;
    if (s == "ad") return Label::ad;
    throw DataError("unknown label: " + s);
}

namespace {

bool has_value(const json& j, const char* key) {
    return j.contains(key) && !j.at(key).is_null();
}

ManifestRecord parse_record(const json& j, std::size_t line_no) {
    const std::string where = "manifest line " + std::to_string(line_no) + ": ";
    try {
        ManifestRecord r;
        if (!has_value(j, "uid")) throw DataError("missing uid");
        r.uid = j.at("uid").get<std::string>();
        if (r.uid.empty()) throw DataError("empty uid");
        if (has_value(j, "audio_path")) r.audio_path = j.at("audio_path").get<std::string>();
        if (has_value(j, "embedding_path"))
            r.embedding_path = j.at("embedding_path").get<std::string>();
        if (!r.audio_path && !r.embedding_path)
            throw DataError("record needs audio_path or embedding_path");
        if (has_value(j, "transcript")) r.transcript = j.at("transcript").get<std::string>();
        if (has_value(j, "age")) {
            const double a = j.at("age").get<double>();
            if (a < 18.0 || a > 120.0)
                throw DataError("age " + std::to_string(a) + " outside [18, 120]");
            r.age = a;
        }
        if (!has_value(j, "gender")) throw DataError("missing gender");
        r.gender = gender_from_string(j.at("gender").get<std::string>());
        if (has_value(j, "education"))
            r.education = education_from_string(j.at("education").get<std::string>());
        if (!has_value(j, "language")) throw DataError("missing language");
        r.language = language_from_string(j.at("language").get<std::string>());
        if (has_value(j, "label")) r.label = label_from_string(j.at("label").get<std::string>());
        return r;
    } catch (const json::exception& e) {
        throw DataError(where + e.what());
    } catch (const DataError& e) {
        throw DataError(where + e.what());
    }
}

}  // namespace

std::vector<ManifestRecord> read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open manifest: " + path);
    std::vector<ManifestRecord> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        ManifestRecord r = parse_record(j, line_no);
        if (!seen.insert(r.uid).second)
            throw DataError("manifest line " + std::to_string(line_no) + ": duplicate uid " + r.uid);
        out.push_back(std::move(r));
    }
    return out;
}

void write_manifest(const std::string& path, const std::vector<ManifestRecord>& records) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open manifest for writing: " + path);
    for (const ManifestRecord& r : records) {
        json j;
        j["uid"] = r.uid;
        if (r.audio_path) j["audio_path"] = *r.audio_path;
        if (r.embedding_path) j["embedding_path"] = *r.embedding_path;
        j["transcript"] = r.transcript;
        if (r.age) j["age"] = *r.age;
        j["gender"] = to_string(r.gender);
        if (r.education) j["education"] = to_string(*r.education);
        j["language"] = to_string(r.language);
        if (r.label) j["label"] = to_string(*r.label);
        os << j.dump() << "\n";
    }
    if (!os) throw DataError("short write to manifest: " + path);
}

}  // namespace speechcare::data
