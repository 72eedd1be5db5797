#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "speechcare/demographics.hpp"
#include "speechcare/manifest.hpp"
#include "speechcare/rng.hpp"
#include "speechcare/split.hpp"

using namespace speechcare;
using namespace speechcare::data;

namespace {

ManifestRecord make_record(const std::string& uid, double age, Gender g, Education e,
                           Language lang, Label label) {
    ManifestRecord r;
    r.uid = uid;
    r.audio_path = "wav/" + uid + ".wav";
    r.age = age;
    r.gender = g;
    r.education = e;
    r.language = lang;
    r.label = label;
    return r;
}

}  // namespace

TEST_SUITE("data-ingest") {

TEST_CASE("age bucketing boundaries") {
    CHECK(bucket_age(46) == AgeBucket::midlife_46_65);
    CHECK(bucket_age(65) == AgeBucket::midlife_46_65);
    CHECK(bucket_age(66) == AgeBucket::older_66_80);
    CHECK(bucket_age(80) == AgeBucket::older_66_80);
    CHECK(bucket_age(81) == AgeBucket::elderly_over_80);
    CHECK(bucket_age(18) == AgeBucket::midlife_46_65);  // below-corpus ages stay total
    CHECK(bucket_age(120) == AgeBucket::elderly_over_80);
    CHECK_THROWS_AS(bucket_age(17), DomainError);
    CHECK_THROWS_AS(bucket_age(121), DomainError);
}

TEST_CASE("age bucketing is monotone in band order") {
    int last = 0;
    for (double age = 18; age <= 120; age += 0.5) {
        const int b = static_cast<int>(bucket_age(age));
        CHECK(b >= last);
        last = b;
    }
}

TEST_CASE("demographic one-hot encoding") {
    const auto v = encode_demographics(make_record("a", 70, Gender::female,
                                                   Education::high_school, Language::english,
                                                   Label::control));
    REQUIRE(v.size() == 9);
    CHECK(v[0] == 0.0);  // age block [0,1,0]
    CHECK(v[1] == 1.0);
    CHECK(v[2] == 0.0);
    CHECK(v[3] == 1.0);  // female
    CHECK(v[4] == 0.0);
    CHECK(v[6] == 1.0);  // high school
}

TEST_CASE("demographic vector sums to three and decodes back") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const double age = rng.uniform(18.0, 120.0);
        const auto gender = static_cast<Gender>(rng.below(2));
        const auto edu = static_cast<Education>(rng.below(4));
        const auto rec = make_record("t", age, gender, edu, Language::english, Label::control);
        const auto v = encode_demographics(rec);
        double sum = 0.0;
        for (const double x : v) sum += x;
        CHECK(sum == 3.0);
        // inverse map: argmax of each one-hot block
        int age_ix = 0, gen_ix = 0, edu_ix = 0;
        for (int i = 0; i < 3; ++i)
            if (v[i] == 1.0) age_ix = i;
        for (int i = 0; i < 2; ++i)
            if (v[3 + i] == 1.0) gen_ix = i;
        for (int i = 0; i < 4; ++i)
            if (v[5 + i] == 1.0) edu_ix = i;
        CHECK(age_ix == static_cast<int>(bucket_age(age)));
        CHECK(gen_ix == static_cast<int>(gender));
        CHECK(edu_ix == static_cast<int>(edu));
    }
}

TEST_CASE("demographic encoding requires education and age") {
    auto r = make_record("x", 70, Gender::male, Education::high_school, Language::english,
                         Label::control);
    r.education.reset();
    CHECK_THROWS_AS(encode_demographics(r), StateError);
    r.education = Education::high_school;
    r.age.reset();
    CHECK_THROWS_AS(encode_demographics(r), DataError);
}

TEST_CASE("imputing a complete manifest is the identity") {
    std::vector<ManifestRecord> records;
    Rng rng(32);
    for (int i = 0; i < 30; ++i)
        records.push_back(make_record("r" + std::to_string(i), rng.uniform(46, 95),
                                      static_cast<Gender>(rng.below(2)),
                                      static_cast<Education>(rng.below(4)), Language::english,
                                      Label::control));
    const auto out = impute_education(records, 1);
    REQUIRE(out.size() == records.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(*out[i].education == *records[i].education);
}

TEST_CASE("imputation recovers an education that is a function of age bucket") {
    // Plant: midlife -> high_school, older -> technical, elderly -> advanced.
    Rng rng(33);
    std::vector<ManifestRecord> records;
    std::vector<Education> truth;
    for (int i = 0; i < 200; ++i) {
        const double age = rng.uniform(46.0, 95.0);
        Education edu = Education::high_school;
        if (bucket_age(age) == AgeBucket::older_66_80) edu = Education::technical_undergrad;
        if (bucket_age(age) == AgeBucket::elderly_over_80) edu = Education::advanced_graduate;
        truth.push_back(edu);
        records.push_back(make_record("r" + std::to_string(i), age,
                                      static_cast<Gender>(rng.below(2)), edu,
                                      Language::english, Label::control));
    }
    std::vector<std::size_t> masked;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (rng.uniform() < 0.3) {
            records[i].education.reset();
            masked.push_back(i);
        }
    REQUIRE(masked.size() > 30);
    const auto out = impute_education(records, 5);
    std::size_t recovered = 0;
    for (const std::size_t i : masked)
        recovered += (*out[i].education == truth[i]) ? 1 : 0;
    CHECK(static_cast<double>(recovered) >= 0.95 * static_cast<double>(masked.size()));
    // Observed values were never altered.
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].education) CHECK(*out[i].education == *records[i].education);
}

TEST_CASE("imputation with a single observed level fills that level everywhere") {
    Rng rng(34);
    std::vector<ManifestRecord> records;
    for (int i = 0; i < 40; ++i) {
        auto r = make_record("r" + std::to_string(i), rng.uniform(46, 95),
                             static_cast<Gender>(rng.below(2)), Education::technical_undergrad,
                             static_cast<Language>(rng.below(3)), Label::control);
        if (i % 3 == 0) r.education.reset();
        records.push_back(r);
    }
    const auto out = impute_education(records, 0);
    for (const auto& r : out) CHECK(*r.education == Education::technical_undergrad);
}

TEST_CASE("imputation is idempotent") {
    Rng rng(35);
    std::vector<ManifestRecord> records;
    for (int i = 0; i < 60; ++i) {
        auto r = make_record("r" + std::to_string(i), rng.uniform(46, 95),
                             static_cast<Gender>(rng.below(2)),
                             static_cast<Education>(rng.below(4)),
                             static_cast<Language>(rng.below(4)), Label::control);
        if (rng.uniform() < 0.25) r.education.reset();
        records.push_back(r);
    }
    const auto once = impute_education(records, 9);
    const auto twice = impute_education(once, 9);
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(*once[i].education == *twice[i].education);
}

TEST_CASE("imputation error paths") {
    std::vector<ManifestRecord> none;
    for (int i = 0; i < 15; ++i) {
        auto r = make_record("r" + std::to_string(i), 70, Gender::female,
                             Education::high_school, Language::english, Label::control);
        r.education.reset();
        none.push_back(r);
    }
    CHECK_THROWS_AS(impute_education(none, 0), DataError);
    none[0].education = Education::high_school;  // 1 observed < 10
    CHECK_THROWS_AS(impute_education(none, 0), DataError);
}

TEST_CASE("split: a 10-record stratum yields exactly 2 validation records") {
    std::vector<ManifestRecord> records;
    for (int i = 0; i < 10; ++i)
        records.push_back(make_record("r" + std::to_string(i), 70, Gender::female,
                                      Education::high_school, Language::english,
                                      Label::control));
    const auto split = stratified_split(records, 0.2, 7);
    int val = 0;
    for (const auto& r : records)
        val += split.of(r.uid) == SplitPart::validation ? 1 : 0;
    CHECK(val == 2);
}

TEST_CASE("split: two 50-record strata give overall fraction 0.20 exactly") {
    std::vector<ManifestRecord> records;
    for (int i = 0; i < 50; ++i)
        records.push_back(make_record("a" + std::to_string(i), 70, Gender::female,
                                      Education::high_school, Language::english,
                                      Label::control));
    for (int i = 0; i < 50; ++i)
        records.push_back(make_record("b" + std::to_string(i), 85, Gender::male,
                                      Education::none_elementary, Language::spanish,
                                      Label::ad));
    const auto split = stratified_split(records, 0.2, 3);
    int val = 0;
    for (const auto& r : records)
        val += split.of(r.uid) == SplitPart::validation ? 1 : 0;
    CHECK(val == 20);
}

TEST_CASE("split matches an independent per-stratum recount on random data") {
    Rng rng(36);
    std::vector<ManifestRecord> records;
    for (int i = 0; i < 500; ++i)
        records.push_back(make_record("r" + std::to_string(i), rng.uniform(46, 95),
                                      static_cast<Gender>(rng.below(2)),
                                      static_cast<Education>(rng.below(4)),
                                      static_cast<Language>(rng.below(3)),
                                      static_cast<Label>(rng.below(3))));
    const auto split = stratified_split(records, 0.2, 11);

    // Recount: group by the documented stratum key, merging groups under 5
    // into language|label.
    auto full_key = [](const ManifestRecord& r) {
        return to_string(r.language) + "|" + to_string(*r.label) + "|" +
               to_string(bucket_age(*r.age)) + "|" + to_string(r.gender);
    };
    auto coarse_key = [](const ManifestRecord& r) {
        return to_string(r.language) + "|" + to_string(*r.label);
    };
    std::map<std::string, std::vector<const ManifestRecord*>> full;
    for (const auto& r : records) full[full_key(r)].push_back(&r);
    std::map<std::string, std::vector<const ManifestRecord*>> merged;
    for (const auto& [key, members] : full) {
        if (members.size() >= 5) {
            merged[key].insert(merged[key].end(), members.begin(), members.end());
        } else {
            for (const auto* r : members) merged[coarse_key(*r)].push_back(r);
        }
    }
    for (const auto& [key, members] : merged) {
        long expect = std::lround(0.2 * static_cast<double>(members.size()));
        long got = 0;
        for (const auto* r : members)
            got += split.of(r->uid) == SplitPart::validation ? 1 : 0;
        CHECK_MESSAGE(got == expect, "stratum ", key);
    }
}

TEST_CASE("split is a partition and deterministic per seed") {
    Rng rng(37);
    std::vector<ManifestRecord> records;
    for (int i = 0; i < 120; ++i)
        records.push_back(make_record("r" + std::to_string(i), rng.uniform(46, 95),
                                      static_cast<Gender>(rng.below(2)),
                                      static_cast<Education>(rng.below(4)),
                                      static_cast<Language>(rng.below(3)),
                                      static_cast<Label>(rng.below(3))));
    const auto s1 = stratified_split(records, 0.2, 5);
    const auto s2 = stratified_split(records, 0.2, 5);
    const auto s3 = stratified_split(records, 0.2, 6);
    CHECK(s1.by_uid.size() == records.size());
    int same = 0;
    for (const auto& r : records) {
        CHECK(s1.of(r.uid) == s2.of(r.uid));
        same += s1.of(r.uid) == s3.of(r.uid) ? 1 : 0;
    }
    CHECK(same < static_cast<int>(records.size()));  // a different seed moves someone
}

TEST_CASE("split error paths") {
    CHECK_THROWS_AS(stratified_split({}, 0.2, 0), DataError);
    std::vector<ManifestRecord> one{make_record("a", 70, Gender::female,
                                                Education::high_school, Language::english,
                                                Label::control)};
    CHECK_THROWS_AS(stratified_split(one, 0.0, 0), DomainError);
    CHECK_THROWS_AS(stratified_split(one, 1.0, 0), DomainError);
}

TEST_CASE("manifest io round trip with optional fields") {
    std::vector<ManifestRecord> records;
    auto full = make_record("u1", 72, Gender::male, Education::advanced_graduate,
                            Language::mandarin, Label::mci);
    full.transcript = "wo qu le";
    records.push_back(full);
    ManifestRecord sparse;
    sparse.uid = "u2";
    sparse.embedding_path = "emb/u2.scemb";
    sparse.gender = Gender::female;
    sparse.language = Language::other;
    records.push_back(sparse);

    const std::string path = "test_manifest.jsonl";
    write_manifest(path, records);
    const auto back = read_manifest(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].uid == "u1");
    CHECK(back[0].transcript == "wo qu le");
    CHECK(*back[0].label == Label::mci);
    CHECK(!back[1].audio_path);
    CHECK(!back[1].age);
    CHECK(!back[1].label);
    CHECK(*back[1].embedding_path == "emb/u2.scemb");
    std::remove(path.c_str());
}

TEST_CASE("manifest loader validates records and reports the line") {
    const std::string path = "test_manifest_bad.jsonl";
    auto write = [&](const std::string& text) {
        std::ofstream os(path);
        os << text;
    };
    // Unknown fields are ignored.
    write(R"({"uid":"a","audio_path":"x.wav","gender":"female","language":"english","mystery":42})"
          "\n");
    CHECK(read_manifest(path).size() == 1);

    write(R"({"uid":"a","gender":"female","language":"english"})" "\n");
    CHECK_THROWS_WITH_AS(read_manifest(path),
                         doctest::Contains("manifest line 1").derived(),
                         DataError);

    write(R"({"uid":"a","audio_path":"x.wav","gender":"female","language":"english"})" "\n"
          R"({"uid":"a","audio_path":"y.wav","gender":"male","language":"english"})" "\n");
    CHECK_THROWS_WITH_AS(read_manifest(path), doctest::Contains("duplicate uid").derived(),
                         DataError);

    write(R"({"uid":"a","audio_path":"x.wav","age":150,"gender":"female","language":"english"})"
          "\n");
    CHECK_THROWS_AS(read_manifest(path), DataError);
    std::remove(path.c_str());
}

}  // TEST_SUITE
