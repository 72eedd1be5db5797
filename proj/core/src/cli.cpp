#include "speechcare/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "speechcare/checkpoint.hpp"
#include "speechcare/demographics.hpp"
#include "speechcare/dsp.hpp"
#include "speechcare/embedding_io.hpp"
#include "speechcare/fairness.hpp"
#include "speechcare/segment.hpp"
#include "speechcare/split.hpp"
#include "speechcare/stats.hpp"
#include "speechcare/wer.hpp"

namespace speechcare::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open config: " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw DataError("config " + path + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

[[noreturn]] void schema_error(const std::string& path, const std::string& why) {
    throw DataError("config field " + path + ": " + why);
}

double jnum(const json& j, const std::string& path, const char* key, double def) {
    if (!j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_number()) schema_error(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

std::int64_t jint(const json& j, const std::string& path, const char* key, std::int64_t def) {
    if (!j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_number_integer()) schema_error(path + "." + key, "expected an integer");
    return j.at(key).get<std::int64_t>();
}

bool jbool(const json& j, const std::string& path, const char* key, bool def) {
    if (!j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_boolean()) schema_error(path + "." + key, "expected a boolean");
    return j.at(key).get<bool>();
}

std::string jstr(const json& j, const std::string& path, const char* key,
                 const std::string& def) {
    if (!j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_string()) schema_error(path + "." + key, "expected a string");
    return j.at(key).get<std::string>();
}

std::string jstr_required(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || j.at(key).is_null())
        schema_error(path + "." + key, "required field is missing");
    if (!j.at(key).is_string()) schema_error(path + "." + key, "expected a string");
    return j.at(key).get<std::string>();
}

std::vector<double> jnum_array(const json& j, const std::string& path, const char* key,
                               std::vector<double> def) {
    if (!j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_array()) schema_error(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j.at(key)) {
        if (!x.is_number()) schema_error(path + "." + key, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<enc::Modality> parse_modalities(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) schema_error(path, "expected a non-empty array");
    std::vector<enc::Modality> out;
    for (const auto& x : j) {
        if (!x.is_string()) schema_error(path, "expected modality names");
        const std::string s = x.get<std::string>();
        if (s == "acoustic") out.push_back(enc::Modality::acoustic);
        else if (s == "linguistic" || s == "text") out.push_back(enc::Modality::linguistic);
        else if (s == "demographic") out.push_back(enc::Modality::demographic);
        else schema_error(path, "unknown modality " + s);
    }
    return out;
}

model::ModelConfig parse_model_config(const json& root, const std::string& path,
                                      std::uint64_t seed) {
    model::ModelConfig cfg;
    cfg.seed = seed;
    if (root.contains("modalities"))
        cfg.modalities = parse_modalities(root.at("modalities"), path + ".modalities");
    if (root.contains("fusion")) {
        if (!root.at("fusion").is_string()) schema_error(path + ".fusion", "expected a string");
        cfg.fusion = fusion::fusion_from_string(root.at("fusion").get<std::string>());
    }
    const json m = root.contains("model") ? root.at("model") : json::object();
    const std::string mp = path + ".model";
    cfg.encoder.model_dim = static_cast<int>(jint(m, mp, "model_dim", cfg.encoder.model_dim));
    cfg.encoder.heads = static_cast<int>(jint(m, mp, "heads", cfg.encoder.heads));
    cfg.encoder.blocks = static_cast<int>(jint(m, mp, "blocks", cfg.encoder.blocks));
    cfg.encoder.dropout = static_cast<float>(jnum(m, mp, "dropout", cfg.encoder.dropout));
    cfg.encoder.vocab_buckets =
        static_cast<int>(jint(m, mp, "vocab_buckets", cfg.encoder.vocab_buckets));
    cfg.encoder.context_cap =
        static_cast<int>(jint(m, mp, "context_cap", cfg.encoder.context_cap));
    cfg.encoder.demo_dim = static_cast<int>(jint(m, mp, "demo_dim", cfg.encoder.demo_dim));
    cfg.fusion_hidden = static_cast<int>(jint(m, mp, "fusion_hidden", cfg.fusion_hidden));
    return cfg;
}

train::TrainConfig parse_train_section(const json& root, const std::string& path,
                                       std::uint64_t seed) {
    train::TrainConfig cfg;
    cfg.seed = seed;
    const json t = root.contains("train") ? root.at("train") : json::object();
    const std::string tp = path + ".train";
    cfg.lr_acoustic = jnum(t, tp, "lr_acoustic", cfg.lr_acoustic);
    cfg.lr_text = jnum(t, tp, "lr_text", cfg.lr_text);
    cfg.lr_other = jnum(t, tp, "lr_other", cfg.lr_other);
    cfg.weight_decay = jnum(t, tp, "weight_decay", cfg.weight_decay);
    cfg.batch_size = static_cast<int>(jint(t, tp, "batch_size", cfg.batch_size));
    cfg.epochs = static_cast<int>(jint(t, tp, "epochs", cfg.epochs));
    cfg.early_stop_patience =
        static_cast<int>(jint(t, tp, "early_stop_patience", cfg.early_stop_patience));
    cfg.loss = train::loss_from_string(jstr(t, tp, "loss", to_string(cfg.loss)));
    cfg.focal_gamma = jnum(t, tp, "focal_gamma", cfg.focal_gamma);
    cfg.focal_alpha = jnum_array(t, tp, "focal_alpha", cfg.focal_alpha);
    cfg.class_weights = jnum_array(t, tp, "class_weights", cfg.class_weights);
    return cfg;
}

json model_config_to_json(const model::ModelConfig& cfg) {
    json j;
    json mods = json::array();
    for (const auto m : cfg.modalities) mods.push_back(enc::to_string(m));
    j["modalities"] = mods;
    j["fusion"] = fusion::to_string(cfg.fusion);
    j["model"] = {{"model_dim", cfg.encoder.model_dim},
                  {"heads", cfg.encoder.heads},
                  {"blocks", cfg.encoder.blocks},
                  {"dropout", cfg.encoder.dropout},
                  {"vocab_buckets", cfg.encoder.vocab_buckets},
                  {"context_cap", cfg.encoder.context_cap},
                  {"demo_dim", cfg.encoder.demo_dim},
                  {"fusion_hidden", cfg.fusion_hidden}};
    return j;
}

json train_config_to_json(const train::TrainConfig& cfg) {
    return {{"lr_acoustic", cfg.lr_acoustic},
            {"lr_text", cfg.lr_text},
            {"lr_other", cfg.lr_other},
            {"weight_decay", cfg.weight_decay},
            {"batch_size", cfg.batch_size},
            {"epochs", cfg.epochs},
            {"early_stop_patience", cfg.early_stop_patience},
            {"loss", train::to_string(cfg.loss)},
            {"focal_gamma", cfg.focal_gamma},
            {"focal_alpha", cfg.focal_alpha},
            {"class_weights", cfg.class_weights}};
}

json job_config_to_json(const TrainJobConfig& cfg) {
    json j = model_config_to_json(cfg.model);
    j["manifest"] = cfg.manifest;
    j["train"] = train_config_to_json(cfg.train);
    j["val_fraction"] = cfg.val_fraction;
    j["oversample"] = {{"enabled", cfg.oversample_enabled},
                       {"group", pipeline::to_string(cfg.oversample_group)}};
    j["seed"] = cfg.seed;
    return j;
}

json run_result_to_json(const train::RunResult& r) {
    json epochs = json::array();
    for (const auto& e : r.epochs)
        epochs.push_back({{"train_loss", e.train_loss},
                          {"val_loss", e.val_loss},
                          {"val_auc_micro", e.val_auc_micro}});
    return {{"seed", r.seed},
            {"epochs_run", r.epochs_run},
            {"best_epoch", r.best_epoch},
            {"epochs", epochs},
            {"val",
             {{"auc_micro", r.val_auc_micro},
              {"auc_weighted", r.val_auc_weighted},
              {"micro_f1", r.val_micro_f1},
              {"log_loss", r.val_log_loss}}},
            {"checkpoint", r.checkpoint_path}};
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
    if (!os) throw DataError("short write: " + path);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

struct PreparedData {
    std::vector<pipeline::RecordFeatures> train;
    std::vector<pipeline::RecordFeatures> val;
};

bool wants(const std::vector<enc::Modality>& mods, enc::Modality m) {
    return std::find(mods.begin(), mods.end(), m) != mods.end();
}

// Manifest → imputation → stratified split → (optional) oversampling →
// feature extraction. `modalities` may be a union when several model
// variants share the data.
PreparedData prepare_data(const TrainJobConfig& cfg,
                          const std::vector<enc::Modality>& modalities) {
    auto records = data::read_manifest(cfg.manifest);
    const std::string base_dir = fs::path(cfg.manifest).parent_path().string();

    std::vector<data::ManifestRecord> labeled;
    for (auto& r : records)
        if (r.label) labeled.push_back(std::move(r));
    if (labeled.size() < records.size())
        std::cerr << "train: dropped " << records.size() - labeled.size()
                  << " unlabeled records\n";
    if (labeled.empty()) throw DataError("no labeled records in " + cfg.manifest);

    const bool want_demo = wants(modalities, enc::Modality::demographic);
    if (want_demo) {
        bool missing = false;
        for (const auto& r : labeled) missing = missing || !r.education;
        if (missing) labeled = data::impute_education(labeled, cfg.seed);
    }

    const data::SplitAssignment split =
        data::stratified_split(labeled, cfg.val_fraction, cfg.seed);
    std::vector<data::ManifestRecord> train_recs, val_recs;
    for (auto& r : labeled) {
        if (split.of(r.uid) == data::SplitPart::train) train_recs.push_back(std::move(r));
        else val_recs.push_back(std::move(r));
    }

    pipeline::FeatureOptions fo;
    fo.model_dim = cfg.model.encoder.model_dim;
    fo.vocab_buckets = cfg.model.encoder.vocab_buckets;
    fo.want_acoustic = wants(modalities, enc::Modality::acoustic);
    fo.want_text = wants(modalities, enc::Modality::linguistic);
    fo.want_demo = want_demo;
    fo.base_dir = base_dir;
    fo.augment_seed = cfg.seed;

    PreparedData out;
    if (cfg.oversample_enabled) {
        const auto entries = pipeline::oversample(train_recs, cfg.oversample_group, cfg.seed);
        for (const auto& e : entries) {
            pipeline::FeatureOptions per = fo;
            per.augment = e.augmented;
            out.train.push_back(pipeline::extract_features(e.record, per));
        }
    } else {
        out.train = pipeline::extract_features(train_recs, fo);
    }
    out.val = pipeline::extract_features(val_recs, fo);
    return out;
}

eval::PredictionSet predictions_for(model::Model<float>& m,
                                    const std::vector<pipeline::RecordFeatures>& feats) {
    return train::predict_set(m, feats);
}

}  // namespace

synth::SynthSpec parse_synth_spec(const std::string& config_path, std::uint64_t seed_override,
                                  bool has_seed_override) {
    synth::SynthSpec spec;
    if (!config_path.empty()) {
        const json j = read_json_file(config_path);
        const std::string p = "synth";
        spec.n_records = static_cast<int>(jint(j, p, "n_records", spec.n_records));
        const auto priors = jnum_array(j, p, "class_priors",
                                       {spec.class_priors[0], spec.class_priors[1],
                                        spec.class_priors[2]});
        if (priors.size() != 3) schema_error(p + ".class_priors", "expected 3 numbers");
        std::copy(priors.begin(), priors.end(), spec.class_priors.begin());
        spec.acoustic_strength = jnum(j, p, "acoustic_strength", spec.acoustic_strength);
        spec.linguistic_strength = jnum(j, p, "linguistic_strength", spec.linguistic_strength);
        spec.demographic_strength =
            jnum(j, p, "demographic_strength", spec.demographic_strength);
        const auto mix = jnum_array(j, p, "language_mix",
                                    {spec.language_mix[0], spec.language_mix[1],
                                     spec.language_mix[2], spec.language_mix[3]});
        if (mix.size() != 4) schema_error(p + ".language_mix", "expected 4 numbers");
        std::copy(mix.begin(), mix.end(), spec.language_mix.begin());
        spec.duration_s = jnum(j, p, "duration_s", spec.duration_s);
        spec.sample_rate = jnum(j, p, "sample_rate", spec.sample_rate);
        spec.education_missing_rate =
            jnum(j, p, "education_missing_rate", spec.education_missing_rate);
        spec.seed = static_cast<std::uint64_t>(jint(j, p, "seed", 0));
        spec.uid_prefix = jstr(j, p, "uid_prefix", spec.uid_prefix);
    }
    if (has_seed_override) spec.seed = seed_override;
    spec.validate();
    return spec;
}

TrainJobConfig parse_train_config(const std::string& config_path, std::uint64_t seed_override,
                                  bool has_seed_override) {
    const json j = read_json_file(config_path);
    TrainJobConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(jint(j, "", "seed", 0));
    if (has_seed_override) cfg.seed = seed_override;
    cfg.manifest = jstr_required(j, "", "manifest");
    cfg.model = parse_model_config(j, "", cfg.seed);
    cfg.train = parse_train_section(j, "", cfg.seed);
    cfg.val_fraction = jnum(j, "", "val_fraction", cfg.val_fraction);
    if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0))
        schema_error("val_fraction", "must lie in (0,1)");
    if (j.contains("oversample")) {
        const json& o = j.at("oversample");
        cfg.oversample_enabled = jbool(o, "oversample", "enabled", false);
        cfg.oversample_group =
            pipeline::group_key_from_string(jstr(o, "oversample", "group", "label"));
    }
    return cfg;
}

AblateConfig parse_ablate_config(const std::string& config_path, std::uint64_t seed_override,
                                 bool has_seed_override) {
    const json j = read_json_file(config_path);
    AblateConfig cfg;
    cfg.base = parse_train_config(config_path, seed_override, has_seed_override);
    if (j.contains("seeds")) {
        const auto seeds = jnum_array(j, "", "seeds", {});
        cfg.seeds.clear();
        for (const double s : seeds) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    if (cfg.seeds.empty()) schema_error("seeds", "expected at least one seed");
    if (!j.contains("variants") || !j.at("variants").is_array() || j.at("variants").size() < 2)
        schema_error("variants", "expected an array of at least two variants");
    for (std::size_t i = 0; i < j.at("variants").size(); ++i) {
        const json& v = j.at("variants")[i];
        const std::string vp = "variants[" + std::to_string(i) + "]";
        AblateVariant var;
        var.name = jstr_required(v, vp, "name");
        var.modalities = v.contains("modalities")
                             ? parse_modalities(v.at("modalities"), vp + ".modalities")
                             : cfg.base.model.modalities;
        var.fusion = fusion::fusion_from_string(
            jstr(v, vp, "fusion", fusion::to_string(cfg.base.model.fusion)));
        cfg.variants.push_back(std::move(var));
    }
    cfg.primary = jstr(j, "", "primary", cfg.variants.front().name);
    bool found = false;
    for (const auto& v : cfg.variants) found = found || v.name == cfg.primary;
    if (!found) schema_error("primary", "names no variant");
    return cfg;
}

std::string run_id(const std::string& config_text, std::uint64_t seed) {
    const std::uint64_t h =
        Rng::fnv1a64(config_text) ^ (0x9e3779b97f4a7c15ull * (seed + 1));
    char buf[13];
    std::snprintf(buf, sizeof(buf), "%012llx",
                  static_cast<unsigned long long>(h & 0xffffffffffffull));
    return buf;
}

std::string cmd_synth(const synth::SynthSpec& spec, const std::string& out_dir) {
    ensure_dir(out_dir);
    synth::generate_corpus(spec, out_dir);
    json j = {{"n_records", spec.n_records},
              {"class_priors", spec.class_priors},
              {"acoustic_strength", spec.acoustic_strength},
              {"linguistic_strength", spec.linguistic_strength},
              {"demographic_strength", spec.demographic_strength},
              {"language_mix", spec.language_mix},
              {"duration_s", spec.duration_s},
              {"sample_rate", spec.sample_rate},
              {"education_missing_rate", spec.education_missing_rate},
              {"seed", spec.seed},
              {"uid_prefix", spec.uid_prefix}};
    write_json_file((fs::path(out_dir) / "synth_spec.json").string(), j);
    std::cout << "synth: wrote " << spec.n_records << " records under " << out_dir << "\n";
    return out_dir;
}

std::string cmd_impute(const std::string& manifest_in, const std::string& manifest_out,
                       std::uint64_t seed) {
    const auto records = data::read_manifest(manifest_in);
    const auto imputed = data::impute_education(records, seed);
    std::size_t filled = 0;
    for (std::size_t i = 0; i < records.size(); ++i)
        filled += !records[i].education && imputed[i].education ? 1 : 0;
    ensure_dir(fs::path(manifest_out).parent_path().string().empty()
                   ? "."
                   : fs::path(manifest_out).parent_path().string());
    data::write_manifest(manifest_out, imputed);
    std::cout << "impute: filled " << filled << " education values\n";
    return manifest_out;
}

std::string cmd_preprocess(const std::string& manifest_path, const std::string& out_dir,
                           const PreprocessOptions& opts) {
    const auto records = data::read_manifest(manifest_path);
    const std::string base_dir = fs::path(manifest_path).parent_path().string();
    ensure_dir((fs::path(out_dir) / "features").string());
    if (opts.dump_spectrograms) ensure_dir((fs::path(out_dir) / "spectrograms").string());

    std::ofstream quality((fs::path(out_dir) / "quality.csv").string());
    quality << "uid,duration_s,rms,spectral_flatness,low_pass_applied\n";

    std::vector<data::ManifestRecord> out_records;
    for (const auto& r : records) {
        data::ManifestRecord nr = r;
        if (r.audio_path) {
            const std::string src =
                fs::path(*r.audio_path).is_absolute() || base_dir.empty()
                    ? *r.audio_path
                    : (fs::path(base_dir) / *r.audio_path).string();
            audio::Waveform wave = audio::read_wav(src);
            bool passthrough = false;
            const audio::Waveform filtered =
                audio::low_pass(wave, opts.low_pass_hz, &passthrough);
            double sq = 0.0;
            for (const double s : filtered.samples) sq += s * s;
            const double rms =
                filtered.samples.empty()
                    ? 0.0
                    : std::sqrt(sq / static_cast<double>(filtered.samples.size()));
            quality << r.uid << ',' << filtered.duration() << ',' << rms << ','
                    << audio::spectral_flatness(filtered) << ',' << (passthrough ? 0 : 1)
                    << "\n";

            const Mat<double> frames = audio::acoustic_frames(filtered);
            Mat<float> f32(frames.rows, frames.cols);
            for (std::size_t i = 0; i < frames.v.size(); ++i)
                f32.v[i] = static_cast<float>(frames.v[i]);
            const std::string rel = "features/" + r.uid + ".scemb";
            enc::save_embedding((fs::path(out_dir) / rel).string(), f32);
            nr.embedding_path = rel;

            if (opts.dump_spectrograms) {
                const audio::Spectrogram spec = audio::spectrogram(filtered);
                audio::write_spectrogram_csv(
                    spec, (fs::path(out_dir) / "spectrograms" / (r.uid + ".csv")).string());
            }
        }
        out_records.push_back(std::move(nr));
    }
    data::write_manifest((fs::path(out_dir) / "manifest.jsonl").string(), out_records);
    std::cout << "preprocess: wrote features for " << records.size() << " records\n";
    return out_dir;
}

std::string cmd_train(const TrainJobConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const PreparedData data = prepare_data(cfg, cfg.model.modalities);
    model::Model<float> m(cfg.model);
    const std::string ckpt = (fs::path(out_dir) / "checkpoint.bin").string();
    const train::RunResult result = train::train_model(m, data.train, data.val, cfg.train, ckpt);

    write_json_file((fs::path(out_dir) / "config.json").string(), job_config_to_json(cfg));
    write_json_file((fs::path(out_dir) / "result.json").string(), run_result_to_json(result));
    std::cout << "train: " << result.epochs_run << " epochs, best " << result.best_epoch
              << ", val auc " << result.val_auc_micro << ", val f1 " << result.val_micro_f1
              << "\n";
    return out_dir;
}

std::string cmd_ablate(const AblateConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    // Union of modalities across variants so features extract once.
    std::vector<enc::Modality> all;
    for (const auto& v : cfg.variants)
        for (const auto m : v.modalities)
            if (!wants(all, m)) all.push_back(m);
    const PreparedData data = prepare_data(cfg.base, all);

    struct Job {
        std::size_t variant;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t v = 0; v < cfg.variants.size(); ++v)
        for (const std::uint64_t s : cfg.seeds) jobs.push_back({v, s});

    struct JobResult {
        double auc = 0.0, f1 = 0.0;
    };
    std::vector<JobResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            const Job& job = jobs[k];
            model::ModelConfig mc = cfg.base.model;
            mc.modalities = cfg.variants[job.variant].modalities;
            mc.fusion = cfg.variants[job.variant].fusion;
            mc.seed = job.seed;
            train::TrainConfig tc = cfg.base.train;
            tc.seed = job.seed;
            model::Model<float> m(mc);
            const train::RunResult r = train::train_model(m, data.train, data.val, tc);
            results[k] = {r.val_auc_micro, r.val_micro_f1};
        }
    };
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<std::vector<double>> aucs(cfg.variants.size()), f1s(cfg.variants.size());
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        aucs[jobs[k].variant].push_back(results[k].auc);
        f1s[jobs[k].variant].push_back(results[k].f1);
    }
    std::size_t primary = 0;
    for (std::size_t v = 0; v < cfg.variants.size(); ++v)
        if (cfg.variants[v].name == cfg.primary) primary = v;

    json table = json::array();
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
        const double auc_mean = train::mean_of(aucs[v]);
        const double f1_mean = train::mean_of(f1s[v]);
        const double auc_std = aucs[v].size() > 1 ? train::sample_std(aucs[v]) : 0.0;
        const double f1_std = f1s[v].size() > 1 ? train::sample_std(f1s[v]) : 0.0;
        json row = {{"variant", cfg.variants[v].name}, {"auc_mean", auc_mean},
                    {"auc_std", auc_std},              {"f1_mean", f1_mean},
                    {"f1_std", f1_std},                {"p_vs_primary", nullptr},
                    {"d_vs_primary", nullptr}};
        if (v != primary && aucs[v].size() >= 2) {
            const train::CompareResult cmp = train::compare_runs(aucs[primary], aucs[v]);
            if (!cmp.exact_tie) row["p_vs_primary"] = cmp.p;
            row["d_vs_primary"] = std::isinf(cmp.cohens_d)
                                      ? json(cmp.cohens_d > 0 ? "inf" : "-inf")
                                      : json(cmp.cohens_d);
        } else if (v == primary) {
            row["d_vs_primary"] = 0.0;
        }
        table.push_back(std::move(row));
    }
    json out = {{"primary", cfg.primary},
                {"seeds", cfg.seeds},
                {"rows", table}};
    write_json_file((fs::path(out_dir) / "ablation.json").string(), out);
    for (const auto& row : table)
        std::cout << "ablate: " << row.at("variant").get<std::string>() << " auc "
                  << row.at("auc_mean").get<double>() << " ± "
                  << row.at("auc_std").get<double>() << "\n";
    return out_dir;
}

std::string cmd_evaluate(const EvaluateOptions& opts, const std::string& out_dir) {
    ensure_dir(out_dir);
    const json cj = read_json_file(opts.config);
    const auto seed = static_cast<std::uint64_t>(jint(cj, "", "seed", 0));
    const model::ModelConfig mc = parse_model_config(cj, "", seed);
    model::Model<float> m(mc);
    {
        auto params = m.parameters();
        nn::load_checkpoint(opts.checkpoint, params);
    }

    auto records = data::read_manifest(opts.manifest);
    if (mc.has(enc::Modality::demographic)) {
        bool missing = false;
        for (const auto& r : records) missing = missing || !r.education;
        if (missing) records = data::impute_education(records, seed);
    }
    pipeline::FeatureOptions fo;
    fo.model_dim = mc.encoder.model_dim;
    fo.vocab_buckets = mc.encoder.vocab_buckets;
    fo.want_acoustic = mc.has(enc::Modality::acoustic);
    fo.want_text = mc.has(enc::Modality::linguistic);
    fo.want_demo = mc.has(enc::Modality::demographic);
    fo.base_dir = fs::path(opts.manifest).parent_path().string();
    const auto feats = pipeline::extract_features(records, fo);
    const eval::PredictionSet preds = predictions_for(m, feats);
    eval::write_predictions((fs::path(out_dir) / "predictions.jsonl").string(), preds);

    bool labeled = !preds.empty();
    for (const auto& p : preds) labeled = labeled && p.label >= 0;
    json report;
    report["records"] = preds.size();
    if (labeled) {
        const eval::ConfusionMatrix cm = opts.thresholds
                                             ? eval::threshold_adjust(preds, *opts.thresholds)
                                             : eval::confusion_argmax(preds);
        json cm_json = json::array();
        for (const auto& row : cm.counts) cm_json.push_back(row);
        try {
            report["auc_micro"] = eval::auc_ovr(preds, eval::Averaging::micro);
            report["auc_weighted"] = eval::auc_ovr(preds, eval::Averaging::weighted);
        } catch (const MetricError& e) {
            std::cerr << "evaluate: " << e.what() << "\n";
        }
        report["micro_f1"] = eval::micro_f1(cm);
        report["log_loss"] = eval::multiclass_log_loss(preds);
        report["confusion"] = cm_json;
        if (opts.thresholds) report["thresholds"] = *opts.thresholds;
        const auto pr = eval::per_class_pr(cm);
        json per_class = json::object();
        const char* names[3] = {"control", "mci", "ad"};
        for (int c = 0; c < 3; ++c)
            per_class[names[c]] = {{"precision", pr[c].precision}, {"recall", pr[c].recall}};
        report["per_class"] = per_class;

        ensure_dir((fs::path(out_dir) / "curves").string());
        for (int c = 0; c < 3; ++c) {
            try {
                eval::write_curve_csv(
                    eval::roc_curve(preds, c),
                    (fs::path(out_dir) / "curves" / ("roc_" + std::string(names[c]) + ".csv"))
                        .string());
                eval::write_curve_csv(
                    eval::pr_curve(preds, c),
                    (fs::path(out_dir) / "curves" / ("pr_" + std::string(names[c]) + ".csv"))
                        .string());
                eval::write_curve_csv(
                    eval::cumulative_gain(preds, c),
                    (fs::path(out_dir) / "curves" / ("gain_" + std::string(names[c]) + ".csv"))
                        .string());
            } catch (const MetricError& e) {
                std::cerr << "evaluate: class " << names[c] << ": " << e.what() << "\n";
            }
        }
        try {
            eval::write_curve_csv(eval::information_gain_curve(preds),
                                  (fs::path(out_dir) / "curves" / "info_gain.csv").string());
        } catch (const MetricError& e) {
            std::cerr << "evaluate: " << e.what() << "\n";
        }

        if (opts.binary_mci) {
            // MCI vs control: renormalized MCI score over the two-class subset,
            // with an F1-optimizing threshold sweep.
            std::vector<double> scores;
            std::vector<int> bin_labels;
            for (const auto& p : preds) {
                if (p.label == 2) continue;
                const double denom = p.probs[0] + p.probs[1];
                scores.push_back(denom > 0 ? p.probs[1] / denom : 0.5);
                bin_labels.push_back(p.label == 1 ? 1 : 0);
            }
            if (!scores.empty()) {
                json sub;
                try {
                    sub["auc"] = eval::auc_binary(scores, bin_labels);
                } catch (const MetricError& e) {
                    std::cerr << "evaluate: binary subset: " << e.what() << "\n";
                }
                double best_f1 = -1.0, best_thresh = 0.5, best_p = 0.0, best_r = 0.0;
                std::vector<double> uniq = scores;
                std::sort(uniq.begin(), uniq.end());
                uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
                for (const double th : uniq) {
                    long tp = 0, fp = 0, fn = 0;
                    for (std::size_t i = 0; i < scores.size(); ++i) {
                        const bool pred = scores[i] >= th;
                        if (pred && bin_labels[i]) ++tp;
                        else if (pred) ++fp;
                        else if (bin_labels[i]) ++fn;
                    }
                    if (tp == 0) continue;
                    const double prec = static_cast<double>(tp) / (tp + fp);
                    const double rec = static_cast<double>(tp) / (tp + fn);
                    const double f1 = 2 * prec * rec / (prec + rec);
                    if (f1 > best_f1) {
                        best_f1 = f1;
                        best_thresh = th;
                        best_p = prec;
                        best_r = rec;
                    }
                }
                sub["records"] = scores.size();
                sub["best_threshold"] = best_thresh;
                sub["f1"] = best_f1;
                sub["precision"] = best_p;
                sub["recall"] = best_r;
                report["mci_vs_control"] = sub;
            }
        }
    }
    write_json_file((fs::path(out_dir) / "report.json").string(), report);
    std::cout << "evaluate: " << preds.size() << " records";
    if (labeled && report.contains("auc_micro"))
        std::cout << ", auc " << report["auc_micro"].get<double>() << ", f1 "
                  << report["micro_f1"].get<double>();
    std::cout << "\n";
    return out_dir;
}

namespace {

json fairness_block(const eval::PredictionSet& preds, eval::GroupAttr attr, int positive_class) {
    json out;
    const eval::EooReport eoo = eval::equality_of_opportunity(preds, attr, positive_class);
    json groups = json::array();
    for (const auto& g : eoo.groups)
        groups.push_back({{"group", g.group},
                          {"tpr", g.tpr},
                          {"fpr", g.fpr},
                          {"positives", g.positives},
                          {"negatives", g.negatives}});
    out["equality_of_opportunity"] = {{"groups", groups},
                                      {"gap", eoo.gap},
                                      {"excluded", eoo.excluded}};
    try {
        const eval::OddsReport odds = eval::average_odds(preds, attr, positive_class);
        out["average_odds"] = {{"max_pairwise", odds.max_average_odds},
                               {"excluded", odds.excluded}};
    } catch (const MetricError& e) {
        out["average_odds"] = {{"error", e.what()}};
    }
    return out;
}

}  // namespace

std::string cmd_audit(const AuditOptions& opts, const std::string& out_path) {
    const eval::PredictionSet current = eval::read_predictions(opts.predictions);
    for (const auto& p : current)
        if (p.label < 0)
            throw DataError("audit needs labeled predictions (uid " + p.uid + ")");
    std::optional<eval::PredictionSet> baseline;
    if (!opts.baseline.empty()) baseline = eval::read_predictions(opts.baseline);

    json report;
    report["positive_class"] = opts.positive_class;
    for (const std::string& attr_name : opts.group_attrs) {
        const eval::GroupAttr attr = eval::group_attr_from_string(attr_name);
        json block;
        try {
            block["current"] = fairness_block(current, attr, opts.positive_class);
        } catch (const MetricError& e) {
            block["current"] = {{"error", e.what()}};
        }
        if (baseline) {
            try {
                block["baseline"] = fairness_block(*baseline, attr, opts.positive_class);
                if (block["current"].contains("equality_of_opportunity") &&
                    block["baseline"].contains("equality_of_opportunity")) {
                    const double gap_now =
                        block["current"]["equality_of_opportunity"]["gap"].get<double>();
                    const double gap_then =
                        block["baseline"]["equality_of_opportunity"]["gap"].get<double>();
                    block["eoo_gap_improvement"] = gap_then - gap_now;
                }
            } catch (const MetricError& e) {
                block["baseline"] = {{"error", e.what()}};
            }
        }
        report[attr_name] = std::move(block);
        if (report[attr_name].contains("current") &&
            report[attr_name]["current"].contains("equality_of_opportunity"))
            std::cout << "audit: " << attr_name << " EOO gap "
                      << report[attr_name]["current"]["equality_of_opportunity"]["gap"]
                             .get<double>()
                      << "\n";
    }
    if (!out_path.empty()) {
        const std::string parent = fs::path(out_path).parent_path().string();
        if (!parent.empty()) ensure_dir(parent);
        write_json_file(out_path, report);
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return out_path;
}

int cmd_wer(const WerOptions& opts) {
    const std::string ref_text = read_text_file(opts.ref_path);
    const std::string hyp_text = read_text_file(opts.hyp_path);
    auto split_lines = [](const std::string& text) {
        std::vector<std::string> lines;
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
        return lines;
    };
    auto split_words = [](const std::string& line) {
        std::vector<std::string> words;
        std::stringstream ss(line);
        std::string w;
        while (ss >> w) words.push_back(w);
        return words;
    };
    const auto refs = split_lines(ref_text);
    const auto hyps = split_lines(hyp_text);
    if (hyps.size() < refs.size())
        std::cerr << "wer: hypothesis has fewer lines; missing lines scored as empty\n";

    long total_err = 0, total_ref = 0;
    std::size_t scored = 0, skipped = 0;
    json lines = json::array();
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto ref = split_words(refs[i]);
        const auto hyp = split_words(i < hyps.size() ? hyps[i] : "");
        if (ref.empty()) {
            std::cerr << "wer: line " << i + 1 << " has an empty reference; skipped\n";
            ++skipped;
            continue;
        }
        const eval::WerResult r = eval::wer(ref, hyp);
        total_err += r.errors();
        total_ref += r.ref_len;
        ++scored;
        lines.push_back({{"line", i + 1},
                         {"wer", r.wer},
                         {"substitutions", r.substitutions},
                         {"insertions", r.insertions},
                         {"deletions", r.deletions},
                         {"ref_words", r.ref_len}});
        std::printf("line %zu: WER %.4f [%ld sub, %ld ins, %ld del / %ld words]\n", i + 1,
                    r.wer, r.substitutions, r.insertions, r.deletions, r.ref_len);
    }
    if (scored == 0) throw MetricError("no scorable line pairs (all references empty)");
    const double aggregate = static_cast<double>(total_err) / static_cast<double>(total_ref);
    std::printf("aggregate WER %.4f [%ld errors / %ld words over %zu lines]\n", aggregate,
                total_err, total_ref, scored);
    if (!opts.out_path.empty()) {
        write_json_file(opts.out_path, {{"aggregate_wer", aggregate},
                                        {"total_errors", total_err},
                                        {"total_ref_words", total_ref},
                                        {"scored_lines", scored},
                                        {"skipped_lines", skipped},
                                        {"lines", lines}});
    }
    return 0;
}

}  // namespace speechcare::cli
