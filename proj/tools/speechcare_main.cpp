#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "speechcare/cli.hpp"
#include "speechcare/errors.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
    using namespace speechcare;

    CLI::App app{"speechcare: multimodal speech classification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global --config/--seed/--out work after the subcommand

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out;
    app.add_option("--config", config_path, "JSON config file")->capture_default_str();
    app.add_option("--seed", seed, "master seed override")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--out", out, "output directory (default runs/<id>)");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    auto* impute_cmd = app.add_subcommand("impute", "fill missing education values");
    std::string manifest_in, manifest_out;
    impute_cmd->add_option("--manifest", manifest_in, "input manifest")->required();
    impute_cmd->add_option("--manifest-out", manifest_out, "output manifest");

    auto* pre_cmd = app.add_subcommand("preprocess", "extract acoustic features to files");
    std::string pre_manifest;
    bool dump_spectrograms = false;
    double low_pass_hz = 8000.0;
    pre_cmd->add_option("--manifest", pre_manifest, "input manifest")->required();
    pre_cmd->add_flag("--spectrograms", dump_spectrograms, "dump per-record spectrogram CSVs");
    pre_cmd->add_option("--low-pass-hz", low_pass_hz, "low-pass cutoff")->capture_default_str();

    auto* train_cmd = app.add_subcommand("train", "train a model from a JSON config");
    auto* ablate_cmd = app.add_subcommand("ablate", "train all config variants over seeds");

    auto* eval_cmd = app.add_subcommand("evaluate", "score a manifest with a checkpoint");
    cli::EvaluateOptions eval_opts;
    std::vector<double> thresholds;
    eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint file")->required();
    eval_cmd->add_option("--model-config", eval_opts.config, "run config.json")->required();
    eval_cmd->add_option("--manifest", eval_opts.manifest, "manifest to score")->required();
    eval_cmd->add_option("--thresholds", thresholds,
                         "three per-class decision thresholds in (0,1)");
    eval_cmd->add_flag("--binary-mci", eval_opts.binary_mci,
                       "add an MCI-vs-control sub-report");

    auto* audit_cmd = app.add_subcommand("audit", "fairness report from predictions");
    cli::AuditOptions audit_opts;
    audit_cmd->add_option("--predictions", audit_opts.predictions, "predictions JSONL")
        ->required();
    audit_cmd->add_option("--baseline", audit_opts.baseline,
                          "pre-mitigation predictions for a before/after report");
    audit_cmd->add_option("--positive-class", audit_opts.positive_class,
                          "class treated as positive (0 control, 1 mci, 2 ad)")
        ->capture_default_str();
    audit_cmd->add_option("--groups", audit_opts.group_attrs,
                          "group attributes to audit")
        ->capture_default_str();

    auto* wer_cmd = app.add_subcommand("wer", "word error rate between two transcripts");
    cli::WerOptions wer_opts;
    wer_cmd->add_option("--ref", wer_opts.ref_path, "reference transcript, one line per utterance")
        ->required();
    wer_cmd->add_option("--hyp", wer_opts.hyp_path, "hypothesis transcript")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            const synth::SynthSpec spec = cli::parse_synth_spec(config_path, seed, seed_given);
            const std::string dir =
                out.empty() ? "runs/synth-" + cli::run_id(config_path, spec.seed) : out;
            cli::cmd_synth(spec, dir);
        } else if (impute_cmd->parsed()) {
            const std::string dst = manifest_out.empty()
                                        ? (out.empty() ? manifest_in + ".imputed.jsonl"
                                                       : out + "/manifest.jsonl")
                                        : manifest_out;
            cli::cmd_impute(manifest_in, dst, seed);
        } else if (pre_cmd->parsed()) {
            const std::string dir = out.empty() ? "runs/preprocess" : out;
            cli::PreprocessOptions opts;
            opts.dump_spectrograms = dump_spectrograms;
            opts.low_pass_hz = low_pass_hz;
            cli::cmd_preprocess(pre_manifest, dir, opts);
        } else if (train_cmd->parsed()) {
            if (config_path.empty()) {
                std::cerr << "train requires --config\n";
                return kExitUsage;
            }
            const cli::TrainJobConfig cfg =
                cli::parse_train_config(config_path, seed, seed_given);
            std::ifstream cf(config_path);
            std::string text((std::istreambuf_iterator<char>(cf)),
                             std::istreambuf_iterator<char>());
            const std::string dir =
                out.empty() ? "runs/" + cli::run_id(text, cfg.seed) : out;
            cli::cmd_train(cfg, dir);
        } else if (ablate_cmd->parsed()) {
            if (config_path.empty()) {
                std::cerr << "ablate requires --config\n";
                return kExitUsage;
            }
            const cli::AblateConfig cfg =
                cli::parse_ablate_config(config_path, seed, seed_given);
            std::ifstream cf(config_path);
            std::string text((std::istreambuf_iterator<char>(cf)),
                             std::istreambuf_iterator<char>());
            const std::string dir =
                out.empty() ? "runs/ablate-" + cli::run_id(text, cfg.base.seed) : out;
            cli::cmd_ablate(cfg, dir);
        } else if (eval_cmd->parsed()) {
            if (!thresholds.empty()) {
                if (thresholds.size() != 3) {
                    std::cerr << "--thresholds needs exactly three values\n";
                    return kExitUsage;
                }
                eval_opts.thresholds = {thresholds[0], thresholds[1], thresholds[2]};
            }
            const std::string dir = out.empty() ? "runs/evaluate" : out;
            cli::cmd_evaluate(eval_opts, dir);
        } else if (audit_cmd->parsed()) {
            cli::cmd_audit(audit_opts, out.empty() ? "" : out + "/fairness.json");
        } else if (wer_cmd->parsed()) {
            if (!out.empty()) wer_opts.out_path = out + "/wer.json";
            return cli::cmd_wer(wer_opts);
        }
        return 0;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
