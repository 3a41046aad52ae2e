// Command-line front end: corruption synthesis, scoring, correlation and
// report emission over manifest + score files.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eiqa/config.hpp"
#include "eiqa/csvio.hpp"
#include "eiqa/distortions.hpp"
#include "eiqa/errors.hpp"
#include "eiqa/image_io.hpp"
#include "eiqa/manifest.hpp"
#include "eiqa/protocol.hpp"
#include "eiqa/scores.hpp"
#include "eiqa/stats.hpp"

using namespace eiqa;
using namespace eiqa::harness;

namespace {

void print_warnings(const std::vector<std::string>& warnings, std::size_t cap = 20) {
    for (std::size_t i = 0; i < warnings.size() && i < cap; ++i)
        std::cerr << "warning: " << warnings[i] << "\n";
    if (warnings.size() > cap)
        std::cerr << "warning: ... and " << warnings.size() - cap << " more\n";
}

std::array<std::string, 3> score_dim_names(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.size() < 8) throw ValidationError("score CSV must carry 3 dimension columns");
    return {t.header[3], t.header[4], t.header[5]};
}

struct MetricArg {
    std::string name, group, path;
};

MetricArg parse_metric_arg(const std::string& arg) {
    const auto c1 = arg.find(':');
    const auto c2 = arg.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ValidationError("--metric expects name:group:path, got " + arg);
    return {arg.substr(0, c1), arg.substr(c1 + 1, c2 - c1 - 1), arg.substr(c2 + 1)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embodied-perception image quality toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string config_path;
    app.add_option("--seed", seed, "Seed for all randomized behavior");
    app.add_option("--config", config_path, "Key-value config file");

    // corrupt
    auto* corrupt = app.add_subcommand("corrupt", "Build a corruption manifest from references");
    std::string refs_path, out_dir, manifest_path;
    bool write_images = false;
    corrupt->add_option("--refs", refs_path, "Reference list (text or JSONL)")->required();
    corrupt->add_option("--out-dir", out_dir, "Directory for distorted images")->required();
    corrupt->add_option("--manifest", manifest_path, "Manifest output path")->required();
    corrupt->add_flag("--write-images", write_images, "Synthesize the distorted PNGs");

    // features
    auto* features = app.add_subcommand("features", "Low-level attribute features per image");
    std::string feat_images, feat_out;
    features->add_option("--images", feat_images, "Image list file")->required();
    features->add_option("--out", feat_out, "Output CSV")->required();

    // score-cognition
    auto* sc = app.add_subcommand("score-cognition", "Score VLM text outputs");
    std::string sc_manifest, sc_outputs, sc_out;
    sc->add_option("--manifest", sc_manifest)->required();
    sc->add_option("--outputs", sc_outputs, "Model text outputs (JSONL)")->required();
    sc->add_option("--out", sc_out, "Score CSV")->required();

    // score-decision
    auto* sd = app.add_subcommand("score-decision", "Score VLA pose outputs");
    std::string sd_manifest, sd_outputs, sd_out;
    std::string sd_norm = "batch", sd_rot = "vector";
    bool sd_per_distortion = false;
    sd->add_option("--manifest", sd_manifest)->required();
    sd->add_option("--outputs", sd_outputs, "Pose outputs (JSONL or CSV)")->required();
    sd->add_option("--out", sd_out, "Score CSV")->required();
    sd->add_option("--normalization", sd_norm, "batch | fixed");
    sd->add_option("--rotation-mode", sd_rot, "vector | axis");
    sd->add_flag("--per-distortion", sd_per_distortion, "Normalize within each distortion type");

    // score-execution
    auto* se = app.add_subcommand("score-execution", "Score real-world execution outcomes");
    std::string se_outcomes, se_out, se_traj;
    se->add_option("--outcomes", se_outcomes, "Outcome CSV")->required();
    se->add_option("--out", se_out, "Score CSV")->required();
    se->add_option("--trajectories", se_traj, "Step-trajectory JSONL for missing finals");

    // correlate
    auto* corr = app.add_subcommand("correlate", "Correlate a metric with labels");
    std::string corr_metric, corr_labels, corr_out;
    bool corr_logistic = false;
    corr->add_option("--metric", corr_metric, "CSV {sample_id, value}")->required();
    corr->add_option("--labels", corr_labels, "CSV {sample_id, value}")->required();
    corr->add_option("--out", corr_out, "Report CSV")->required();
    corr->add_flag("--logistic", corr_logistic, "Fit the 4-parameter logistic before PLCC");

    // jnd
    auto* jnd = app.add_subcommand("jnd", "Tertile partition by subject score");
    std::string jnd_scores, jnd_out;
    jnd->add_option("--scores", jnd_scores, "CSV {sample_id, value}")->required();
    jnd->add_option("--out", jnd_out, "Label CSV")->required();

    // split
    auto* split = app.add_subcommand("split", "Reference-level train/val split");
    std::string split_manifest, split_train, split_val;
    double split_ratio = 0.8;
    bool split_pairs = false;
    split->add_option("--manifest", split_manifest)->required();
    split->add_option("--ratio", split_ratio, "Train fraction (default 0.8)");
    split->add_option("--out-train", split_train)->required();
    split->add_option("--out-val", split_val)->required();
    split->add_flag("--pair-level", split_pairs, "Split rows instead of references");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Split/repeat correlation protocol");
    std::string eval_manifest, eval_labels, eval_out, eval_baselines;
    std::vector<std::string> eval_metrics;
    int eval_repeats = 10;
    double eval_ratio = 0.8;
    bool eval_logistic = false;
    eval->add_option("--manifest", eval_manifest)->required();
    eval->add_option("--labels", eval_labels, "Subject score CSV (from score-*)")->required();
    eval->add_option("--out", eval_out, "Evaluation data JSON")->required();
    eval->add_option("--baselines", eval_baselines, "Comma list of psnr,ssim to compute");
    eval->add_option("--metric", eval_metrics, "External metric name:group:path (repeatable)");
    eval->add_option("--repeats", eval_repeats, "Protocol repetitions (default 10)");
    eval->add_option("--ratio", eval_ratio, "Train fraction (default 0.8)");
    eval->add_flag("--logistic", eval_logistic, "Logistic fit before PLCC");

    // report
    auto* report = app.add_subcommand("report", "Emit tables from evaluation data");
    std::string report_eval, report_md, report_csv;
    report->add_option("--eval", report_eval, "Evaluation data JSON")->required();
    report->add_option("--out-md", report_md, "Markdown table path")->required();
    report->add_option("--out-csv", report_csv, "CSV table path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Config config;
        if (!config_path.empty()) config = Config::from_file(config_path);

        if (*corrupt) {
            const auto refs = read_reference_list(refs_path);
            GenerateOptions opt;
            opt.seed = seed;
            opt.out_dir = out_dir;
            opt.write_images = write_images;
            opt.param_overrides = config.distortion_overrides();
            const GenerateResult res = generate_pairs(refs, opt);
            write_manifest(res.rows, manifest_path);
            print_warnings(res.errors);
            std::cout << res.rows.size() << " manifest rows ("
                      << res.errors.size() << " reference errors)\n";
        } else if (*features) {
            const auto refs = read_reference_list(feat_images);
            std::vector<CsvRow> rows;
            for (const auto& r : refs) {
                const auto f = distort::low_level_features(read_png(r.path));
                rows.push_back({r.path, format_double(f.luminance), format_double(f.contrast),
                                format_double(f.chrominance), format_double(f.blur),
                                format_double(f.spatial_information)});
            }
            write_csv(feat_out,
                      {"path", "luminance", "contrast", "chrominance", "blur",
                       "spatial_information"},
                      rows);
            std::cout << rows.size() << " images\n";
        } else if (*sc) {
            const auto manifest = read_manifest(sc_manifest);
            const auto outputs = read_text_outputs(sc_outputs);
            const ScoreOutput scores = score_cognition(manifest, outputs);
            write_score_csv(scores, sc_out, {"precision", "recall", "semantic"});
            print_warnings(scores.warnings);
            std::cout << scores.rows.size() << " score rows\n";
        } else if (*sd) {
            const auto manifest = read_manifest(sd_manifest);
            const auto outputs = read_pose_outputs(sd_outputs);
            DecisionOptions opt;
            opt.batch_normalization =
                config.get("decision.normalization", sd_norm) == "batch";
            const std::string rot = config.get("decision.rotation_mode", sd_rot);
            if (rot == "axis") opt.rotation_mode = pose::RotationMode::ApproachAxis;
            else if (rot != "vector") throw ValidationError("rotation mode must be vector|axis");
            opt.d_max_mm = config.get_double("decision.d_max_mm", 1700.0);
            opt.normalize_per_distortion = sd_per_distortion;
            const ScoreOutput scores = score_decision(manifest, outputs, opt);
            write_score_csv(scores, sd_out, {"position", "rotation", "state"});
            print_warnings(scores.warnings);
            std::cout << scores.rows.size() << " score rows\n";
        } else if (*se) {
            auto outcomes = read_outcomes_csv(se_outcomes);
            if (!se_traj.empty()) {
                kin::HomogeneousTransform initial; // identity + configurable start point
                initial.translation = Eigen::Vector3d(config.get_double("initial_pose.x", 0.0),
                                                      config.get_double("initial_pose.y", 0.0),
                                                      config.get_double("initial_pose.z", 0.0));
                const auto finals = read_trajectory_finals(se_traj, initial);
                for (OutcomeRow& r : outcomes) {
                    const auto it = finals.find(r.image_id);
                    if (it == finals.end()) continue;
                    if (!r.outcome.final_pose_ref) r.outcome.final_pose_ref = it->second.first;
                    if (!r.outcome.final_pose_dist) r.outcome.final_pose_dist = it->second.second;
                }
            }
            const ExecutionScores scores = score_execution(std::move(outcomes));
            write_execution_csv(scores, se_out);
            print_warnings(scores.warnings);
            std::cout << scores.rows.size() << " outcome rows\n";
        } else if (*corr) {
            const MetricSeries metric = read_metric_csv(corr_metric, "metric", "Zero");
            const MetricSeries labels = read_metric_csv(corr_labels, "labels", "Zero");
            std::vector<double> xs, ys;
            for (const auto& [id, v] : metric.by_id) {
                const auto it = labels.by_id.find(id);
                if (it != labels.by_id.end()) {
                    xs.push_back(v);
                    ys.push_back(it->second);
                }
            }
            const bool logistic = corr_logistic || config.get_bool("plcc.logistic", false);
            stats::CorrelationReport rep;
            rep.srcc = stats::srcc(xs, ys);
            rep.krcc = stats::krcc(xs, ys);
            bool fit_ok = false;
            rep.plcc = stats::plcc(xs, ys, logistic, &fit_ok);
            rep.n = xs.size();
            if (logistic && !fit_ok)
                std::cerr << "warning: logistic fit did not converge, raw PLCC reported\n";
            write_csv(corr_out, {"n", "srcc", "krcc", "plcc"},
                      {{std::to_string(rep.n), format_double(rep.srcc), format_double(rep.krcc),
                        format_double(rep.plcc)}});
            std::cout << "n=" << rep.n << " srcc=" << format_double(rep.srcc, 4)
                      << " krcc=" << format_double(rep.krcc, 4)
                      << " plcc=" << format_double(rep.plcc, 4) << "\n";
        } else if (*jnd) {
            const CsvTable t = read_csv(jnd_scores);
            const int c_id = t.require_column("sample_id");
            const int c_val = t.require_column("value");
            std::vector<std::string> ids;
            std::vector<double> values;
            for (const CsvRow& row : t.rows) {
                ids.push_back(row[static_cast<std::size_t>(c_id)]);
                values.push_back(std::stod(row[static_cast<std::size_t>(c_val)]));
            }
            const auto labels = stats::jnd_partition(values);
            std::vector<CsvRow> rows;
            for (std::size_t i = 0; i < ids.size(); ++i)
                rows.push_back({ids[i], stats::jnd_label_name(labels[i])});
            write_csv(jnd_out, {"sample_id", "label"}, rows);
            std::cout << rows.size() << " samples\n";
        } else if (*split) {
            const auto manifest = read_manifest(split_manifest);
            const bool pair_level =
                split_pairs || config.get_bool("split.pair_level", false);
            const SplitResult s = split_train_val(manifest, split_ratio, seed, pair_level);
            write_manifest(s.train, split_train);
            write_manifest(s.val, split_val);
            std::cout << s.train.size() << " train rows, " << s.val.size() << " val rows\n";
        } else if (*eval) {
            const auto manifest = read_manifest(eval_manifest);
            const auto label_rows = read_score_csv(eval_labels);
            const auto dim_names = score_dim_names(eval_labels);
            const ImageLabels labels = build_image_labels(label_rows, manifest);
            if (!labels.orphans.empty()) {
                std::vector<std::string> w;
                for (const auto& o : labels.orphans) w.push_back("orphan score id: " + o);
                print_warnings(w);
            }

            std::vector<MetricSeries> metrics;
            std::vector<std::string> warnings;
            if (!eval_baselines.empty()) {
                std::string token;
                std::istringstream ss(eval_baselines);
                while (std::getline(ss, token, ','))
                    if (!token.empty())
                        metrics.push_back(compute_baseline_series(manifest, token, &warnings));
            }
            for (const std::string& arg : eval_metrics) {
                const MetricArg m = parse_metric_arg(arg);
                metrics.push_back(read_metric_csv(m.path, m.name, m.group));
            }
            print_warnings(warnings);

            ProtocolOptions opt;
            opt.repeats = eval_repeats;
            opt.ratio = eval_ratio;
            opt.seed = seed;
            opt.logistic_plcc = eval_logistic || config.get_bool("plcc.logistic", false);
            opt.pair_level_split = config.get_bool("split.pair_level", false);
            const EvalResult res = repeat_protocol(manifest, labels, dim_names, metrics, opt);
            write_eval_json(res, eval_out);
            print_warnings(res.warnings);
            std::cout << res.metric_names.size() << " metrics x " << res.slices.size()
                      << " slices over " << res.repeats << " repetitions\n";
        } else if (*report) {
            const EvalResult res = read_eval_json(report_eval);
            write_report_markdown(res, report_md);
            write_report_csv(res, report_csv);
            std::cout << "report written\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
