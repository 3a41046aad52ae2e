#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "eiqa/manifest.hpp"
#include "eiqa/scores.hpp"

namespace eiqa::harness {

// One objective metric: per-image values keyed by image id, plus the
// report group it belongs to (Zero / FR / NR style).
struct MetricSeries {
    std::string name;
    std::string group = "Zero";
    std::map<std::string, double> by_id;
};

// PSNR or SSIM over the manifest's reference/distorted files.
MetricSeries compute_baseline_series(const std::vector<PairRecord>& manifest,
                                     const std::string& which,
                                     std::vector<std::string>* warnings = nullptr);

// External learned-metric scores, CSV {sample_id, value}.
MetricSeries read_metric_csv(const std::string& path, const std::string& name,
                             const std::string& group);

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t reps = 0;
};

struct TripleStat {
    Stat srcc, krcc, plcc;
};

struct EvalResult {
    std::vector<std::string> slices;
    std::vector<std::string> metric_names;
    std::map<std::string, std::string> metric_group;
    std::map<std::string, std::map<std::string, TripleStat>> values; // metric -> slice
    std::vector<std::string> warnings;
    int repeats = 0;
};

struct ProtocolOptions {
    int repeats = 10;
    double ratio = 0.8;
    std::uint64_t seed = 0;
    bool logistic_plcc = false;
    bool pair_level_split = false;
};

// The split / evaluate / aggregate loop: each repetition resamples the
// reference-level split, evaluates every metric against the labels on the
// validation slice set, and the mean/std across repetitions is reported.
// Slices: the 3 score dimensions, 3 JND levels, perspective, sim2real and
// the 5 distortion levels. Slices with fewer than 3 samples are skipped
// with a warning.
EvalResult repeat_protocol(const std::vector<PairRecord>& manifest, const ImageLabels& labels,
                           const std::array<std::string, 3>& dim_names,
                           const std::vector<MetricSeries>& metrics,
                           const ProtocolOptions& options);

// Evaluation data round-trips through JSON so reports can be regenerated
// without re-scoring.
void write_eval_json(const EvalResult& result, const std::string& path);
EvalResult read_eval_json(const std::string& path);

// Grouped tables, best/second-best flagged per column within each group.
void write_report_markdown(const EvalResult& result, const std::string& path);
void write_report_csv(const EvalResult& result, const std::string& path);

} // namespace eiqa::harness
