#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eiqa/kinematics.hpp"
#include "eiqa/manifest.hpp"
#include "eiqa/pose_score.hpp"
#include "eiqa/text_metrics.hpp"

namespace eiqa::harness {

// ---- model output ingestion ------------------------------------------------

struct TextOutputRow {
    std::string image_id;
    std::string model_id;
    int task_index = 0; // 0..4
    std::string text;
};

// JSON-lines rows {image_id, model_id, task_index, text}.
std::vector<TextOutputRow> read_text_outputs(const std::string& path);

struct PoseOutputRow {
    std::string image_id;
    std::string model_id;
    int task_index = 0;
    int step_index = 0;
    std::string arm_id = "a";
    std::vector<double> fields; // 7+
};

// JSON-lines rows {image_id, model_id, task_index, fields[, step_index, arm_id]}
// or CSV with columns image_id,model_id,task_index[,step_index,arm_id],f0..fn.
std::vector<PoseOutputRow> read_pose_outputs(const std::string& path);

// ---- per-task score rows -----------------------------------------------------

struct TaskScoreRow {
    std::string image_id;
    std::string model_id;
    int task_index = 0;
    double dim1 = 0.0, dim2 = 0.0, dim3 = 0.0; // precision/recall/semantic or pos/rot/state
    double task_score = 0.0;
    double image_score = 0.0; // 5-task sum, repeated on each task row
};

struct ScoreOutput {
    std::vector<TaskScoreRow> rows;
    std::vector<std::string> warnings; // joins that could not be made
};

// Cognition: joins reference/distorted VLM sentences per (pair, model,
// task), scores BLEU / ROUGE-L / CIDEr with the run's references as the
// IDF corpus.
ScoreOutput score_cognition(const std::vector<PairRecord>& manifest,
                            const std::vector<TextOutputRow>& outputs);

struct DecisionOptions {
    pose::RotationMode rotation_mode = pose::RotationMode::RotationVector;
    bool batch_normalization = true;  // false = fixed bounds
    double d_max_mm = 1700.0;
    bool normalize_per_distortion = false; // subset mode
};

// Decision: reduces multi-step, multi-arm outputs to a final pose per
// (side, model, task), computes raw measures, then normalizes.
ScoreOutput score_decision(const std::vector<PairRecord>& manifest,
                           const std::vector<PoseOutputRow>& outputs,
                           const DecisionOptions& options = {});

void write_score_csv(const ScoreOutput& scores, const std::string& path,
                     const std::array<std::string, 3>& dim_names);
std::vector<TaskScoreRow> read_score_csv(const std::string& path);

// ---- execution ----------------------------------------------------------------

struct OutcomeRow {
    std::string image_id;
    kin::ExecutionOutcome outcome;
    std::optional<double> score;
};

// CSV columns: image_id, kind (success|failure|emergency_stop),
// ref_x, ref_y, ref_z, dist_x, dist_y, dist_z (blank when not applicable).
std::vector<OutcomeRow> read_outcomes_csv(const std::string& path);

// Trajectory JSON-lines: {"image_id", "side": "ref"|"dist", "steps": [...]}
// where each step is a 16-number row-major 4x4 transform (meters) or a
// 7-field pose delta (mm / rad / state). Steps compose onto the initial
// pose; the final translation is the outcome position.
std::map<std::string, std::pair<std::optional<Eigen::Vector3d>, std::optional<Eigen::Vector3d>>>
read_trajectory_finals(const std::string& path, const kin::HomogeneousTransform& initial);

struct ExecutionScores {
    std::vector<OutcomeRow> rows; // scores filled in
    std::vector<std::string> warnings;
};

ExecutionScores score_execution(std::vector<OutcomeRow> outcomes);

void write_execution_csv(const ExecutionScores& scores, const std::string& path);

// ---- joins -------------------------------------------------------------------

// Per-image mean over models of the image score and of each dimension
// (task-mean per dimension). Orphan score ids (no manifest row) are
// returned, never silently dropped.
struct ImageLabels {
    std::map<std::string, double> total;
    std::array<std::map<std::string, double>, 3> dims;
    std::vector<std::string> orphans;
};

ImageLabels build_image_labels(const std::vector<TaskScoreRow>& rows,
                               const std::vector<PairRecord>& manifest);

} // namespace eiqa::harness
