#include "eiqa/scores.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "eiqa/csvio.hpp"
#include "eiqa/errors.hpp"

namespace eiqa::harness {

using nlohmann::json;

std::vector<TextOutputRow> read_text_outputs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open text outputs: " + path);
    std::vector<TextOutputRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            TextOutputRow r;
            r.image_id = j.at("image_id").get<std::string>();
            r.model_id = j.at("model_id").get<std::string>();
            r.task_index = j.at("task_index").get<int>();
            r.text = j.at("text").get<std::string>();
            if (r.task_index < 0 || r.task_index > 4)
                throw ValidationError("task_index out of [0,4]");
            rows.push_back(std::move(r));
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw ValidationError("text outputs line " + std::to_string(lineno) + ": " +
                                  e.what());
        }
    }
    return rows;
}

std::vector<PoseOutputRow> read_pose_outputs(const std::string& path) {
    std::vector<PoseOutputRow> rows;
    std::ifstream probe(path);
    if (!probe) throw IoError("cannot open pose outputs: " + path);
    std::string first;
    std::getline(probe, first);
    probe.close();

    if (!first.empty() && first.front() == '{') {
        std::ifstream in(path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                const json j = json::parse(line);
                PoseOutputRow r;
                r.image_id = j.at("image_id").get<std::string>();
                r.model_id = j.at("model_id").get<std::string>();
                r.task_index = j.at("task_index").get<int>();
                if (j.contains("step_index")) r.step_index = j.at("step_index").get<int>();
                if (j.contains("arm_id")) r.arm_id = j.at("arm_id").get<std::string>();
                r.fields = j.at("fields").get<std::vector<double>>();
                rows.push_back(std::move(r));
            } catch (const std::exception& e) {
                throw ValidationError("pose outputs line " + std::to_string(lineno) + ": " +
                                      e.what());
            }
        }
        return rows;
    }

    const CsvTable table = read_csv(path);
    const int c_img = table.require_column("image_id");
    const int c_model = table.require_column("model_id");
    const int c_task = table.require_column("task_index");
    const int c_step = table.column("step_index");
    const int c_arm = table.column("arm_id");
    std::vector<int> field_cols;
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i].rfind("f", 0) == 0 &&
            table.header[i].find_first_not_of("0123456789", 1) == std::string::npos)
            field_cols.push_back(static_cast<int>(i));
    if (field_cols.empty()) throw ValidationError("pose CSV has no f0..fn field columns");

    for (std::size_t rix = 0; rix < table.rows.size(); ++rix) {
        const CsvRow& row = table.rows[rix];
        PoseOutputRow r;
        r.image_id = row[static_cast<std::size_t>(c_img)];
        r.model_id = row[static_cast<std::size_t>(c_model)];
        std::vector<std::string> raw;
        for (int c : field_cols)
            if (static_cast<std::size_t>(c) < row.size() && !row[static_cast<std::size_t>(c)].empty())
                raw.push_back(row[static_cast<std::size_t>(c)]);
        try {
            r.task_index = std::stoi(row[static_cast<std::size_t>(c_task)]);
            if (c_step >= 0 && !row[static_cast<std::size_t>(c_step)].empty())
                r.step_index = std::stoi(row[static_cast<std::size_t>(c_step)]);
            if (c_arm >= 0 && !row[static_cast<std::size_t>(c_arm)].empty())
                r.arm_id = row[static_cast<std::size_t>(c_arm)];
            pose::parse_pose_fields(raw); // validates count and numerics
            r.fields.reserve(raw.size());
            for (const std::string& f : raw) r.fields.push_back(std::stod(f));
        } catch (const ValidationError& e) {
            throw ValidationError("pose CSV row " + std::to_string(rix + 2) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ValidationError("pose CSV row " + std::to_string(rix + 2) + ": " + e.what());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

using TaskKey = std::string; // image_id \x1f model_id \x1f task

TaskKey task_key(const std::string& image, const std::string& model, int task) {
    return image + '\x1f' + model + '\x1f' + std::to_string(task);
}

} // namespace

ScoreOutput score_cognition(const std::vector<PairRecord>& manifest,
                            const std::vector<TextOutputRow>& outputs) {
    if (manifest.empty()) throw ValidationError("empty manifest");

    std::unordered_map<TaskKey, const TextOutputRow*> by_key;
    for (const TextOutputRow& r : outputs)
        by_key[task_key(r.image_id, r.model_id, r.task_index)] = &r;

    std::set<std::string> models;
    for (const TextOutputRow& r : outputs) models.insert(r.model_id);

    // IDF corpus: every reference-side sentence in the run.
    std::unordered_set<std::string> ref_ids;
    for (const PairRecord& p : manifest) ref_ids.insert(reference_id(p.ref_path));
    std::vector<text::Tokens> corpus;
    for (const TextOutputRow& r : outputs)
        if (ref_ids.count(r.image_id)) corpus.push_back(text::tokenize(r.text));
    if (corpus.empty()) throw ValidationError("no reference-side sentences found for the IDF corpus");
    const text::CiderScorer cider(corpus);

    ScoreOutput out;
    for (const PairRecord& pair : manifest) {
        const std::string ref_id = reference_id(pair.ref_path);
        for (const std::string& model : models) {
            std::array<TaskScoreRow, 5> task_rows;
            std::array<double, 5> task_scores{};
            bool complete = true;
            for (int task = 0; task < 5 && complete; ++task) {
                const auto ref_it = by_key.find(task_key(ref_id, model, task));
                const auto dist_it = by_key.find(task_key(pair.image_id, model, task));
                if (ref_it == by_key.end() || dist_it == by_key.end()) {
                    out.warnings.push_back("missing text for " + pair.image_id + " model " +
                                           model + " task " + std::to_string(task));
                    complete = false;
                    break;
                }
                const text::Tokens ref_tok = text::tokenize(ref_it->second->text);
                const text::Tokens dist_tok = text::tokenize(dist_it->second->text);
                text::CognitionDims dims;
                dims.precision = text::bleu(dist_tok, ref_tok);
                dims.recall = text::rouge_l(dist_tok, ref_tok);
                dims.semantic = cider.score(dist_tok, ref_tok);

                TaskScoreRow row;
                row.image_id = pair.image_id;
                row.model_id = model;
                row.task_index = task;
                row.dim1 = dims.precision;
                row.dim2 = dims.recall;
                row.dim3 = dims.semantic;
                row.task_score = text::cognition_task_score(dims);
                task_scores[static_cast<std::size_t>(task)] = row.task_score;
                task_rows[static_cast<std::size_t>(task)] = row;
            }
            if (!complete) continue;
            const double image_score = text::cognition_image_score(task_scores);
            for (TaskScoreRow& row : task_rows) {
                row.image_score = image_score;
                out.rows.push_back(row);
            }
        }
    }
    return out;
}

namespace {

// Reduce a (possibly multi-step, multi-arm) trajectory to the final pose of
// the dominant arm.
pose::Pose7 final_pose(std::vector<const PoseOutputRow*>& steps,
                       std::vector<std::string>& warnings, const std::string& what) {
    std::sort(steps.begin(), steps.end(), [](const PoseOutputRow* a, const PoseOutputRow* b) {
        if (a->arm_id != b->arm_id) return a->arm_id < b->arm_id;
        return a->step_index < b->step_index;
    });
    std::map<std::string, std::vector<pose::Pose7>> arms;
    for (const PoseOutputRow* r : steps) arms[r->arm_id].push_back(pose::parse_pose(r->fields));
    if (arms.empty()) throw ValidationError("no pose steps for " + what);
    if (arms.size() == 1) return arms.begin()->second.back();
    if (arms.size() > 2)
        warnings.push_back(what + ": more than two arms, using the widest-ranging pair");
    auto it = arms.begin();
    const auto& arm_a = it->second;
    const auto& arm_b = std::next(it)->second;
    const int chosen = pose::select_dominant_arm(arm_a, arm_b);
    return chosen == 0 ? arm_a.back() : arm_b.back();
}

} // namespace

ScoreOutput score_decision(const std::vector<PairRecord>& manifest,
                           const std::vector<PoseOutputRow>& outputs,
                           const DecisionOptions& options) {
    if (manifest.empty()) throw ValidationError("empty manifest");

    std::unordered_map<TaskKey, std::vector<const PoseOutputRow*>> by_key;
    for (const PoseOutputRow& r : outputs)
        by_key[task_key(r.image_id, r.model_id, r.task_index)].push_back(&r);

    std::set<std::string> models;
    for (const PoseOutputRow& r : outputs) models.insert(r.model_id);

    struct PendingTask {
        TaskScoreRow row;      // dims filled after normalization
        pose::RawMeasures raw;
        int distortion_id = 0;
    };
    std::vector<PendingTask> pending;
    ScoreOutput out;

    for (const PairRecord& pair : manifest) {
        const std::string ref_id = reference_id(pair.ref_path);
        for (const std::string& model : models) {
            std::array<PendingTask, 5> tasks;
            bool complete = true;
            for (int task = 0; task < 5 && complete; ++task) {
                const auto ref_it = by_key.find(task_key(ref_id, model, task));
                const auto dist_it = by_key.find(task_key(pair.image_id, model, task));
                if (ref_it == by_key.end() || dist_it == by_key.end()) {
                    out.warnings.push_back("missing pose for " + pair.image_id + " model " +
                                           model + " task " + std::to_string(task));
                    complete = false;
                    break;
                }
                auto ref_steps = ref_it->second;
                auto dist_steps = dist_it->second;
                const pose::Pose7 ref_pose =
                    final_pose(ref_steps, out.warnings, ref_id + "/" + model);
                const pose::Pose7 dist_pose =
                    final_pose(dist_steps, out.warnings, pair.image_id + "/" + model);

                PendingTask p;
                p.raw = pose::raw_decision_measures(ref_pose, dist_pose, options.rotation_mode);
                p.distortion_id = pair.distortion_id;
                p.row.image_id = pair.image_id;
                p.row.model_id = model;
                p.row.task_index = task;
                tasks[static_cast<std::size_t>(task)] = p;
            }
            if (!complete) continue;
            for (const PendingTask& p : tasks) pending.push_back(p);
        }
    }

    if (pending.empty()) {
        out.warnings.push_back("no joinable pose outputs");
        return out;
    }

    // Normalize: global batch, per-distortion subsets, or fixed bounds.
    std::vector<pose::DecisionDims> dims(pending.size());
    if (!options.batch_normalization) {
        for (std::size_t i = 0; i < pending.size(); ++i)
            dims[i] = pose::normalize_fixed(pending[i].raw, options.d_max_mm);
    } else if (options.normalize_per_distortion) {
        std::map<int, std::vector<std::size_t>> by_dist;
        for (std::size_t i = 0; i < pending.size(); ++i)
            by_dist[pending[i].distortion_id].push_back(i);
        for (const auto& [_, indices] : by_dist) {
            std::vector<pose::RawMeasures> raw;
            raw.reserve(indices.size());
            for (std::size_t i : indices) raw.push_back(pending[i].raw);
            const auto sub = pose::normalize_decision_batch(raw);
            for (std::size_t k = 0; k < indices.size(); ++k) dims[indices[k]] = sub[k];
        }
    } else {
        std::vector<pose::RawMeasures> raw;
        raw.reserve(pending.size());
        for (const PendingTask& p : pending) raw.push_back(p.raw);
        dims = pose::normalize_decision_batch(raw);
    }

    // Reassemble 5-task groups (pending kept manifest-ordered).
    for (std::size_t i = 0; i + 5 <= pending.size(); i += 5) {
        std::array<pose::DecisionDims, 5> group;
        for (std::size_t k = 0; k < 5; ++k) group[k] = dims[i + k];
        const double image_score = pose::decision_image_score(group);
        for (std::size_t k = 0; k < 5; ++k) {
            TaskScoreRow row = pending[i + k].row;
            row.dim1 = group[k].position;
            row.dim2 = group[k].rotation;
            row.dim3 = group[k].state;
            row.task_score = pose::decision_task_score(group[k]);
            row.image_score = image_score;
            out.rows.push_back(row);
        }
    }
    return out;
}

void write_score_csv(const ScoreOutput& scores, const std::string& path,
                     const std::array<std::string, 3>& dim_names) {
    CsvRow header{"image_id", "model_id", "task_index", dim_names[0], dim_names[1],
                  dim_names[2], "task_score", "image_score"};
    std::vector<CsvRow> rows;
    rows.reserve(scores.rows.size());
    for (const TaskScoreRow& r : scores.rows)
        rows.push_back({r.image_id, r.model_id, std::to_string(r.task_index),
                        format_double(r.dim1), format_double(r.dim2), format_double(r.dim3),
                        format_double(r.task_score), format_double(r.image_score)});
    write_csv(path, header, rows);
}

std::vector<TaskScoreRow> read_score_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int c_img = t.require_column("image_id");
    const int c_model = t.require_column("model_id");
    const int c_task = t.require_column("task_index");
    const int c_total = t.require_column("image_score");
    const int c_score = t.require_column("task_score");
    if (t.header.size() < 8) throw ValidationError("score CSV must carry 3 dimension columns");
    std::vector<TaskScoreRow> rows;
    for (const CsvRow& row : t.rows) {
        TaskScoreRow r;
        r.image_id = row[static_cast<std::size_t>(c_img)];
        r.model_id = row[static_cast<std::size_t>(c_model)];
        r.task_index = std::stoi(row[static_cast<std::size_t>(c_task)]);
        r.dim1 = std::stod(row[3]);
        r.dim2 = std::stod(row[4]);
        r.dim3 = std::stod(row[5]);
        r.task_score = std::stod(row[static_cast<std::size_t>(c_score)]);
        r.image_score = std::stod(row[static_cast<std::size_t>(c_total)]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<OutcomeRow> read_outcomes_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int c_img = t.require_column("image_id");
    const int c_kind = t.require_column("kind");
    const int cols[6] = {t.column("ref_x"), t.column("ref_y"), t.column("ref_z"),
                         t.column("dist_x"), t.column("dist_y"), t.column("dist_z")};
    std::vector<OutcomeRow> rows;
    for (const CsvRow& row : t.rows) {
        OutcomeRow r;
        r.image_id = row[static_cast<std::size_t>(c_img)];
        const std::string kind = row[static_cast<std::size_t>(c_kind)];
        if (kind == "success") r.outcome.kind = kin::ExecutionOutcome::Kind::Success;
        else if (kind == "failure") r.outcome.kind = kin::ExecutionOutcome::Kind::Failure;
        else if (kind == "emergency_stop")
            r.outcome.kind = kin::ExecutionOutcome::Kind::EmergencyStop;
        else throw ValidationError("unknown outcome kind: " + kind);

        const auto grab = [&](int base) -> std::optional<Eigen::Vector3d> {
            for (int k = 0; k < 3; ++k) {
                const int c = cols[base + k];
                if (c < 0 || static_cast<std::size_t>(c) >= row.size() ||
                    row[static_cast<std::size_t>(c)].empty())
                    return std::nullopt;
            }
            return Eigen::Vector3d(std::stod(row[static_cast<std::size_t>(cols[base])]),
                                   std::stod(row[static_cast<std::size_t>(cols[base + 1])]),
                                   std::stod(row[static_cast<std::size_t>(cols[base + 2])]));
        };
        r.outcome.final_pose_ref = grab(0);
        r.outcome.final_pose_dist = grab(3);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::map<std::string, std::pair<std::optional<Eigen::Vector3d>, std::optional<Eigen::Vector3d>>>
read_trajectory_finals(const std::string& path, const kin::HomogeneousTransform& initial) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory file: " + path);
    std::map<std::string,
             std::pair<std::optional<Eigen::Vector3d>, std::optional<Eigen::Vector3d>>>
        finals;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string id = j.at("image_id").get<std::string>();
            const std::string side = j.at("side").get<std::string>();
            kin::HomogeneousTransform pose = initial;
            for (const json& step : j.at("steps")) {
                const auto v = step.get<std::vector<double>>();
                kin::HomogeneousTransform delta;
                if (v.size() == 16) {
                    Eigen::Matrix4d m;
                    for (int r = 0; r < 4; ++r)
                        for (int c = 0; c < 4; ++c)
                            m(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
                    delta = kin::HomogeneousTransform::from_matrix(m);
                } else {
                    const pose::Pose7 p = pose::parse_pose(v);
                    const Eigen::Vector3d rot(p.rotation[0], p.rotation[1], p.rotation[2]);
                    const double angle = rot.norm();
                    if (angle > 1e-12)
                        delta.rotation =
                            Eigen::AngleAxisd(angle, rot / angle).toRotationMatrix();
                    delta.translation = Eigen::Vector3d(p.position[0], p.position[1],
                                                        p.position[2]) / 1000.0; // mm -> m
                }
                pose = kin::compose_pose(pose, delta);
            }
            auto& slot = finals[id];
            if (side == "ref") slot.first = pose.translation;
            else if (side == "dist") slot.second = pose.translation;
            else throw ValidationError("side must be ref or dist");
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw ValidationError("trajectory line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return finals;
}

ExecutionScores score_execution(std::vector<OutcomeRow> outcomes) {
    ExecutionScores out;
    for (OutcomeRow& r : outcomes) {
        try {
            r.score = kin::execution_score(r.outcome);
        } catch (const ValidationError& e) {
            out.warnings.push_back(r.image_id + ": " + e.what());
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

void write_execution_csv(const ExecutionScores& scores, const std::string& path) {
    CsvRow header{"image_id", "kind", "ref_x", "ref_y", "ref_z",
                  "dist_x",   "dist_y", "dist_z", "score"};
    std::vector<CsvRow> rows;
    for (const OutcomeRow& r : scores.rows) {
        const char* kind = r.outcome.kind == kin::ExecutionOutcome::Kind::Success ? "success"
                           : r.outcome.kind == kin::ExecutionOutcome::Kind::Failure
                               ? "failure"
                               : "emergency_stop";
        const auto v3 = [&](const std::optional<Eigen::Vector3d>& v, int k) {
            return v ? format_double((*v)[k]) : std::string();
        };
        rows.push_back({r.image_id, kind, v3(r.outcome.final_pose_ref, 0),
                        v3(r.outcome.final_pose_ref, 1), v3(r.outcome.final_pose_ref, 2),
                        v3(r.outcome.final_pose_dist, 0), v3(r.outcome.final_pose_dist, 1),
                        v3(r.outcome.final_pose_dist, 2),
                        r.score ? format_double(*r.score) : std::string()});
    }
    write_csv(path, header, rows);
}

ImageLabels build_image_labels(const std::vector<TaskScoreRow>& rows,
                               const std::vector<PairRecord>& manifest) {
    std::unordered_set<std::string> known;
    for (const PairRecord& p : manifest) known.insert(p.image_id);

    struct Acc {
        double total = 0.0;
        std::array<double, 3> dims{};
        int task_rows = 0;
        std::set<std::string> models;
    };
    std::map<std::string, Acc> acc;
    std::set<std::string> orphan_set;
    for (const TaskScoreRow& r : rows) {
        if (!known.count(r.image_id)) {
            orphan_set.insert(r.image_id);
            continue;
        }
        Acc& a = acc[r.image_id];
        a.dims[0] += r.dim1;
        a.dims[1] += r.dim2;
        a.dims[2] += r.dim3;
        a.total += r.task_score; // image total = sum over tasks, then model mean
        a.task_rows += 1;
        a.models.insert(r.model_id);
    }

    ImageLabels labels;
    labels.orphans.assign(orphan_set.begin(), orphan_set.end());
    for (const auto& [id, a] : acc) {
        const double model_n = static_cast<double>(a.models.size());
        labels.total[id] = a.total / model_n;
        // Dimension label: mean of the dimension over tasks, then models.
        const double denom = static_cast<double>(a.task_rows);
        for (int d = 0; d < 3; ++d)
            labels.dims[static_cast<std::size_t>(d)][id] =
                a.dims[static_cast<std::size_t>(d)] / denom;
    }
    return labels;
}

} // namespace eiqa::harness
