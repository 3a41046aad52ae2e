#include "eiqa/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>

#include "eiqa/csvio.hpp"
#include "eiqa/errors.hpp"
#include "eiqa/image_io.hpp"
#include "eiqa/stats.hpp"

namespace eiqa::harness {

using nlohmann::json;

MetricSeries compute_baseline_series(const std::vector<PairRecord>& manifest,
                                     const std::string& which,
                                     std::vector<std::string>* warnings) {
    if (which != "psnr" && which != "ssim")
        throw ValidationError("unknown baseline metric: " + which);
    MetricSeries series;
    series.name = which == "psnr" ? "PSNR" : "SSIM";
    series.group = "Zero";

    // Reference images are shared across 30 rows; cache decoded planes.
    std::map<std::string, ImageBuffer> ref_cache;
    for (const PairRecord& row : manifest) {
        try {
            auto it = ref_cache.find(row.ref_path);
            if (it == ref_cache.end())
                it = ref_cache.emplace(row.ref_path, read_png(row.ref_path)).first;
            const ImageBuffer dist = read_png(row.dist_path);
            series.by_id[row.image_id] = which == "psnr" ? stats::psnr(it->second, dist)
                                                         : stats::ssim(it->second, dist);
        } catch (const std::exception& e) {
            if (warnings) warnings->push_back(row.image_id + ": " + e.what());
        }
    }
    return series;
}

MetricSeries read_metric_csv(const std::string& path, const std::string& name,
                             const std::string& group) {
    const CsvTable t = read_csv(path);
    const int c_id = t.require_column("sample_id");
    const int c_val = t.require_column("value");
    MetricSeries series;
    series.name = name;
    series.group = group;
    for (const CsvRow& row : t.rows)
        series.by_id[row[static_cast<std::size_t>(c_id)]] =
            std::stod(row[static_cast<std::size_t>(c_val)]);
    return series;
}

namespace {

struct Accum {
    std::vector<double> srcc, krcc, plcc;
};

Stat summarize(const std::vector<double>& v) {
    Stat s;
    s.reps = v.size();
    if (v.empty()) return s;
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double sq = 0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(v.size()));
    return s;
}

} // namespace

EvalResult repeat_protocol(const std::vector<PairRecord>& manifest, const ImageLabels& labels,
                           const std::array<std::string, 3>& dim_names,
                           const std::vector<MetricSeries>& metrics,
                           const ProtocolOptions& options) {
    if (metrics.empty()) throw ValidationError("no metrics to evaluate");
    if (options.repeats < 1) throw ValidationError("repeats must be >= 1");

    EvalResult result;
    result.repeats = options.repeats;

    // JND partition on the full labeled set, by total score (higher =
    // milder), fixed across repetitions.
    std::vector<std::string> labeled_ids;
    std::vector<double> labeled_scores;
    for (const PairRecord& row : manifest) {
        const auto it = labels.total.find(row.image_id);
        if (it != labels.total.end()) {
            labeled_ids.push_back(row.image_id);
            labeled_scores.push_back(it->second);
        }
    }
    if (labeled_ids.size() < 3) throw ValidationError("fewer than 3 labeled samples");
    const auto jnd = stats::jnd_partition(labeled_scores);
    std::map<std::string, stats::JNDLabel> jnd_by_id;
    for (std::size_t i = 0; i < labeled_ids.size(); ++i) jnd_by_id[labeled_ids[i]] = jnd[i];

    // Slice fixture: name, row filter, label selector (dim index or total).
    struct Slice {
        std::string name;
        int dim = -1; // -1: total
        std::function<bool(const PairRecord&)> keep;
    };
    std::vector<Slice> slices;
    for (int d = 0; d < 3; ++d)
        slices.push_back({"Dim:" + dim_names[static_cast<std::size_t>(d)], d,
                          [](const PairRecord&) { return true; }});
    for (const auto label : {stats::JNDLabel::Mild, stats::JNDLabel::Medium,
                             stats::JNDLabel::Severe})
        slices.push_back({std::string("JND:") + stats::jnd_label_name(label), -1,
                          [&jnd_by_id, label](const PairRecord& r) {
                              const auto it = jnd_by_id.find(r.image_id);
                              return it != jnd_by_id.end() && it->second == label;
                          }});
    for (const char* p : kPerspectiveValues)
        slices.push_back({std::string("Perspective:") + p, -1,
                          [p](const PairRecord& r) { return r.tags.perspective == p; }});
    for (const char* s : kSim2RealValues)
        slices.push_back({std::string("Sim2Real:") + s, -1,
                          [s](const PairRecord& r) { return r.tags.sim2real == s; }});
    for (int level = 1; level <= 5; ++level)
        slices.push_back({"Level:" + std::to_string(level), -1,
                          [level](const PairRecord& r) { return r.level == level; }});

    for (const Slice& s : slices) result.slices.push_back(s.name);
    for (const MetricSeries& m : metrics) {
        result.metric_names.push_back(m.name);
        result.metric_group[m.name] = m.group;
    }

    std::map<std::string, std::map<std::string, Accum>> accum;
    std::set<std::string> warned;

    for (int rep = 0; rep < options.repeats; ++rep) {
        const SplitResult split =
            split_train_val(manifest, options.ratio,
                            options.seed + static_cast<std::uint64_t>(rep),
                            options.pair_level_split);
        for (const MetricSeries& metric : metrics) {
            for (const Slice& slice : slices) {
                std::vector<double> xs, ys;
                for (const PairRecord& row : split.val) {
                    if (!slice.keep(row)) continue;
                    const auto mv = metric.by_id.find(row.image_id);
                    if (mv == metric.by_id.end()) continue;
                    const auto& label_map =
                        slice.dim < 0 ? labels.total
                                      : labels.dims[static_cast<std::size_t>(slice.dim)];
                    const auto lv = label_map.find(row.image_id);
                    if (lv == label_map.end()) continue;
                    xs.push_back(mv->second);
                    ys.push_back(lv->second);
                }
                if (xs.size() < 3) {
                    const std::string key = metric.name + "/" + slice.name;
                    if (warned.insert(key).second)
                        result.warnings.push_back("slice skipped (<3 samples): " + key);
                    continue;
                }
                try {
                    Accum& a = accum[metric.name][slice.name];
                    a.srcc.push_back(stats::srcc(xs, ys));
                    a.krcc.push_back(stats::krcc(xs, ys));
                    a.plcc.push_back(stats::plcc(xs, ys, options.logistic_plcc));
                } catch (const ValidationError& e) {
                    const std::string key = metric.name + "/" + slice.name;
                    if (warned.insert(key).second)
                        result.warnings.push_back("slice skipped (" + std::string(e.what()) +
                                                  "): " + key);
                }
            }
        }
    }

    for (const MetricSeries& metric : metrics)
        for (const Slice& slice : slices) {
            const auto mit = accum.find(metric.name);
            if (mit == accum.end()) continue;
            const auto sit = mit->second.find(slice.name);
            if (sit == mit->second.end()) continue;
            TripleStat t;
            t.srcc = summarize(sit->second.srcc);
            t.krcc = summarize(sit->second.krcc);
            t.plcc = summarize(sit->second.plcc);
            result.values[metric.name][slice.name] = t;
        }
    return result;
}

namespace {

json stat_to_json(const Stat& s) {
    return json{{"mean", s.mean}, {"stddev", s.stddev}, {"reps", s.reps}};
}

Stat stat_from_json(const json& j) {
    Stat s;
    s.mean = j.at("mean").get<double>();
    s.stddev = j.at("stddev").get<double>();
    s.reps = j.at("reps").get<std::size_t>();
    return s;
}

} // namespace

void write_eval_json(const EvalResult& result, const std::string& path) {
    json j;
    j["repeats"] = result.repeats;
    j["slices"] = result.slices;
    j["metrics"] = result.metric_names;
    j["groups"] = result.metric_group;
    j["warnings"] = result.warnings;
    json values = json::object();
    for (const auto& [metric, by_slice] : result.values) {
        json ms = json::object();
        for (const auto& [slice, t] : by_slice)
            ms[slice] = json{{"srcc", stat_to_json(t.srcc)},
                             {"krcc", stat_to_json(t.krcc)},
                             {"plcc", stat_to_json(t.plcc)}};
        values[metric] = ms;
    }
    j["values"] = values;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write evaluation data: " + path);
    out << j.dump(2) << '\n';
}

EvalResult read_eval_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open evaluation data: " + path);
    json j;
    in >> j;
    EvalResult r;
    r.repeats = j.at("repeats").get<int>();
    r.slices = j.at("slices").get<std::vector<std::string>>();
    r.metric_names = j.at("metrics").get<std::vector<std::string>>();
    r.metric_group = j.at("groups").get<std::map<std::string, std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& [metric, ms] : j.at("values").items())
        for (const auto& [slice, t] : ms.items()) {
            TripleStat ts;
            ts.srcc = stat_from_json(t.at("srcc"));
            ts.krcc = stat_from_json(t.at("krcc"));
            ts.plcc = stat_from_json(t.at("plcc"));
            r.values[metric][slice] = ts;
        }
    return r;
}

namespace {

// Group-ordered metric list: groups in first-appearance order, metrics in
// input order within each group.
std::vector<std::pair<std::string, std::vector<std::string>>> grouped_metrics(
    const EvalResult& r) {
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
    for (const std::string& m : r.metric_names) {
        const std::string g = r.metric_group.count(m) ? r.metric_group.at(m) : "";
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& p) { return p.first == g; });
        if (it == groups.end()) {
            groups.push_back({g, {m}});
        } else {
            it->second.push_back(m);
        }
    }
    return groups;
}

enum class Rank { None, Best, Second };

// Rank per (group, slice, indicator) column; ties keep the earlier metric.
std::map<std::string, Rank> column_ranks(const EvalResult& r,
                                         const std::vector<std::string>& metrics,
                                         const std::string& slice, int indicator) {
    std::map<std::string, Rank> ranks;
    std::string best, second;
    double best_v = -2.0, second_v = -2.0;
    for (const std::string& m : metrics) {
        const auto mit = r.values.find(m);
        if (mit == r.values.end()) continue;
        const auto sit = mit->second.find(slice);
        if (sit == mit->second.end()) continue;
        const Stat& s = indicator == 0   ? sit->second.srcc
                        : indicator == 1 ? sit->second.krcc
                                         : sit->second.plcc;
        if (s.reps == 0) continue;
        if (s.mean > best_v) {
            second = best;
            second_v = best_v;
            best = m;
            best_v = s.mean;
        } else if (s.mean > second_v) {
            second = m;
            second_v = s.mean;
        }
    }
    if (!best.empty()) ranks[best] = Rank::Best;
    if (!second.empty()) ranks[second] = Rank::Second;
    return ranks;
}

const Stat* find_stat(const EvalResult& r, const std::string& metric, const std::string& slice,
                      int indicator) {
    const auto mit = r.values.find(metric);
    if (mit == r.values.end()) return nullptr;
    const auto sit = mit->second.find(slice);
    if (sit == mit->second.end()) return nullptr;
    const Stat& s = indicator == 0 ? sit->second.srcc
                    : indicator == 1 ? sit->second.krcc
                                     : sit->second.plcc;
    return s.reps == 0 ? nullptr : &s;
}

} // namespace

void write_report_markdown(const EvalResult& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path);
    const auto groups = grouped_metrics(r);

    out << "# Correlation report\n\n";
    out << "Mean over " << r.repeats
        << " split repetitions. **bold** = best in group, *italic* = second best.\n";

    constexpr std::size_t kChunk = 5; // five slice panels per table
    for (std::size_t start = 0; start < r.slices.size(); start += kChunk) {
        const std::size_t end = std::min(start + kChunk, r.slices.size());
        out << "\n| Group | Metric |";
        for (std::size_t s = start; s < end; ++s)
            out << " " << r.slices[s] << " SRCC | KRCC | PLCC |";
        out << "\n|---|---|";
        for (std::size_t s = start; s < end; ++s) out << "---|---|---|";
        out << "\n";

        for (const auto& [group, metrics] : groups) {
            // Precompute ranks for the chunk's columns.
            std::map<std::string, std::map<std::string, Rank>> ranks; // slice|ind -> metric
            for (std::size_t s = start; s < end; ++s)
                for (int ind = 0; ind < 3; ++ind)
                    ranks[r.slices[s] + "#" + std::to_string(ind)] =
                        column_ranks(r, metrics, r.slices[s], ind);

            for (const std::string& metric : metrics) {
                out << "| " << group << " | " << metric << " |";
                for (std::size_t s = start; s < end; ++s)
                    for (int ind = 0; ind < 3; ++ind) {
                        const Stat* st = find_stat(r, metric, r.slices[s], ind);
                        if (!st) {
                            out << " - |";
                            continue;
                        }
                        const auto& rank_map = ranks[r.slices[s] + "#" + std::to_string(ind)];
                        const auto rit = rank_map.find(metric);
                        const Rank rank = rit == rank_map.end() ? Rank::None : rit->second;
                        const std::string v = format_double(st->mean, 4);
                        if (rank == Rank::Best) out << " **" << v << "** |";
                        else if (rank == Rank::Second) out << " *" << v << "* |";
                        else out << " " << v << " |";
                    }
                out << "\n";
            }
        }
    }
    if (!r.warnings.empty()) {
        out << "\n## Warnings\n\n";
        for (const std::string& w : r.warnings) out << "- " << w << "\n";
    }
}

void write_report_csv(const EvalResult& r, const std::string& path) {
    const auto groups = grouped_metrics(r);
    CsvRow header{"group",     "metric",   "slice",    "srcc",      "srcc_std", "srcc_flag",
                  "krcc",      "krcc_std", "krcc_flag", "plcc",     "plcc_std", "plcc_flag"};
    std::vector<CsvRow> rows;
    for (const auto& [group, metrics] : groups) {
        for (const std::string& slice : r.slices) {
            std::array<std::map<std::string, Rank>, 3> ranks;
            for (int ind = 0; ind < 3; ++ind)
                ranks[static_cast<std::size_t>(ind)] = column_ranks(r, metrics, slice, ind);
            for (const std::string& metric : metrics) {
                CsvRow row{group, metric, slice};
                bool any = false;
                for (int ind = 0; ind < 3; ++ind) {
                    const Stat* st = find_stat(r, metric, slice, ind);
                    if (st) {
                        any = true;
                        row.push_back(format_double(st->mean, 4));
                        row.push_back(format_double(st->stddev, 4));
                        const auto& rank_map = ranks[static_cast<std::size_t>(ind)];
                        const auto rit = rank_map.find(metric);
                        row.push_back(rit == rank_map.end() ? ""
                                      : rit->second == Rank::Best ? "best"
                                                                  : "second");
                    } else {
                        row.push_back("");
                        row.push_back("");
                        row.push_back("");
                    }
                }
                if (any) rows.push_back(std::move(row));
            }
        }
    }
    write_csv(path, header, rows);
}

} // namespace eiqa::harness
