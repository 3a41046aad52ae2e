#include "eiqa/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "eiqa/errors.hpp"
#include "eiqa/image_io.hpp"
#include "eiqa/rng.hpp"

namespace eiqa::harness {

using nlohmann::json;
namespace fs = std::filesystem;

const std::array<const char*, 2> kSim2RealValues = {"real", "simulation"};
const std::array<const char*, 2> kPerspectiveValues = {"first", "third"};
const std::array<const char*, 5> kMainObjectValues = {"container", "tool", "food", "toy",
                                                      "fabric"};
const std::array<const char*, 5> kBackgroundValues = {"table", "kitchen", "office",
                                                      "workshop", "outdoor"};

namespace {

template <std::size_t N>
void check_tag(const std::string& value, const std::array<const char*, N>& allowed,
               const char* field) {
    for (const char* v : allowed)
        if (value == v) return;
    throw ValidationError(std::string("invalid tag ") + field + ": " + value);
}

Tags tags_from_json(const json& j) {
    Tags t;
    if (j.contains("sim2real")) t.sim2real = j.at("sim2real").get<std::string>();
    if (j.contains("perspective")) t.perspective = j.at("perspective").get<std::string>();
    if (j.contains("main_object")) t.main_object = j.at("main_object").get<std::string>();
    if (j.contains("background")) t.background = j.at("background").get<std::string>();
    t.validate();
    return t;
}

json tags_to_json(const Tags& t) {
    return json{{"sim2real", t.sim2real},
                {"perspective", t.perspective},
                {"main_object", t.main_object},
                {"background", t.background}};
}

} // namespace

void Tags::validate() const {
    check_tag(sim2real, kSim2RealValues, "sim2real");
    check_tag(perspective, kPerspectiveValues, "perspective");
    check_tag(main_object, kMainObjectValues, "main_object");
    check_tag(background, kBackgroundValues, "background");
}

std::vector<ReferenceEntry> read_reference_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reference list: " + path);
    std::vector<ReferenceEntry> refs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ReferenceEntry e;
        if (line.front() == '{') {
            const json j = json::parse(line);
            e.path = j.at("path").get<std::string>();
            if (j.contains("tags")) e.tags = tags_from_json(j.at("tags"));
        } else {
            e.path = line;
        }
        refs.push_back(std::move(e));
    }
    return refs;
}

std::string reference_id(const std::string& ref_path) {
    return fs::path(ref_path).stem().string();
}

GenerateResult generate_pairs(const std::vector<ReferenceEntry>& references,
                              const GenerateOptions& options) {
    if (references.empty()) throw ValidationError("no reference images given");
    if (options.write_images && options.out_dir.empty())
        throw ValidationError("write_images requires an output directory");
    if (options.write_images) fs::create_directories(options.out_dir);

    GenerateResult result;
    result.rows.reserve(references.size() * 30);

    for (const ReferenceEntry& ref : references) {
        ImageBuffer image;
        try {
            ref.tags.validate();
            image = read_png(ref.path);
        } catch (const std::exception& e) {
            result.errors.push_back(ref.path + ": " + e.what());
            continue;
        }

        const std::string ref_id = reference_id(ref.path);
        const std::uint64_t ref_key = rng::fnv1a(ref.path.data(), ref.path.size());

        for (const distort::DistortionSpec& tmpl : distort::distortion_registry()) {
            const int level = rng::uniform_int(options.seed, ref_key,
                                               static_cast<std::uint64_t>(tmpl.id), 1, 5);
            PairRecord row;
            row.distortion_id = tmpl.id;
            row.category = distort::category_name(tmpl.category);
            row.level = level;
            row.seed = rng::hash(options.seed, ref_key, static_cast<std::uint64_t>(tmpl.id));
            row.ref_path = ref.path;
            row.tags = ref.tags;

            // One row per (reference, type), so the id needs no level part;
            // ids stay stable across seeds and the level lives on the row.
            char suffix[16];
            std::snprintf(suffix, sizeof(suffix), "_d%02d", tmpl.id);
            row.image_id = ref_id + suffix;
            row.dist_path =
                (fs::path(options.out_dir.empty() ? fs::path(ref.path).parent_path().string()
                                                  : options.out_dir) /
                 (row.image_id + ".png"))
                    .string();

            if (options.write_images) {
                try {
                    distort::DistortionSpec spec = distort::with_level(tmpl.id, level);
                    const auto ov = options.param_overrides.find(tmpl.id);
                    if (ov != options.param_overrides.end()) spec.params = ov->second;
                    const ImageBuffer distorted =
                        distort::apply_distortion(image, spec, row.seed);
                    write_png(distorted, row.dist_path);
                } catch (const std::exception& e) {
                    result.errors.push_back(row.dist_path + ": " + e.what());
                    continue;
                }
            }
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

void write_manifest(const std::vector<PairRecord>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open manifest for writing: " + path);
    for (const PairRecord& r : rows) {
        json j{{"image_id", r.image_id}, {"ref", r.ref_path},  {"dist", r.dist_path},
               {"id", r.distortion_id},  {"category", r.category}, {"level", r.level},
               {"seed", r.seed},         {"tags", tags_to_json(r.tags)}};
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("error writing manifest: " + path);
}

std::vector<PairRecord> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    std::vector<PairRecord> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            PairRecord r;
            r.image_id = j.at("image_id").get<std::string>();
            r.ref_path = j.at("ref").get<std::string>();
            r.dist_path = j.at("dist").get<std::string>();
            r.distortion_id = j.at("id").get<int>();
            r.category = j.at("category").get<std::string>();
            r.level = j.at("level").get<int>();
            r.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("tags")) r.tags = tags_from_json(j.at("tags"));
            distort::registry_entry(r.distortion_id); // registry closure
            rows.push_back(std::move(r));
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw ValidationError("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

SplitResult split_train_val(const std::vector<PairRecord>& manifest, double ratio,
                            std::uint64_t seed, bool pair_level) {
    if (manifest.empty()) throw ValidationError("cannot split an empty manifest");
    if (ratio < 0.0 || ratio > 1.0) throw ValidationError("split ratio must be in [0,1]");

    const auto shuffled_indices = [&](std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = n; i > 1; --i) { // Fisher-Yates on the counter generator
            const std::size_t j = static_cast<std::size_t>(
                rng::hash(seed, 0xf00d, i) % i);
            std::swap(idx[i - 1], idx[j]);
        }
        return idx;
    };

    SplitResult out;
    if (pair_level) {
        const auto idx = shuffled_indices(manifest.size());
        const auto train_n = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(manifest.size())));
        std::vector<bool> in_train(manifest.size(), false);
        for (std::size_t i = 0; i < train_n && i < idx.size(); ++i) in_train[idx[i]] = true;
        for (std::size_t i = 0; i < manifest.size(); ++i)
            (in_train[i] ? out.train : out.val).push_back(manifest[i]);
        return out;
    }

    // Distinct references in first-appearance order.
    std::vector<std::string> refs;
    std::unordered_set<std::string> seen;
    for (const PairRecord& r : manifest)
        if (seen.insert(r.ref_path).second) refs.push_back(r.ref_path);

    const auto idx = shuffled_indices(refs.size());
    const auto train_n =
        static_cast<std::size_t>(std::llround(ratio * static_cast<double>(refs.size())));
    std::vector<bool> ref_in_train(refs.size(), false);
    for (std::size_t i = 0; i < train_n && i < idx.size(); ++i) ref_in_train[idx[i]] = true;

    std::map<std::string, bool> side;
    for (std::size_t i = 0; i < refs.size(); ++i) side[refs[i]] = ref_in_train[i];
    for (const PairRecord& r : manifest)
        (side.at(r.ref_path) ? out.train : out.val).push_back(r);
    return out;
}

} // namespace eiqa::harness
