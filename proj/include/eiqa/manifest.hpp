#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eiqa/distortions.hpp"

namespace eiqa::harness {

// Content tags carried by every reference and inherited by its pairs.
struct Tags {
    std::string sim2real = "real";      // real | simulation
    std::string perspective = "third";  // first | third
    std::string main_object = "container";
    std::string background = "table";

    void validate() const;
};

extern const std::array<const char*, 2> kSim2RealValues;
extern const std::array<const char*, 2> kPerspectiveValues;
extern const std::array<const char*, 5> kMainObjectValues;
extern const std::array<const char*, 5> kBackgroundValues;

struct ReferenceEntry {
    std::string path;
    Tags tags;
};

// Reference lists: plain text (one path per line) or JSON-lines rows
// {"path": ..., "tags": {...}}.
std::vector<ReferenceEntry> read_reference_list(const std::string& path);

// One distorted image: the manifest row.
struct PairRecord {
    std::string image_id; // unique
    std::string ref_path;
    std::string dist_path;
    int distortion_id = 0;
    std::string category;
    int level = 0;
    std::uint64_t seed = 0; // per-image corruption seed
    Tags tags;
};

std::string reference_id(const std::string& ref_path); // filename stem

struct GenerateOptions {
    std::uint64_t seed = 0;
    std::string out_dir;        // where distorted images go / would go
    bool write_images = false;  // synthesize files, not just rows
    // Per-type level-parameter overrides (config `dist.<id>.params`).
    std::map<int, std::array<double, 5>> param_overrides;
};

struct GenerateResult {
    std::vector<PairRecord> rows;
    std::vector<std::string> errors; // row-level failures, generation continues
};

// 30 rows per readable reference, one per distortion type, with a level
// drawn from a counter generator keyed by (seed, reference identity,
// distortion id) so the assignment survives input reordering.
GenerateResult generate_pairs(const std::vector<ReferenceEntry>& references,
                              const GenerateOptions& options);

void write_manifest(const std::vector<PairRecord>& rows, const std::string& path);
std::vector<PairRecord> read_manifest(const std::string& path);

struct SplitResult {
    std::vector<PairRecord> train;
    std::vector<PairRecord> val;
};

// Reference-level split: every distortion of a reference lands on the same
// side. Train size = round(ratio * reference count).
SplitResult split_train_val(const std::vector<PairRecord>& manifest, double ratio,
                            std::uint64_t seed, bool pair_level = false);

} // namespace eiqa::harness
