#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eiqa/image.hpp"

namespace eiqa::distort {

enum class Category { Blur, Luminance, Chrominance, Noise, Compression, Spatial, Others };

const char* category_name(Category c);
Category category_from_name(const std::string& name);

// One corruption type. `params` holds the per-level strength constants,
// calibrated once so levels are ordered by objective severity; `level` is
// 0 in registry templates and 1..5 once assigned.
struct DistortionSpec {
    int id = 0;
    std::string name;
    Category category = Category::Others;
    int level = 0;
    std::array<double, 5> params{};

    double param() const; // strength for the assigned level
};

// The 30-type registry. Entries 2, 15, 16 and 25 are pinned identities
// (lens blur, multiplicative noise, Gaussian denoise, block interpolation);
// the rest follow the standard corruption families under the 7-category
// partition.
const std::vector<DistortionSpec>& distortion_registry();

const DistortionSpec& registry_entry(int id);
DistortionSpec with_level(int id, int level);

// Pure function of (image, spec, seed): repeated calls are bit-identical
// and output resolution always equals input resolution.
ImageBuffer apply_distortion(const ImageBuffer& image, const DistortionSpec& spec,
                             std::uint64_t seed);

struct LowLevelFeatures {
    double luminance = 0.0;           // mean luma
    double contrast = 0.0;            // RMS contrast (std of luma)
    double chrominance = 0.0;         // mean chroma magnitude
    double blur = 0.0;                // variance of Laplacian / 255^2, higher = sharper
    double spatial_information = 0.0; // std of Sobel gradient magnitude
};

LowLevelFeatures low_level_features(const ImageBuffer& image);

} // namespace eiqa::distort
