#pragma once

#include <cmath>
#include <vector>

#include "eiqa/image.hpp"

namespace eiqa::img {

// Single-channel double-precision raster used by the metric and filter
// kernels.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    Plane() = default;
    Plane(int w, int h) : width(w), height(h), v(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

Plane luma_plane(const ImageBuffer& img);
Plane channel_plane(const ImageBuffer& img, int c);

// Normalized 1-D Gaussian taps, radius ceil(3 sigma).
std::vector<double> gaussian_taps(double sigma);

// Valid-region separable convolution (no padding): output shrinks by
// taps.size()-1 in each dimension.
Plane convolve_valid(const Plane& src, const std::vector<double>& taps);

// Clamp-to-edge separable convolution, output size preserved.
Plane convolve_same(const Plane& src, const std::vector<double>& taps);

} // namespace eiqa::img
