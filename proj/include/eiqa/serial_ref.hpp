#pragma once

#include "eiqa/image.hpp"
#include "eiqa/plane.hpp"

namespace eiqa::serial {

// Plain single-threaded transcriptions of the metric and filter formulas.
// They are the reference route the parallel kernels are tested against and
// the baseline the benchmark compares with; keep them naive on purpose.

double psnr(const ImageBuffer& ref, const ImageBuffer& dist);
double ssim(const ImageBuffer& ref, const ImageBuffer& dist);

// Direct 2-D Gaussian convolution on a plane, clamp-to-edge.
img::Plane gaussian_blur(const img::Plane& src, double sigma);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};
Moments luma_moments(const ImageBuffer& img);

// Population variance of (a - b) over all samples.
double diff_variance(const ImageBuffer& a, const ImageBuffer& b);

// Variance of the 4-neighbour Laplacian of luma, normalized by 255^2.
double laplacian_variance(const ImageBuffer& img);

} // namespace eiqa::serial
