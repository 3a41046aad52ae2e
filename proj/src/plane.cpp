#include "eiqa/plane.hpp"

namespace eiqa::img {

Plane luma_plane(const ImageBuffer& img) {
    Plane p(img.width, img.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            p.at(x, y) = luma601(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
    return p;
}

Plane channel_plane(const ImageBuffer& img, int c) {
    Plane p(img.width, img.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) p.at(x, y) = img.at(x, y, c);
    return p;
}

std::vector<double> gaussian_taps(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i / sigma) * (i / sigma));
        taps[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : taps) w /= sum;
    return taps;
}

Plane convolve_valid(const Plane& src, const std::vector<double>& taps) {
    const int k = static_cast<int>(taps.size());
    const int ow = src.width - k + 1;
    const int oh = src.height - k + 1;
    Plane tmp(ow, src.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += taps[static_cast<std::size_t>(i)] * src.at(x + i, y);
            tmp.at(x, y) = s;
        }
    Plane out(ow, oh);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += taps[static_cast<std::size_t>(i)] * tmp.at(x, y + i);
            out.at(x, y) = s;
        }
    return out;
}

Plane convolve_same(const Plane& src, const std::vector<double>& taps) {
    const int k = static_cast<int>(taps.size());
    const int r = k / 2;
    const auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    Plane tmp(src.width, src.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i)
                s += taps[static_cast<std::size_t>(i)] *
                     src.at(clampi(x + i - r, 0, src.width - 1), y);
            tmp.at(x, y) = s;
        }
    Plane out(src.width, src.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            double s = 0.0;
            for (int i = 0; i < k; ++i)
                s += taps[static_cast<std::size_t>(i)] *
                     tmp.at(x, clampi(y + i - r, 0, src.height - 1));
            out.at(x, y) = s;
        }
    return out;
}

} // namespace eiqa::img
