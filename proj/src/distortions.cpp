#include "eiqa/distortions.hpp"

#include <algorithm>
#include <cmath>

#include "eiqa/errors.hpp"
#include "eiqa/image_io.hpp"
#include "eiqa/plane.hpp"
#include "eiqa/rng.hpp"

namespace eiqa::distort {

const char* category_name(Category c) {
    switch (c) {
    case Category::Blur: return "Blur";
    case Category::Luminance: return "Luminance";
    case Category::Chrominance: return "Chrominance";
    case Category::Noise: return "Noise";
    case Category::Compression: return "Compression";
    case Category::Spatial: return "Spatial";
    case Category::Others: return "Others";
    }
    return "?";
}

Category category_from_name(const std::string& name) {
    for (Category c : {Category::Blur, Category::Luminance, Category::Chrominance,
                       Category::Noise, Category::Compression, Category::Spatial,
                       Category::Others})
        if (name == category_name(c)) return c;
    throw ValidationError("unknown distortion category: " + name);
}

double DistortionSpec::param() const {
    if (level < 1 || level > 5) throw ValidationError("distortion level must be in [1,5]");
    return params[static_cast<std::size_t>(level - 1)];
}

const std::vector<DistortionSpec>& distortion_registry() {
    static const std::vector<DistortionSpec> registry = {
        {1, "gaussian blur", Category::Blur, 0, {0.8, 1.6, 2.8, 4.2, 6.0}},
        {2, "lens blur", Category::Blur, 0, {1, 2, 4, 6, 9}},
        {3, "motion blur", Category::Blur, 0, {3, 5, 9, 15, 23}},
        {4, "zoom blur", Category::Blur, 0, {0.01, 0.02, 0.04, 0.07, 0.11}},
        {5, "mean brighten", Category::Luminance, 0, {8, 16, 28, 44, 64}},
        {6, "mean darken", Category::Luminance, 0, {8, 16, 28, 44, 64}},
        {7, "maximum brighten", Category::Luminance, 0, {0.75, 0.58, 0.43, 0.30, 0.20}},
        {8, "maximum darken", Category::Luminance, 0, {1.33, 1.72, 2.33, 3.33, 5.0}},
        {9, "color shift", Category::Chrominance, 0, {6, 12, 20, 30, 44}},
        {10, "color saturation", Category::Chrominance, 0, {0.75, 0.55, 0.35, 0.18, 0.05}},
        {11, "color diffusion", Category::Chrominance, 0, {2, 4, 7, 11, 16}},
        {12, "hue rotation", Category::Chrominance, 0, {10, 20, 35, 55, 80}},
        {13, "additive gaussian noise", Category::Noise, 0, {4, 8, 14, 24, 40}},
        {14, "impulse noise", Category::Noise, 0, {0.005, 0.015, 0.04, 0.09, 0.18}},
        {15, "multiplicative noise", Category::Noise, 0, {0.05, 0.10, 0.18, 0.30, 0.50}},
        {16, "gaussian denoise", Category::Noise, 0, {1.0, 1.8, 2.8, 4.0, 5.5}},
        {17, "uniform noise", Category::Noise, 0, {6, 12, 22, 36, 58}},
        {18, "median denoise", Category::Noise, 0, {3, 5, 7, 9, 11}},
        {19, "jpeg compression", Category::Compression, 0, {60, 35, 18, 10, 5}},
        {20, "chroma subsampling", Category::Compression, 0, {2, 4, 8, 16, 32}},
        {21, "color quantization", Category::Compression, 0, {16, 10, 7, 5, 3}},
        {22, "grayscale quantization", Category::Compression, 0, {24, 16, 10, 6, 4}},
        {23, "lost macro block", Category::Spatial, 0, {0.02, 0.05, 0.10, 0.17, 0.28}},
        {24, "jitter", Category::Spatial, 0, {1, 2, 3, 5, 8}},
        {25, "block interpolation", Category::Spatial, 0, {0.02, 0.05, 0.10, 0.17, 0.28}},
        {26, "pixelate", Category::Spatial, 0, {2, 3, 5, 8, 13}},
        {27, "masking", Category::Spatial, 0, {1, 2, 4, 6, 9}},
        {28, "sharpness change", Category::Others, 0, {0.6, 1.2, 2.2, 3.8, 6.0}},
        {29, "contrast change", Category::Others, 0, {0.82, 0.66, 0.50, 0.36, 0.24}},
        {30, "elastic warp", Category::Others, 0, {1, 2, 4, 7, 11}},
    };
    return registry;
}

const DistortionSpec& registry_entry(int id) {
    const auto& reg = distortion_registry();
    if (id < 1 || id > static_cast<int>(reg.size()))
        throw ValidationError("unsupported distortion id: " + std::to_string(id));
    return reg[static_cast<std::size_t>(id - 1)];
}

DistortionSpec with_level(int id, int level) {
    if (level < 1 || level > 5) throw ValidationError("distortion level must be in [1,5]");
    DistortionSpec spec = registry_entry(id);
    spec.level = level;
    return spec;
}

namespace {

using img::Plane;

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double bilinear(const Plane& p, double x, double y) {
    const int x0 = clampi(static_cast<int>(std::floor(x)), 0, p.width - 1);
    const int y0 = clampi(static_cast<int>(std::floor(y)), 0, p.height - 1);
    const int x1 = clampi(x0 + 1, 0, p.width - 1);
    const int y1 = clampi(y0 + 1, 0, p.height - 1);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double fy = std::clamp(y - y0, 0.0, 1.0);
    const double top = p.at(x0, y0) * (1 - fx) + p.at(x1, y0) * fx;
    const double bot = p.at(x0, y1) * (1 - fx) + p.at(x1, y1) * fx;
    return top * (1 - fy) + bot * fy;
}

std::array<Plane, 3> split_channels(const ImageBuffer& im) {
    return {img::channel_plane(im, 0), img::channel_plane(im, 1), img::channel_plane(im, 2)};
}

ImageBuffer merge_channels(const std::array<Plane, 3>& ch) {
    ImageBuffer out(ch[0].width, ch[0].height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = clamp_u8(ch[static_cast<std::size_t>(c)].at(x, y));
    return out;
}

ImageBuffer separable_blur(const ImageBuffer& im, double sigma) {
    const auto taps = img::gaussian_taps(sigma);
    std::array<Plane, 3> ch = split_channels(im);
    for (Plane& p : ch) p = img::convolve_same(p, taps);
    return merge_channels(ch);
}

// Direct 2-D kernel convolution, clamp-to-edge.
ImageBuffer kernel2d_convolve(const ImageBuffer& im, const std::vector<double>& k, int kw,
                              int kh) {
    const int rx = kw / 2, ry = kh / 2;
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int j = 0; j < kh; ++j)
                    for (int i = 0; i < kw; ++i) {
                        const double w = k[static_cast<std::size_t>(j) * kw + i];
                        if (w == 0.0) continue;
                        s += w * im.at_clamped(x + i - rx, y + j - ry, c);
                    }
                out.at(x, y, c) = clamp_u8(s);
            }
    return out;
}

ImageBuffer disk_blur(const ImageBuffer& im, int radius) {
    const int d = 2 * radius + 1;
    std::vector<double> k(static_cast<std::size_t>(d) * d, 0.0);
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i)
            if (i * i + j * j <= radius * radius + radius / 2) {
                k[static_cast<std::size_t>(j + radius) * d + (i + radius)] = 1.0;
                sum += 1.0;
            }
    for (double& v : k) v /= sum;
    return kernel2d_convolve(im, k, d, d);
}

ImageBuffer motion_blur(const ImageBuffer& im, int length) {
    const double angle = 15.0 * M_PI / 180.0;
    const int d = length | 1;
    const int r = d / 2;
    std::vector<double> k(static_cast<std::size_t>(d) * d, 0.0);
    double sum = 0.0;
    for (int t = -r; t <= r; ++t) {
        const int i = clampi(static_cast<int>(std::lround(t * std::cos(angle))), -r, r);
        const int j = clampi(static_cast<int>(std::lround(t * std::sin(angle))), -r, r);
        double& cell = k[static_cast<std::size_t>(j + r) * d + (i + r)];
        if (cell == 0.0) {
            cell = 1.0;
            sum += 1.0;
        }
    }
    for (double& v : k) v /= sum;
    return kernel2d_convolve(im, k, d, d);
}

ImageBuffer zoom_blur(const ImageBuffer& im, double strength) {
    const std::array<Plane, 3> ch = split_channels(im);
    const double cx = (im.width - 1) / 2.0, cy = (im.height - 1) / 2.0;
    constexpr int kTaps = 8;
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            double acc[3] = {0, 0, 0};
            for (int t = 0; t < kTaps; ++t) {
                const double scale = 1.0 + strength * t / (kTaps - 1);
                const double sx = cx + (x - cx) / scale;
                const double sy = cy + (y - cy) / scale;
                for (int c = 0; c < 3; ++c)
                    acc[c] += bilinear(ch[static_cast<std::size_t>(c)], sx, sy);
            }
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp_u8(acc[c] / kTaps);
        }
    return out;
}

template <typename Fn>
ImageBuffer map_pixels(const ImageBuffer& im, Fn&& fn) {
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            double r = im.at(x, y, 0), g = im.at(x, y, 1), b = im.at(x, y, 2);
            fn(static_cast<std::size_t>(y) * im.width + x, r, g, b);
            out.at(x, y, 0) = clamp_u8(r);
            out.at(x, y, 1) = clamp_u8(g);
            out.at(x, y, 2) = clamp_u8(b);
        }
    return out;
}

template <typename Fn>
ImageBuffer map_ycbcr(const ImageBuffer& im, Fn&& fn) {
    return map_pixels(im, [&](std::size_t idx, double& r, double& g, double& b) {
        double y = luma601(r, g, b);
        double cb = cb601(r, g, b);
        double cr = cr601(r, g, b);
        fn(idx, y, cb, cr);
        ycbcr_to_rgb601(y, cb, cr, r, g, b);
    });
}

ImageBuffer chroma_planes_op(const ImageBuffer& im, double sigma, int subsample) {
    Plane yp(im.width, im.height), cbp(im.width, im.height), crp(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            const double r = im.at(x, y, 0), g = im.at(x, y, 1), b = im.at(x, y, 2);
            yp.at(x, y) = luma601(r, g, b);
            cbp.at(x, y) = cb601(r, g, b);
            crp.at(x, y) = cr601(r, g, b);
        }
    if (sigma > 0.0) {
        const auto taps = img::gaussian_taps(sigma);
        cbp = img::convolve_same(cbp, taps);
        crp = img::convolve_same(crp, taps);
    }
    if (subsample > 1) {
        for (Plane* p : {&cbp, &crp}) {
            Plane sub = *p;
#pragma omp parallel for schedule(static)
            for (int y = 0; y < sub.height; ++y)
                for (int x = 0; x < sub.width; ++x) {
                    const int bx = (x / subsample) * subsample;
                    const int by = (y / subsample) * subsample;
                    double s = 0.0;
                    int n = 0;
                    for (int j = by; j < std::min(by + subsample, sub.height); ++j)
                        for (int i = bx; i < std::min(bx + subsample, sub.width); ++i) {
                            s += p->at(i, j);
                            ++n;
                        }
                    sub.at(x, y) = s / n;
                }
            *p = sub;
        }
    }
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            double r, g, b;
            ycbcr_to_rgb601(yp.at(x, y), cbp.at(x, y), crp.at(x, y), r, g, b);
            out.at(x, y, 0) = clamp_u8(r);
            out.at(x, y, 1) = clamp_u8(g);
            out.at(x, y, 2) = clamp_u8(b);
        }
    return out;
}

ImageBuffer median_filter(const ImageBuffer& im, int window) {
    const int r = window / 2;
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y) {
        std::vector<std::uint8_t> values;
        values.reserve(static_cast<std::size_t>(window) * window);
        for (int x = 0; x < im.width; ++x)
            for (int c = 0; c < 3; ++c) {
                values.clear();
                for (int j = -r; j <= r; ++j)
                    for (int i = -r; i <= r; ++i)
                        values.push_back(im.at_clamped(x + i, y + j, c));
                auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
                std::nth_element(values.begin(), mid, values.end());
                out.at(x, y, c) = *mid;
            }
    }
    return out;
}

constexpr int kBlockSize = 16;

// Deterministic block selection keyed by (seed, stream, block index).
bool block_selected(std::uint64_t seed, std::uint64_t stream, int bx, int by, int blocks_x,
                    double fraction) {
    const std::uint64_t idx = static_cast<std::uint64_t>(by) * blocks_x + bx;
    return rng::uniform01(seed, stream, idx) < fraction;
}

ImageBuffer lost_macro_block(const ImageBuffer& im, double fraction, std::uint64_t seed,
                             std::uint64_t stream) {
    ImageBuffer out = im;
    const int bw = (im.width + kBlockSize - 1) / kBlockSize;
    const int bh = (im.height + kBlockSize - 1) / kBlockSize;
#pragma omp parallel for schedule(static)
    for (int by = 0; by < bh; ++by)
        for (int bx = 0; bx < bw; ++bx) {
            if (!block_selected(seed, stream, bx, by, bw, fraction)) continue;
            for (int y = by * kBlockSize; y < std::min((by + 1) * kBlockSize, im.height); ++y)
                for (int x = bx * kBlockSize; x < std::min((bx + 1) * kBlockSize, im.width); ++x)
                    for (int c = 0; c < 3; ++c) out.at(x, y, c) = 0;
        }
    return out;
}

// Error-concealment style fill: blend the pixels just outside the block
// edges across the block interior.
ImageBuffer block_interpolation(const ImageBuffer& im, double fraction, std::uint64_t seed,
                                std::uint64_t stream) {
    ImageBuffer out = im;
    const int bw = (im.width + kBlockSize - 1) / kBlockSize;
    const int bh = (im.height + kBlockSize - 1) / kBlockSize;
#pragma omp parallel for schedule(static)
    for (int by = 0; by < bh; ++by)
        for (int bx = 0; bx < bw; ++bx) {
            if (!block_selected(seed, stream, bx, by, bw, fraction)) continue;
            const int x0 = bx * kBlockSize, x1 = std::min(x0 + kBlockSize, im.width);
            const int y0 = by * kBlockSize, y1 = std::min(y0 + kBlockSize, im.height);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    const double wl = 1.0 / (x - x0 + 1);
                    const double wr = 1.0 / (x1 - x);
                    const double wt = 1.0 / (y - y0 + 1);
                    const double wb = 1.0 / (y1 - y);
                    for (int c = 0; c < 3; ++c) {
                        const double left = im.at_clamped(x0 - 1, y, c);
                        const double right = im.at_clamped(x1, y, c);
                        const double top = im.at_clamped(x, y0 - 1, c);
                        const double bottom = im.at_clamped(x, y1, c);
                        out.at(x, y, c) = clamp_u8(
                            (wl * left + wr * right + wt * top + wb * bottom) /
                            (wl + wr + wt + wb));
                    }
                }
        }
    return out;
}

ImageBuffer jitter(const ImageBuffer& im, int radius, std::uint64_t seed, std::uint64_t stream) {
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            const std::uint64_t pidx = static_cast<std::uint64_t>(y) * im.width + x;
            const int dx = rng::uniform_int(seed, stream, pidx * 2, -radius, radius);
            const int dy = rng::uniform_int(seed, stream, pidx * 2 + 1, -radius, radius);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = im.at_clamped(x + dx, y + dy, c);
        }
    return out;
}

ImageBuffer pixelate(const ImageBuffer& im, int factor) {
    ImageBuffer out(im.width, im.height);
    const int bw = (im.width + factor - 1) / factor;
    const int bh = (im.height + factor - 1) / factor;
#pragma omp parallel for schedule(static)
    for (int by = 0; by < bh; ++by)
        for (int bx = 0; bx < bw; ++bx) {
            const int x0 = bx * factor, x1 = std::min(x0 + factor, im.width);
            const int y0 = by * factor, y1 = std::min(y0 + factor, im.height);
            double acc[3] = {0, 0, 0};
            int n = 0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    for (int c = 0; c < 3; ++c) acc[c] += im.at(x, y, c);
                    ++n;
                }
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    for (int c = 0; c < 3; ++c)
                        out.at(x, y, c) = clamp_u8(acc[c] / n);
        }
    return out;
}

ImageBuffer masking(const ImageBuffer& im, int count, std::uint64_t seed, std::uint64_t stream) {
    ImageBuffer out = im;
    const int size = std::max(1, std::min(im.width, im.height) / 6);
    for (int k = 0; k < count; ++k) {
        const int cx = static_cast<int>(rng::uniform01(seed, stream, 2 * static_cast<std::uint64_t>(k)) * im.width);
        const int cy = static_cast<int>(rng::uniform01(seed, stream, 2 * static_cast<std::uint64_t>(k) + 1) * im.height);
        for (int y = std::max(0, cy - size / 2); y < std::min(im.height, cy + (size + 1) / 2); ++y)
            for (int x = std::max(0, cx - size / 2); x < std::min(im.width, cx + (size + 1) / 2);
                 ++x)
                for (int c = 0; c < 3; ++c) out.at(x, y, c) = 128;
    }
    return out;
}

ImageBuffer sharpness_change(const ImageBuffer& im, double amount) {
    const ImageBuffer blurred = separable_blur(im, 1.5);
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x)
            for (int c = 0; c < 3; ++c) {
                const double v = im.at(x, y, c);
                const double b = blurred.at(x, y, c);
                out.at(x, y, c) = clamp_u8(v + amount * (v - b));
            }
    return out;
}

ImageBuffer elastic_warp(const ImageBuffer& im, double amplitude, std::uint64_t seed,
                         std::uint64_t stream) {
    constexpr int kCell = 24;
    const int gw = im.width / kCell + 2;
    const int gh = im.height / kCell + 2;
    Plane dx(gw, gh), dy(gw, gh);
    for (int j = 0; j < gh; ++j)
        for (int i = 0; i < gw; ++i) {
            const std::uint64_t gidx = static_cast<std::uint64_t>(j) * gw + i;
            dx.at(i, j) = (2.0 * rng::uniform01(seed, stream, gidx * 2) - 1.0) * amplitude;
            dy.at(i, j) = (2.0 * rng::uniform01(seed, stream, gidx * 2 + 1) - 1.0) * amplitude;
        }
    const std::array<Plane, 3> ch = split_channels(im);
    ImageBuffer out(im.width, im.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            const double gx = static_cast<double>(x) / kCell;
            const double gy = static_cast<double>(y) / kCell;
            const double ox = bilinear(dx, gx, gy);
            const double oy = bilinear(dy, gx, gy);
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) =
                    clamp_u8(bilinear(ch[static_cast<std::size_t>(c)], x + ox, y + oy));
        }
    return out;
}

} // namespace

ImageBuffer apply_distortion(const ImageBuffer& image, const DistortionSpec& spec,
                             std::uint64_t seed) {
    image.validate();
    registry_entry(spec.id); // unsupported id check
    if (spec.level < 1 || spec.level > 5)
        throw ValidationError("distortion level must be in [1,5]");
    const double p = spec.param();
    const std::uint64_t stream = static_cast<std::uint64_t>(spec.id) * 131 +
                                 static_cast<std::uint64_t>(spec.level);

    switch (spec.id) {
    case 1: return separable_blur(image, p);
    case 2: return disk_blur(image, static_cast<int>(p));
    case 3: return motion_blur(image, static_cast<int>(p));
    case 4: return zoom_blur(image, p);
    case 5:
        return map_pixels(image, [&](std::size_t, double& r, double& g, double& b) {
            r += p; g += p; b += p;
        });
    case 6:
        return map_pixels(image, [&](std::size_t, double& r, double& g, double& b) {
            r -= p; g -= p; b -= p;
        });
    case 7:
    case 8:
        return map_pixels(image, [&](std::size_t, double& r, double& g, double& b) {
            r = 255.0 * std::pow(r / 255.0, p);
            g = 255.0 * std::pow(g / 255.0, p);
            b = 255.0 * std::pow(b / 255.0, p);
        });
    case 9:
        return map_ycbcr(image, [&](std::size_t, double&, double& cb, double& cr) {
            cb += p;
            cr -= p;
        });
    case 10:
        return map_ycbcr(image, [&](std::size_t, double&, double& cb, double& cr) {
            cb *= p;
            cr *= p;
        });
    case 11: return chroma_planes_op(image, p, 0);
    case 12: {
        const double a = p * M_PI / 180.0;
        const double ca = std::cos(a), sa = std::sin(a);
        return map_ycbcr(image, [&](std::size_t, double&, double& cb, double& cr) {
            const double nb = ca * cb - sa * cr;
            const double nr = sa * cb + ca * cr;
            cb = nb;
            cr = nr;
        });
    }
    case 13:
        return map_pixels(image, [&](std::size_t idx, double& r, double& g, double& b) {
            r += p * rng::gaussian(seed, stream, idx * 3);
            g += p * rng::gaussian(seed, stream, idx * 3 + 1);
            b += p * rng::gaussian(seed, stream, idx * 3 + 2);
        });
    case 14:
        return map_pixels(image, [&](std::size_t idx, double& r, double& g, double& b) {
            const double u = rng::uniform01(seed, stream, idx);
            if (u < p / 2.0) { r = g = b = 0.0; }
            else if (u < p) { r = g = b = 255.0; }
        });
    case 15:
        return map_pixels(image, [&](std::size_t idx, double& r, double& g, double& b) {
            r *= 1.0 + p * rng::gaussian(seed, stream, idx * 3);
            g *= 1.0 + p * rng::gaussian(seed, stream, idx * 3 + 1);
            b *= 1.0 + p * rng::gaussian(seed, stream, idx * 3 + 2);
        });
    case 16: {
        // An oversmoothing denoiser: light noise injection, then the
        // level-scaled Gaussian smoothing that "removes" it.
        const ImageBuffer noisy =
            map_pixels(image, [&](std::size_t idx, double& r, double& g, double& b) {
                r += 6.0 * rng::gaussian(seed, stream, idx * 3);
                g += 6.0 * rng::gaussian(seed, stream, idx * 3 + 1);
                b += 6.0 * rng::gaussian(seed, stream, idx * 3 + 2);
            });
        return separable_blur(noisy, p);
    }
    case 17:
        return map_pixels(image, [&](std::size_t idx, double& r, double& g, double& b) {
            r += p * (2.0 * rng::uniform01(seed, stream, idx * 3) - 1.0);
            g += p * (2.0 * rng::uniform01(seed, stream, idx * 3 + 1) - 1.0);
            b += p * (2.0 * rng::uniform01(seed, stream, idx * 3 + 2) - 1.0);
        });
    case 18: return median_filter(image, static_cast<int>(p));
    case 19: return decode_jpeg(encode_jpeg(image, static_cast<int>(p)));
    case 20: return chroma_planes_op(image, 0.0, static_cast<int>(p));
    case 21: {
        const double levels = p;
        return map_pixels(image, [&](std::size_t, double& r, double& g, double& b) {
            const auto q = [&](double v) {
                return std::round(std::round(v / 255.0 * (levels - 1)) / (levels - 1) * 255.0);
            };
            r = q(r); g = q(g); b = q(b);
        });
    }
    case 22: {
        const double levels = p;
        return map_ycbcr(image, [&](std::size_t, double& y, double&, double&) {
            y = std::round(std::round(y / 255.0 * (levels - 1)) / (levels - 1) * 255.0);
        });
    }
    case 23: return lost_macro_block(image, p, seed, stream);
    case 24: return jitter(image, static_cast<int>(p), seed, stream);
    case 25: return block_interpolation(image, p, seed, stream);
    case 26: return pixelate(image, static_cast<int>(p));
    case 27: return masking(image, static_cast<int>(p), seed, stream);
    case 28: return sharpness_change(image, p);
    case 29:
        return map_pixels(image, [&](std::size_t, double& r, double& g, double& b) {
            r = 128.0 + p * (r - 128.0);
            g = 128.0 + p * (g - 128.0);
            b = 128.0 + p * (b - 128.0);
        });
    case 30: return elastic_warp(image, p, seed, stream);
    default: throw ValidationError("unsupported distortion id: " + std::to_string(spec.id));
    }
}

LowLevelFeatures low_level_features(const ImageBuffer& image) {
    image.validate();
    const int w = image.width, h = image.height;
    const Plane y = img::luma_plane(image);

    LowLevelFeatures f;

    // Mean/variance of luma and mean chroma magnitude, row-partial sums so
    // the reduction order is fixed.
    std::vector<double> luma_sum(static_cast<std::size_t>(h), 0.0);
    std::vector<double> luma_sq(static_cast<std::size_t>(h), 0.0);
    std::vector<double> chroma_sum(static_cast<std::size_t>(h), 0.0);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r) {
        double ls = 0, lq = 0, cs = 0;
        for (int x = 0; x < w; ++x) {
            const double l = y.at(x, r);
            ls += l;
            lq += l * l;
            const double cb = cb601(image.at(x, r, 0), image.at(x, r, 1), image.at(x, r, 2));
            const double cr = cr601(image.at(x, r, 0), image.at(x, r, 1), image.at(x, r, 2));
            cs += std::sqrt(cb * cb + cr * cr);
        }
        luma_sum[static_cast<std::size_t>(r)] = ls;
        luma_sq[static_cast<std::size_t>(r)] = lq;
        chroma_sum[static_cast<std::size_t>(r)] = cs;
    }
    const double n = static_cast<double>(image.pixel_count());
    double sum = 0, sq = 0, chroma = 0;
    for (int r = 0; r < h; ++r) {
        sum += luma_sum[static_cast<std::size_t>(r)];
        sq += luma_sq[static_cast<std::size_t>(r)];
        chroma += chroma_sum[static_cast<std::size_t>(r)];
    }
    f.luminance = sum / n;
    f.contrast = std::sqrt(std::max(0.0, sq / n - f.luminance * f.luminance));
    f.chrominance = chroma / n;

    // Interior-pixel Laplacian variance and Sobel-magnitude deviation.
    if (w >= 3 && h >= 3) {
        std::vector<double> lap_s(static_cast<std::size_t>(h), 0.0);
        std::vector<double> lap_q(static_cast<std::size_t>(h), 0.0);
        std::vector<double> grad_s(static_cast<std::size_t>(h), 0.0);
        std::vector<double> grad_q(static_cast<std::size_t>(h), 0.0);
#pragma omp parallel for schedule(static)
        for (int r = 1; r < h - 1; ++r) {
            double ls = 0, lq = 0, gs = 0, gq = 0;
            for (int x = 1; x < w - 1; ++x) {
                const double lap = y.at(x - 1, r) + y.at(x + 1, r) + y.at(x, r - 1) +
                                   y.at(x, r + 1) - 4.0 * y.at(x, r);
                ls += lap;
                lq += lap * lap;
                const double gx = (y.at(x + 1, r - 1) + 2.0 * y.at(x + 1, r) + y.at(x + 1, r + 1)) -
                                  (y.at(x - 1, r - 1) + 2.0 * y.at(x - 1, r) + y.at(x - 1, r + 1));
                const double gy = (y.at(x - 1, r + 1) + 2.0 * y.at(x, r + 1) + y.at(x + 1, r + 1)) -
                                  (y.at(x - 1, r - 1) + 2.0 * y.at(x, r - 1) + y.at(x + 1, r - 1));
                const double mag = std::hypot(gx, gy);
                gs += mag;
                gq += mag * mag;
            }
            lap_s[static_cast<std::size_t>(r)] = ls;
            lap_q[static_cast<std::size_t>(r)] = lq;
            grad_s[static_cast<std::size_t>(r)] = gs;
            grad_q[static_cast<std::size_t>(r)] = gq;
        }
        const double m = static_cast<double>(w - 2) * (h - 2);
        double lsum = 0, lsq = 0, gsum = 0, gsq = 0;
        for (int r = 0; r < h; ++r) {
            lsum += lap_s[static_cast<std::size_t>(r)];
            lsq += lap_q[static_cast<std::size_t>(r)];
            gsum += grad_s[static_cast<std::size_t>(r)];
            gsq += grad_q[static_cast<std::size_t>(r)];
        }
        const double lap_mean = lsum / m;
        f.blur = std::max(0.0, lsq / m - lap_mean * lap_mean) / (255.0 * 255.0);
        const double g_mean = gsum / m;
        f.spatial_information = std::sqrt(std::max(0.0, gsq / m - g_mean * g_mean));
    }
    return f;
}

} // namespace eiqa::distort
