#include "eiqa/serial_ref.hpp"

#include <cmath>

#include "eiqa/errors.hpp"

namespace eiqa::serial {

double psnr(const ImageBuffer& ref, const ImageBuffer& dist) {
    if (!ref.same_shape(dist)) throw ValidationError("psnr: image dimensions differ");
    double sse = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        const double d = static_cast<double>(ref.data[i]) - dist.data[i];
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(ref.sample_count());
    if (mse == 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const ImageBuffer& ref, const ImageBuffer& dist) {
    if (!ref.same_shape(dist)) throw ValidationError("ssim: image dimensions differ");
    if (ref.width < 11 || ref.height < 11)
        throw ValidationError("ssim: image smaller than the 11x11 window");

    // 2-D window built directly, normalized as a whole.
    double w2d[11][11];
    double wsum = 0.0;
    for (int j = -5; j <= 5; ++j)
        for (int i = -5; i <= 5; ++i) {
            const double w = std::exp(-(i * i + j * j) / (2.0 * 1.5 * 1.5));
            w2d[j + 5][i + 5] = w;
            wsum += w;
        }
    for (auto& row : w2d)
        for (double& w : row) w /= wsum;

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    double total = 0.0;
    long count = 0;
    for (int cy = 5; cy < ref.height - 5; ++cy) {
        for (int cx = 5; cx < ref.width - 5; ++cx) {
            double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
            for (int j = -5; j <= 5; ++j)
                for (int i = -5; i <= 5; ++i) {
                    const double w = w2d[j + 5][i + 5];
                    const double a = luma601(ref.at(cx + i, cy + j, 0), ref.at(cx + i, cy + j, 1),
                                             ref.at(cx + i, cy + j, 2));
                    const double b = luma601(dist.at(cx + i, cy + j, 0),
                                             dist.at(cx + i, cy + j, 1),
                                             dist.at(cx + i, cy + j, 2));
                    mx += w * a;
                    my += w * b;
                    mxx += w * a * a;
                    myy += w * b * b;
                    mxy += w * a * b;
                }
            const double vx = mxx - mx * mx;
            const double vy = myy - my * my;
            const double cxy = mxy - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

img::Plane gaussian_blur(const img::Plane& src, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> w(static_cast<std::size_t>(2 * radius + 1) *
                          static_cast<std::size_t>(2 * radius + 1));
    double wsum = 0.0;
    for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i) {
            const double v = std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>(j + radius) * (2 * radius + 1) +
              static_cast<std::size_t>(i + radius)] = v;
            wsum += v;
        }
    for (double& v : w) v /= wsum;

    const auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    img::Plane out(src.width, src.height);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            double s = 0.0;
            for (int j = -radius; j <= radius; ++j)
                for (int i = -radius; i <= radius; ++i)
                    s += w[static_cast<std::size_t>(j + radius) * (2 * radius + 1) +
                           static_cast<std::size_t>(i + radius)] *
                         src.at(clampi(x + i, 0, src.width - 1), clampi(y + j, 0, src.height - 1));
            out.at(x, y) = s;
        }
    return out;
}

Moments luma_moments(const ImageBuffer& img) {
    double sum = 0.0, sum2 = 0.0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double l = luma601(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
            sum += l;
            sum2 += l * l;
        }
    const double n = static_cast<double>(img.pixel_count());
    Moments m;
    m.mean = sum / n;
    m.variance = std::max(0.0, sum2 / n - m.mean * m.mean);
    return m;
}

double diff_variance(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) throw ValidationError("diff_variance: image dimensions differ");
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        sum += d;
        sum2 += d * d;
    }
    const double n = static_cast<double>(a.data.size());
    const double mean = sum / n;
    return std::max(0.0, sum2 / n - mean * mean);
}

double laplacian_variance(const ImageBuffer& img) {
    double sum = 0.0, sum2 = 0.0;
    long count = 0;
    for (int y = 1; y < img.height - 1; ++y)
        for (int x = 1; x < img.width - 1; ++x) {
            const auto luma = [&](int xx, int yy) {
                return luma601(img.at(xx, yy, 0), img.at(xx, yy, 1), img.at(xx, yy, 2));
            };
            const double lap = luma(x - 1, y) + luma(x + 1, y) + luma(x, y - 1) +
                               luma(x, y + 1) - 4.0 * luma(x, y);
            sum += lap;
            sum2 += lap * lap;
            ++count;
        }
    if (count == 0) return 0.0;
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    return std::max(0.0, (sum2 / n - mean * mean)) / (255.0 * 255.0);
}

} // namespace eiqa::serial
