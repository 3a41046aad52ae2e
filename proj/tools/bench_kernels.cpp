// Times the OpenMP kernels against their serial reference twins.
//
//   bench_kernels [size] [reps]      (defaults: 512, 5)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "eiqa/distortions.hpp"
#include "eiqa/image.hpp"
#include "eiqa/plane.hpp"
#include "eiqa/rng.hpp"
#include "eiqa/serial_ref.hpp"
#include "eiqa/stats.hpp"

using namespace eiqa;

namespace {

ImageBuffer make_scene(int n, std::uint64_t seed) {
    ImageBuffer img(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = static_cast<std::uint8_t>(
                    (x * (c + 2) + y * 3 + static_cast<int>(rng::hash(seed, c,
                        static_cast<std::uint64_t>(y) * n + x) % 37)) & 0xff);
    return img;
}

template <typename Fn>
double time_ms(int reps, Fn&& fn) {
    double best = 1e18;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

volatile double g_sink = 0.0;

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 512;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 5;

    const ImageBuffer a = make_scene(n, 1);
    const ImageBuffer b = make_scene(n, 2);
    const img::Plane plane = img::luma_plane(a);

    std::printf("image %dx%d, best of %d reps, %d OpenMP thread(s)\n\n", n, n, reps,
                omp_get_max_threads());
    std::printf("%-22s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

    const auto row = [&](const char* name, double serial_ms, double parallel_ms) {
        std::printf("%-22s %12.2f %12.2f %8.2fx\n", name, serial_ms, parallel_ms,
                    serial_ms / parallel_ms);
    };

    row("psnr",
        time_ms(reps, [&] { g_sink = serial::psnr(a, b); }),
        time_ms(reps, [&] { g_sink = stats::psnr(a, b); }));

    row("ssim",
        time_ms(reps, [&] { g_sink = serial::ssim(a, b); }),
        time_ms(reps, [&] { g_sink = stats::ssim(a, b); }));

    row("gaussian blur s=2.8",
        time_ms(reps, [&] { g_sink = serial::gaussian_blur(plane, 2.8).at(0, 0); }),
        time_ms(reps, [&] {
            g_sink = img::convolve_same(plane, img::gaussian_taps(2.8)).at(0, 0);
        }));

    row("low-level features",
        time_ms(reps,
                [&] {
                    const auto m = serial::luma_moments(a);
                    g_sink = m.mean + m.variance + serial::laplacian_variance(a);
                }),
        time_ms(reps, [&] {
            const auto f = distort::low_level_features(a);
            g_sink = f.luminance + f.contrast + f.blur;
        }));

    row("median filter 7x7",
        time_ms(reps,
                [&] {
                    // Serial route: same kernel forced onto one thread.
                    ImageBuffer out;
                    const int saved = omp_get_max_threads();
                    omp_set_num_threads(1);
                    out = distort::apply_distortion(a, distort::with_level(18, 3), 0);
                    omp_set_num_threads(saved);
                    g_sink = out.at(0, 0, 0);
                }),
        time_ms(reps, [&] {
            g_sink = distort::apply_distortion(a, distort::with_level(18, 3), 0).at(0, 0, 0);
        }));

    return 0;
}
