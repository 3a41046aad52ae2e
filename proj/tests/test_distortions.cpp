#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "eiqa/distortions.hpp"
#include "eiqa/serial_ref.hpp"
#include "eiqa/stats.hpp"
#include "test_images.hpp"

using namespace eiqa;
using namespace eiqa::distort;

TEST_CASE("registry shape") {
    const auto& reg = distortion_registry();
    REQUIRE(reg.size() == 30);

    std::set<int> ids;
    std::set<Category> cats;
    for (const auto& d : reg) {
        CHECK(ids.insert(d.id).second);
        cats.insert(d.category);
        CHECK(d.level == 0);
    }
    CHECK(ids.size() == 30);
    CHECK(*ids.begin() == 1);
    CHECK(*ids.rbegin() == 30);
    CHECK(cats.size() == 7);

    SUBCASE("figure-indexed anchors") {
        CHECK(registry_entry(2).name == "lens blur");
        CHECK(registry_entry(2).category == Category::Blur);
        CHECK(registry_entry(15).name == "multiplicative noise");
        CHECK(registry_entry(16).name == "gaussian denoise");
        CHECK(registry_entry(25).name == "block interpolation");
    }
    SUBCASE("named types are present") {
        std::set<std::string> names;
        for (const auto& d : reg) names.insert(d.name);
        for (const char* required :
             {"mean brighten", "mean darken", "maximum brighten", "maximum darken",
              "color quantization", "grayscale quantization", "sharpness change",
              "contrast change", "lost macro block", "jpeg compression"})
            CHECK(names.count(required) == 1);
    }
    SUBCASE("unknown ids are rejected") {
        CHECK_THROWS_AS(registry_entry(0), ValidationError);
        CHECK_THROWS_AS(registry_entry(31), ValidationError);
        CHECK_THROWS_AS(with_level(1, 6), ValidationError);
    }
}

TEST_CASE("determinism: same seed is bit-identical") {
    const auto ref = fixtures::scene(48, 36, 3);
    for (int id = 1; id <= 30; ++id) {
        const DistortionSpec spec = with_level(id, 4);
        const ImageBuffer a = apply_distortion(ref, spec, 12345);
        const ImageBuffer b = apply_distortion(ref, spec, 12345);
        CAPTURE(id);
        CHECK(a.data == b.data);
    }
}

TEST_CASE("stochastic types respond to the seed") {
    const auto ref = fixtures::scene(48, 36, 3);
    for (int id : {13, 14, 15, 17, 23, 24, 25, 27, 30}) {
        const DistortionSpec spec = with_level(id, 5);
        const ImageBuffer a = apply_distortion(ref, spec, 1);
        const ImageBuffer b = apply_distortion(ref, spec, 2);
        CAPTURE(id);
        CHECK(a.data != b.data);
    }
}

TEST_CASE("shape preservation for all 30 types and 5 levels") {
    const auto ref = fixtures::scene(41, 29, 7); // non-square, odd sizes
    for (int id = 1; id <= 30; ++id)
        for (int level = 1; level <= 5; ++level) {
            const ImageBuffer out = apply_distortion(ref, with_level(id, level), 9);
            CAPTURE(id);
            CAPTURE(level);
            REQUIRE(out.width == ref.width);
            REQUIRE(out.height == ref.height);
        }
}

TEST_CASE("degenerate 1x1 image is processed without panic") {
    const auto tiny = fixtures::uniform(1, 1, 120, 90, 200);
    for (int id = 1; id <= 30; ++id) {
        const ImageBuffer out = apply_distortion(tiny, with_level(id, 5), 5);
        CAPTURE(id);
        CHECK(out.width == 1);
        CHECK(out.height == 1);
    }
}

TEST_CASE("noise variance grows with the level") {
    const auto ref = fixtures::uniform(64, 64, 128, 128, 128);
    const ImageBuffer l1 = apply_distortion(ref, with_level(13, 1), 42);
    const ImageBuffer l5 = apply_distortion(ref, with_level(13, 5), 42);
    // Independent variance route: direct moment sums over the differences.
    const double v1 = serial::diff_variance(l1, ref);
    const double v5 = serial::diff_variance(l5, ref);
    CHECK(v5 > v1);
    CHECK(v1 > 0.0);
}

TEST_CASE("jpeg psnr is non-increasing in the level") {
    const std::array<ImageBuffer, 3> refs = {fixtures::scene(64, 48, 1),
                                             fixtures::scene(64, 48, 2),
                                             fixtures::gradient(64, 48)};
    double prev = 1e9;
    for (int level = 1; level <= 5; ++level) {
        double mean = 0.0;
        for (const auto& ref : refs)
            mean += stats::psnr(ref, apply_distortion(ref, with_level(19, level), 3));
        mean /= 3.0;
        CHECK(mean <= prev + 1e-9);
        prev = mean;
    }
}

TEST_CASE("blur, noise and compression families are monotone in PSNR") {
    const std::array<ImageBuffer, 3> refs = {fixtures::scene(64, 48, 11),
                                             fixtures::scene(64, 48, 12),
                                             fixtures::checkerboard(64, 48, 5)};
    for (const auto& d : distortion_registry()) {
        if (d.category != Category::Blur && d.category != Category::Noise &&
            d.category != Category::Compression)
            continue;
        double prev = 1e9;
        for (int level = 1; level <= 5; ++level) {
            double mean = 0.0;
            for (const auto& ref : refs)
                mean += stats::psnr(ref, apply_distortion(ref, with_level(d.id, level), 77));
            mean /= 3.0;
            CAPTURE(d.id);
            CAPTURE(level);
            CHECK(mean <= prev + 1e-9);
            prev = mean;
        }
    }
}

TEST_CASE("low-level features") {
    SUBCASE("uniform image: contrast and spatial information are zero") {
        const auto f = low_level_features(fixtures::uniform(32, 32, 90, 90, 90));
        CHECK(f.contrast == doctest::Approx(0.0));
        CHECK(f.spatial_information == doctest::Approx(0.0));
        CHECK(f.blur == doctest::Approx(0.0));
        CHECK(f.luminance == doctest::Approx(90.0));
    }
    SUBCASE("achromatic image has zero chrominance") {
        const auto f = low_level_features(fixtures::checkerboard(32, 32, 4));
        CHECK(f.chrominance == doctest::Approx(0.0));
    }
    SUBCASE("colorful image has positive chrominance") {
        const auto f = low_level_features(fixtures::scene(32, 32, 5));
        CHECK(f.chrominance > 1.0);
    }
    SUBCASE("blur measure strictly decreases through the blur levels") {
        const auto board = fixtures::checkerboard(64, 64, 4);
        double prev_impl = low_level_features(board).blur;
        double prev_oracle = serial::laplacian_variance(board);
        CHECK(prev_impl == doctest::Approx(prev_oracle).epsilon(1e-12));
        for (int level = 1; level <= 5; ++level) {
            const ImageBuffer blurred = apply_distortion(board, with_level(1, level), 0);
            const double impl = low_level_features(blurred).blur;
            const double oracle = serial::laplacian_variance(blurred);
            CHECK(impl == doctest::Approx(oracle).epsilon(1e-12));
            CHECK(impl < prev_impl);
            CHECK(oracle < prev_oracle);
            prev_impl = impl;
            prev_oracle = oracle;
        }
    }
    SUBCASE("all features finite and non-negative on fixtures") {
        for (std::uint64_t s = 0; s < 4; ++s) {
            const auto f = low_level_features(fixtures::scene(40, 30, s));
            for (double v : {f.luminance, f.contrast, f.chrominance, f.blur,
                             f.spatial_information}) {
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
            }
        }
    }
}
