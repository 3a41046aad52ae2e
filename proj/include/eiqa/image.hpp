#pragma once

#include <cstdint>
#include <vector>

#include "eiqa/errors.hpp"

namespace eiqa {

// 8-bit sRGB raster, row-major, 3 interleaved channels.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    static constexpr int channels = 3;
    std::vector<std::uint8_t> data;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * channels, fill) {
        if (w < 1 || h < 1) throw ValidationError("image dimensions must be >= 1");
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t sample_count() const { return pixel_count() * channels; }

    std::uint8_t& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    // Clamp-to-edge sample, safe for any (x, y).
    std::uint8_t at_clamped(int x, int y, int c) const {
        if (x < 0) x = 0;
        if (x >= width) x = width - 1;
        if (y < 0) y = 0;
        if (y >= height) y = height - 1;
        return at(x, y, c);
    }

    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height;
    }

    void validate() const {
        if (width < 1 || height < 1) throw ValidationError("image dimensions must be >= 1");
        if (data.size() != sample_count())
            throw ValidationError("image data length does not match width*height*3");
    }
};

inline std::uint8_t clamp_u8(double v) {
    if (v <= 0.0) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(v + 0.5);
}

// ITU-R BT.601 luma from 8-bit sRGB samples.
inline double luma601(double r, double g, double b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

// BT.601 chroma, centered at 0.
inline double cb601(double r, double g, double b) {
    return -0.168736 * r - 0.331264 * g + 0.5 * b;
}
inline double cr601(double r, double g, double b) {
    return 0.5 * r - 0.418688 * g - 0.081312 * b;
}

inline void ycbcr_to_rgb601(double y, double cb, double cr, double& r, double& g, double& b) {
    r = y + 1.402 * cr;
    g = y - 0.344136 * cb - 0.714136 * cr;
    b = y + 1.772 * cb;
}

} // namespace eiqa
