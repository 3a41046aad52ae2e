#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eiqa/image.hpp"

namespace eiqa {

// PNG is the lossless interchange format; JPEG exists only as the in-memory
// codec behind the JPEG-compression distortion.

ImageBuffer read_png(const std::string& path);
void write_png(const ImageBuffer& img, const std::string& path);

std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img, int quality);
ImageBuffer decode_jpeg(const std::vector<std::uint8_t>& bytes);

} // namespace eiqa
