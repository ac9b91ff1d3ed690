#pragma once

#include <cstdint>
#include <filesystem>

#include "svp/image.hpp"

namespace svp {

// Decodes PNG, PPM (P5/P6, maxval 255) or BMP (24-bit uncompressed),
// picked by magic bytes. Grayscale sources replicate into all channels.
// Anything unreadable or truncated raises IoError.
RgbImage read_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& img);
void write_png(const std::filesystem::path& path, const GrayImage& img);
void write_png(const std::filesystem::path& path, const BinaryMask& mask);  // 0/255

// FNV-1a over the file bytes; used for run manifests.
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace svp
