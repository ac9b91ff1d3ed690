#include "svp/imageio.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace svp {

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

RgbImage decode_png(const std::filesystem::path& path) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str()))
        throw IoError("not a decodable PNG: " + path.string() + " (" + png.message + ")");
    png.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw IoError("failed to decode PNG: " + path.string() + " (" + msg + ")");
    }
    RgbImage img(int(png.width), int(png.height));
    for (std::size_t i = 0; i < img.r.size(); ++i) {
        img.r[i] = buf[i * 3 + 0];
        img.g[i] = buf[i * 3 + 1];
        img.b[i] = buf[i * 3 + 2];
    }
    return img;
}

// P5 (gray) / P6 (rgb), binary, maxval <= 255.
RgbImage decode_pnm(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string {
        std::string tok;
        while (pos < bytes.size()) {
            const char c = char(bytes[pos]);
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                if (!tok.empty()) return tok;
                ++pos;
            } else {
                tok += c;
                ++pos;
            }
        }
        return tok;
    };

    const std::string magic = next_token();
    const bool rgb = magic == "P6";
    const std::string ws = next_token(), hs = next_token(), maxs = next_token();
    ++pos;  // single whitespace after maxval
    int w = 0, h = 0, maxv = 0;
    try {
        w = std::stoi(ws);
        h = std::stoi(hs);
        maxv = std::stoi(maxs);
    } catch (const std::exception&) {
        throw IoError("bad PNM header: " + path.string());
    }
    if (w <= 0 || h <= 0 || maxv <= 0 || maxv > 255)
        throw IoError("unsupported PNM (need 8-bit): " + path.string());
    const std::size_t need = std::size_t(w) * h * (rgb ? 3 : 1);
    if (bytes.size() - pos < need)
        throw IoError("truncated PNM: " + path.string());

    RgbImage img(w, h);
    for (std::size_t i = 0; i < std::size_t(w) * h; ++i) {
        if (rgb) {
            img.r[i] = bytes[pos + i * 3 + 0];
            img.g[i] = bytes[pos + i * 3 + 1];
            img.b[i] = bytes[pos + i * 3 + 2];
        } else {
            img.r[i] = img.g[i] = img.b[i] = bytes[pos + i];
        }
    }
    return img;
}

std::uint32_t le32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

// 24-bit uncompressed BI_RGB, either row order.
RgbImage decode_bmp(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 54)
        throw IoError("truncated BMP: " + path.string());
    const std::uint32_t data_off = le32(&bytes[10]);
    const std::int32_t w = std::int32_t(le32(&bytes[18]));
    const std::int32_t h_raw = std::int32_t(le32(&bytes[22]));
    const std::uint16_t bpp = std::uint16_t(bytes[28] | bytes[29] << 8);
    const std::uint32_t compression = le32(&bytes[30]);
    if (bpp != 24 || compression != 0)
        throw IoError("unsupported BMP (need 24-bit uncompressed): " + path.string());
    const bool bottom_up = h_raw > 0;
    const int h = bottom_up ? h_raw : -h_raw;
    if (w <= 0 || h <= 0)
        throw IoError("bad BMP dimensions: " + path.string());
    const std::size_t stride = (std::size_t(w) * 3 + 3) & ~std::size_t(3);
    if (bytes.size() < data_off + stride * h)
        throw IoError("truncated BMP: " + path.string());

    RgbImage img(w, h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = &bytes[data_off + stride * (bottom_up ? h - 1 - y : y)];
        for (int x = 0; x < w; ++x) {
            const std::size_t i = img.index(x, y);
            img.b[i] = row[x * 3 + 0];
            img.g[i] = row[x * 3 + 1];
            img.r[i] = row[x * 3 + 2];
        }
    }
    return img;
}

void write_png_bytes(const std::filesystem::path& path, const std::uint8_t* data, int w, int h,
                     bool rgb) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = png_uint_32(w);
    png.height = png_uint_32(h);
    png.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, data, 0, nullptr))
        throw IoError("failed to write PNG: " + path.string() + " (" + png.message + ")");
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
        bytes[3] == 'G')
        return decode_png(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
        return decode_pnm(path, bytes);
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M')
        return decode_bmp(path, bytes);
    throw IoError("unrecognized image format: " + path.string());
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
    std::vector<std::uint8_t> buf(std::size_t(img.width) * img.height * 3);
    for (std::size_t i = 0; i < img.r.size(); ++i) {
        buf[i * 3 + 0] = img.r[i];
        buf[i * 3 + 1] = img.g[i];
        buf[i * 3 + 2] = img.b[i];
    }
    write_png_bytes(path, buf.data(), img.width, img.height, true);
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
    write_png_bytes(path, img.data.data(), img.width, img.height, false);
}

void write_png(const std::filesystem::path& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> buf(mask.bits.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = mask.bits[i] ? 255 : 0;
    write_png_bytes(path, buf.data(), mask.width, mask.height, false);
}

std::uint64_t hash_file(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace svp
