#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "svp/errors.hpp"

namespace svp {

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(PointF a, PointF b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance(Point a, PointF b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// 8-bit single-channel image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw InvalidParameter("image dimensions must be positive");
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
};

// 0/1 mask with the same layout as GrayImage.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw InvalidParameter("mask dimensions must be positive");
        bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
    }

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint8_t b : bits) n += b;
        return n;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// Real-valued grid (distance maps, intermediate filter results).
struct RealGrid {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    RealGrid() = default;
    RealGrid(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw InvalidParameter("grid dimensions must be positive");
        v.assign(static_cast<std::size_t>(w) * h, fill);
    }

    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

// 8-bit RGB image stored as three planes.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> r, g, b;

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw InvalidParameter("image dimensions must be positive");
        const std::size_t n = static_cast<std::size_t>(w) * h;
        r.assign(n, fill);
        g.assign(n, fill);
        b.assign(n, fill);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
};

}  // namespace svp
