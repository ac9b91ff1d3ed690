#include "svp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace svp {

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

void put(RgbImage* img, int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= img->width || y >= img->height) return;
    const std::size_t i = img->index(x, y);
    img->r[i] = c.r;
    img->g[i] = c.g;
    img->b[i] = c.b;
}

void draw_line(RgbImage* img, int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        put(img, x0, y0, c);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void draw_dot(RgbImage* img, int cx, int cy, int radius, Rgb c) {
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) put(img, cx + dx, cy + dy, c);
}

constexpr Rgb kPalette[12] = {
    {230, 60, 60},  {60, 160, 60},   {70, 90, 220},  {220, 160, 40},
    {170, 60, 200}, {40, 190, 190},  {240, 110, 30}, {130, 180, 40},
    {220, 70, 150}, {100, 120, 140}, {90, 60, 30},   {20, 110, 90},
};

}  // namespace

RgbImage plot_pulse(const std::vector<double>& raw, const std::vector<double>& smoothed,
                    const std::vector<Extremum>& extrema) {
    constexpr int kWidth = 960, kHeight = 340, kMargin = 24;
    RgbImage img(kWidth, kHeight);
    std::fill(img.r.begin(), img.r.end(), std::uint8_t(255));
    std::fill(img.g.begin(), img.g.end(), std::uint8_t(255));
    std::fill(img.b.begin(), img.b.end(), std::uint8_t(255));

    const std::size_t n = std::max(raw.size(), smoothed.size());
    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const auto* series : {&raw, &smoothed})
        for (double v : *series) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
    if (hi - lo < 1e-12) {  // flat series: centre it instead of dividing by ~0
        lo -= 1.0;
        hi += 1.0;
    }

    const auto px = [&](std::size_t i) {
        if (n < 2) return kWidth / 2;
        return kMargin + int(std::lround(double(i) / double(n - 1) * (kWidth - 2 * kMargin)));
    };
    const auto py = [&](double v) {
        return kHeight - kMargin -
               int(std::lround((v - lo) / (hi - lo) * (kHeight - 2 * kMargin)));
    };

    const Rgb frame{200, 200, 200};
    draw_line(&img, kMargin, kMargin, kWidth - kMargin, kMargin, frame);
    draw_line(&img, kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin, frame);
    draw_line(&img, kMargin, kMargin, kMargin, kHeight - kMargin, frame);
    draw_line(&img, kWidth - kMargin, kMargin, kWidth - kMargin, kHeight - kMargin, frame);

    const Rgb raw_c{165, 165, 165}, smooth_c{40, 90, 210};
    for (std::size_t i = 0; i + 1 < raw.size(); ++i)
        draw_line(&img, px(i), py(raw[i]), px(i + 1), py(raw[i + 1]), raw_c);
    for (std::size_t i = 0; i + 1 < smoothed.size(); ++i)
        draw_line(&img, px(i), py(smoothed[i]), px(i + 1), py(smoothed[i + 1]), smooth_c);

    for (const Extremum& e : extrema) {
        if (e.index < 0 || std::size_t(e.index) >= smoothed.size()) continue;
        const Rgb c = e.kind == ExtremumKind::Max ? Rgb{210, 40, 40} : Rgb{30, 150, 70};
        draw_dot(&img, px(std::size_t(e.index)), py(smoothed[std::size_t(e.index)]), 3, c);
    }
    return img;
}

RgbImage overlay_centerlines(const RgbImage& base, const std::vector<CenterlinePath>& paths,
                             const BinaryMask* junctions) {
    RgbImage out = base;
    for (const CenterlinePath& path : paths) {
        const Rgb c = kPalette[std::size_t(path.id - 1) % 12];
        for (const Point& p : path.points) put(&out, p.x, p.y, c);
    }
    if (junctions)
        for (int y = 0; y < junctions->height; ++y)
            for (int x = 0; x < junctions->width; ++x)
                if (junctions->at(x, y)) put(&out, x, y, Rgb{255, 255, 255});
    return out;
}

}  // namespace svp
