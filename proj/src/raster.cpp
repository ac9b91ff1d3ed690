#include "svp/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

namespace svp {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// All-octant Bresenham from (0,0) to (ex,ey), endpoints included.
std::vector<Point> bresenham_from_origin(int ex, int ey) {
    std::vector<Point> pts;
    int x = 0, y = 0;
    const int dx = std::abs(ex), dy = -std::abs(ey);
    const int sx = ex > 0 ? 1 : -1, sy = ey > 0 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        pts.push_back({x, y});
        if (x == ex && y == ey) break;
        const int e2 = 2 * err;
        if (e2 >= dy) { err += dy; x += sx; }
        if (e2 <= dx) { err += dx; y += sy; }
    }
    return pts;
}

}  // namespace

StructuringElement StructuringElement::ellipse(int a, int b) {
    if (a < 0 || b < 0)
        throw InvalidParameter("ellipse semi-axes must be non-negative");
    StructuringElement se;
    for (int dy = -b; dy <= b; ++dy) {
        for (int dx = -a; dx <= a; ++dx) {
            const double tx = a == 0 ? (dx == 0 ? 0.0 : 2.0) : double(dx) / a;
            const double ty = b == 0 ? (dy == 0 ? 0.0 : 2.0) : double(dy) / b;
            if (tx * tx + ty * ty <= 1.0) se.offsets.push_back({dx, dy});
        }
    }
    return se;
}

StructuringElement StructuringElement::line(int length, double angle_deg) {
    if (length < 1)
        throw InvalidParameter("line length must be >= 1");
    StructuringElement se;
    const int h = (length - 1) / 2;
    if (h == 0) {
        se.offsets.push_back({0, 0});
        return se;
    }
    const double rad = angle_deg * std::acos(-1.0) / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    // Scale so the dominant axis reaches exactly h: the half-line then has
    // h+1 pixels and the mirrored whole 2h+1.
    const double m = std::max(std::abs(c), std::abs(s));
    const int ex = int(std::lround(h * c / m));
    const int ey = int(std::lround(h * s / m));
    for (const Point& p : bresenham_from_origin(ex, ey)) {
        se.offsets.push_back(p);
        if (p.x != 0 || p.y != 0) se.offsets.push_back({-p.x, -p.y});
    }
    return se;
}

GrayImage median_filter(const GrayImage& img, int size) {
    if (size < 3 || size % 2 == 0)
        throw InvalidParameter("median window size must be odd and >= 3");
    const int w = img.width, h = img.height, r = size / 2;
    GrayImage out(w, h);

    // Huang sliding histogram over a virtually edge-replicated image: the
    // window at x covers virtual columns x-r..x+r, each clamped into range,
    // which keeps the slide incremental even at the borders.
    const int n = size * size;
    const int half = n / 2 + 1;
    std::array<int, 256> hist;
    for (int y = 0; y < h; ++y) {
        hist.fill(0);
        int med = 0, below = 0;  // elements strictly below med
        auto insert = [&](std::uint8_t v) {
            ++hist[v];
            if (v < med) ++below;
        };
        auto erase = [&](std::uint8_t v) {
            --hist[v];
            if (v < med) --below;
        };
        for (int vy = -r; vy <= r; ++vy) {
            const int yy = clampi(y + vy, 0, h - 1);
            for (int vx = -r; vx <= r; ++vx)
                insert(img.at(clampi(vx, 0, w - 1), yy));
        }
        for (int x = 0; x < w; ++x) {
            if (x > 0) {
                const int xout = clampi(x - 1 - r, 0, w - 1);
                const int xin = clampi(x + r, 0, w - 1);
                for (int vy = -r; vy <= r; ++vy) {
                    const int yy = clampi(y + vy, 0, h - 1);
                    erase(img.at(xout, yy));
                    insert(img.at(xin, yy));
                }
            }
            while (below >= half) { --med; below -= hist[med]; }
            while (below + hist[med] < half) { below += hist[med]; ++med; }
            out.at(x, y) = std::uint8_t(med);
        }
    }
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, int size) {
    if (size < 3 || size % 2 == 0)
        throw InvalidParameter("gaussian window size must be odd and >= 3");
    const int w = img.width, h = img.height, r = size / 2;
    const double sigma = 0.3 * ((size - 1) * 0.5 - 1.0) + 0.8;

    std::vector<double> k(size);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - r;
        k[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;

    // Horizontal pass into a float buffer, then vertical, edges replicated.
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += k[i + r] * img.at(clampi(x + i, 0, w - 1), y);
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += k[i + r] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
            out.at(x, y) = std::uint8_t(clampi(int(std::lround(acc)), 0, 255));
        }
    }
    return out;
}

GrayImage clahe(const GrayImage& img, int grid, double clip_limit) {
    if (grid < 1)
        throw InvalidParameter("clahe grid must be >= 1");
    if (clip_limit <= 0.0)
        throw InvalidParameter("clahe clip limit must be positive");
    const int w = img.width, h = img.height;
    if (grid > w || grid > h)
        throw InvalidParameter("clahe grid larger than image");

    // Tile i spans [i*extent/grid, (i+1)*extent/grid): exactly grid tiles
    // per axis, edge tiles a pixel smaller when it does not divide evenly.
    auto tile_lo = [&](int i, int extent) { return i * extent / grid; };
    auto tile_hi = [&](int i, int extent) { return (i + 1) * extent / grid; };

    std::vector<std::array<double, 256>> maps(static_cast<std::size_t>(grid) * grid);
    for (int tj = 0; tj < grid; ++tj) {
        for (int ti = 0; ti < grid; ++ti) {
            const int x0 = tile_lo(ti, w), x1 = tile_hi(ti, w);
            const int y0 = tile_lo(tj, h), y1 = tile_hi(tj, h);
            std::array<double, 256> hist{};
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    hist[img.at(x, y)] += 1.0;
            const double area = double(x1 - x0) * (y1 - y0);
            const double clip = clip_limit * area / 256.0;
            double excess = 0.0;
            for (double& b : hist) {
                if (b > clip) { excess += b - clip; b = clip; }
            }
            const double add = excess / 256.0;
            auto& map = maps[static_cast<std::size_t>(tj) * grid + ti];
            double cdf = 0.0;
            for (int v = 0; v < 256; ++v) {
                cdf += hist[v] + add;
                map[v] = 255.0 * cdf / area;
            }
        }
    }

    // Per-axis blend setup: index of the left/top tile and its weight.
    auto blend_axis = [&](int extent, std::vector<int>& i0, std::vector<double>& wt) {
        i0.resize(extent);
        wt.resize(extent);
        std::vector<double> centers(grid);
        for (int i = 0; i < grid; ++i)
            centers[i] = (tile_lo(i, extent) + tile_hi(i, extent) - 1) / 2.0;
        for (int p = 0; p < extent; ++p) {
            if (p <= centers[0]) { i0[p] = 0; wt[p] = 0.0; }
            else if (p >= centers[grid - 1]) { i0[p] = grid - 1; wt[p] = 0.0; }
            else {
                int i = 0;
                while (centers[i + 1] < p) ++i;
                i0[p] = i;
                wt[p] = (p - centers[i]) / (centers[i + 1] - centers[i]);
            }
        }
    };
    std::vector<int> ix, iy;
    std::vector<double> wx, wy;
    blend_axis(w, ix, wx);
    blend_axis(h, iy, wy);

    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const int j0 = iy[y];
        const int j1 = std::min(j0 + 1, grid - 1);
        const double fy = wy[y];
        for (int x = 0; x < w; ++x) {
            const int i0 = ix[x];
            const int i1 = std::min(i0 + 1, grid - 1);
            const double fx = wx[x];
            const std::uint8_t v = img.at(x, y);
            const double top = (1.0 - fx) * maps[std::size_t(j0) * grid + i0][v] +
                               fx * maps[std::size_t(j0) * grid + i1][v];
            const double bot = (1.0 - fx) * maps[std::size_t(j1) * grid + i0][v] +
                               fx * maps[std::size_t(j1) * grid + i1][v];
            const double m = (1.0 - fy) * top + fy * bot;
            out.at(x, y) = std::uint8_t(clampi(int(std::lround(m)), 0, 255));
        }
    }
    return out;
}

BinaryMask morphology(const BinaryMask& mask, MorphOp op, const StructuringElement& se) {
    const int w = mask.width, h = mask.height;
    auto erode = [&](const BinaryMask& m) {
        BinaryMask out(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                std::uint8_t keep = 1;
                for (const Point& d : se.offsets) {
                    const int px = x + d.x, py = y + d.y;
                    if (!m.in_bounds(px, py) || !m.at(px, py)) { keep = 0; break; }
                }
                out.at(x, y) = keep;
            }
        }
        return out;
    };
    auto dilate = [&](const BinaryMask& m) {
        BinaryMask out(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                std::uint8_t hit = 0;
                for (const Point& d : se.offsets) {
                    const int px = x - d.x, py = y - d.y;
                    if (m.in_bounds(px, py) && m.at(px, py)) { hit = 1; break; }
                }
                out.at(x, y) = hit;
            }
        }
        return out;
    };
    switch (op) {
        case MorphOp::Erode: return erode(mask);
        case MorphOp::Dilate: return dilate(mask);
        case MorphOp::Close: return erode(dilate(mask));
    }
    throw InvalidParameter("unknown morphology op");
}

RealGrid distance_transform(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    // Work on a grid padded with one ring of background so the outside of
    // the image counts as distance-0 source.
    const int pw = w + 2, ph = h + 2;
    const double kInf = 1e20;

    // Column pass: squared distance to the nearest 0 within the column.
    // The padded top/bottom rows guarantee a finite result everywhere.
    std::vector<double> colsq(static_cast<std::size_t>(pw) * ph);
    for (int x = 0; x < pw; ++x) {
        int last_zero = 0;  // padded row 0 is background
        for (int y = 0; y < ph; ++y) {
            const bool fg = x >= 1 && x <= w && y >= 1 && y <= h && mask.at(x - 1, y - 1);
            if (!fg) last_zero = y;
            const double d = y - last_zero;
            colsq[std::size_t(y) * pw + x] = fg ? d * d : 0.0;
        }
        int next_zero = ph - 1;
        for (int y = ph - 1; y >= 0; --y) {
            const bool fg = x >= 1 && x <= w && y >= 1 && y <= h && mask.at(x - 1, y - 1);
            if (!fg) next_zero = y;
            const double d = next_zero - y;
            auto& cell = colsq[std::size_t(y) * pw + x];
            if (fg) cell = std::min(cell, d * d);
        }
    }

    // Row pass: lower envelope of parabolas (Felzenszwalb-Huttenlocher).
    RealGrid out(w, h);
    std::vector<int> v(pw);
    std::vector<double> z(pw + 1), f(pw), d(pw);
    for (int y = 1; y <= h; ++y) {
        for (int x = 0; x < pw; ++x) f[x] = colsq[std::size_t(y) * pw + x];
        int k = 0;
        v[0] = 0;
        z[0] = -kInf;
        z[1] = kInf;
        for (int q = 1; q < pw; ++q) {
            double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                       (2.0 * q - 2.0 * v[k]);
            while (s <= z[k]) {
                --k;
                s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                    (2.0 * q - 2.0 * v[k]);
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = kInf;
        }
        k = 0;
        for (int q = 0; q < pw; ++q) {
            while (z[k + 1] < q) ++k;
            const double dq = q - v[k];
            d[q] = dq * dq + f[v[k]];
        }
        for (int x = 1; x <= w; ++x)
            out.at(x - 1, y - 1) = mask.at(x - 1, y - 1) ? std::sqrt(d[x]) : 0.0;
    }
    return out;
}

ComponentLabels connected_components(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw InvalidParameter("connectivity must be 4 or 8");
    const int w = mask.width, h = mask.height;
    ComponentLabels cl;
    cl.width = w;
    cl.height = h;
    cl.labels.assign(static_cast<std::size_t>(w) * h, 0);

    static const int dx8[] = {0, 1, 0, -1, 1, 1, -1, -1};
    static const int dy8[] = {-1, 0, 1, 0, -1, 1, 1, -1};
    const int nn = connectivity == 4 ? 4 : 8;

    std::deque<Point> queue;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || cl.labels[std::size_t(y) * w + x]) continue;
            const std::int32_t label = ++cl.count;
            std::int64_t area = 0;
            queue.push_back({x, y});
            cl.labels[std::size_t(y) * w + x] = label;
            while (!queue.empty()) {
                const Point p = queue.front();
                queue.pop_front();
                ++area;
                for (int i = 0; i < nn; ++i) {
                    const int px = p.x + dx8[i], py = p.y + dy8[i];
                    if (px < 0 || py < 0 || px >= w || py >= h) continue;
                    auto& l = cl.labels[std::size_t(py) * w + px];
                    if (mask.at(px, py) && !l) {
                        l = label;
                        queue.push_back({px, py});
                    }
                }
            }
            cl.areas.push_back(area);
        }
    }
    return cl;
}

double bilinear_sample(const GrayImage& img, double x, double y) {
    if (!(x >= 0.0 && y >= 0.0 && x <= img.width - 1 && y <= img.height - 1))
        throw OutOfRange("bilinear sample outside image");
    const int x0 = int(x), y0 = int(y);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0, fy = y - y0;
    return (1 - fx) * (1 - fy) * img.at(x0, y0) + fx * (1 - fy) * img.at(x1, y0) +
           (1 - fx) * fy * img.at(x0, y1) + fx * fy * img.at(x1, y1);
}

BinaryMask threshold_greater(const GrayImage& img, int t) {
    BinaryMask out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.bits[i] = img.data[i] > t ? 1 : 0;
    return out;
}

}  // namespace svp
