#pragma once

// Shared fixtures and deliberately naive reference implementations. The
// oracles here trade speed for obviousness (full window sorts, exhaustive
// scans) so that disagreement with the library points at the library.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "svp/image.hpp"
#include "svp/raster.hpp"

namespace svptest {

inline int clampi(int v, int lo, int hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

// ---- fixtures -------------------------------------------------------------

// Build a mask from rows of '.' and '#' (any other char is an error).
inline svp::BinaryMask mask_art(const std::vector<std::string>& rows) {
    svp::BinaryMask m(int(rows[0].size()), int(rows.size()));
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            m.at(x, y) = rows[std::size_t(y)][std::size_t(x)] == '#' ? 1 : 0;
    return m;
}

inline svp::GrayImage random_gray(int w, int h, std::uint32_t seed) {
    svp::GrayImage img(w, h);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> d(0, 255);
    for (auto& v : img.data) v = std::uint8_t(d(rng));
    return img;
}

inline svp::BinaryMask random_mask(int w, int h, std::uint32_t seed, double fill = 0.4) {
    svp::BinaryMask m(w, h);
    std::mt19937 rng(seed);
    std::bernoulli_distribution d(fill);
    for (auto& b : m.bits) b = d(rng) ? 1 : 0;
    return m;
}

// Organic blob: thresholded blurred noise. Produces connected-ish shapes
// with smooth boundaries, the regime thinning is meant for.
inline svp::BinaryMask random_blob(int w, int h, std::uint32_t seed) {
    svp::GrayImage noise = random_gray(w, h, seed);
    const svp::GrayImage smooth = svp::gaussian_blur(noise, 9);
    svp::BinaryMask m(w, h);
    for (std::size_t i = 0; i < m.bits.size(); ++i) m.bits[i] = smooth.data[i] > 128 ? 1 : 0;
    return m;
}

// ---- reference filters ----------------------------------------------------

inline svp::GrayImage oracle_median(const svp::GrayImage& img, int size) {
    const int r = size / 2;
    svp::GrayImage out(img.width, img.height);
    std::vector<std::uint8_t> window;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            window.clear();
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    window.push_back(img.at(clampi(x + dx, 0, img.width - 1),
                                            clampi(y + dy, 0, img.height - 1)));
            std::sort(window.begin(), window.end());
            out.at(x, y) = window[window.size() / 2];
        }
    return out;
}

inline svp::GrayImage oracle_gaussian(const svp::GrayImage& img, int size) {
    const int r = size / 2;
    const double sigma = 0.3 * ((size - 1) * 0.5 - 1.0) + 0.8;
    std::vector<double> k1(static_cast<std::size_t>(size), 0.0);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - r;
        k1[std::size_t(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += k1[std::size_t(i)];
    }
    for (double& v : k1) v /= sum;

    // Dense 2-D convolution with the outer-product kernel.
    svp::GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    acc += k1[std::size_t(dy + r)] * k1[std::size_t(dx + r)] *
                           img.at(clampi(x + dx, 0, img.width - 1),
                                  clampi(y + dy, 0, img.height - 1));
            out.at(x, y) = std::uint8_t(clampi(int(std::lround(acc)), 0, 255));
        }
    return out;
}

inline svp::BinaryMask oracle_erode(const svp::BinaryMask& m, const svp::StructuringElement& se) {
    svp::BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (const svp::Point& d : se.offsets) {
                const int px = x + d.x, py = y + d.y;
                if (!m.in_bounds(px, py) || !m.at(px, py)) {
                    all = false;
                    break;
                }
            }
            out.at(x, y) = all ? 1 : 0;
        }
    return out;
}

inline svp::BinaryMask oracle_dilate(const svp::BinaryMask& m, const svp::StructuringElement& se) {
    svp::BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool any = false;
            for (const svp::Point& d : se.offsets) {
                const int px = x - d.x, py = y - d.y;
                if (m.in_bounds(px, py) && m.at(px, py)) {
                    any = true;
                    break;
                }
            }
            out.at(x, y) = any ? 1 : 0;
        }
    return out;
}

// Nearest background pixel by exhaustive search; everything outside the
// image counts as background.
inline svp::RealGrid brute_distance(const svp::BinaryMask& m) {
    svp::RealGrid out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(x, y)) {
                out.at(x, y) = 0.0;
                continue;
            }
            // Outside the image counts as background; the nearest outside
            // pixel is the perpendicular drop to the closest border.
            double best =
                1.0 + std::min(std::min(x, y), std::min(m.width - 1 - x, m.height - 1 - y));
            for (int by = 0; by < m.height; ++by)
                for (int bx = 0; bx < m.width; ++bx)
                    if (!m.at(bx, by))
                        best = std::min(best, std::hypot(bx - x, by - y));
            out.at(x, y) = best;
        }
    return out;
}

// Stack-based flood fill, labels assigned in raster discovery order.
inline std::vector<int> flood_components(const svp::BinaryMask& m, int connectivity,
                                         int* count_out) {
    std::vector<int> labels(m.bits.size(), 0);
    int count = 0;
    std::vector<svp::Point> stack;
    for (int sy = 0; sy < m.height; ++sy)
        for (int sx = 0; sx < m.width; ++sx) {
            if (!m.at(sx, sy) || labels[std::size_t(sy) * m.width + sx] != 0) continue;
            ++count;
            stack.push_back({sx, sy});
            labels[std::size_t(sy) * m.width + sx] = count;
            while (!stack.empty()) {
                const svp::Point p = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        if (connectivity == 4 && dx != 0 && dy != 0) continue;
                        const int nx = p.x + dx, ny = p.y + dy;
                        if (!m.in_bounds(nx, ny) || !m.at(nx, ny)) continue;
                        int& l = labels[std::size_t(ny) * m.width + nx];
                        if (l == 0) {
                            l = count;
                            stack.push_back({nx, ny});
                        }
                    }
            }
        }
    *count_out = count;
    return labels;
}

// ---- clustering / geometry oracles ----------------------------------------

inline double sse3(const std::vector<double>& sorted, std::size_t i, std::size_t j) {
    // Clusters [0,i), [i,j), [j,n); returns the total within-cluster SSE.
    double total = 0.0;
    const std::size_t cuts[4] = {0, i, j, sorted.size()};
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (std::size_t k = cuts[c]; k < cuts[c + 1]; ++k) mean += sorted[k];
        mean /= double(cuts[c + 1] - cuts[c]);
        for (std::size_t k = cuts[c]; k < cuts[c + 1]; ++k)
            total += (sorted[k] - mean) * (sorted[k] - mean);
    }
    return total;
}

// Globally optimal 3-cluster SSE; in one dimension the optimum is always a
// pair of cuts in sorted order, so trying every pair is exhaustive.
inline double optimal_sse3(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            best = std::min(best, sse3(values, i, j));
    return best;
}

// SSE of assigning every value to its nearest of the three centroids.
inline double assignment_sse3(const std::vector<double>& values,
                              const std::array<double, 3>& c) {
    double total = 0.0;
    for (double v : values) {
        double best = std::numeric_limits<double>::max();
        for (double ci : c) best = std::min(best, (v - ci) * (v - ci));
        total += best;
    }
    return total;
}

// Orientation of the orthogonal least-squares line through the points,
// found by scanning angles rather than solving the normal equations.
inline double scan_fit_angle(const std::vector<svp::Point>& pts) {
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= double(pts.size());
    my /= double(pts.size());

    const auto residual = [&](double theta) {
        // Sum of squared distances to the line through the centroid at
        // angle theta: the component normal to (cos, sin).
        const double nx = -std::sin(theta), ny = std::cos(theta);
        double s = 0.0;
        for (const auto& p : pts) {
            const double d = (p.x - mx) * nx + (p.y - my) * ny;
            s += d * d;
        }
        return s;
    };

    double best = 0.0, best_r = residual(0.0);
    const int steps = 20000;
    for (int i = 1; i < steps; ++i) {
        const double theta = M_PI * i / steps;
        const double r = residual(theta);
        if (r < best_r) {
            best_r = r;
            best = theta;
        }
    }
    // Golden-section refinement around the winning grid cell.
    double lo = best - M_PI / steps, hi = best + M_PI / steps;
    for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) * 0.382, m2 = lo + (hi - lo) * 0.618;
        if (residual(m1) < residual(m2))
            hi = m2;
        else
            lo = m1;
    }
    double theta = (lo + hi) / 2.0;
    while (theta < 0.0) theta += M_PI;
    while (theta >= M_PI) theta -= M_PI;
    return theta;
}

// Distance between two undirected line angles (both modulo pi).
inline double angle_gap(double a, double b) {
    double d = std::fabs(a - b);
    while (d >= M_PI) d -= M_PI;
    return std::min(d, M_PI - d);
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = double(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= na;
    mb /= na;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

// ---- process / filesystem helpers ------------------------------------------

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "svp-XXXXXX").string();
        if (!mkdtemp(tmpl.data()))
            throw std::runtime_error("mkdtemp failed");
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

// Runs the installed binary with the given already-quoted arguments.
inline CliResult run_cli(const std::string& args) {
    const TempDir scratch;
    const std::string out_file = (scratch / "stdout").string();
    const std::string err_file = (scratch / "stderr").string();
    const std::string cmd =
        std::string(SVPULSE_BIN) + " " + args + " > " + out_file + " 2> " + err_file;
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = read_file(out_file);
    res.err = read_file(err_file);
    return res;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace svptest
