#include "svp/caliper.hpp"

#include <algorithm>
#include <cmath>

#include "svp/raster.hpp"

namespace svp {

namespace {

constexpr int kTangentWindow = 6;

inline int assign3(double v, const std::array<double, 3>& c) {
    int best = 0;
    double bd = std::abs(v - c[0]);
    for (int i = 1; i < 3; ++i) {
        const double d = std::abs(v - c[i]);
        if (d < bd) { bd = d; best = i; }  // strict: ties go to the lower index
    }
    return best;
}

}  // namespace

double tangent_at(const CenterlinePath& path, int i) {
    const int n = int(path.points.size());
    if (n < 2)
        throw DegeneratePath("path too short for a tangent");
    // Slide a six-point window; near the ends it clamps rather than
    // shrinking so the fit always sees as many points as possible.
    int lo = i - (kTangentWindow / 2 - 1);
    lo = std::clamp(lo, 0, std::max(0, n - kTangentWindow));
    const int hi = std::min(n - 1, lo + kTangentWindow - 1);

    double mx = 0, my = 0;
    const int m = hi - lo + 1;
    for (int j = lo; j <= hi; ++j) {
        mx += path.points[j].x;
        my += path.points[j].y;
    }
    mx /= m;
    my /= m;
    double sxx = 0, syy = 0, sxy = 0;
    for (int j = lo; j <= hi; ++j) {
        const double dx = path.points[j].x - mx, dy = path.points[j].y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // Principal axis of the scatter; total least squares, not y-on-x.
    double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    const double pi = std::acos(-1.0);
    if (theta < 0) theta += pi;
    if (theta >= pi) theta -= pi;
    return theta;
}

ProfileStack build_profile_stack(const GrayImage& img, const CenterlinePath& path,
                                 double max_diameter, double normal_factor) {
    if (max_diameter <= 0)
        throw InvalidParameter("max_diameter must be positive");
    int rows = int(std::ceil(normal_factor * max_diameter));
    if (rows % 2 == 0) ++rows;
    if (rows < 3) rows = 3;

    ProfileStack stack;
    stack.rows = rows;
    stack.cols = int(path.points.size());
    stack.values.assign(std::size_t(rows) * stack.cols, 0.0);
    stack.valid.assign(stack.values.size(), 0);
    stack.col_valid.assign(stack.cols, 0);

    const int c = stack.center_row();
    for (int j = 0; j < stack.cols; ++j) {
        const double theta = tangent_at(path, j);
        const double nx = -std::sin(theta), ny = std::cos(theta);
        const Point p = path.points[j];
        for (int rix = 0; rix < rows; ++rix) {
            const double off = rix - c;
            const double sx = p.x + off * nx, sy = p.y + off * ny;
            if (sx >= 0 && sy >= 0 && sx <= img.width - 1 && sy <= img.height - 1) {
                stack.at(rix, j) = bilinear_sample(img, sx, sy);
                stack.valid[std::size_t(rix) * stack.cols + j] = 1;
                stack.col_valid[j] = 1;
            }
        }
    }

    // Impute misses with their row's mean so they sit at background level
    // rather than zero (which would read as the darkest cluster).
    double global_sum = 0;
    std::size_t global_n = 0;
    for (std::size_t i = 0; i < stack.values.size(); ++i) {
        if (stack.valid[i]) { global_sum += stack.values[i]; ++global_n; }
    }
    const double global_mean = global_n ? global_sum / global_n : 0.0;
    for (int rix = 0; rix < rows; ++rix) {
        double sum = 0;
        int n = 0;
        for (int j = 0; j < stack.cols; ++j) {
            if (stack.valid[std::size_t(rix) * stack.cols + j]) { sum += stack.at(rix, j); ++n; }
        }
        const double fill = n ? sum / n : global_mean;
        for (int j = 0; j < stack.cols; ++j)
            if (!stack.valid[std::size_t(rix) * stack.cols + j]) stack.at(rix, j) = fill;
    }
    return stack;
}

std::array<double, 3> kmeans3(std::span<const double> values, int max_iter, double tol) {
    if (values.empty())
        throw InvalidParameter("kmeans3 needs at least one value");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::array<double, 3> c = {sorted.front(), sorted[sorted.size() / 2], sorted.back()};

    for (int it = 0; it < max_iter; ++it) {
        double sum[3] = {0, 0, 0};
        std::size_t cnt[3] = {0, 0, 0};
        for (double v : values) {
            const int k = assign3(v, c);
            sum[k] += v;
            ++cnt[k];
        }
        double shift = 0;
        for (int k = 0; k < 3; ++k) {
            if (!cnt[k]) continue;  // empty cluster keeps its centroid
            const double nc = sum[k] / cnt[k];
            shift = std::max(shift, std::abs(nc - c[k]));
            c[k] = nc;
        }
        if (shift < tol) break;
    }
    std::sort(c.begin(), c.end());
    return c;
}

VesselProfileMask cluster_profiles(const ProfileStack& stack, const CaliperParams& params) {
    VesselProfileMask mask;
    mask.rows = stack.rows;
    mask.cols = stack.cols;
    mask.bits.assign(stack.values.size(), 0);

    std::vector<double> valid_values;
    valid_values.reserve(stack.values.size());
    for (std::size_t i = 0; i < stack.values.size(); ++i)
        if (stack.valid[i]) valid_values.push_back(stack.values[i]);
    if (valid_values.empty()) {
        mask.low_contrast = true;
        return mask;
    }

    std::vector<double> distinct = valid_values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::array<double, 3> centroids;
    if (distinct.size() < 3) {
        // Degenerate: no iteration, just the min/median/max seeds. With a
        // constant stack everything ties into the lowest cluster.
        std::vector<double> sorted = valid_values;
        std::sort(sorted.begin(), sorted.end());
        centroids = {sorted.front(), sorted[sorted.size() / 2], sorted.back()};
        mask.low_contrast = true;
    } else {
        centroids = kmeans3(valid_values, params.kmeans_max_iter, params.kmeans_tol);
    }

    // Classify every cell, imputed ones included; the row-mean imputation
    // keeps them near background so they stay out of the lowest cluster.
    for (std::size_t i = 0; i < stack.values.size(); ++i)
        mask.bits[i] = assign3(stack.values[i], centroids) == 0 ? 1 : 0;
    return mask;
}

VesselProfileMask repair_profile(const VesselProfileMask& mask, int row_join) {
    VesselProfileMask out = mask;
    const int rows = mask.rows, cols = mask.cols;

    // Pass 1: within each column, fill 0-runs that have 1s above and below
    // (reflex stripes split the column in two).
    for (int j = 0; j < cols; ++j) {
        int first = -1, last = -1;
        for (int rix = 0; rix < rows; ++rix) {
            if (out.at(rix, j)) {
                if (first < 0) first = rix;
                last = rix;
            }
        }
        for (int rix = first; rix >= 0 && rix <= last; ++rix) out.at(rix, j) = 1;
    }

    // Pass 2: AND with the vertical flip; keeps only what is symmetric
    // about the centerline.
    VesselProfileMask sym = out;
    for (int rix = 0; rix < rows; ++rix)
        for (int j = 0; j < cols; ++j)
            sym.at(rix, j) = out.at(rix, j) & out.at(rows - 1 - rix, j);

    // Pass 3: within each row, join 1-runs separated by fewer than
    // row_join zeros. Symmetric input stays symmetric since every row is
    // processed identically.
    for (int rix = 0; rix < rows; ++rix) {
        int last_one = -1;
        for (int j = 0; j < cols; ++j) {
            if (!sym.at(rix, j)) continue;
            if (last_one >= 0 && j - last_one > 1 && j - last_one - 1 < row_join) {
                for (int f = last_one + 1; f < j; ++f) sym.at(rix, f) = 1;
            }
            last_one = j;
        }
    }
    return sym;
}

DiameterProfile measure_diameters(const VesselProfileMask& mask, CountMode mode) {
    DiameterProfile prof;
    prof.widths.resize(mask.cols, 0.0);
    const int c = (mask.rows - 1) / 2;
    for (int j = 0; j < mask.cols; ++j) {
        if (mode == CountMode::Total) {
            int n = 0;
            for (int rix = 0; rix < mask.rows; ++rix) n += mask.at(rix, j);
            prof.widths[j] = n;
            continue;
        }
        if (mask.at(c, j)) {
            int up = c, down = c;
            while (up > 0 && mask.at(up - 1, j)) --up;
            while (down < mask.rows - 1 && mask.at(down + 1, j)) ++down;
            prof.widths[j] = down - up + 1;
        } else {
            // Center row empty: take the longest run (first one on ties).
            int best = 0, run = 0;
            for (int rix = 0; rix < mask.rows; ++rix) {
                run = mask.at(rix, j) ? run + 1 : 0;
                best = std::max(best, run);
            }
            prof.widths[j] = best;
        }
    }
    return prof;
}

VesselEstimate estimate_vessel(const GrayImage& img, const std::vector<CenterlinePath>& paths,
                               Point click, double max_diameter, const CaliperParams& params) {
    const Selection sel = select_nearest(paths, click);
    VesselEstimate est;
    est.path_index = sel.index;
    est.click_distance = sel.distance;
    est.stack = build_profile_stack(img, paths[sel.index], max_diameter, params.normal_factor);
    est.clustered = cluster_profiles(est.stack, params);
    est.repaired = repair_profile(est.clustered, params.row_join);
    est.widths = measure_diameters(est.repaired, params.count_mode);
    return est;
}

}  // namespace svp
