#include "svp/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svp/caliper.hpp"
#include "svp/config.hpp"
#include "svp/segment.hpp"
#include "svp/skeleton.hpp"

namespace svp {

namespace {

// Least-squares polynomial smoothing weights for a window of size w,
// evaluated at in-window position t. Solved through the normal equations;
// the orders in play here keep the 3x3 (or so) system well conditioned.
std::vector<double> savgol_weights(int w, int order, int t) {
    const int m = order + 1;
    std::vector<double> ata(std::size_t(m) * m, 0.0);
    for (int k = 0; k < w; ++k) {
        double pi = 1.0;
        std::vector<double> pow(m);
        for (int i = 0; i < m; ++i) { pow[i] = pi; pi *= k; }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) ata[std::size_t(i) * m + j] += pow[i] * pow[j];
    }
    // Invert via Gauss-Jordan (tiny system).
    std::vector<double> inv(std::size_t(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[std::size_t(i) * m + i] = 1.0;
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(ata[std::size_t(r) * m + col]) >
                std::abs(ata[std::size_t(piv) * m + col]))
                piv = r;
        for (int c2 = 0; c2 < m; ++c2) {
            std::swap(ata[std::size_t(col) * m + c2], ata[std::size_t(piv) * m + c2]);
            std::swap(inv[std::size_t(col) * m + c2], inv[std::size_t(piv) * m + c2]);
        }
        const double d = ata[std::size_t(col) * m + col];
        for (int c2 = 0; c2 < m; ++c2) {
            ata[std::size_t(col) * m + c2] /= d;
            inv[std::size_t(col) * m + c2] /= d;
        }
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = ata[std::size_t(r) * m + col];
            for (int c2 = 0; c2 < m; ++c2) {
                ata[std::size_t(r) * m + c2] -= f * ata[std::size_t(col) * m + c2];
                inv[std::size_t(r) * m + c2] -= f * inv[std::size_t(col) * m + c2];
            }
        }
    }
    // weight_k = sum_i t^i * (AtA^-1 A^T)_{i,k}
    std::vector<double> wts(w, 0.0);
    for (int k = 0; k < w; ++k) {
        double pk = 1.0;
        std::vector<double> pow(m);
        for (int i = 0; i < m; ++i) { pow[i] = pk; pk *= k; }
        double acc = 0.0;
        double ti = 1.0;
        for (int i = 0; i < m; ++i) {
            double row = 0.0;
            for (int j = 0; j < m; ++j) row += inv[std::size_t(i) * m + j] * pow[j];
            acc += ti * row;
            ti *= t;
        }
        wts[k] = acc;
    }
    return wts;
}

std::vector<double> savgol(const std::vector<double>& x, int w, int order) {
    const int n = int(x.size());
    std::vector<double> out(n);
    // One weight row per in-window evaluation position, computed lazily.
    std::vector<std::vector<double>> rows(w);
    for (int i = 0; i < n; ++i) {
        int s = std::clamp(i - (w - 1) / 2, 0, n - w);
        const int t = i - s;
        if (rows[t].empty()) rows[t] = savgol_weights(w, order, t);
        double acc = 0.0;
        for (int k = 0; k < w; ++k) acc += rows[t][k] * x[s + k];
        out[i] = acc;
    }
    return out;
}

// Symmetric windowed-sinc low-pass, DC gain 1.
std::vector<double> sinc_kernel(int taps, double cutoff_hz, double fps) {
    const int mid = (taps - 1) / 2;
    const double fc = cutoff_hz / fps;  // cycles per sample
    const double pi = std::acos(-1.0);
    std::vector<double> h(taps);
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        const double m = i - mid;
        const double x = 2.0 * fc * m;
        const double sinc = m == 0 ? 1.0 : std::sin(pi * x) / (pi * x);
        const double hamming = 0.54 - 0.46 * std::cos(2.0 * pi * i / (taps - 1));
        h[i] = 2.0 * fc * sinc * hamming;
        sum += h[i];
    }
    for (double& v : h) v /= sum;
    return h;
}

// Odd reflection about the first/last sample keeps the local slope going
// past the ends. Clamped (replicate) padding would flatten the signal
// there and drag the outermost smoothed extrema toward the edges, which
// directly stretches the measured peak separations.
std::vector<double> convolve_reflect(const std::vector<double>& x,
                                     const std::vector<double>& h) {
    const int n = int(x.size()), taps = int(h.size()), mid = (taps - 1) / 2;
    auto sample = [&](int j) {
        if (j < 0) return 2.0 * x[0] - x[std::size_t(std::min(-j, n - 1))];
        if (j >= n) return 2.0 * x[std::size_t(n - 1)] - x[std::size_t(std::max(2 * (n - 1) - j, 0))];
        return x[std::size_t(j)];
    };
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < taps; ++k) acc += h[k] * sample(i + k - mid);
        out[i] = acc;
    }
    return out;
}

}  // namespace

DiameterSeries track(const std::vector<RgbImage>& frames, Point click,
                     const PipelineConfig& config, VesselKind kind) {
    if (frames.size() < 2)
        throw InvalidParameter("tracking needs at least 2 frames");

    DiameterSeries series;
    series.fps = config.pulse.fps;
    series.kind = kind;
    series.values.reserve(frames.size());

    Point carry = click;
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const SegmentationResult seg = segment_vessels(frames[t], config.seg);
        std::vector<CenterlinePath> paths;
        if (seg.max_diameter > 0)
            paths = extract_centerlines(seg.vessel_mask, config.skeleton);

        const double radius = t == 0 ? config.pulse.click_radius : config.pulse.carry_radius;
        if (paths.empty()) {
            if (t == 0) throw NoVessel("no vessel found in frame 0");
            throw TrackingLost(int(t), "no centerline in frame");
        }
        const Selection sel = select_nearest(paths, carry);
        if (sel.distance > radius) {
            if (t == 0)
                throw NoVessel("no vessel within " + std::to_string(int(radius)) +
                               " px of the click");
            throw TrackingLost(int(t), "nearest centerline " +
                                           std::to_string(sel.distance) + " px away");
        }

        const GrayImage green = green_channel(frames[t]);
        const VesselEstimate est =
            estimate_vessel(green, paths, carry, seg.max_diameter, config.caliper);

        const auto& wv = est.widths.widths;
        const double mean =
            wv.empty() ? 0.0 : std::accumulate(wv.begin(), wv.end(), 0.0) / double(wv.size());
        series.values.push_back(mean);

        // Carry-over click for the next frame: this path's midpoint.
        const auto& pts = paths[est.path_index].points;
        carry = pts[pts.size() / 2];
    }
    return series;
}

DiameterSeries smooth(const DiameterSeries& series, const PulseParams& params) {
    if (params.sg_window < 3 || params.sg_window % 2 == 0)
        throw InvalidParameter("sg_window must be odd and >= 3");
    if (params.sg_order < 1 || params.sg_order >= params.sg_window)
        throw InvalidParameter("sg_order must be in [1, sg_window)");
    if (int(series.values.size()) <= params.sg_window)
        throw TooShortSeries("series length must exceed the smoothing window");

    DiameterSeries out = series;
    out.values = savgol(series.values, params.sg_window, params.sg_order);

    const auto h = sinc_kernel(params.lowpass_taps, params.lowpass_hz,
                               series.fps > 0 ? series.fps : params.fps);
    // Forward-backward for zero phase.
    out.values = convolve_reflect(out.values, h);
    std::reverse(out.values.begin(), out.values.end());
    out.values = convolve_reflect(out.values, h);
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

std::vector<Extremum> find_extrema(const DiameterSeries& series) {
    const auto& v = series.values;
    const int n = int(v.size());
    std::vector<Extremum> raw;

    // Runs of equal values; a run is an extremum when both distinct
    // neighbors lie on the same side, and it collapses to its middle.
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        if (i > 0 && j < n - 1) {
            const double prev = v[i - 1], next = v[j + 1], cur = v[i];
            if (cur > prev && cur > next)
                raw.push_back({(i + j) / 2, ExtremumKind::Max});
            else if (cur < prev && cur < next)
                raw.push_back({(i + j) / 2, ExtremumKind::Min});
        }
        i = j + 1;
    }

    // Enforce alternation: of two same-kind neighbors keep the stronger
    // (the earlier one on ties).
    std::vector<Extremum> out;
    for (const Extremum& e : raw) {
        if (!out.empty() && out.back().kind == e.kind) {
            const double a = v[out.back().index], b = v[e.index];
            const bool replace = e.kind == ExtremumKind::Max ? b > a : b < a;
            if (replace) out.back() = e;
            continue;
        }
        out.push_back(e);
    }

    if (out.size() < 2)
        throw InsufficientPulsation("fewer than 2 extrema in the series");
    return out;
}

PulseReport heart_rate(const std::vector<Extremum>& extrema, double fps, RateFormula formula) {
    if (extrema.size() < 2)
        throw InsufficientPulsation("heart rate needs at least 2 extrema");
    if (fps <= 0)
        throw InvalidParameter("fps must be positive");

    double gaps = 0.0;
    for (std::size_t i = 1; i < extrema.size(); ++i)
        gaps += extrema[i].index - extrema[i - 1].index;
    const double mean_sep_s = gaps / double(extrema.size() - 1) / fps;

    PulseReport rep;
    rep.mean_separation_s = mean_sep_s;
    rep.bpm_double_separation = 60.0 / (2.0 * mean_sep_s);
    rep.bpm_single_separation = 60.0 / mean_sep_s;
    rep.period_s = formula == RateFormula::DoubleSeparation ? 2.0 * mean_sep_s : mean_sep_s;
    rep.heart_rate_bpm = 60.0 / rep.period_s;
    rep.extrema = extrema;
    return rep;
}

}  // namespace svp
