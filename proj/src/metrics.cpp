#include "svp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace svp {

std::vector<std::size_t> GroundTruthAnnotation::group(const std::string& image,
                                                      int segment) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].image == image && records[i].segment == segment) idx.push_back(i);
    return idx;
}

std::vector<std::pair<std::string, int>> GroundTruthAnnotation::groups() const {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& r : records) {
        const std::pair<std::string, int> key{r.image, r.segment};
        if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
    }
    return out;
}

ConfusionCounts confusion(const BinaryMask& predicted, const BinaryMask& truth,
                          const BinaryMask& fov) {
    if (predicted.width != truth.width || predicted.height != truth.height ||
        predicted.width != fov.width || predicted.height != fov.height)
        throw ShapeMismatch("confusion: mask dimensions differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.bits.size(); ++i) {
        if (!fov.bits[i]) continue;
        const bool p = predicted.bits[i], t = truth.bits[i];
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

SegScores seg_scores(const ConfusionCounts& c) {
    const std::int64_t total = c.tp + c.tn + c.fp + c.fn;
    if (total == 0) throw UndefinedMetric("accuracy: empty field of view");
    if (c.tp + c.fn == 0) throw UndefinedMetric("sensitivity: no positive truth pixels");
    if (c.tn + c.fp == 0) throw UndefinedMetric("specificity: no negative truth pixels");
    SegScores s;
    s.accuracy = double(c.tp + c.tn) / double(total);
    s.sensitivity = double(c.tp) / double(c.tp + c.fn);
    s.specificity = double(c.tn) / double(c.tn + c.fp);
    return s;
}

WidthStats width_error(const WidthComparison& cmp, MeanMode mode) {
    const std::size_t n = cmp.estimated.size();
    if (n != cmp.truth.size())
        throw ShapeMismatch("width_error: estimated/truth length mismatch");
    if (n < 2)
        throw TooFewPoints("width_error needs at least 2 matched points");

    std::vector<double> chi(n);
    for (std::size_t i = 0; i < n; ++i) chi[i] = cmp.estimated[i] - cmp.truth[i];

    WidthStats st;
    if (mode == MeanMode::Arithmetic) {
        double s = 0;
        for (double x : chi) s += x;
        st.mu_error = s / double(n);
    } else {
        // Audit mode: mean of reciprocals, divergent when any difference
        // is zero (that is the point of keeping it behind a flag).
        double s = 0;
        for (double x : chi) s += 1.0 / x;
        st.mu_error = s / double(n);
    }
    double dev = 0;
    for (double x : chi) dev += (x - st.mu_error) * (x - st.mu_error);
    st.sigma_error = std::sqrt(dev / double(n - 1));

    double ms = 0;
    for (double w : cmp.estimated) ms += w;
    st.mu_mean = ms / double(n);
    double md = 0;
    for (double w : cmp.estimated) md += (w - st.mu_mean) * (w - st.mu_mean);
    st.sigma_mean = std::sqrt(md / double(n - 1));
    return st;
}

GroundTruthAnnotation load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read annotations: " + path.string());

    GroundTruthAnnotation gt;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "image,segment,point,cx,cy,width")
                throw ParseError("expected header image,segment,point,cx,cy,width", line_no);
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6)
            throw ParseError("expected 6 comma-separated fields", line_no);
        AnnotationRecord rec;
        rec.image = cells[0];
        try {
            rec.segment = std::stoi(cells[1]);
            rec.point = std::stoi(cells[2]);
            rec.cx = std::stod(cells[3]);
            rec.cy = std::stod(cells[4]);
            rec.width = std::stod(cells[5]);
        } catch (const std::exception&) {
            throw ParseError("non-numeric field", line_no);
        }
        if (rec.width <= 0)
            throw ValidationError("annotation width must be positive (line " +
                                  std::to_string(line_no) + ")");
        gt.records.push_back(std::move(rec));
    }
    if (!header_seen)
        throw ParseError("empty annotation file", std::max(line_no, 1));
    return gt;
}

MatchedWidths match_widths(const CenterlinePath& path, const DiameterProfile& widths,
                           std::span<const AnnotationRecord> records, double radius) {
    MatchedWidths out;
    for (const auto& rec : records) {
        int best = -1;
        double best_sq = radius * radius;
        for (std::size_t i = 0; i < path.points.size(); ++i) {
            const double dx = path.points[i].x - rec.cx, dy = path.points[i].y - rec.cy;
            const double sq = dx * dx + dy * dy;
            if (sq <= best_sq) { best_sq = sq; best = int(i); }
        }
        // A zero width means the caliper found nothing at that point, so
        // there is no measurement to compare.
        if (best < 0 || best >= int(widths.widths.size()) ||
            widths.widths[best] <= 0.0) {
            ++out.unmatched;
            continue;
        }
        out.cmp.estimated.push_back(widths.widths[best]);
        out.cmp.truth.push_back(rec.width);
    }
    return out;
}

}  // namespace svp
