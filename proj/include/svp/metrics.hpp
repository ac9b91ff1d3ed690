#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "svp/caliper.hpp"
#include "svp/image.hpp"

namespace svp {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
};

struct SegScores {
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
};

// Paired per-point widths: estimated vs annotated truth.
struct WidthComparison {
    std::vector<double> estimated;
    std::vector<double> truth;
};

enum class MeanMode {
    Arithmetic,         // mu_error = mean of the differences
    LiteralReciprocal,  // mu_error = mean of 1/difference (audit mode)
};

struct WidthStats {
    double mu_error = 0.0;     // per MeanMode
    double sigma_error = 0.0;  // sample stddev of (estimated - truth), n-1 divisor
    double mu_mean = 0.0;      // mean estimated width
    double sigma_mean = 0.0;   // sample stddev of estimated widths
};

struct AnnotationRecord {
    std::string image;
    int segment = 0;
    int point = 0;
    double cx = 0.0;
    double cy = 0.0;
    double width = 0.0;
};

struct GroundTruthAnnotation {
    std::vector<AnnotationRecord> records;

    // Indices of records for one (image, segment) pair, in file order.
    std::vector<std::size_t> group(const std::string& image, int segment) const;
    // All (image, segment) pairs present, in first-appearance order.
    std::vector<std::pair<std::string, int>> groups() const;
};

// Counts only inside the FOV. All three masks must share dimensions.
ConfusionCounts confusion(const BinaryMask& predicted, const BinaryMask& truth,
                          const BinaryMask& fov);

// Throws UndefinedMetric naming the score whose denominator is zero.
SegScores seg_scores(const ConfusionCounts& counts);

// Needs at least two pairs. sigma_error is always computed around the
// mu_error the selected mode produced.
WidthStats width_error(const WidthComparison& cmp, MeanMode mode = MeanMode::Arithmetic);

// CSV schema: image,segment,point,cx,cy,width with a header row.
// Malformed rows raise ParseError with the line number; width <= 0 raises
// ValidationError.
GroundTruthAnnotation load_annotations(const std::filesystem::path& path);

struct MatchedWidths {
    WidthComparison cmp;
    int unmatched = 0;  // annotations with no centerline point in range
};

// For each annotation, the estimated width at the nearest path point
// within `radius` px of (cx, cy). Annotations with no point in range, or
// whose point carries a zero width (a failed measurement), count as
// unmatched.
MatchedWidths match_widths(const CenterlinePath& path, const DiameterProfile& widths,
                           std::span<const AnnotationRecord> records, double radius = 3.0);

}  // namespace svp
