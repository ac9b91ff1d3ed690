#include "svp/segment.hpp"

#include <algorithm>

namespace svp {

GrayImage green_channel(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    out.data = img.g;
    return out;
}

BinaryMask fov_mask(const GrayImage& gray, const SegmentationParams& params) {
    BinaryMask bright = threshold_greater(gray, params.fov_threshold);
    const auto se = StructuringElement::ellipse(params.fov_erode_radius, params.fov_erode_radius);
    return morphology(bright, MorphOp::Erode, se);
}

GrayImage subtract_background(const GrayImage& enhanced, int median_size, int gaussian_size) {
    const GrayImage background = gaussian_blur(median_filter(enhanced, median_size), gaussian_size);
    GrayImage out(enhanced.width, enhanced.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const int d = int(background.data[i]) - int(enhanced.data[i]);
        out.data[i] = std::uint8_t(std::clamp(d, 0, 255));
    }
    return out;
}

SegmentationResult segment_vessels(const RgbImage& img, const SegmentationParams& params,
                                   SegmentationStages* stages) {
    const GrayImage green = green_channel(img);
    const GrayImage enhanced = clahe(green, params.clahe_grid, params.clahe_clip);
    const GrayImage bgsub =
        subtract_background(enhanced, params.median_size, params.gaussian_size);
    const BinaryMask raw = threshold_greater(bgsub, params.global_threshold);

    // Drop speckle: any 8-connected blob below the area floor.
    const ComponentLabels cc = connected_components(raw, 8);
    BinaryMask cleaned(raw.width, raw.height);
    for (int y = 0; y < raw.height; ++y) {
        for (int x = 0; x < raw.width; ++x) {
            const std::int32_t l = cc.at(x, y);
            cleaned.at(x, y) = (l && cc.areas[l - 1] >= params.min_blob_area) ? 1 : 0;
        }
    }

    SegmentationResult res;
    res.fov_mask = fov_mask(green, params);
    res.vessel_mask = BinaryMask(raw.width, raw.height);
    for (std::size_t i = 0; i < cleaned.bits.size(); ++i)
        res.vessel_mask.bits[i] = cleaned.bits[i] & res.fov_mask.bits[i];

    const RealGrid dist = distance_transform(res.vessel_mask);
    double dmax = 0.0;
    for (double d : dist.v) dmax = std::max(dmax, d);
    res.max_diameter = 2.0 * dmax;

    if (stages) {
        stages->green = green;
        stages->enhanced = enhanced;
        stages->background_subtracted = bgsub;
        stages->thresholded = raw;
        stages->cleaned = res.vessel_mask;
    }
    return res;
}

}  // namespace svp
