#pragma once

#include "svp/image.hpp"
#include "svp/raster.hpp"

namespace svp {

struct SegmentationParams {
    int clahe_grid = 9;
    double clahe_clip = 3.0;
    int median_size = 5;
    int gaussian_size = 55;
    int global_threshold = 8;   // strict >
    int min_blob_area = 200;    // components smaller than this are dropped
    int fov_threshold = 10;     // strict >
    int fov_erode_radius = 5;
};

struct SegmentationResult {
    BinaryMask vessel_mask;
    BinaryMask fov_mask;
    double max_diameter = 0.0;  // 2 * max distance-transform value
};

// Optional tap into the intermediate images, mainly for --debug dumps.
struct SegmentationStages {
    GrayImage green;
    GrayImage enhanced;
    GrayImage background_subtracted;
    BinaryMask thresholded;
    BinaryMask cleaned;
};

GrayImage green_channel(const RgbImage& img);

// Threshold above params.fov_threshold, then erode with a disk of
// params.fov_erode_radius to pull the rim inward.
BinaryMask fov_mask(const GrayImage& gray, const SegmentationParams& params);

// Vessels are darker than their surround, so the smoothed background minus
// the image goes positive inside vessels: median, then Gaussian, estimate
// the background; the difference is clamped to [0, 255].
GrayImage subtract_background(const GrayImage& enhanced, int median_size, int gaussian_size);

// Full pipeline: green channel, CLAHE, background subtraction, global
// threshold, small-blob removal, FOV intersection. max_diameter is twice
// the largest distance-transform value of the final mask.
SegmentationResult segment_vessels(const RgbImage& img, const SegmentationParams& params,
                                   SegmentationStages* stages = nullptr);

}  // namespace svp
