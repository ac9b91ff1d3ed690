#pragma once

#include <vector>

#include "svp/image.hpp"

namespace svp {

// Offset set for morphology. Always contains (0,0); line and ellipse
// factories produce sets symmetric about the origin.
struct StructuringElement {
    std::vector<Point> offsets;

    // Filled ellipse with semi-axes a (x) and b (y); a=b gives a disk,
    // a=b=0 a single point.
    static StructuringElement ellipse(int a, int b);

    // Bresenham line through the origin at `angle_deg`, `length` pixels in
    // total. Built by mirroring a half-line, so even lengths are realized
    // as length-1 (the next odd size down).
    static StructuringElement line(int length, double angle_deg);
};

enum class MorphOp { Erode, Dilate, Close };

// Median filter with odd window `size`; edges replicate.
GrayImage median_filter(const GrayImage& img, int size);

// Separable Gaussian with odd window `size`; sigma is derived from the
// size as 0.3*((size-1)/2 - 1) + 0.8 and edges replicate.
GrayImage gaussian_blur(const GrayImage& img, int size);

// Contrast-limited adaptive histogram equalization: `grid` x `grid` tiles,
// 256 bins, clip limit expressed as a multiple of the uniform bin height,
// clipped excess redistributed uniformly, per-pixel output blended
// bilinearly from the four surrounding tile mappings.
GrayImage clahe(const GrayImage& img, int grid, double clip_limit);

// Pixels outside the mask are treated as 0, so erosion eats the border of
// an all-ones mask. Close is dilate followed by erode with the same SE.
BinaryMask morphology(const BinaryMask& mask, MorphOp op, const StructuringElement& se);

// Exact Euclidean distance from every 1-pixel to the nearest 0-pixel.
// The plane outside the image counts as background, so an all-ones mask
// gets the distance to the image border. 0-pixels map to 0.
RealGrid distance_transform(const BinaryMask& mask);

struct ComponentLabels {
    int width = 0;
    int height = 0;
    int count = 0;                 // labels run 1..count, 0 is background
    std::vector<std::int32_t> labels;
    std::vector<std::int64_t> areas;  // areas[k-1] = pixel count of label k

    std::int32_t at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

// Labels assigned in raster-scan order of first encounter; connectivity
// must be 4 or 8.
ComponentLabels connected_components(const BinaryMask& mask, int connectivity);

// Bilinear interpolation at real coordinates; (x, y) must lie within
// [0, width-1] x [0, height-1].
double bilinear_sample(const GrayImage& img, double x, double y);

// mask of img(x,y) > t   (strict).
BinaryMask threshold_greater(const GrayImage& img, int t);

}  // namespace svp
