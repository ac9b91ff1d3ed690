#pragma once

#include <array>
#include <span>
#include <vector>

#include "svp/image.hpp"
#include "svp/skeleton.hpp"

namespace svp {

enum class CountMode {
    CenterRun,  // length of the 1-run containing the center row
    Total,      // all 1s in the column
};

struct CaliperParams {
    double normal_factor = 1.5;  // normal length = factor * max_diameter
    int kmeans_max_iter = 50;
    double kmeans_tol = 0.5;     // stop when no centroid moved this much
    int row_join = 20;           // horizontal gaps shorter than this close
    CountMode count_mode = CountMode::CenterRun;
};

// Intensity samples along the normals, one column per path point. Cells
// whose sample fell outside the image are imputed with their row's mean
// and marked invalid.
struct ProfileStack {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;      // per cell
    std::vector<std::uint8_t> col_valid;  // 0 when the whole normal missed

    double& at(int row, int col) { return values[std::size_t(row) * cols + col]; }
    double at(int row, int col) const { return values[std::size_t(row) * cols + col]; }
    int center_row() const { return (rows - 1) / 2; }
};

struct VesselProfileMask {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bits;
    bool low_contrast = false;  // set when clustering was degenerate

    std::uint8_t& at(int row, int col) { return bits[std::size_t(row) * cols + col]; }
    std::uint8_t at(int row, int col) const { return bits[std::size_t(row) * cols + col]; }
};

struct DiameterProfile {
    std::vector<double> widths;  // one per path point, in pixels
};

// Orientation of the least-squares line through a six-point window around
// index i (clamped at the path ends), in radians within [0, pi). Fit is
// orthogonal, so vertical runs give pi/2 instead of blowing up.
double tangent_at(const CenterlinePath& path, int i);

// Sample count per normal is ceil(normal_factor * max_diameter) rounded up
// to odd, spaced 1 px, centered on the path point.
ProfileStack build_profile_stack(const GrayImage& img, const CenterlinePath& path,
                                 double max_diameter, double normal_factor = 1.5);

// Lloyd iterations seeded at min/median/max of the valid samples.
// Returns the centroids in ascending order.
std::array<double, 3> kmeans3(std::span<const double> values, int max_iter = 50,
                              double tol = 0.5);

// 1 where the cell joins the lowest-intensity cluster. Fewer than three
// distinct valid intensities flags the result low-contrast instead of
// iterating.
VesselProfileMask cluster_profiles(const ProfileStack& stack, const CaliperParams& params = {});

// Three passes: fill 0-runs bounded by 1s within each column, AND with the
// mask flipped about the center row, then close sub-row_join gaps within
// each row. Output is exactly mirror-symmetric about the center row.
VesselProfileMask repair_profile(const VesselProfileMask& mask, int row_join = 20);

// Per-column width; an empty column gives 0 and a column whose center row
// is 0 falls back to its longest run (CenterRun mode).
DiameterProfile measure_diameters(const VesselProfileMask& mask,
                                  CountMode mode = CountMode::CenterRun);

struct VesselEstimate {
    int path_index = -1;
    double click_distance = 0.0;
    ProfileStack stack;
    VesselProfileMask clustered;
    VesselProfileMask repaired;
    DiameterProfile widths;
};

// select_nearest + build_profile_stack + cluster + repair + measure.
VesselEstimate estimate_vessel(const GrayImage& img, const std::vector<CenterlinePath>& paths,
                               Point click, double max_diameter,
                               const CaliperParams& params = {});

}  // namespace svp
