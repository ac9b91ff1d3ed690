#pragma once

#include <vector>

#include "svp/image.hpp"
#include "svp/raster.hpp"

namespace svp {

struct SkeletonParams {
    int gap_se_length = 9;  // line SE length for gap closing
    int spur_length = 10;   // side branches shorter than this are deleted
    int prune_length = 25;  // traced paths shorter than this are dropped
};

struct CenterlinePath {
    int id = 0;        // 1-based, in component label order
    bool loop = false; // closed curve traced from its topmost-leftmost pixel
    std::vector<Point> points;
};

struct BifurcationSet {
    std::vector<Point> points;
    BinaryMask flags;  // same dims as the skeleton, 1 where flagged
};

// Two-subiteration thinning to convergence; deletions within a
// subiteration are simultaneous and the second subiteration sees the
// result of the first. A final sequential pass peels connectivity-safe
// pixels off any leftover 2x2 blocks so the result is unit width.
BinaryMask thin(const BinaryMask& mask);

// Union of closings with line SEs at 15-degree steps (0..165), then thin
// again; bridges breaks shorter than the SE without merging distant lines.
BinaryMask close_centerline_gaps(const BinaryMask& skel, int gap_se_length);

// Deletes side branches shorter than max_len px that dead-end off a line.
// Each branch is walked tip-to-fork; the pixel where the fork meets goes
// with it when its removal provably keeps the rest connected, so no stub
// is left behind. Free-standing lines and closed curves are left alone
// however short. Noisy masks skeletonize into a line with a fuzz of tiny
// spurs; without this pass the spurs would fragment the trace.
BinaryMask prune_spurs(const BinaryMask& skel, int max_len);

// Flags skeleton pixels whose circular 8-neighborhood has >= 3 rising
// transitions (crossing number).
BifurcationSet detect_bifurcations(const BinaryMask& skel);

// Removes flagged pixels, then walks every linear run that remains: each
// walk starts at a free end (closed curves at their topmost-leftmost
// pixel, flagged as loops) and a component yields as many paths as it has
// runs. Paths shorter than min_length are dropped.
std::vector<CenterlinePath> prune_and_trace(const BinaryMask& skel, const BifurcationSet& bifs,
                                            int min_length);

struct Selection {
    int index = -1;     // into the paths vector
    double distance = 0;
};

// Path whose nearest pixel is closest to the click; ties break to the
// lower path id. Throws NoVessel if there are no paths.
Selection select_nearest(const std::vector<CenterlinePath>& paths, Point click);

// thin + close_centerline_gaps + prune_spurs + detect_bifurcations +
// prune_and_trace, wired to the corresponding params.
std::vector<CenterlinePath> extract_centerlines(const BinaryMask& vessel_mask,
                                                const SkeletonParams& params);

}  // namespace svp
