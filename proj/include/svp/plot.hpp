#pragma once

#include <vector>

#include "svp/image.hpp"
#include "svp/pulse.hpp"
#include "svp/skeleton.hpp"

namespace svp {

// Chart of a diameter time-series: raw values in grey, smoothed curve in
// blue, detected extrema as red (maxima) and green (minima) dots. Purely
// graphical — no axis text — so the output is deterministic everywhere.
RgbImage plot_pulse(const std::vector<double>& raw, const std::vector<double>& smoothed,
                    const std::vector<Extremum>& extrema);

// Paints centerline paths over an image, cycling a fixed 12-colour palette
// by path id so adjacent ids stay distinguishable. Branch points removed
// during extraction can be marked on top in white.
RgbImage overlay_centerlines(const RgbImage& base, const std::vector<CenterlinePath>& paths,
                             const BinaryMask* junctions = nullptr);

}  // namespace svp
