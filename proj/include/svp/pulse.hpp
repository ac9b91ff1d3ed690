#pragma once

#include <vector>

#include "svp/image.hpp"

namespace svp {

struct PipelineConfig;  // aggregated in svp/config.hpp

enum class VesselKind { Artery, Vein, Unknown };

enum class RateFormula {
    DoubleSeparation,  // period = 2 * mean extrema separation
    SingleSeparation,  // period = mean extrema separation
};

struct PulseParams {
    int sg_window = 5;
    int sg_order = 2;
    double lowpass_hz = 2.0;
    int lowpass_taps = 31;
    double fps = 30.0;
    double click_radius = 50.0;  // frame-0 click must land this close
    double carry_radius = 20.0;  // later frames: carry-over tolerance
    RateFormula formula = RateFormula::DoubleSeparation;
};

struct DiameterSeries {
    std::vector<double> values;  // mean vessel width per frame, px
    double fps = 30.0;
    VesselKind kind = VesselKind::Unknown;
};

enum class ExtremumKind { Min, Max };

struct Extremum {
    int index = 0;
    ExtremumKind kind = ExtremumKind::Max;
};

struct PulseReport {
    double mean_separation_s = 0.0;
    double period_s = 0.0;        // per the selected formula
    double heart_rate_bpm = 0.0;  // 60 / period_s
    double bpm_double_separation = 0.0;
    double bpm_single_separation = 0.0;
    std::vector<Extremum> extrema;
};

// Segments every frame, re-selects the vessel from the previous frame's
// path midpoint, and records the mean diameter per frame. Throws NoVessel
// for a bad frame-0 click and TrackingLost (with the frame index) when the
// carry-over point drifts beyond carry_radius.
DiameterSeries track(const std::vector<RgbImage>& frames, Point click,
                     const PipelineConfig& config, VesselKind kind = VesselKind::Unknown);

// Savitzky-Golay (boundary windows refit the polynomial) followed by a
// zero-phase windowed-sinc low-pass run forward and backward.
DiameterSeries smooth(const DiameterSeries& series, const PulseParams& params);

// Strict alternating extrema; plateaus collapse to their middle sample and
// same-kind neighbors drop the weaker one. Throws InsufficientPulsation
// when fewer than two survive.
std::vector<Extremum> find_extrema(const DiameterSeries& series);

// Mean separation of consecutive extrema -> period -> bpm. Both formula
// variants are always filled in; period_s/heart_rate_bpm follow `formula`.
PulseReport heart_rate(const std::vector<Extremum>& extrema, double fps,
                       RateFormula formula = RateFormula::DoubleSeparation);

}  // namespace svp
