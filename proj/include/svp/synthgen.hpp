#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "svp/image.hpp"
#include "svp/pulse.hpp"

namespace svp {

// Width along the arc, in pixels.
struct WidthProfile {
    enum class Kind { Constant, Taper, Sine } kind = Kind::Constant;
    double w0 = 10.0;   // constant value / taper start / sine base
    double w1 = 10.0;   // taper end
    double amp = 0.0;   // sine amplitude
    double freq = 0.0;  // sine cycles per pixel of arc length

    double at(double s, double total_len) const;
    double base() const { return w0; }
    double min_value() const;
    double max_value() const;
};

// Central light reflex: a brighter stripe down the vessel middle.
struct ReflexSpec {
    double width = 2.0;
    double intensity = 110.0;
};

struct PulsationSpec {
    double amplitude = 0.0;  // px, on top of the base width
    double frequency = 0.0;  // Hz
    double phase = 0.0;      // rad
};

struct VesselSpec {
    // Control points: a polyline, or a quadratic Bezier when arc is set
    // (exactly three points then).
    std::vector<PointF> control;
    bool arc = false;
    WidthProfile width;
    double intensity = 60.0;  // darker than the background
    std::optional<ReflexSpec> reflex;
    PulsationSpec pulse;
};

struct SceneSpec {
    int width = 320;
    int height = 240;
    double background = 150.0;
    double gradient_amplitude = 0.0;  // +/- range of a slow corner-to-corner ramp
    double noise_sigma = 0.0;
    double fps = 30.0;
    double duration_s = 0.0;
    std::vector<VesselSpec> vessels;
};

struct SynthTruth {
    BinaryMask vessel_mask;
    // Per vessel: centerline samples at ~1 px arc spacing and the exact
    // width at each sample.
    std::vector<std::vector<PointF>> centerlines;
    std::vector<std::vector<double>> widths;
};

struct RenderResult {
    RgbImage image;
    SynthTruth truth;
};

struct SequenceResult {
    std::vector<RgbImage> frames;
    SynthTruth frame0_truth;                  // geometry at t = 0
    std::vector<DiameterSeries> truth_series; // exact mean width per frame, per vessel
    double fps = 30.0;
};

// Throws ValidationError with a field path ("vessel[1].points", ...).
void validate_scene(const SceneSpec& scene);

// A pixel is vessel wherever it lies within width/2 of the centerline,
// judged against dense 0.25 px arc samples. Same scene + seed gives a
// byte-identical image.
RenderResult render(const SceneSpec& scene, std::uint64_t seed);

// round(duration_s * fps) frames; frame t scales each width profile by
// 1 + amplitude*sin(2*pi*f*t/fps + phase)/base_width. The noise field is a
// function of the seed only, so zero-amplitude scenes give identical
// frames.
SequenceResult render_sequence(const SceneSpec& scene, std::uint64_t seed);

// Same file format family as the pipeline config: a [scene] section plus
// one [vessel] section per vessel.
SceneSpec load_scene(const std::filesystem::path& path);
std::string scene_to_text(const SceneSpec& scene);

}  // namespace svp
