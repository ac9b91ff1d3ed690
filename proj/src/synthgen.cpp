#include "svp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "svp/config.hpp"

namespace svp {

namespace {

constexpr double kArcStep = 0.25;  // dense sampling step along the curve
const double kPi = std::acos(-1.0);

struct CurveSample {
    PointF pos;
    double s = 0.0;  // arc length from the start
};

// Flatten the centerline into samples spaced kArcStep apart.
std::vector<CurveSample> sample_curve(const VesselSpec& v) {
    // First a fine polyline: the control polyline itself, or the Bezier
    // evaluated densely.
    std::vector<PointF> fine;
    if (v.arc) {
        const PointF a = v.control[0], b = v.control[1], c = v.control[2];
        const int steps = 4000;
        fine.reserve(steps + 1);
        for (int i = 0; i <= steps; ++i) {
            const double t = double(i) / steps;
            const double u = 1.0 - t;
            fine.push_back({u * u * a.x + 2 * u * t * b.x + t * t * c.x,
                            u * u * a.y + 2 * u * t * b.y + t * t * c.y});
        }
    } else {
        fine = v.control;
    }

    std::vector<CurveSample> out;
    double carried = 0.0;  // distance already covered toward the next sample
    double s = 0.0;
    out.push_back({fine[0], 0.0});
    for (std::size_t i = 1; i < fine.size(); ++i) {
        const PointF a = fine[i - 1], b = fine[i];
        const double seg = distance(a, b);
        if (seg <= 0) continue;
        double pos = carried;
        while (pos + kArcStep <= seg) {
            pos += kArcStep;
            s += kArcStep;
            const double t = pos / seg;
            out.push_back({{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, s});
        }
        carried = pos - seg;
        s += seg - pos;
    }
    return out;
}

void stamp_disk(BinaryMask* mask, std::vector<double>* canvas, int w, int h, PointF c,
                double radius, double value) {
    const int x0 = std::max(0, int(std::floor(c.x - radius)));
    const int x1 = std::min(w - 1, int(std::ceil(c.x + radius)));
    const int y0 = std::max(0, int(std::floor(c.y - radius)));
    const int y1 = std::min(h - 1, int(std::ceil(c.y + radius)));
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - c.x, dy = y - c.y;
            if (dx * dx + dy * dy > r2) continue;
            if (mask) mask->at(x, y) = 1;
            if (canvas) (*canvas)[std::size_t(y) * w + x] = value;
        }
    }
}

RenderResult render_at_scales(const SceneSpec& scene, std::uint64_t seed,
                              const std::vector<double>& scales) {
    const int w = scene.width, h = scene.height;
    RenderResult res;
    res.truth.vessel_mask = BinaryMask(w, h);

    // Background with a slow corner-to-corner ramp.
    std::vector<double> canvas(std::size_t(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double ramp =
                (double(x) / std::max(1, w - 1) + double(y) / std::max(1, h - 1)) - 1.0;
            canvas[std::size_t(y) * w + x] = scene.background + scene.gradient_amplitude * ramp;
        }
    }

    for (std::size_t vi = 0; vi < scene.vessels.size(); ++vi) {
        const VesselSpec& v = scene.vessels[vi];
        const double scale = scales[vi];
        const auto samples = sample_curve(v);
        const double total = samples.back().s;

        for (const auto& cs : samples) {
            const double width = v.width.at(cs.s, total) * scale;
            stamp_disk(&res.truth.vessel_mask, &canvas, w, h, cs.pos, width / 2.0, v.intensity);
        }
        if (v.reflex) {
            for (const auto& cs : samples)
                stamp_disk(nullptr, &canvas, w, h, cs.pos, v.reflex->width / 2.0,
                           v.reflex->intensity);
        }

        // Truth decimated to ~1 px arc spacing.
        std::vector<PointF> line;
        std::vector<double> widths;
        const int stride = int(std::lround(1.0 / kArcStep));
        for (std::size_t i = 0; i < samples.size(); i += stride) {
            line.push_back(samples[i].pos);
            widths.push_back(v.width.at(samples[i].s, total) * scale);
        }
        res.truth.centerlines.push_back(std::move(line));
        res.truth.widths.push_back(std::move(widths));
    }

    // Noise depends only on the seed, not the frame, so static scenes
    // produce byte-identical frames.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, scene.noise_sigma);
    res.image = RgbImage(w, h);
    for (std::size_t i = 0; i < canvas.size(); ++i) {
        double g = canvas[i];
        if (scene.noise_sigma > 0) g += noise(rng);
        const int gv = std::clamp(int(std::lround(g)), 0, 255);
        res.image.g[i] = std::uint8_t(gv);
        // Red/blue are scaled copies; all contrast rides the green plane.
        res.image.r[i] = std::uint8_t(std::clamp(int(std::lround(gv * 0.85)), 0, 255));
        res.image.b[i] = std::uint8_t(std::clamp(int(std::lround(gv * 0.55)), 0, 255));
    }
    return res;
}

[[noreturn]] void bad_scene(const std::string& field, const std::string& why) {
    throw ValidationError(field + ": " + why);
}

}  // namespace

double WidthProfile::at(double s, double total_len) const {
    switch (kind) {
        case Kind::Constant: return w0;
        case Kind::Taper: return total_len <= 0 ? w0 : w0 + (w1 - w0) * (s / total_len);
        case Kind::Sine: return w0 + amp * std::sin(2.0 * kPi * freq * s);
    }
    return w0;
}

double WidthProfile::min_value() const {
    switch (kind) {
        case Kind::Constant: return w0;
        case Kind::Taper: return std::min(w0, w1);
        case Kind::Sine: return w0 - std::abs(amp);
    }
    return w0;
}

double WidthProfile::max_value() const {
    switch (kind) {
        case Kind::Constant: return w0;
        case Kind::Taper: return std::max(w0, w1);
        case Kind::Sine: return w0 + std::abs(amp);
    }
    return w0;
}

void validate_scene(const SceneSpec& scene) {
    if (scene.width < 16 || scene.height < 16)
        bad_scene("scene.width/height", "must be at least 16 px");
    if (scene.background < 0 || scene.background > 255)
        bad_scene("scene.background", "must be within [0, 255]");
    if (scene.noise_sigma < 0)
        bad_scene("scene.noise_sigma", "must be non-negative");
    if (scene.fps <= 0)
        bad_scene("scene.fps", "must be positive");

    for (std::size_t i = 0; i < scene.vessels.size(); ++i) {
        const VesselSpec& v = scene.vessels[i];
        const std::string tag = "vessel[" + std::to_string(i) + "]";
        if (v.arc && v.control.size() != 3)
            bad_scene(tag + ".points", "an arc needs exactly 3 control points");
        if (!v.arc && v.control.size() < 2)
            bad_scene(tag + ".points", "a polyline needs at least 2 points");

        const double base = v.width.base();
        if (base <= 0)
            bad_scene(tag + ".width", "base width must be positive");
        const double scale_min = 1.0 - std::abs(v.pulse.amplitude) / base;
        const double scale_max = 1.0 + std::abs(v.pulse.amplitude) / base;
        if (v.width.min_value() * scale_min <= 2.0)
            bad_scene(tag + ".width", "width must stay above 2 px everywhere");
        if (v.pulse.frequency < 0)
            bad_scene(tag + ".pulse_frequency", "must be non-negative");
        if (v.pulse.frequency >= scene.fps / 2.0)
            bad_scene(tag + ".pulse_frequency", "must be below fps/2 (Nyquist)");

        // Curve must keep a margin of 1.5x the largest width from every
        // border so normals never leave the image.
        const double margin = 1.5 * v.width.max_value() * scale_max;
        for (const auto& cs : sample_curve(v)) {
            if (cs.pos.x < margin || cs.pos.y < margin || cs.pos.x > scene.width - 1 - margin ||
                cs.pos.y > scene.height - 1 - margin)
                bad_scene(tag + ".points",
                          "curve needs a margin of " + std::to_string(margin) + " px");
        }
    }
}

RenderResult render(const SceneSpec& scene, std::uint64_t seed) {
    validate_scene(scene);
    return render_at_scales(scene, seed, std::vector<double>(scene.vessels.size(), 1.0));
}

SequenceResult render_sequence(const SceneSpec& scene, std::uint64_t seed) {
    validate_scene(scene);
    const int n = int(std::lround(scene.duration_s * scene.fps));
    if (n < 2)
        throw ValidationError("scene.duration_s: duration * fps must give at least 2 frames");

    SequenceResult seq;
    seq.fps = scene.fps;
    seq.truth_series.resize(scene.vessels.size());
    for (auto& ts : seq.truth_series) ts.fps = scene.fps;

    for (int t = 0; t < n; ++t) {
        std::vector<double> scales(scene.vessels.size(), 1.0);
        for (std::size_t vi = 0; vi < scene.vessels.size(); ++vi) {
            const auto& p = scene.vessels[vi].pulse;
            const double base = scene.vessels[vi].width.base();
            scales[vi] =
                1.0 + p.amplitude * std::sin(2.0 * kPi * p.frequency * t / scene.fps + p.phase) /
                          base;
        }
        RenderResult frame = render_at_scales(scene, seed, scales);
        for (std::size_t vi = 0; vi < scene.vessels.size(); ++vi) {
            const auto& ws = frame.truth.widths[vi];
            double mean = 0;
            for (double wv : ws) mean += wv;
            seq.truth_series[vi].values.push_back(ws.empty() ? 0.0 : mean / double(ws.size()));
        }
        if (t == 0) seq.frame0_truth = frame.truth;
        seq.frames.push_back(std::move(frame.image));
    }
    return seq;
}

namespace {

std::vector<PointF> parse_points(const std::string& section, const ConfigEntry& e) {
    std::vector<PointF> pts;
    std::istringstream ss(e.value);
    std::string tok;
    while (ss >> tok) {
        const std::size_t comma = tok.find(',');
        if (comma == std::string::npos)
            throw ValidationError("[" + section + "]." + e.key + ": expected 'x,y' pairs");
        try {
            pts.push_back({std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ValidationError("[" + section + "]." + e.key + ": bad coordinate '" + tok + "'");
        }
    }
    return pts;
}

std::vector<double> parse_numbers(const std::string& section, const ConfigEntry& e) {
    std::vector<double> vals;
    std::istringstream ss(e.value);
    std::string tok;
    while (ss >> tok) {
        try {
            vals.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ValidationError("[" + section + "]." + e.key + ": bad number '" + tok + "'");
        }
    }
    return vals;
}

}  // namespace

SceneSpec load_scene(const std::filesystem::path& path) {
    std::vector<ConfigSection> sections;
    try {
        sections = parse_config_file(path);
    } catch (const ParseError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }

    SceneSpec scene;
    int vessel_no = 0;
    for (const auto& s : sections) {
        if (s.name == "scene") {
            for (const auto& e : s.entries) {
                if (e.key == "width") scene.width = config_int(s.name, e);
                else if (e.key == "height") scene.height = config_int(s.name, e);
                else if (e.key == "background") scene.background = config_double(s.name, e);
                else if (e.key == "gradient_amplitude")
                    scene.gradient_amplitude = config_double(s.name, e);
                else if (e.key == "noise_sigma") scene.noise_sigma = config_double(s.name, e);
                else if (e.key == "fps") scene.fps = config_double(s.name, e);
                else if (e.key == "duration_s") scene.duration_s = config_double(s.name, e);
                else
                    throw ValidationError("[scene]." + e.key + ": unknown key");
            }
        } else if (s.name == "vessel") {
            const std::string tag = "vessel[" + std::to_string(vessel_no) + "]";
            ++vessel_no;
            VesselSpec v;
            for (const auto& e : s.entries) {
                if (e.key == "shape") {
                    if (e.value == "arc") v.arc = true;
                    else if (e.value == "polyline" || e.value == "line") v.arc = false;
                    else
                        throw ValidationError(tag + ".shape: expected polyline, line or arc");
                } else if (e.key == "points") {
                    v.control = parse_points(tag, e);
                } else if (e.key == "width") {
                    // "W" | "taper W0 W1" | "sine BASE AMP FREQ"
                    std::istringstream ss(e.value);
                    std::string word;
                    ss >> word;
                    std::vector<double> nums;
                    double num;
                    while (ss >> num) nums.push_back(num);
                    if (word == "taper") {
                        if (nums.size() != 2)
                            throw ValidationError(tag + ".width: taper needs 2 numbers");
                        v.width.kind = WidthProfile::Kind::Taper;
                        v.width.w0 = nums[0];
                        v.width.w1 = nums[1];
                    } else if (word == "sine") {
                        if (nums.size() != 3)
                            throw ValidationError(tag + ".width: sine needs 3 numbers");
                        v.width.kind = WidthProfile::Kind::Sine;
                        v.width.w0 = nums[0];
                        v.width.amp = nums[1];
                        v.width.freq = nums[2];
                    } else {
                        try {
                            v.width.kind = WidthProfile::Kind::Constant;
                            v.width.w0 = std::stod(word);
                            v.width.w1 = v.width.w0;
                        } catch (const std::exception&) {
                            throw ValidationError(tag + ".width: bad value '" + e.value + "'");
                        }
                        if (!nums.empty())
                            throw ValidationError(tag + ".width: unexpected trailing numbers");
                    }
                } else if (e.key == "intensity") {
                    v.intensity = config_double(tag, e);
                } else if (e.key == "reflex") {
                    const auto nums = parse_numbers(tag, e);
                    if (nums.size() != 2)
                        throw ValidationError(tag + ".reflex: expected 'width intensity'");
                    v.reflex = ReflexSpec{nums[0], nums[1]};
                } else if (e.key == "pulse") {
                    const auto nums = parse_numbers(tag, e);
                    if (nums.size() != 3)
                        throw ValidationError(tag +
                                              ".pulse: expected 'amplitude frequency phase'");
                    v.pulse = PulsationSpec{nums[0], nums[1], nums[2]};
                } else {
                    throw ValidationError(tag + "." + e.key + ": unknown key");
                }
            }
            scene.vessels.push_back(std::move(v));
        } else {
            throw ValidationError("[" + s.name + "]: unknown section");
        }
    }
    validate_scene(scene);
    return scene;
}

std::string scene_to_text(const SceneSpec& scene) {
    std::ostringstream out;
    out << "[scene]\n"
        << "width = " << scene.width << "\n"
        << "height = " << scene.height << "\n"
        << "background = " << scene.background << "\n"
        << "gradient_amplitude = " << scene.gradient_amplitude << "\n"
        << "noise_sigma = " << scene.noise_sigma << "\n"
        << "fps = " << scene.fps << "\n"
        << "duration_s = " << scene.duration_s << "\n";
    for (const auto& v : scene.vessels) {
        out << "\n[vessel]\n"
            << "shape = " << (v.arc ? "arc" : "polyline") << "\n"
            << "points =";
        for (const auto& p : v.control) out << " " << p.x << "," << p.y;
        out << "\n";
        switch (v.width.kind) {
            case WidthProfile::Kind::Constant: out << "width = " << v.width.w0 << "\n"; break;
            case WidthProfile::Kind::Taper:
                out << "width = taper " << v.width.w0 << " " << v.width.w1 << "\n";
                break;
            case WidthProfile::Kind::Sine:
                out << "width = sine " << v.width.w0 << " " << v.width.amp << " " << v.width.freq
                    << "\n";
                break;
        }
        out << "intensity = " << v.intensity << "\n";
        if (v.reflex)
            out << "reflex = " << v.reflex->width << " " << v.reflex->intensity << "\n";
        if (v.pulse.amplitude != 0 || v.pulse.frequency != 0)
            out << "pulse = " << v.pulse.amplitude << " " << v.pulse.frequency << " "
                << v.pulse.phase << "\n";
    }
    return out.str();
}

}  // namespace svp
