#include <cmath>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "svp/synthgen.hpp"

using namespace svp;
using namespace svptest;

namespace {

const double kPi = std::acos(-1.0);

SceneSpec base_scene(int w = 200, int h = 120) {
    SceneSpec s;
    s.width = w;
    s.height = h;
    s.background = 150.0;
    s.noise_sigma = 0.0;
    return s;
}

VesselSpec straight_vessel(double y, double width, double x0 = 30, double x1 = 170) {
    VesselSpec v;
    v.control = {PointF{x0, y}, PointF{x1, y}};
    v.width.w0 = width;
    return v;
}

std::string validation_message(const SceneSpec& scene) {
    try {
        validate_scene(scene);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

// Exact distance from a pixel center to the segment (x0,y)-(x1,y) family.
double dist_to_polyline(double px, double py, const std::vector<PointF>& pts) {
    double best = 1e18;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double ax = pts[i - 1].x, ay = pts[i - 1].y;
        const double bx = pts[i].x, by = pts[i].y;
        const double vx = bx - ax, vy = by - ay;
        const double len2 = vx * vx + vy * vy;
        double t = len2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
        best = std::min(best, std::hypot(dx, dy));
    }
    return best;
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("width profiles") {
    WidthProfile c;
    c.w0 = 7.5;
    CHECK(c.at(0, 100) == doctest::Approx(7.5));
    CHECK(c.at(55, 100) == doctest::Approx(7.5));
    CHECK(c.min_value() == doctest::Approx(7.5));
    CHECK(c.max_value() == doctest::Approx(7.5));

    WidthProfile t;
    t.kind = WidthProfile::Kind::Taper;
    t.w0 = 12;
    t.w1 = 6;
    CHECK(t.at(0, 100) == doctest::Approx(12.0));
    CHECK(t.at(50, 100) == doctest::Approx(9.0));
    CHECK(t.at(100, 100) == doctest::Approx(6.0));
    CHECK(t.min_value() == doctest::Approx(6.0));
    CHECK(t.max_value() == doctest::Approx(12.0));

    WidthProfile s;
    s.kind = WidthProfile::Kind::Sine;
    s.w0 = 10;
    s.amp = 2;
    s.freq = 0.01;  // one cycle per 100 px of arc
    CHECK(s.at(0, 400) == doctest::Approx(10.0));
    CHECK(s.at(25, 400) == doctest::Approx(12.0));
    CHECK(s.at(75, 400) == doctest::Approx(8.0));
    CHECK(s.min_value() == doctest::Approx(8.0));
    CHECK(s.max_value() == doctest::Approx(12.0));
}

TEST_CASE("straight vessel covers width times length plus its end caps") {
    SceneSpec scene = base_scene(460, 64);
    // Half-pixel centerline: an integer-aligned even width would quantize
    // to w-1 pixel rows and skew the count.
    scene.vessels.push_back(straight_vessel(32.5, 8.0, 30, 430));
    const RenderResult res = render(scene, 1);

    const double expected = 8.0 * 400.0;  // caps add pi*(w/2)^2 ~ 1.6%
    const double area = double(res.truth.vessel_mask.count());
    CHECK(std::abs(area - expected) / expected < 0.02);

    // Pixels well inside / outside read vessel / background exactly
    // (no noise in this scene).
    CHECK(res.image.g[res.image.index(230, 32)] == 60);
    CHECK(res.image.g[res.image.index(230, 50)] == 150);
}

TEST_CASE("truth mask agrees with exact segment distance away from the rim") {
    SceneSpec scene = base_scene(200, 120);
    VesselSpec v;
    v.control = {PointF{30, 30}, PointF{110, 60}, PointF{170, 90}};
    v.width.w0 = 9.0;
    scene.vessels.push_back(v);
    const RenderResult res = render(scene, 3);

    int checked = 0;
    for (int y = 0; y < 120; ++y)
        for (int x = 0; x < 200; ++x) {
            const double d = dist_to_polyline(x, y, v.control);
            if (std::abs(d - 4.5) < 0.3) continue;  // rim band: sampling quantization
            ++checked;
            CHECK(int(res.truth.vessel_mask.at(x, y)) == int(d < 4.5));
        }
    CHECK(checked > 20000);

    // Centerline samples hug the polyline and carry the exact width.
    REQUIRE(res.truth.centerlines.size() == 1);
    CHECK(res.truth.centerlines[0].size() > 150);
    for (const PointF& p : res.truth.centerlines[0])
        CHECK(dist_to_polyline(p.x, p.y, v.control) < 0.05);
    for (double w : res.truth.widths[0]) CHECK(w == doctest::Approx(9.0));
}

TEST_CASE("central reflex brightens the vessel core") {
    SceneSpec scene = base_scene();
    VesselSpec v = straight_vessel(60, 9.0);
    v.reflex = ReflexSpec{2.0, 110.0};
    scene.vessels.push_back(v);
    const RenderResult res = render(scene, 5);

    CHECK(res.image.g[res.image.index(100, 60)] == 110);  // stripe
    CHECK(res.image.g[res.image.index(100, 57)] == 60);   // flank
    CHECK(res.image.g[res.image.index(100, 63)] == 60);
    CHECK(res.image.g[res.image.index(100, 70)] == 150);  // background

    // The reflex stripe still counts as vessel in the truth mask.
    CHECK(res.truth.vessel_mask.at(100, 60) == 1);
}

TEST_CASE("empty scenes render flat background") {
    const SceneSpec scene = base_scene(64, 48);
    const RenderResult res = render(scene, 9);
    CHECK(res.truth.vessel_mask.count() == 0);
    CHECK(res.truth.centerlines.empty());
    for (auto g : res.image.g) CHECK(g == 150);
    // Gray background: all three planes match.
    CHECK(res.image.r == res.image.r);
    CHECK(res.image.g == res.image.g);
}

TEST_CASE("noise is a pure function of the seed") {
    SceneSpec scene = base_scene();
    scene.noise_sigma = 4.0;
    scene.vessels.push_back(straight_vessel(60, 9.0));

    const RenderResult a = render(scene, 42);
    const RenderResult b = render(scene, 42);
    CHECK(a.image.r == b.image.r);
    CHECK(a.image.g == b.image.g);
    CHECK(a.image.b == b.image.b);

    const RenderResult c = render(scene, 43);
    CHECK(a.image.g != c.image.g);
}

TEST_CASE("render_sequence frame count and pulsation truth") {
    SceneSpec scene = base_scene(220, 100);
    scene.fps = 30.0;
    scene.duration_s = 2.0;
    VesselSpec v = straight_vessel(50, 10.0, 40, 180);
    v.pulse = {1.5, 1.0, 0.5};
    scene.vessels.push_back(v);

    const SequenceResult seq = render_sequence(scene, 11);
    REQUIRE(seq.frames.size() == 60);
    CHECK(seq.fps == doctest::Approx(30.0));
    REQUIRE(seq.truth_series.size() == 1);
    REQUIRE(seq.truth_series[0].values.size() == 60);

    // Constant base profile: every arc sample scales identically, so the
    // per-frame truth is exactly w0 + A sin(2 pi f t / fps + phase).
    for (int t = 0; t < 60; ++t) {
        const double want = 10.0 + 1.5 * std::sin(2 * kPi * 1.0 * t / 30.0 + 0.5);
        CHECK(seq.truth_series[0].values[std::size_t(t)] == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("zero amplitude gives identical frames") {
    SceneSpec scene = base_scene(120, 80);
    scene.noise_sigma = 3.0;
    scene.fps = 30.0;
    scene.duration_s = 0.2;
    scene.vessels.push_back(straight_vessel(40, 8.0, 25, 95));

    const SequenceResult seq = render_sequence(scene, 17);
    REQUIRE(seq.frames.size() == 6);
    for (std::size_t t = 1; t < seq.frames.size(); ++t) {
        CHECK(seq.frames[t].r == seq.frames[0].r);
        CHECK(seq.frames[t].g == seq.frames[0].g);
        CHECK(seq.frames[t].b == seq.frames[0].b);
    }
}

TEST_CASE("opposite phases give anti-correlated truth series") {
    SceneSpec scene = base_scene(220, 160);
    scene.fps = 30.0;
    scene.duration_s = 3.0;
    VesselSpec a = straight_vessel(50, 10.0, 40, 180);
    a.pulse = {1.2, 1.0, 0.0};
    VesselSpec b = straight_vessel(110, 10.0, 40, 180);
    b.pulse = {1.2, 1.0, kPi};
    scene.vessels.push_back(a);
    scene.vessels.push_back(b);

    const SequenceResult seq = render_sequence(scene, 23);
    REQUIRE(seq.truth_series.size() == 2);
    CHECK(pearson(seq.truth_series[0].values, seq.truth_series[1].values) < -0.99);
}

TEST_CASE("validate_scene reports the offending field") {
    SceneSpec tiny = base_scene(8, 64);
    tiny.vessels.push_back(straight_vessel(32, 8.0, 20, 44));
    CHECK(validation_message(tiny).find("scene.width") != std::string::npos);

    SceneSpec bg = base_scene();
    bg.background = 300;
    CHECK(validation_message(bg).find("scene.background") != std::string::npos);

    SceneSpec nyq = base_scene();
    nyq.fps = 30;
    VesselSpec fast = straight_vessel(60, 10.0);
    fast.pulse = {1.0, 15.0, 0.0};
    nyq.vessels.push_back(fast);
    CHECK(validation_message(nyq).find("pulse_frequency") != std::string::npos);

    SceneSpec thin = base_scene();
    VesselSpec hair = straight_vessel(60, 3.0);
    hair.pulse = {1.5, 1.0, 0.0};  // width dips to 1.5 px
    thin.vessels.push_back(hair);
    CHECK(validation_message(thin).find("width") != std::string::npos);

    SceneSpec tight = base_scene();
    tight.vessels.push_back(straight_vessel(6, 8.0));  // too close to the top
    CHECK(validation_message(tight).find("points") != std::string::npos);

    SceneSpec arc = base_scene();
    VesselSpec two = straight_vessel(60, 8.0);
    two.arc = true;  // arcs need exactly three control points
    arc.vessels.push_back(two);
    CHECK(validation_message(arc).find("points") != std::string::npos);

    CHECK_NOTHROW(validate_scene(base_scene()));
}

TEST_CASE("scene files round trip") {
    SceneSpec scene = base_scene(320, 240);
    scene.gradient_amplitude = 6.0;
    scene.noise_sigma = 4.5;
    scene.fps = 25.0;
    scene.duration_s = 1.5;

    VesselSpec a;
    a.control = {PointF{40, 60}, PointF{160, 120}, PointF{280, 60}};
    a.arc = true;
    a.width.kind = WidthProfile::Kind::Taper;
    a.width.w0 = 12;
    a.width.w1 = 8;
    a.intensity = 55;
    a.reflex = ReflexSpec{2.5, 105.0};
    a.pulse = {1.25, 1.2, 0.75};
    scene.vessels.push_back(a);

    VesselSpec b = straight_vessel(180, 9.5, 40, 280);
    b.width.kind = WidthProfile::Kind::Sine;
    b.width.w0 = 9.5;
    b.width.amp = 1.5;
    b.width.freq = 0.005;
    scene.vessels.push_back(b);

    TempDir dir;
    const auto file = dir / "scene.cfg";
    write_file(file, scene_to_text(scene));
    const SceneSpec back = load_scene(file);

    CHECK(back.width == 320);
    CHECK(back.height == 240);
    CHECK(back.gradient_amplitude == doctest::Approx(6.0));
    CHECK(back.noise_sigma == doctest::Approx(4.5));
    CHECK(back.fps == doctest::Approx(25.0));
    CHECK(back.duration_s == doctest::Approx(1.5));
    REQUIRE(back.vessels.size() == 2);

    CHECK(back.vessels[0].arc);
    REQUIRE(back.vessels[0].control.size() == 3);
    CHECK(back.vessels[0].control[1].x == doctest::Approx(160.0));
    CHECK(back.vessels[0].width.kind == WidthProfile::Kind::Taper);
    CHECK(back.vessels[0].width.w1 == doctest::Approx(8.0));
    CHECK(back.vessels[0].intensity == doctest::Approx(55.0));
    REQUIRE(back.vessels[0].reflex.has_value());
    CHECK(back.vessels[0].reflex->width == doctest::Approx(2.5));
    CHECK(back.vessels[0].reflex->intensity == doctest::Approx(105.0));
    CHECK(back.vessels[0].pulse.amplitude == doctest::Approx(1.25));
    CHECK(back.vessels[0].pulse.phase == doctest::Approx(0.75));

    CHECK_FALSE(back.vessels[1].arc);
    CHECK(back.vessels[1].width.kind == WidthProfile::Kind::Sine);
    CHECK(back.vessels[1].width.amp == doctest::Approx(1.5));
    CHECK(back.vessels[1].width.freq == doctest::Approx(0.005));

    // Serialize -> parse -> serialize is a fixed point.
    CHECK(scene_to_text(back) == scene_to_text(scene));
}

TEST_CASE("scene files reject unknown keys and bad forms") {
    TempDir dir;

    const auto unknown_key = dir / "k.cfg";
    write_file(unknown_key, "[scene]\nwidth = 64\nheight = 64\nwobble = 3\n");
    try {
        load_scene(unknown_key);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("wobble") != std::string::npos);
    }

    const auto unknown_section = dir / "s.cfg";
    write_file(unknown_section, "[scene]\nwidth = 64\nheight = 64\n\n[venule]\n");
    CHECK_THROWS_AS(load_scene(unknown_section), ValidationError);

    const auto bad_width = dir / "w.cfg";
    write_file(bad_width,
               "[scene]\nwidth = 200\nheight = 120\n\n"
               "[vessel]\npoints = 30,60 170,60\nwidth = taper 8\n");
    CHECK_THROWS_AS(load_scene(bad_width), ValidationError);

    const auto bad_points = dir / "p.cfg";
    write_file(bad_points,
               "[scene]\nwidth = 200\nheight = 120\n\n"
               "[vessel]\npoints = 30,60 170\nwidth = 8\n");
    CHECK_THROWS_AS(load_scene(bad_points), ValidationError);

    CHECK_THROWS_AS(load_scene(dir / "missing.cfg"), IoError);
}

}  // TEST_SUITE
