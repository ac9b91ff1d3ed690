#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "svp/caliper.hpp"

using namespace svp;
using namespace svptest;

namespace {

const double kPi = std::acos(-1.0);

CenterlinePath make_path(std::vector<Point> pts) {
    CenterlinePath p;
    p.id = 1;
    p.points = std::move(pts);
    return p;
}

CenterlinePath straight_path(int n, double slope, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> jitter(-1, 1);
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
        pts.push_back({i, int(std::lround(slope * i)) + jitter(rng)});
    return make_path(std::move(pts));
}

// The same six-point window the implementation fits, re-fit by brute
// scanning over angles.
double window_fit(const CenterlinePath& path, int i) {
    const int n = int(path.points.size());
    int lo = i - 2;
    lo = std::clamp(lo, 0, std::max(0, n - 6));
    const int hi = std::min(n - 1, lo + 5);
    std::vector<Point> window(path.points.begin() + lo, path.points.begin() + hi + 1);
    return scan_fit_angle(window);
}

ProfileStack hand_stack(int rows, int cols, double fill) {
    ProfileStack s;
    s.rows = rows;
    s.cols = cols;
    s.values.assign(std::size_t(rows) * cols, fill);
    s.valid.assign(s.values.size(), 1);
    s.col_valid.assign(std::size_t(cols), 1);
    return s;
}

VesselProfileMask hand_mask(const std::vector<std::string>& art) {
    VesselProfileMask m;
    m.rows = int(art.size());
    m.cols = int(art[0].size());
    m.bits.assign(std::size_t(m.rows) * m.cols, 0);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = art[r][c] == '#' ? 1 : 0;
    return m;
}

}  // namespace

TEST_SUITE("caliper") {

TEST_CASE("tangent_at on exact lines") {
    std::vector<Point> horiz, vert, diag, anti;
    for (int i = 0; i < 10; ++i) {
        horiz.push_back({i, 5});
        vert.push_back({5, i});
        diag.push_back({i, i});
        anti.push_back({i, -i});
    }
    CHECK(angle_gap(tangent_at(make_path(horiz), 4), 0.0) < 1e-12);
    CHECK(angle_gap(tangent_at(make_path(vert), 4), kPi / 2) < 1e-12);
    CHECK(angle_gap(tangent_at(make_path(diag), 4), kPi / 4) < 1e-12);
    CHECK(angle_gap(tangent_at(make_path(anti), 4), 3 * kPi / 4) < 1e-12);

    CHECK_THROWS_AS(tangent_at(make_path({Point{3, 3}}), 0), DegeneratePath);
    // Two points are enough for a direction.
    CHECK(angle_gap(tangent_at(make_path({Point{0, 0}, Point{1, 0}}), 0), 0.0) < 1e-12);
}

TEST_CASE("tangent_at agrees with a scanned orthogonal fit") {
    for (std::uint32_t seed : {1u, 2u, 3u})
        for (double slope : {0.0, 0.3, 1.0, 2.5}) {
            const CenterlinePath path = straight_path(24, slope, seed);
            for (int i : {0, 1, 5, 11, 22, 23})
                CHECK(angle_gap(tangent_at(path, i), window_fit(path, i)) < 1e-6);
        }
}

TEST_CASE("profile stack samples along the normal") {
    // Value = y, so a horizontal path must read out consecutive offsets.
    GrayImage grad(40, 60);
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 40; ++x) grad.at(x, y) = std::uint8_t(y);

    std::vector<Point> pts;
    for (int x = 4; x < 36; ++x) pts.push_back({x, 25});
    const ProfileStack stack = build_profile_stack(grad, make_path(pts), 11.0);

    CHECK(stack.rows == 17);  // ceil(1.5 * 11) rounded to odd
    CHECK(stack.cols == 32);
    CHECK(stack.center_row() == 8);
    for (int j = 0; j < stack.cols; ++j)
        for (int r = 0; r < stack.rows; ++r) {
            CHECK(stack.at(r, j) == doctest::Approx(25.0 + r - 8));
            CHECK(stack.valid[std::size_t(r) * stack.cols + j] == 1);
        }
    for (auto cv : stack.col_valid) CHECK(cv == 1);

    // Row-count rule and parameter guards.
    CHECK(build_profile_stack(grad, make_path(pts), 10.0).rows == 15);
    CHECK(build_profile_stack(grad, make_path(pts), 10.4).rows == 17);
    CHECK(build_profile_stack(grad, make_path(pts), 0.5).rows == 3);
    CHECK_THROWS_AS(build_profile_stack(grad, make_path(pts), 0.0), InvalidParameter);
}

TEST_CASE("profile stack imputes rows that leave the image") {
    GrayImage grad(40, 20);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 40; ++x) grad.at(x, y) = std::uint8_t(y);

    std::vector<Point> pts;
    for (int x = 4; x < 36; ++x) pts.push_back({x, 2});
    const ProfileStack stack = build_profile_stack(grad, make_path(pts), 11.0);

    // Offsets -8..-3 fall above the top edge: whole rows invalid, imputed
    // with the mean of everything valid (offsets -2..8 hit y = 0..10).
    for (int j = 0; j < stack.cols; ++j) {
        for (int r = 0; r < 6; ++r) {
            CHECK(stack.valid[std::size_t(r) * stack.cols + j] == 0);
            CHECK(stack.at(r, j) == doctest::Approx(5.0));
        }
        for (int r = 6; r < 17; ++r) {
            CHECK(stack.valid[std::size_t(r) * stack.cols + j] == 1);
            CHECK(stack.at(r, j) == doctest::Approx(double(r - 6)));
        }
        CHECK(stack.col_valid[std::size_t(j)] == 1);
    }
}

TEST_CASE("kmeans3 on separated bands") {
    const std::vector<double> vals = {10, 12, 100, 104, 200, 206};
    const auto c = kmeans3(vals);
    CHECK(c[0] == doctest::Approx(11.0));
    CHECK(c[1] == doctest::Approx(102.0));
    CHECK(c[2] == doctest::Approx(203.0));

    const std::vector<double> one = {42.0};
    const auto cc = kmeans3(one);
    CHECK(cc[0] == doctest::Approx(42.0));
    CHECK(cc[2] == doctest::Approx(42.0));

    CHECK_THROWS_AS(kmeans3(std::vector<double>{}), InvalidParameter);
}

TEST_CASE("kmeans3 finds the optimal partition of balanced bands") {
    for (std::uint32_t seed = 0; seed < 500; ++seed) {
        std::mt19937 rng(seed);
        std::uniform_int_distribution<int> kd(1, 5), jd(-15, 15);
        const int k = kd(rng);
        std::vector<double> vals;
        for (int center : {40, 130, 220})
            for (int i = 0; i < k; ++i) vals.push_back(center + jd(rng));
        const auto c = kmeans3(vals);
        CHECK(assignment_sse3(vals, c) <= optimal_sse3(vals) + 1e-9);
    }
}

TEST_CASE("cluster_profiles marks the lowest band") {
    ProfileStack s = hand_stack(9, 4, 0.0);
    for (int j = 0; j < 4; ++j)
        for (int r = 0; r < 9; ++r)
            s.at(r, j) = r < 3 ? 200.0 + j : (r < 6 ? 100.0 + j : 30.0 + j);

    const VesselProfileMask m = cluster_profiles(s);
    CHECK_FALSE(m.low_contrast);
    for (int j = 0; j < 4; ++j)
        for (int r = 0; r < 9; ++r) CHECK(int(m.at(r, j)) == int(r >= 6));
}

TEST_CASE("cluster_profiles degenerate inputs") {
    // Constant: everything lands in (and ties into) the lowest cluster.
    const VesselProfileMask flat = cluster_profiles(hand_stack(5, 3, 80.0));
    CHECK(flat.low_contrast);
    for (auto b : flat.bits) CHECK(b == 1);

    // Two levels: the dark level is still picked out, but flagged.
    ProfileStack two = hand_stack(6, 2, 150.0);
    for (int j = 0; j < 2; ++j)
        for (int r = 2; r < 4; ++r) two.at(r, j) = 60.0;
    const VesselProfileMask m = cluster_profiles(two);
    CHECK(m.low_contrast);
    for (int j = 0; j < 2; ++j)
        for (int r = 0; r < 6; ++r) CHECK(int(m.at(r, j)) == int(r == 2 || r == 3));
}

TEST_CASE("cluster_profiles ignores imputed cells when fitting") {
    // One imputed cell carries a rogue 0.0; centroids must come from the
    // valid tri-modal data, and the rogue cell still classifies lowest.
    ProfileStack s = hand_stack(9, 3, 0.0);
    for (int j = 0; j < 3; ++j)
        for (int r = 0; r < 9; ++r) s.at(r, j) = r < 3 ? 220.0 : (r < 6 ? 130.0 : 40.0);
    s.at(0, 0) = 0.0;
    s.valid[0] = 0;

    const VesselProfileMask m = cluster_profiles(s);
    CHECK_FALSE(m.low_contrast);
    CHECK(m.at(0, 0) == 1);                       // 0 is nearest the low centroid
    CHECK(m.at(0, 1) == 0);
    for (int j = 0; j < 3; ++j)
        for (int r = 6; r < 9; ++r) CHECK(m.at(r, j) == 1);
}

TEST_CASE("repair_profile passes") {
    // Column fill spans first..last set row, then the mirror AND trims
    // whatever has no partner across the center row.
    const VesselProfileMask a = repair_profile(hand_mask({
        ".",
        "#",
        ".",
        "#",
        ".",
        ".",
        ".",
    }), 20);
    // fill rows 1..3, mirror (rows 3..5) leaves only row 3.
    for (int r = 0; r < 7; ++r) CHECK(int(a.at(r, 0)) == int(r == 3));

    const VesselProfileMask b = repair_profile(hand_mask({
        ".",
        "#",
        "#",
        "#",
        "#",
        ".",
        ".",
    }), 20);
    for (int r = 0; r < 7; ++r) CHECK(int(b.at(r, 0)) == int(r >= 2 && r <= 4));
}

TEST_CASE("repair_profile joins sub-threshold row gaps") {
    // Center row set at cols 0..1 and 21..23: the 19-wide gap closes.
    VesselProfileMask m;
    m.rows = 5;
    m.cols = 24;
    m.bits.assign(5 * 24, 0);
    m.at(2, 0) = m.at(2, 1) = 1;
    m.at(2, 21) = m.at(2, 22) = m.at(2, 23) = 1;
    const VesselProfileMask joined = repair_profile(m, 20);
    for (int j = 0; j < 24; ++j) CHECK(joined.at(2, j) == 1);

    // A 20-wide gap stays open.
    VesselProfileMask w;
    w.rows = 5;
    w.cols = 25;
    w.bits.assign(5 * 25, 0);
    w.at(2, 0) = 1;
    w.at(2, 21) = 1;
    const VesselProfileMask open = repair_profile(w, 20);
    CHECK(open.at(2, 0) == 1);
    CHECK(open.at(2, 21) == 1);
    for (int j = 1; j < 21; ++j) CHECK(open.at(2, j) == 0);
}

TEST_CASE("repair_profile output is mirror symmetric") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> bit(0, 3);
    for (int trial = 0; trial < 20; ++trial) {
        VesselProfileMask m;
        m.rows = 9;
        m.cols = 30;
        m.bits.assign(9 * 30, 0);
        for (auto& b : m.bits) b = bit(rng) == 0 ? 1 : 0;
        const VesselProfileMask rep = repair_profile(m, 20);
        for (int r = 0; r < m.rows; ++r)
            for (int j = 0; j < m.cols; ++j)
                CHECK(rep.at(r, j) == rep.at(m.rows - 1 - r, j));
    }
}

TEST_CASE("measure_diameters per column") {
    const VesselProfileMask m = hand_mask({
        "..##.",
        "..#.#",
        "#...#",
        "#..##",
        "#..##",
        "...##",
        ".....",
    });
    const DiameterProfile center = measure_diameters(m);
    CHECK(center.widths == std::vector<double>{3, 0, 2, 3, 5});
    //  col0: run 2..4 through center 3          -> 3
    //  col1: empty                              -> 0
    //  col2: center empty, longest run rows 0-1 -> 2
    //  col3: run 3..5 through center            -> 3
    //  col4: run 1..5 through center            -> 5

    const DiameterProfile total = measure_diameters(m, CountMode::Total);
    CHECK(total.widths == std::vector<double>{3, 0, 2, 4, 5});
}

TEST_CASE("estimate_vessel measures a straight bar") {
    GrayImage img(60, 51);
    for (int y = 0; y < 51; ++y)
        for (int x = 0; x < 60; ++x)
            img.at(x, y) = std::uint8_t(y >= 20 && y <= 30 ? 60 : 150 + x % 3);

    std::vector<Point> on, off;
    for (int x = 10; x < 50; ++x) {
        on.push_back({x, 25});
        off.push_back({x, 45});
    }
    const std::vector<CenterlinePath> paths = {make_path(on), make_path(off)};

    const VesselEstimate est = estimate_vessel(img, paths, Point{30, 26}, 11.0);
    CHECK(est.path_index == 0);
    CHECK(est.click_distance == doctest::Approx(1.0));
    CHECK_FALSE(est.clustered.low_contrast);
    REQUIRE(est.widths.widths.size() == 40);
    for (double w : est.widths.widths) CHECK(w == doctest::Approx(11.0));

    CHECK_THROWS_AS(estimate_vessel(img, {}, Point{0, 0}, 11.0), NoVessel);
    CHECK_THROWS_AS(estimate_vessel(img, {make_path({Point{5, 5}})}, Point{0, 0}, 11.0),
                    DegeneratePath);
}

}  // TEST_SUITE
