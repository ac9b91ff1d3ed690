#include "svp/skeleton.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace svp {

namespace {

// Neighbor order p2..p9: N, NE, E, SE, S, SW, W, NW (clockwise from north).
constexpr int kNx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kNy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

inline int neighbor_code(const BinaryMask& m, int x, int y) {
    int code = 0;
    for (int i = 0; i < 8; ++i) {
        const int px = x + kNx[i], py = y + kNy[i];
        if (m.in_bounds(px, py) && m.at(px, py)) code |= 1 << i;
    }
    return code;
}

inline int rising_transitions(int code) {
    int a = 0;
    for (int i = 0; i < 8; ++i) {
        const int cur = (code >> i) & 1;
        const int nxt = (code >> ((i + 1) % 8)) & 1;
        if (!cur && nxt) ++a;
    }
    return a;
}

// Deletability tables over the 8-bit neighbor code, one per subiteration.
std::array<std::array<bool, 256>, 2> make_thin_luts() {
    std::array<std::array<bool, 256>, 2> lut{};
    for (int code = 0; code < 256; ++code) {
        const int b = __builtin_popcount(code);
        const int a = rising_transitions(code);
        const bool n = code & 1, e = code & 4, s = code & 16, w = code & 64;
        const bool common = b >= 2 && b <= 6 && a == 1;
        lut[0][code] = common && !(n && e && s) && !(e && s && w);
        lut[1][code] = common && !(n && e && w) && !(n && s && w);
    }
    return lut;
}

bool thin_subiteration(BinaryMask& m, const std::array<bool, 256>& lut) {
    std::vector<Point> doomed;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y) && lut[neighbor_code(m, x, y)]) doomed.push_back({x, y});
    for (const Point& p : doomed) m.at(p.x, p.y) = 0;
    return !doomed.empty();
}

bool in_filled_square(const BinaryMask& m, int x, int y) {
    for (int by = y - 1; by <= y; ++by)
        for (int bx = x - 1; bx <= x; ++bx) {
            if (bx < 0 || by < 0 || bx + 1 >= m.width || by + 1 >= m.height) continue;
            if (m.at(bx, by) && m.at(bx + 1, by) && m.at(bx, by + 1) &&
                m.at(bx + 1, by + 1))
                return true;
        }
    return false;
}

// True when deleting the center of this 3x3 neighborhood cannot change
// topology: the set neighbors stay one 8-connected group among themselves
// and exactly one background region touches the center edge-on.
std::array<bool, 256> make_simple_lut() {
    std::array<bool, 256> lut{};
    const auto adjacent = [](int i, int j, int reach) {
        const int dx = std::abs(kNx[i] - kNx[j]), dy = std::abs(kNy[i] - kNy[j]);
        return reach == 8 ? std::max(dx, dy) == 1 : dx + dy == 1;
    };
    const auto groups = [&](int members, int reach) {
        int comps = 0, seen = 0;
        for (int i = 0; i < 8; ++i) {
            if (!((members >> i) & 1) || ((seen >> i) & 1)) continue;
            ++comps;
            int stack = 1 << i;
            while (stack) {
                const int k = __builtin_ctz(stack);
                stack &= stack - 1;
                seen |= 1 << k;
                for (int j = 0; j < 8; ++j)
                    if (((members >> j) & 1) && !((seen >> j) & 1) && adjacent(k, j, reach))
                        stack |= 1 << j;
            }
        }
        return comps;
    };
    for (int code = 1; code < 255; ++code) {
        const int bg = ~code & 0xff;
        // Count only background groups that include an edge neighbor
        // (N/E/S/W, ring indices 0/2/4/6).
        int touching = 0;
        int rest = bg;
        for (int i = 0; i < 8 && rest; ++i) {
            if (!((rest >> i) & 1)) continue;
            int comp = 1 << i;
            bool grown = true;
            while (grown) {
                grown = false;
                for (int j = 0; j < 8; ++j)
                    if (((rest >> j) & 1) && !((comp >> j) & 1))
                        for (int k = 0; k < 8; ++k)
                            if (((comp >> k) & 1) && adjacent(j, k, 4)) {
                                comp |= 1 << j;
                                grown = true;
                                break;
                            }
            }
            if (comp & 0b01010101) ++touching;
            rest &= ~comp;
        }
        lut[code] = groups(code, 8) == 1 && touching == 1;
    }
    return lut;
}

// The simultaneous passes can stall with filled 2x2 blocks where diagonal
// staircases meet. Peeling off pixels whose deletion provably preserves
// topology restores unit width; sequential raster order keeps it
// deterministic.
void erase_square_remnants(BinaryMask& m) {
    static const auto simple = make_simple_lut();
    bool progress = true;
    while (progress) {
        progress = false;
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x) {
                if (!m.at(x, y) || !in_filled_square(m, x, y)) continue;
                const int code = neighbor_code(m, x, y);
                if (simple[code] && __builtin_popcount(code) >= 2) {
                    m.at(x, y) = 0;
                    progress = true;
                }
            }
    }
}

}  // namespace

BinaryMask thin(const BinaryMask& mask) {
    static const auto luts = make_thin_luts();
    BinaryMask m = mask;
    bool changed = true;
    while (changed) {
        changed = thin_subiteration(m, luts[0]);
        changed |= thin_subiteration(m, luts[1]);
    }
    erase_square_remnants(m);
    return m;
}

BinaryMask close_centerline_gaps(const BinaryMask& skel, int gap_se_length) {
    BinaryMask merged = skel;
    for (int deg = 0; deg < 180; deg += 15) {
        const BinaryMask closed =
            morphology(skel, MorphOp::Close, StructuringElement::line(gap_se_length, deg));
        for (std::size_t i = 0; i < merged.bits.size(); ++i) merged.bits[i] |= closed.bits[i];
    }
    return thin(merged);
}

BinaryMask prune_spurs(const BinaryMask& skel, int max_len) {
    static const auto simple = make_simple_lut();
    BinaryMask m = skel;
    if (max_len <= 1) return m;

    auto degree = [&](int x, int y) {
        int n = 0;
        for (int i = 0; i < 8; ++i) {
            const int px = x + kNx[i], py = y + kNy[i];
            if (m.in_bounds(px, py) && m.at(px, py)) ++n;
        }
        return n;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int sy = 0; sy < m.height; ++sy) {
            for (int sx = 0; sx < m.width; ++sx) {
                if (!m.at(sx, sy) || degree(sx, sy) != 1) continue;

                // Walk inward from the tip until the line forks or ends (a
                // free line: keep everything). At the fork, test whether the
                // last walked pixel could be deleted without changing
                // topology once the rest of the branch is gone; if so it is
                // spur material too, otherwise it sits on the through-line
                // and stays. Branches that reach max_len are arms in their
                // own right and stay.
                std::vector<Point> branch{{sx, sy}};
                Point prev{-1, -1}, cur{sx, sy};
                bool at_junction = false;
                while (int(branch.size()) <= max_len) {
                    Point next{-1, -1};
                    int continuations = 0;
                    for (int i = 0; i < 8; ++i) {
                        const int px = cur.x + kNx[i], py = cur.y + kNy[i];
                        if (!m.in_bounds(px, py) || !m.at(px, py)) continue;
                        if (px == prev.x && py == prev.y) continue;
                        ++continuations;
                        next = {px, py};
                    }
                    if (continuations == 0) break;  // other endpoint: free line
                    if (continuations >= 2) {       // cur is where the fork meets
                        at_junction = true;
                        int code = 0;
                        for (int i = 0; i < 8; ++i) {
                            const int px = cur.x + kNx[i], py = cur.y + kNy[i];
                            if (!m.in_bounds(px, py) || !m.at(px, py)) continue;
                            const bool walked = std::any_of(
                                branch.begin(), branch.end(),
                                [&](const Point& p) { return p.x == px && p.y == py; });
                            if (!walked) code |= 1 << i;
                        }
                        if (!simple[code]) branch.pop_back();
                        break;
                    }
                    branch.push_back(next);
                    prev = cur;
                    cur = next;
                }
                if (at_junction && int(branch.size()) < max_len) {
                    for (const Point& p : branch) m.at(p.x, p.y) = 0;
                    changed = true;
                }
            }
        }
    }
    return m;
}

BifurcationSet detect_bifurcations(const BinaryMask& skel) {
    BifurcationSet out;
    out.flags = BinaryMask(skel.width, skel.height);
    for (int y = 0; y < skel.height; ++y) {
        for (int x = 0; x < skel.width; ++x) {
            if (!skel.at(x, y)) continue;
            if (rising_transitions(neighbor_code(skel, x, y)) >= 3) {
                out.flags.at(x, y) = 1;
                out.points.push_back({x, y});
            }
        }
    }
    return out;
}

std::vector<CenterlinePath> prune_and_trace(const BinaryMask& skel, const BifurcationSet& bifs,
                                            int min_length) {
    BinaryMask work = skel;
    for (const Point& p : bifs.points) work.at(p.x, p.y) = 0;

    const ComponentLabels cc = connected_components(work, 8);
    const int w = work.width, h = work.height;

    // Preferred step order: 4-neighbors before diagonals keeps the walk from
    // cutting corners on staircase segments.
    static const int ox[8] = {0, 1, 0, -1, 1, 1, -1, -1};
    static const int oy[8] = {-1, 0, 1, 0, -1, 1, 1, -1};

    // Pixels of each component in raster order, so restarts stay cheap and
    // deterministic.
    std::vector<std::vector<Point>> members(std::size_t(cc.count) + 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (const std::int32_t l = cc.at(x, y)) members[std::size_t(l)].push_back({x, y});

    std::vector<CenterlinePath> paths;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);

    auto unvisited_degree = [&](Point p, std::int32_t label) {
        int n = 0;
        for (int i = 0; i < 8; ++i) {
            const int px = p.x + ox[i], py = p.y + oy[i];
            if (px >= 0 && py >= 0 && px < w && py < h && cc.at(px, py) == label &&
                !visited[std::size_t(py) * w + px])
                ++n;
        }
        return n;
    };

    for (std::int32_t label = 1; label <= cc.count; ++label) {
        if (cc.areas[label - 1] < min_length) continue;

        // Walk every linear run of the component: free ends first, then
        // whatever is left (closed curves) from its raster-first pixel.
        // A single walk can dead-end where a flagged pixel was cut out, so
        // one component may yield several runs.
        std::size_t left = members[std::size_t(label)].size();
        while (left > 0) {
            Point start{-1, -1};
            bool loop = false;
            for (const Point& p : members[std::size_t(label)]) {
                if (visited[std::size_t(p.y) * w + p.x]) continue;
                if (unvisited_degree(p, label) <= 1) { start = p; break; }
            }
            if (start.x < 0) {
                loop = true;
                for (const Point& p : members[std::size_t(label)])
                    if (!visited[std::size_t(p.y) * w + p.x]) { start = p; break; }
            }

            CenterlinePath path;
            path.loop = loop;
            Point cur = start;
            visited[std::size_t(cur.y) * w + cur.x] = 1;
            path.points.push_back(cur);
            for (;;) {
                Point next{-1, -1};
                for (int i = 0; i < 8; ++i) {
                    const int px = cur.x + ox[i], py = cur.y + oy[i];
                    if (px < 0 || py < 0 || px >= w || py >= h) continue;
                    if (cc.at(px, py) == label && !visited[std::size_t(py) * w + px]) {
                        next = {px, py};
                        break;
                    }
                }
                if (next.x < 0) break;
                visited[std::size_t(next.y) * w + next.x] = 1;
                path.points.push_back(next);
                cur = next;
            }
            left -= path.points.size();
            if (int(path.points.size()) >= min_length)
                paths.push_back(std::move(path));
        }
    }
    for (std::size_t i = 0; i < paths.size(); ++i) paths[i].id = int(i) + 1;
    return paths;
}

Selection select_nearest(const std::vector<CenterlinePath>& paths, Point click) {
    if (paths.empty())
        throw NoVessel("no centerline paths to select from");
    Selection best;
    double best_sq = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (const Point& p : paths[i].points) {
            const double dx = p.x - click.x, dy = p.y - click.y;
            const double sq = dx * dx + dy * dy;
            if (sq < best_sq) {  // strict: ties stay with the lower id
                best_sq = sq;
                best.index = int(i);
            }
        }
    }
    best.distance = std::sqrt(best_sq);
    return best;
}

std::vector<CenterlinePath> extract_centerlines(const BinaryMask& vessel_mask,
                                                const SkeletonParams& params) {
    const BinaryMask skel = prune_spurs(
        close_centerline_gaps(thin(vessel_mask), params.gap_se_length), params.spur_length);
    const BifurcationSet bifs = detect_bifurcations(skel);
    return prune_and_trace(skel, bifs, params.prune_length);
}

}  // namespace svp
