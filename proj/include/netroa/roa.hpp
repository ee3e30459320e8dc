#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "netroa/grid.hpp"

namespace netroa {

/// Boolean field over the interior lattice, row-major with x outermost.
struct MaskGrid {
    Grid2D grid;
    std::vector<std::uint8_t> inside;

    explicit MaskGrid(const Grid2D& g)
        : grid(g), inside(static_cast<std::size_t>(g.nx) * g.ny, 0) {}

    std::uint8_t& at(int i, int j) { return inside[static_cast<std::size_t>(i) * grid.ny + j]; }
    std::uint8_t at(int i, int j) const {
        return inside[static_cast<std::size_t>(i) * grid.ny + j];
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint8_t b : inside) c += b;
        return c;
    }
};

/// Points where the field value is <= level.
inline MaskGrid sublevel_mask(const ScalarField& f, double level = 0.0) {
    MaskGrid m(f.grid());
    for (int i = 0; i < m.grid.nx; ++i)
        for (int j = 0; j < m.grid.ny; ++j)
            m.at(i, j) = f.at(i + Grid2D::ghost, j + Grid2D::ghost) <= level ? 1 : 0;
    return m;
}

/// Cell-count area estimate: one cell of dx*dy per captured point.
inline double mask_area(const MaskGrid& m) {
    return static_cast<double>(m.count()) * m.grid.dx() * m.grid.dy();
}

using Polyline = std::vector<std::array<double, 2>>;

inline double polyline_length(const Polyline& p) {
    double len = 0.0;
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
        len += std::hypot(p[k + 1][0] - p[k][0], p[k + 1][1] - p[k][1]);
    return len;
}

/// Shoelace area; positive for counter-clockwise loops. Closed polylines
/// repeat their first vertex, so the implicit closing edge contributes zero.
inline double polygon_signed_area(const Polyline& p) {
    double acc = 0.0;
    const std::size_t n = p.size();
    if (n < 3) return 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k)
        acc += p[k][0] * p[k + 1][1] - p[k + 1][0] * p[k][1];
    acc += p[n - 1][0] * p[0][1] - p[0][0] * p[n - 1][1];
    return 0.5 * acc;
}

namespace contour_detail {

// Cell-local edge labels; corners are A = (i,j), B = (i+1,j), C = (i+1,j+1),
// D = (i,j+1). Every edge is identified by a dense integer key so that the
// two cells sharing it agree on the crossing point bit-for-bit.
enum Edge : int { bottom = 0, right = 1, top = 2, left = 3 };

struct Segment {
    std::int64_t entry_key, exit_key;
    double ex, ey; // entry crossing
    double xx, xy; // exit crossing
};

struct Crossing {
    double x, y;
};

// Linear interpolation along the canonical (lower-corner-first) edge.
inline Crossing interp(double x1, double y1, double s1, double x2, double y2, double s2) {
    const double t = s1 / (s1 - s2);
    return Crossing{x1 + t * (x2 - x1), y1 + t * (y2 - y1)};
}

} // namespace contour_detail

/**
 * @brief Marching-squares extraction of the level curve, as polylines in
 * physical coordinates.
 *
 * Segments are oriented with the sublevel region on the left, so closed
 * loops around captured regions come out counter-clockwise. Saddle cells
 * are disambiguated by the sign of the corner average. Chains that reach
 * the domain boundary stay open; interior chains close (first vertex
 * repeated at the end). The cell scan and chain walk are deterministic
 * row-major passes.
 */
inline std::vector<Polyline> extract_contour(const ScalarField& f, double level = 0.0) {
    using namespace contour_detail;
    const Grid2D& g = f.grid();
    const int nx = g.nx, ny = g.ny, gh = Grid2D::ghost;

    auto value = [&](int i, int j) { return f.at(i + gh, j + gh) - level; };
    auto xof = [&](int i) { return g.x(i + gh); };
    auto yof = [&](int j) { return g.y(j + gh); };
    // Horizontal edge (i,j)-(i+1,j): key 2*(j*nx+i); vertical (i,j)-(i,j+1): key 2*(j*nx+i)+1.
    auto hkey = [&](int i, int j) { return 2 * (static_cast<std::int64_t>(j) * nx + i); };
    auto vkey = [&](int i, int j) { return 2 * (static_cast<std::int64_t>(j) * nx + i) + 1; };

    std::vector<Segment> segs;
    for (int cj = 0; cj + 1 < ny; ++cj)
        for (int ci = 0; ci + 1 < nx; ++ci) {
            const double sA = value(ci, cj), sB = value(ci + 1, cj);
            const double sC = value(ci + 1, cj + 1), sD = value(ci, cj + 1);
            const int code = (sA <= 0.0 ? 1 : 0) | (sB <= 0.0 ? 2 : 0) | (sC <= 0.0 ? 4 : 0) |
                             (sD <= 0.0 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const double xl = xof(ci), xr = xof(ci + 1), yb = yof(cj), yt = yof(cj + 1);
            auto cross = [&](Edge e) -> Crossing {
                switch (e) {
                    case bottom: return interp(xl, yb, sA, xr, yb, sB);
                    case right: return interp(xr, yb, sB, xr, yt, sC);
                    case top: return interp(xl, yt, sD, xr, yt, sC);
                    default: return interp(xl, yb, sA, xl, yt, sD);
                }
            };
            auto key = [&](Edge e) -> std::int64_t {
                switch (e) {
                    case bottom: return hkey(ci, cj);
                    case right: return vkey(ci + 1, cj);
                    case top: return hkey(ci, cj + 1);
                    default: return vkey(ci, cj);
                }
            };
            auto emit = [&](Edge from, Edge to) {
                const Crossing p = cross(from), q = cross(to);
                segs.push_back(Segment{key(from), key(to), p.x, p.y, q.x, q.y});
            };

            switch (code) {
                case 1: emit(bottom, left); break;             // {A}
                case 2: emit(right, bottom); break;            // {B}
                case 3: emit(right, left); break;              // {A,B}
                case 4: emit(top, right); break;               // {C}
                case 6: emit(top, bottom); break;              // {B,C}
                case 7: emit(top, left); break;                // {A,B,C}
                case 8: emit(left, top); break;                // {D}
                case 9: emit(bottom, top); break;              // {A,D}
                case 11: emit(right, top); break;              // {A,B,D}
                case 12: emit(left, right); break;             // {C,D}
                case 13: emit(bottom, right); break;           // {A,C,D}
                case 14: emit(left, bottom); break;            // {B,C,D}
                case 5:                                        // {A,C} saddle
                    if (0.25 * (sA + sB + sC + sD) <= 0.0) {
                        emit(bottom, right);
                        emit(top, left);
                    } else {
                        emit(bottom, left);
                        emit(top, right);
                    }
                    break;
                case 10:                                       // {B,D} saddle
                    if (0.25 * (sA + sB + sC + sD) <= 0.0) {
                        emit(left, bottom);
                        emit(right, top);
                    } else {
                        emit(right, bottom);
                        emit(left, top);
                    }
                    break;
                default: break;
            }
        }

    // Edge-key lookup tables: which segment enters from / exits into an edge.
    std::vector<std::int32_t> entry_at(static_cast<std::size_t>(2) * nx * ny, -1);
    std::vector<std::int32_t> exit_at(static_cast<std::size_t>(2) * nx * ny, -1);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        entry_at[static_cast<std::size_t>(segs[s].entry_key)] = static_cast<std::int32_t>(s);
        exit_at[static_cast<std::size_t>(segs[s].exit_key)] = static_cast<std::int32_t>(s);
    }

    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> out;
    auto walk = [&](std::size_t start) {
        Polyline line;
        line.push_back({segs[start].ex, segs[start].ey});
        std::int32_t cur = static_cast<std::int32_t>(start);
        while (cur >= 0 && !used[static_cast<std::size_t>(cur)]) {
            const Segment& s = segs[static_cast<std::size_t>(cur)];
            used[static_cast<std::size_t>(cur)] = true;
            line.push_back({s.xx, s.xy});
            cur = entry_at[static_cast<std::size_t>(s.exit_key)];
        }
        out.push_back(std::move(line));
    };

    // Open chains first: a chain starts where nothing feeds its entry edge.
    for (std::size_t s = 0; s < segs.size(); ++s)
        if (!used[s] && exit_at[static_cast<std::size_t>(segs[s].entry_key)] < 0) walk(s);
    // Remaining segments belong to closed loops.
    for (std::size_t s = 0; s < segs.size(); ++s)
        if (!used[s]) walk(s);
    return out;
}

/**
 * @brief One captured-region estimate: the sublevel mask of a snapshot, its
 * boundary polylines, the cell-count area, and the horizon it corresponds to.
 */
struct RoaEstimate {
    MaskGrid mask;
    std::vector<Polyline> contours;
    double area;
    double horizon;
};

inline RoaEstimate make_roa_estimate(const ScalarField& snapshot, double level = 0.0) {
    MaskGrid m = sublevel_mask(snapshot, level);
    const double a = mask_area(m);
    return RoaEstimate{std::move(m), extract_contour(snapshot, level), a, -snapshot.time()};
}

/// "x,y,inside" CSV over the interior lattice, row-major with x outermost.
inline void write_mask_csv(const MaskGrid& m, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_mask_csv: cannot open " + path);
    std::fputs("x,y,inside\n", fp);
    for (int i = 0; i < m.grid.nx; ++i)
        for (int j = 0; j < m.grid.ny; ++j)
            std::fprintf(fp, "%s,%s,%d\n", format_g17(m.grid.x(i + Grid2D::ghost)).c_str(),
                         format_g17(m.grid.y(j + Grid2D::ghost)).c_str(), m.at(i, j) ? 1 : 0);
    std::fclose(fp);
}

/// "polyline_id,x,y" CSV; ids are 0-based in extraction order.
inline void write_contour_csv(const std::vector<Polyline>& contours, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_contour_csv: cannot open " + path);
    std::fputs("polyline_id,x,y\n", fp);
    for (std::size_t id = 0; id < contours.size(); ++id)
        for (const auto& pt : contours[id])
            std::fprintf(fp, "%zu,%s,%s\n", id, format_g17(pt[0]).c_str(),
                         format_g17(pt[1]).c_str());
    std::fclose(fp);
}

} // namespace netroa
