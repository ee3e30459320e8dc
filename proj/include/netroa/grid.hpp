#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace netroa {

/// snprintf("%.17g") wrapper: shortest round-trippable-enough fixed formatting
/// used by every artifact writer so reruns are byte-identical.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

/**
 * @brief Uniform node-centred rectangle grid with a 3-cell ghost margin.
 *
 * Interior lattice: nx x ny points, x_i = xmin + i*dx for i in [0, nx),
 * dx = (xmax - xmin)/(nx - 1), same for y. Storage indices run over the
 * padded lattice [0, nx + 2*ghost) x [0, ny + 2*ghost); interior index i
 * maps to storage index i + ghost.
 */
struct Grid2D {
    static constexpr int ghost = 3;

    double xmin, xmax, ymin, ymax;
    int nx, ny;

    Grid2D(double xmin_, double xmax_, double ymin_, double ymax_, int nx_, int ny_)
        : xmin(xmin_), xmax(xmax_), ymin(ymin_), ymax(ymax_), nx(nx_), ny(ny_) {
        if (!(std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) &&
              std::isfinite(ymax)))
            throw std::invalid_argument("Grid2D: bounds must be finite");
        if (!(xmax > xmin) || !(ymax > ymin))
            throw std::invalid_argument("Grid2D: bounds must satisfy xmax > xmin, ymax > ymin");
        if (nx < 7 || ny < 7)
            throw std::invalid_argument("Grid2D: need nx >= 7 and ny >= 7");
    }

    double dx() const { return (xmax - xmin) / (nx - 1); }
    double dy() const { return (ymax - ymin) / (ny - 1); }

    int nx_tot() const { return nx + 2 * ghost; }
    int ny_tot() const { return ny + 2 * ghost; }

    /// Coordinates from *storage* indices (ghost points extrapolate outward).
    double x(int gi) const { return xmin + (gi - ghost) * dx(); }
    double y(int gj) const { return ymin + (gj - ghost) * dy(); }

    bool operator==(const Grid2D&) const = default;
};

/**
 * @brief Scalar value field over a Grid2D, ghost margin included.
 *
 * Carries the pseudo-time tag of the level-set march (0 at the initial
 * condition, decreasing as the horizon grows) and a flag recording whether
 * the ghost ring currently holds extrapolated values.
 */
class ScalarField {
public:
    explicit ScalarField(const Grid2D& g)
        : grid_(g), v_(static_cast<std::size_t>(g.nx_tot()) * g.ny_tot(), 0.0) {}

    const Grid2D& grid() const { return grid_; }

    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    bool ghosts_filled() const { return ghosts_filled_; }
    void mark_ghosts(bool filled) { ghosts_filled_ = filled; }

    /// Storage-index access; gi in [0, nx_tot), gj in [0, ny_tot).
    double& at(int gi, int gj) {
        return v_[static_cast<std::size_t>(gi) * grid_.ny_tot() + gj];
    }
    double at(int gi, int gj) const {
        return v_[static_cast<std::size_t>(gi) * grid_.ny_tot() + gj];
    }

    /// Interior storage-index bounds: [ibegin, iend) x [jbegin, jend).
    int ibegin() const { return Grid2D::ghost; }
    int iend() const { return Grid2D::ghost + grid_.nx; }
    int jbegin() const { return Grid2D::ghost; }
    int jend() const { return Grid2D::ghost + grid_.ny; }

    std::vector<double>& raw() { return v_; }
    const std::vector<double>& raw() const { return v_; }

private:
    Grid2D grid_;
    std::vector<double> v_;
    double time_ = 0.0;
    bool ghosts_filled_ = false;
};

/**
 * @brief Fill the ghost margin by linear extrapolation from the two nearest
 * interior points: ghost value m cells out = (1+m)*edge - m*next.
 *
 * x-direction strips for interior rows first, then a y-direction pass over
 * every column including the freshly written x-ghosts, which covers the
 * corner blocks. Idempotent: extrapolating a line reproduces the line.
 */
inline void fill_ghost(ScalarField& f) {
    const Grid2D& g = f.grid();
    const int gh = Grid2D::ghost;
    for (int gj = f.jbegin(); gj < f.jend(); ++gj) {
        const double bl = f.at(gh, gj), nl = f.at(gh + 1, gj);
        const double br = f.at(gh + g.nx - 1, gj), nr = f.at(gh + g.nx - 2, gj);
        for (int m = 1; m <= gh; ++m) {
            f.at(gh - m, gj) = (1.0 + m) * bl - m * nl;
            f.at(gh + g.nx - 1 + m, gj) = (1.0 + m) * br - m * nr;
        }
    }
    for (int gi = 0; gi < g.nx_tot(); ++gi) {
        const double bb = f.at(gi, gh), nb = f.at(gi, gh + 1);
        const double bt = f.at(gi, gh + g.ny - 1), nt = f.at(gi, gh + g.ny - 2);
        for (int m = 1; m <= gh; ++m) {
            f.at(gi, gh - m) = (1.0 + m) * bb - m * nb;
            f.at(gi, gh + g.ny - 1 + m) = (1.0 + m) * bt - m * nt;
        }
    }
    f.mark_ghosts(true);
}

/**
 * @brief Signed distance to the circle of given radius about (cx, cy):
 * negative inside, zero on the circle. Filled on the whole padded lattice.
 */
inline ScalarField signed_distance_circle(const Grid2D& g, double cx, double cy, double radius) {
    if (!(radius > 0.0))
        throw std::invalid_argument("signed_distance_circle: radius must be positive");
    if (cx < g.xmin || cx > g.xmax || cy < g.ymin || cy > g.ymax)
        throw std::invalid_argument("signed_distance_circle: centre lies outside the domain");
    ScalarField f(g);
    for (int gi = 0; gi < g.nx_tot(); ++gi) {
        const double dxc = g.x(gi) - cx;
        for (int gj = 0; gj < g.ny_tot(); ++gj) {
            const double dyc = g.y(gj) - cy;
            f.at(gi, gj) = std::sqrt(dxc * dxc + dyc * dyc) - radius;
        }
    }
    f.mark_ghosts(true);
    return f;
}

/// "x,y,v" CSV over the interior lattice, row-major with x outermost, %.17g, LF endings.
inline void write_field_csv(const ScalarField& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_field_csv: cannot open " + path);
    std::fputs("x,y,v\n", fp);
    const Grid2D& g = f.grid();
    for (int gi = f.ibegin(); gi < f.iend(); ++gi)
        for (int gj = f.jbegin(); gj < f.jend(); ++gj)
            std::fprintf(fp, "%s,%s,%s\n", format_g17(g.x(gi)).c_str(),
                         format_g17(g.y(gj)).c_str(), format_g17(f.at(gi, gj)).c_str());
    std::fclose(fp);
}

} // namespace netroa
