#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fsl {

using Point = std::array<double, 2>;

/**
 * Bounded open domain in R^d, d = 1 or 2.
 *
 * Primitives (interval, box, ball) carry exact geometry. Raster domains
 * carry a binary indicator sampled at pitch rh; membership for arbitrary
 * points is nearest-cell lookup on that indicator, so re-rasterizing at a
 * different h is well defined but inherits the original resolution.
 */
struct Domain {
    enum class Kind { interval, box, ball, raster };

    Kind kind{Kind::interval};
    int dim{1};

    // interval
    double a{0.0}, b{0.0};
    // box
    Point lo{0.0, 0.0}, hi{0.0, 0.0};
    // ball
    Point center{0.0, 0.0};
    double radius{0.0};
    // raster: mask[row*nx + col] != 0 means inside; cell (col,row) covers
    // [col*rh,(col+1)*rh) x [row*rh,(row+1)*rh) with origin at rorigin.
    int nx{0}, ny{0};
    double rh{0.0};
    Point rorigin{0.0, 0.0};
    std::vector<std::uint8_t> mask;

    bool contains(const Point& x) const;
};

/**
 * Interior cell centers of a uniform grid over a domain's bounding box.
 * Centers sit at origin + (k + 1/2) h per axis and are listed in
 * lexicographic order (x index major, then y), which fixes the matrix
 * ordering everywhere downstream.
 */
struct Grid {
    int dim{1};
    double h{0.0};
    Point origin{0.0, 0.0};
    std::vector<int> ix, iy;      // lattice indices per cell (iy all zero in 1D)
    std::vector<double> cx, cy;   // cell center coordinates (cy all zero in 1D)

    std::size_t size() const { return cx.size(); }
    Point at(std::size_t i) const { return {cx[i], dim == 2 ? cy[i] : 0.0}; }
};

Domain make_interval(double a, double b);
Domain make_box(const Point& lo, const Point& hi);
Domain make_ball(const Point& center, double radius);

// Loads a binary PGM (P5); nonzero pixels are inside. Pixel (col,row) maps to
// the cell [col*h,(col+1)*h) x [row*h,(row+1)*h) with origin (0,0).
Domain make_raster(const std::string& pgm_path, double h);

// "interval:a,b" | "box:x0,y0,x1,y1" | "ball:cx,cy,r" | "raster:path.pgm,h"
Domain parse_domain_spec(const std::string& spec);
std::string domain_spec(const Domain& d);

double measure(const Domain& d);
double diameter(const Domain& d);

// Radius of the largest ball contained in D. Exact for primitives; for
// raster domains computed from a Euclidean distance transform of the
// indicator and reported as a lower bound (complement starts half a cell
// before the nearest complement-cell center).
double inner_radius(const Domain& d);

// Ball (interval in 1D) with the same measure, centered at the origin.
// Measures agree to 1e-12 relative.
Domain schwarz_ball(const Domain& d);

// Distance from an interior point to the boundary. Exact for primitives;
// for raster domains approximated as distance to the nearest complement
// cell center minus h/2, clamped at zero. Throws if x is not inside.
double boundary_distance(const Domain& d, const Point& x);

// Throws if h >= diameter(d) or if no cell center falls inside.
Grid rasterize(const Domain& d, double h);

}  // namespace fsl
