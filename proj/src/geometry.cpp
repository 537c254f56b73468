#include "fsl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fsl {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double parse_num(const std::string& tok, const std::string& ctx) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        fail("domain spec: bad number '" + tok + "' in " + ctx);
    }
    if (pos != tok.size()) fail("domain spec: trailing junk in '" + tok + "' in " + ctx);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

// Squared Euclidean distance transform, one row/column at a time
// (lower-envelope-of-parabolas construction). f holds squared distances on
// entry (0 at sources, +inf elsewhere) and is overwritten with the
// transform of the sampled points.
void edt_1d(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * double(q)) - (f[v[k]] + v[k] * double(v[k]))) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * double(q)) - (f[v[k]] + v[k] * double(v[k]))) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - double(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

// Squared distances (in cell units) from each cell of a w x h image to the
// nearest source cell. src != 0 marks sources.
std::vector<double> edt_2d(const std::vector<std::uint8_t>& src, int w, int h) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> g(static_cast<std::size_t>(w) * h);
    int nmax = std::max(w, h);
    std::vector<double> f(nmax), d(nmax), z(nmax + 1);
    std::vector<int> v(nmax);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = src[std::size_t(y) * w + x] ? 0.0 : inf;
        edt_1d(f, d, v, z, h);
        for (int y = 0; y < h; ++y) g[std::size_t(y) * w + x] = d[y];
    }
    std::vector<double> out(g.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = g[std::size_t(y) * w + x];
        edt_1d(f, d, v, z, w);
        for (int x = 0; x < w; ++x) out[std::size_t(y) * w + x] = d[x];
    }
    return out;
}

void bounding_box(const Domain& d, Point& lo, Point& hi) {
    switch (d.kind) {
        case Domain::Kind::interval:
            lo = {d.a, 0.0};
            hi = {d.b, 0.0};
            break;
        case Domain::Kind::box:
            lo = d.lo;
            hi = d.hi;
            break;
        case Domain::Kind::ball:
            lo = {d.center[0] - d.radius, d.center[1] - d.radius};
            hi = {d.center[0] + d.radius, d.center[1] + d.radius};
            break;
        case Domain::Kind::raster:
            lo = d.rorigin;
            hi = {d.rorigin[0] + d.nx * d.rh, d.rorigin[1] + d.ny * d.rh};
            break;
    }
}

}  // namespace

bool Domain::contains(const Point& x) const {
    switch (kind) {
        case Kind::interval:
            return x[0] > a && x[0] < b;
        case Kind::box:
            return x[0] > lo[0] && x[0] < hi[0] && x[1] > lo[1] && x[1] < hi[1];
        case Kind::ball: {
            double dx = x[0] - center[0], dy = x[1] - center[1];
            return dx * dx + dy * dy < radius * radius;
        }
        case Kind::raster: {
            int col = static_cast<int>(std::floor((x[0] - rorigin[0]) / rh));
            int row = static_cast<int>(std::floor((x[1] - rorigin[1]) / rh));
            if (col < 0 || col >= nx || row < 0 || row >= ny) return false;
            return mask[std::size_t(row) * nx + col] != 0;
        }
    }
    return false;
}

Domain make_interval(double a, double b) {
    if (!(b > a)) fail("interval: need a < b, got a=" + std::to_string(a) + " b=" + std::to_string(b));
    Domain d;
    d.kind = Domain::Kind::interval;
    d.dim = 1;
    d.a = a;
    d.b = b;
    return d;
}

Domain make_box(const Point& lo, const Point& hi) {
    if (!(hi[0] > lo[0] && hi[1] > lo[1])) fail("box: need lo < hi per axis");
    Domain d;
    d.kind = Domain::Kind::box;
    d.dim = 2;
    d.lo = lo;
    d.hi = hi;
    return d;
}

Domain make_ball(const Point& center, double radius) {
    if (!(radius > 0.0)) fail("ball: need radius > 0, got " + std::to_string(radius));
    Domain d;
    d.kind = Domain::Kind::ball;
    d.dim = 2;
    d.center = center;
    d.radius = radius;
    return d;
}

Domain make_raster(const std::string& pgm_path, double h) {
    if (!(h > 0.0)) fail("raster: need h > 0");
    std::ifstream in(pgm_path, std::ios::binary);
    if (!in) fail("raster: cannot open '" + pgm_path + "'");
    auto next_token = [&in, &pgm_path]() {
        std::string tok;
        for (;;) {
            int c = in.get();
            if (c == EOF) fail("raster: truncated header in '" + pgm_path + "'");
            if (c == '#') {
                while (c != EOF && c != '\n') c = in.get();
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
    };
    if (next_token() != "P5") fail("raster: '" + pgm_path + "' is not binary PGM (P5)");
    int w = std::stoi(next_token());
    int hh = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (w <= 0 || hh <= 0 || maxval <= 0 || maxval > 255)
        fail("raster: unsupported PGM geometry in '" + pgm_path + "'");
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * hh);
    in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (in.gcount() != static_cast<std::streamsize>(px.size()))
        fail("raster: truncated pixel data in '" + pgm_path + "'");

    Domain d;
    d.kind = Domain::Kind::raster;
    d.dim = 2;
    d.nx = w;
    d.ny = hh;
    d.rh = h;
    d.rorigin = {0.0, 0.0};
    d.mask.resize(px.size());
    std::size_t inside = 0;
    for (std::size_t i = 0; i < px.size(); ++i) {
        d.mask[i] = px[i] != 0 ? 1 : 0;
        inside += d.mask[i];
    }
    if (inside == 0) fail("raster: '" + pgm_path + "' has no interior pixels");
    return d;
}

Domain parse_domain_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) fail("domain spec '" + spec + "': expected kind:params");
    std::string kind = spec.substr(0, colon);
    auto parts = split(spec.substr(colon + 1), ',');
    if (kind == "interval") {
        if (parts.size() != 2) fail("domain spec '" + spec + "': interval needs a,b");
        return make_interval(parse_num(parts[0], spec), parse_num(parts[1], spec));
    }
    if (kind == "box") {
        if (parts.size() != 4) fail("domain spec '" + spec + "': box needs x0,y0,x1,y1");
        return make_box({parse_num(parts[0], spec), parse_num(parts[1], spec)},
                        {parse_num(parts[2], spec), parse_num(parts[3], spec)});
    }
    if (kind == "ball") {
        if (parts.size() != 3) fail("domain spec '" + spec + "': ball needs cx,cy,r");
        return make_ball({parse_num(parts[0], spec), parse_num(parts[1], spec)},
                         parse_num(parts[2], spec));
    }
    if (kind == "raster") {
        if (parts.size() != 2) fail("domain spec '" + spec + "': raster needs path,h");
        return make_raster(parts[0], parse_num(parts[1], spec));
    }
    fail("domain spec '" + spec + "': unknown kind '" + kind + "'");
}

std::string domain_spec(const Domain& d) {
    char buf[160];
    switch (d.kind) {
        case Domain::Kind::interval:
            std::snprintf(buf, sizeof buf, "interval:%.17g,%.17g", d.a, d.b);
            return buf;
        case Domain::Kind::box:
            std::snprintf(buf, sizeof buf, "box:%.17g,%.17g,%.17g,%.17g", d.lo[0], d.lo[1], d.hi[0],
                          d.hi[1]);
            return buf;
        case Domain::Kind::ball:
            std::snprintf(buf, sizeof buf, "ball:%.17g,%.17g,%.17g", d.center[0], d.center[1],
                          d.radius);
            return buf;
        case Domain::Kind::raster:
            std::snprintf(buf, sizeof buf, "raster:%dx%d,%.17g", d.nx, d.ny, d.rh);
            return buf;
    }
    return "?";
}

double measure(const Domain& d) {
    switch (d.kind) {
        case Domain::Kind::interval:
            return d.b - d.a;
        case Domain::Kind::box:
            return (d.hi[0] - d.lo[0]) * (d.hi[1] - d.lo[1]);
        case Domain::Kind::ball:
            return std::numbers::pi * d.radius * d.radius;
        case Domain::Kind::raster: {
            std::size_t n = 0;
            for (auto m : d.mask) n += m;
            return double(n) * d.rh * d.rh;
        }
    }
    return 0.0;
}

double diameter(const Domain& d) {
    if (d.kind == Domain::Kind::ball) return 2.0 * d.radius;
    Point lo, hi;
    bounding_box(d, lo, hi);
    if (d.dim == 1) return hi[0] - lo[0];
    return std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
}

double inner_radius(const Domain& d) {
    switch (d.kind) {
        case Domain::Kind::interval:
            return 0.5 * (d.b - d.a);
        case Domain::Kind::box:
            return 0.5 * std::min(d.hi[0] - d.lo[0], d.hi[1] - d.lo[1]);
        case Domain::Kind::ball:
            return d.radius;
        case Domain::Kind::raster: {
            // Sources are complement cells plus a one-cell ring around the
            // image, so the domain never extends past the raster extent.
            int w = d.nx + 2, h = d.ny + 2;
            std::vector<std::uint8_t> src(static_cast<std::size_t>(w) * h, 1);
            for (int r = 0; r < d.ny; ++r)
                for (int c = 0; c < d.nx; ++c)
                    src[std::size_t(r + 1) * w + (c + 1)] = d.mask[std::size_t(r) * d.nx + c] ? 0 : 1;
            auto d2 = edt_2d(src, w, h);
            double best = 0.0;
            for (int r = 0; r < d.ny; ++r)
                for (int c = 0; c < d.nx; ++c)
                    if (d.mask[std::size_t(r) * d.nx + c])
                        best = std::max(best, d2[std::size_t(r + 1) * w + (c + 1)]);
            double dist = std::sqrt(best) * d.rh - 0.5 * d.rh;
            return std::max(dist, 0.5 * d.rh);
        }
    }
    return 0.0;
}

Domain schwarz_ball(const Domain& d) {
    double m = measure(d);
    if (d.dim == 1) return make_interval(-0.5 * m, 0.5 * m);
    return make_ball({0.0, 0.0}, std::sqrt(m / std::numbers::pi));
}

double boundary_distance(const Domain& d, const Point& x) {
    if (!d.contains(x)) {
        fail("boundary_distance: point (" + std::to_string(x[0]) + "," + std::to_string(x[1]) +
             ") is not inside the domain");
    }
    switch (d.kind) {
        case Domain::Kind::interval:
            return std::min(x[0] - d.a, d.b - x[0]);
        case Domain::Kind::box:
            return std::min(std::min(x[0] - d.lo[0], d.hi[0] - x[0]),
                            std::min(x[1] - d.lo[1], d.hi[1] - x[1]));
        case Domain::Kind::ball:
            return d.radius - std::hypot(x[0] - d.center[0], x[1] - d.center[1]);
        case Domain::Kind::raster: {
            double best = std::numeric_limits<double>::infinity();
            for (int r = -1; r <= d.ny; ++r) {
                for (int c = -1; c <= d.nx; ++c) {
                    bool inside = r >= 0 && r < d.ny && c >= 0 && c < d.nx &&
                                  d.mask[std::size_t(r) * d.nx + c];
                    if (inside) continue;
                    double cx = d.rorigin[0] + (c + 0.5) * d.rh;
                    double cy = d.rorigin[1] + (r + 0.5) * d.rh;
                    best = std::min(best, std::hypot(x[0] - cx, x[1] - cy));
                }
            }
            return std::max(best - 0.5 * d.rh, 0.0);
        }
    }
    return 0.0;
}

Grid rasterize(const Domain& d, double h) {
    if (!(h > 0.0)) fail("rasterize: need h > 0, got " + std::to_string(h));
    if (h >= diameter(d))
        fail("rasterize: h=" + std::to_string(h) + " is not below the domain diameter " +
             std::to_string(diameter(d)));
    Point lo, hi;
    bounding_box(d, lo, hi);
    Grid g;
    g.dim = d.dim;
    g.h = h;
    g.origin = lo;
    int kx = static_cast<int>(std::floor((hi[0] - lo[0]) / h)) + 1;
    int ky = d.dim == 2 ? static_cast<int>(std::floor((hi[1] - lo[1]) / h)) + 1 : 1;
    for (int i = 0; i < kx; ++i) {
        double x = lo[0] + (i + 0.5) * h;
        if (d.dim == 1) {
            if (d.contains({x, 0.0})) {
                g.ix.push_back(i);
                g.iy.push_back(0);
                g.cx.push_back(x);
                g.cy.push_back(0.0);
            }
            continue;
        }
        for (int j = 0; j < ky; ++j) {
            double y = lo[1] + (j + 0.5) * h;
            if (d.contains({x, y})) {
                g.ix.push_back(i);
                g.iy.push_back(j);
                g.cx.push_back(x);
                g.cy.push_back(y);
            }
        }
    }
    if (g.size() == 0) fail("rasterize: no cell center falls inside the domain at h=" + std::to_string(h));
    return g;
}

}  // namespace fsl
