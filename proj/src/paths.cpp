#include "fsl/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fsl/threads.hpp"

namespace fsl {

namespace {

constexpr std::size_t kBlock = 4096;  // fixed reduction block, independent of thread count

void check_step(double alpha, double dt) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("stable increment: alpha outside the open interval (0,2)");
    if (!(dt > 0.0)) throw std::invalid_argument("stable increment: dt must be positive");
}

// per-block tallies for one batch of paths
struct BlockTally {
    std::vector<std::uint64_t> alive;  // per grid time
    std::uint64_t censored{0};
    std::uint64_t finished{0};
    double sum_t{0.0};
    double sum_t2{0.0};
};

// Runs paths [block*kBlock, ...) for every block, one stream per path, and
// reduces the tallies in block order. t_grid may be empty (moments only).
BlockTally run_paths(const Domain& dom, double alpha, const Point& x, double dt, double t_max,
                     std::size_t paths, const std::vector<double>& t_grid, std::uint64_t seed,
                     std::uint64_t stream0, int threads) {
    std::size_t blocks = (paths + kBlock - 1) / kBlock;
    std::vector<BlockTally> tally(blocks);
    run_blocks(blocks, threads, [&](std::size_t b) {
        BlockTally local;
        local.alive.assign(t_grid.size(), 0);
        std::size_t lo = b * kBlock, hi = std::min(paths, lo + kBlock);
        for (std::size_t p = lo; p < hi; ++p) {
            RngStream rng(seed, stream0 + p);
            ExitSample ex = simulate_exit(dom, alpha, x, dt, t_max, rng);
            if (ex.censored) {
                ++local.censored;
                for (std::size_t j = 0; j < t_grid.size(); ++j) ++local.alive[j];
            } else {
                ++local.finished;
                local.sum_t += ex.t;
                local.sum_t2 += ex.t * ex.t;
                for (std::size_t j = 0; j < t_grid.size(); ++j)
                    if (ex.t > t_grid[j]) ++local.alive[j];
            }
        }
        tally[b] = std::move(local);
    });
    BlockTally total;
    total.alive.assign(t_grid.size(), 0);
    for (const auto& tl : tally) {
        for (std::size_t j = 0; j < t_grid.size(); ++j) total.alive[j] += tl.alive[j];
        total.censored += tl.censored;
        total.finished += tl.finished;
        total.sum_t += tl.sum_t;
        total.sum_t2 += tl.sum_t2;
    }
    return total;
}

ExitMoments moments_from(const BlockTally& tally, std::size_t paths) {
    if (tally.finished == 0)
        throw std::runtime_error("mean exit time: every path was censored; raise t_max");
    double m = static_cast<double>(tally.finished);
    ExitMoments out;
    out.mean = tally.sum_t / m;
    double var = (tally.sum_t2 - m * out.mean * out.mean) / std::max(1.0, m - 1.0);
    out.se = std::sqrt(std::max(0.0, var) / m);
    out.censored_fraction = static_cast<double>(tally.censored) / static_cast<double>(paths);
    out.paths = paths;
    return out;
}

}  // namespace

double sample_positive_stable(double rho, RngStream& rng) {
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("positive stable: rho outside the open interval (0,1)");
    double u = std::numbers::pi * rng.uniform();
    double e = rng.exponential();
    return std::sin(rho * u) * std::pow(std::sin(u), -1.0 / rho) *
           std::pow(std::sin((1.0 - rho) * u) / e, (1.0 - rho) / rho);
}

Point sample_stable_increment(int dim, double alpha, double dt, RngStream& rng) {
    check_step(alpha, dt);
    if (dim != 1 && dim != 2) throw std::invalid_argument("stable increment: dim must be 1 or 2");
    double sigma = std::pow(dt, 2.0 / alpha) * sample_positive_stable(0.5 * alpha, rng);
    double s = std::sqrt(2.0 * sigma);
    Point dx{s * rng.normal(), 0.0};
    if (dim == 2) dx[1] = s * rng.normal();
    return dx;
}

ExitSample simulate_exit(const Domain& dom, double alpha, const Point& x, double dt, double t_max,
                         RngStream& rng) {
    check_step(alpha, dt);
    if (!(t_max > 0.0)) throw std::invalid_argument("simulate_exit: t_max must be positive");
    if (!dom.contains(x))
        throw std::invalid_argument("simulate_exit: start point lies outside the domain");
    int dim = dom.kind == Domain::Kind::interval ? 1 : 2;
    std::size_t max_steps = static_cast<std::size_t>(std::ceil(t_max / dt));
    ExitSample out;
    out.start = x;
    Point pos = x;
    for (std::size_t n = 1; n <= max_steps; ++n) {
        Point dx = sample_stable_increment(dim, alpha, dt, rng);
        pos[0] += dx[0];
        pos[1] += dx[1];
        if (!dom.contains(pos)) {
            out.t = static_cast<double>(n) * dt;
            out.where = pos;
            out.censored = false;
            out.steps = n;
            return out;
        }
    }
    out.t = static_cast<double>(max_steps) * dt;
    out.where = pos;
    out.censored = true;
    out.steps = max_steps;
    return out;
}

SurvivalEstimate survival_curve(const Domain& dom, const Point& x, double alpha, std::size_t paths,
                                const std::vector<double>& t_grid, double dt, const RngStream& base,
                                int threads) {
    if (paths < 10000)
        throw std::invalid_argument("survival_curve: need at least 10^4 paths, got " +
                                    std::to_string(paths));
    if (t_grid.empty()) throw std::invalid_argument("survival_curve: empty time grid");
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        if (t_grid[j] < 0.0 || (j > 0 && t_grid[j] <= t_grid[j - 1]))
            throw std::invalid_argument("survival_curve: time grid must be ascending and >= 0");
    }
    if (!(t_grid.back() > 0.0)) throw std::invalid_argument("survival_curve: grid ends at t = 0");

    double t_max = t_grid.back();
    BlockTally tally =
        run_paths(dom, alpha, x, dt, t_max, paths, t_grid, base.seed(), base.stream(), threads);

    SurvivalEstimate est;
    est.domain = domain_spec(dom);
    est.alpha = alpha;
    est.x = x;
    est.t = t_grid;
    est.paths = paths;
    est.dt = dt;
    double n = static_cast<double>(paths);
    est.p.resize(t_grid.size());
    est.se.resize(t_grid.size());
    est.alive.resize(t_grid.size());
    est.censored.assign(t_grid.size(), 0);
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        est.alive[j] = tally.alive[j];
        double p = static_cast<double>(tally.alive[j]) / n;
        est.p[j] = p;
        est.se[j] = std::sqrt(p * (1.0 - p) / n);
    }
    est.censored.back() = tally.censored;
    return est;
}

RateFit fit_lambda1(const SurvivalEstimate& estimate, double tail_fraction) {
    if (estimate.paths == 0 || estimate.t.empty())
        throw std::invalid_argument("fit_lambda1: empty survival estimate");
    if (!(tail_fraction > 0.0) || !(tail_fraction <= 1.0))
        throw std::invalid_argument("fit_lambda1: tail_fraction outside (0,1]");
    std::size_t censored = 0;
    for (std::size_t c : estimate.censored) censored = std::max(censored, c);
    double n = static_cast<double>(estimate.paths);
    if (static_cast<double>(censored) > 0.01 * n)
        throw std::runtime_error("fit_lambda1: censoring above 1% in the fit window (" +
                                 std::to_string(censored) + " of " +
                                 std::to_string(estimate.paths) + " paths); raise t_max");

    double t0 = estimate.t.front(), t1 = estimate.t.back();
    double cut = t1 - tail_fraction * (t1 - t0);
    double floor_p = 10.0 / n;
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < estimate.t.size(); ++j) {
        double p = estimate.p[j];
        if (estimate.t[j] < cut || p <= floor_p || p >= 1.0) continue;
        double y = -std::log(p);
        double w = p * n / (1.0 - p);
        sw += w;
        swx += w * estimate.t[j];
        swy += w * y;
        swxx += w * estimate.t[j] * estimate.t[j];
        swxy += w * estimate.t[j] * y;
        ++used;
    }
    if (used < 4)
        throw std::runtime_error("fit_lambda1: tail window has " + std::to_string(used) +
                                 " usable points, need at least 4");
    double xbar = swx / sw;
    double sxx = swxx - sw * xbar * xbar;
    double sxy = swxy - swy * xbar;
    if (!(sxx > 0.0)) throw std::runtime_error("fit_lambda1: degenerate time window");
    RateFit fit;
    fit.lambda = sxy / sxx;
    fit.se = std::sqrt(1.0 / sxx);
    fit.points = used;
    return fit;
}

ExitMoments mean_exit_time(const Domain& dom, double alpha, const Point& x, double dt, double t_max,
                           std::size_t paths, const RngStream& base, int threads) {
    if (paths == 0) throw std::invalid_argument("mean_exit_time: need at least one path");
    BlockTally tally =
        run_paths(dom, alpha, x, dt, t_max, paths, {}, base.seed(), base.stream(), threads);
    return moments_from(tally, paths);
}

DecayProfile boundary_decay_profile(const Domain& dom, double alpha, std::size_t paths, double dt,
                                    const RngStream& base, int threads, double t_max) {
    if (paths == 0) throw std::invalid_argument("boundary_decay_profile: need at least one path");
    double R = inner_radius(dom);
    if (t_max <= 0.0) t_max = 40.0 * std::pow(R, alpha);

    // boundary point of the +x face, approached along -x
    double face_x, start_y = 0.0;
    switch (dom.kind) {
        case Domain::Kind::interval:
            face_x = dom.b;
            break;
        case Domain::Kind::box:
            face_x = dom.hi[0];
            start_y = 0.5 * (dom.lo[1] + dom.hi[1]);
            break;
        case Domain::Kind::ball:
            face_x = dom.center[0] + dom.radius;
            start_y = dom.center[1];
            break;
        case Domain::Kind::raster:
            throw std::invalid_argument(
                "boundary_decay_profile: raster domains have no exact boundary face");
        default:
            throw std::invalid_argument("boundary_decay_profile: unknown domain kind");
    }

    DecayProfile prof;
    for (int k = 2; k <= 6; ++k) {
        double delta = R * std::pow(2.0, -k);
        Point x{face_x - delta, start_y};
        std::uint64_t stream0 = base.stream() + static_cast<std::uint64_t>(k - 2) * paths;
        BlockTally tally =
            run_paths(dom, alpha, x, dt, t_max, paths, {}, base.seed(), stream0, threads);
        ExitMoments m = moments_from(tally, paths);
        prof.delta.push_back(delta);
        prof.mean_exit.push_back(m.mean);
        prof.se.push_back(m.se);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double m = static_cast<double>(prof.delta.size());
    for (std::size_t i = 0; i < prof.delta.size(); ++i) {
        double lx = std::log(prof.delta[i]);
        double ly = std::log(prof.mean_exit[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    prof.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return prof;
}

}  // namespace fsl
