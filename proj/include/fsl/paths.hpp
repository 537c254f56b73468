#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fsl/geometry.hpp"
#include "fsl/rng.hpp"

namespace fsl {

class RngStream;

// One draw of the standard positive rho-stable law, E[e^{-s sigma}] = e^{-s^rho},
// via the Kanter representation. Requires 0 < rho < 1.
double sample_positive_stable(double rho, RngStream& rng);

// One increment of the symmetric alpha-stable process over a step dt:
// subordinate a per-coordinate-variance-2 Brownian motion by
// dt^{2/alpha} times a standard (alpha/2)-stable time, so that
// E[e^{i xi . dX}] = e^{-dt |xi|^alpha}. dim 1 leaves the second
// coordinate zero.
Point sample_stable_increment(int dim, double alpha, double dt, RngStream& rng);

/**
 * First exit of a discrete-time sample of the process. The walk is sampled
 * exactly in distribution at grid times, so `t` is the first grid time at
 * which the position lies outside the domain, upward-biased by at most one
 * step (excursions between grid times are missed). A walk still inside at
 * t_max is censored; `where` then holds the last (interior) position.
 */
struct ExitSample {
    Point start{0.0, 0.0};
    double t{0.0};
    Point where{0.0, 0.0};
    bool censored{false};
    std::size_t steps{0};
};

ExitSample simulate_exit(const Domain& dom, double alpha, const Point& x, double dt, double t_max,
                         RngStream& rng);

/**
 * Monte Carlo survival probabilities p(t_j) = P_x(tau > t_j) on a fixed time
 * grid, with binomial standard errors. `censored[j]` counts paths censored
 * at or before t_j; censoring happens only at the last grid point, and a
 * censored path is alive at every grid time. Path p draws from stream
 * (base stream + p), and tallies reduce over fixed 4096-path blocks in block
 * order, so the result is bit-identical at any thread count.
 */
struct SurvivalEstimate {
    std::string domain;
    double alpha{0.0};
    Point x{0.0, 0.0};
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> se;
    std::vector<std::size_t> alive;
    std::vector<std::size_t> censored;
    std::size_t paths{0};
    double dt{0.0};
};

SurvivalEstimate survival_curve(const Domain& dom, const Point& x, double alpha, std::size_t paths,
                                const std::vector<double>& t_grid, double dt, const RngStream& base,
                                int threads = 1);

// Weighted least-squares slope of -log p vs t over the trailing
// `tail_fraction` of the time span, using points with 10/paths < p < 1 and
// weight p*n/(1-p) (the delta-method inverse variance of log p). Needs at
// least four such points; runs with more than 1% of paths censored are
// rejected.
struct RateFit {
    double lambda{0.0};
    double se{0.0};
    std::size_t points{0};
};

RateFit fit_lambda1(const SurvivalEstimate& estimate, double tail_fraction = 0.5);

// Sample mean and standard error of the exit time; censored paths are
// excluded from the moments and reported as a fraction.
struct ExitMoments {
    double mean{0.0};
    double se{0.0};
    double censored_fraction{0.0};
    std::size_t paths{0};
};

ExitMoments mean_exit_time(const Domain& dom, double alpha, const Point& x, double dt, double t_max,
                           std::size_t paths, const RngStream& base, int threads = 1);

/**
 * Mean exit time along a geometric ladder of starts approaching the +x face
 * of the boundary: delta_k = R/2^k for k = 2..6 with R the inner radius,
 * start at boundary distance delta_k. `exponent` is the least-squares slope
 * of log(mean) vs log(delta). Raster domains have no exact face to anchor
 * to and are rejected. Rung r, path p draws from stream
 * (base stream + r*paths + p).
 */
struct DecayProfile {
    std::vector<double> delta;
    std::vector<double> mean_exit;
    std::vector<double> se;
    double exponent{0.0};
};

DecayProfile boundary_decay_profile(const Domain& dom, double alpha, std::size_t paths, double dt,
                                    const RngStream& base, int threads = 1, double t_max = 0.0);

}  // namespace fsl
