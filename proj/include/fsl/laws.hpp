#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fsl/eigensolver.hpp"
#include "fsl/geometry.hpp"

namespace fsl {

/**
 * Richardson-extrapolated eigenvalues over a grid of alpha values.
 * One row per (alpha, i); `order` and `reliable` carry the extrapolation
 * diagnostics, `domain` the round-trippable domain spec string.
 */
struct SweepRow {
    double alpha{0.0};
    std::size_t i{0};  // eigenvalue index, 1-based in reports and CSV
    double lambda{0.0};
    double order{0.0};
    bool reliable{false};
    std::string domain;
};

struct AlphaSweep {
    std::vector<SweepRow> rows;
};

struct LawReport {
    std::string law;
    std::string instance;
    double margin{0.0};
    bool pass{false};
};

// Assembles and eigensolves each (alpha, h) pair over a halving refinement
// schedule (coarse to fine, at least three levels), extrapolating the first
// k eigenvalues per alpha. An empty alpha list yields an empty table.
// Assembly and solver errors are rethrown with (alpha, h) context.
// on_operator, when set, sees every assembled operator before it is
// destroyed (acceptance checks hook in here); it may be called from worker
// threads.
AlphaSweep alpha_sweep(const Domain& dom, const std::vector<double>& alphas, std::size_t k,
                       const std::vector<double>& h_schedule, int threads = 1,
                       const std::function<void(const GridOperator&)>& on_operator = {});

// First k Dirichlet eigenvalues of -Delta: exact for intervals and boxes,
// squared Bessel zeros (multiplicity two for nonzero angular index) for
// balls. Raster domains are not supported.
std::vector<double> exact_laplacian_eigs(const Domain& dom, std::size_t k);

// 2^alpha Gamma(1+alpha/2) Gamma((1+alpha)/2) / (sqrt(pi) R^alpha), the
// first-eigenvalue lower bound for a convex domain of inner radius R.
// Defined for 0 < alpha <= 2 (the formula has no pole at 2).
double convex_lower_bound(double alpha, double R);

// For every i and every alpha pair a < b in the sweep:
// (lambda_i^a)^{1/a} <= (lambda_i^b)^{1/b} within tol (relative).
std::vector<LawReport> check_power_monotonicity(const AlphaSweep& sweep, double tol);

// lambda_i^alpha <= mu_i^{alpha/2} within tol; mu is the analytic Laplacian
// spectrum (the beta = 2 endpoint), covering every i in the sweep.
std::vector<LawReport> check_upper_bound(const AlphaSweep& sweep, const std::vector<double>& mu,
                                         double tol);

// convex_lower_bound <= lambda_1 <= mu_1^{alpha/2}, both within tol.
std::vector<LawReport> check_sandwich(const AlphaSweep& sweep, const Domain& dom, double tol);

/**
 * lambda_1(D) vs lambda_1 of the measure-matched ball, over a shared
 * refinement schedule. Extrapolated values are compared when both sides
 * extrapolate reliably; otherwise both sides fall back to the finest grid
 * (rasterized-disk eigenvalue sequences need not be in a clean power-law
 * regime at feasible resolutions). margin = (lambda_1(D) - lambda_1(B)) /
 * lambda_1(D) and must be nonnegative within tol.
 */
LawReport check_faber_krahn(const Domain& dom, double alpha,
                            const std::vector<double>& h_schedule, double tol,
                            const std::function<void(const GridOperator&)>& on_operator = {});

// Discrete domain monotonicity at matched lattices: requires every cell of
// the inner grid to coincide with an outer-grid cell (1e-12), then checks
// lambda_i(outer) <= lambda_i(inner) within tol for i <= k. This is a
// matrix-level theorem (principal-submatrix interlacing plus increased
// killing), hence the 1e-10 default, not a discretization tolerance.
std::vector<LawReport> check_domain_monotonicity(const Domain& inner, const Domain& outer,
                                                 double alpha, double h, std::size_t k = 10,
                                                 double tol = 1e-10);

// Per-index profile of lambda_i over an equally spaced alpha grid. Indices
// sampled at fewer than two alphas produce no row, so a single-point sweep
// yields an empty table; an unequally spaced grid is an error.
struct ContinuityRow {
    std::size_t i{0};
    double median_increment{0.0};
    double max_increment{0.0};
    bool monotone{false};
    bool smooth{false};  // no increment above 5x the median
};
std::vector<ContinuityRow> continuity_profile(const AlphaSweep& sweep);

// Spectral mapping mu -> mu^{alpha/beta} for 0 < alpha <= beta <= 2
// (identity at alpha = beta); input must be positive and ascending.
std::vector<double> subordination_spectrum(const std::vector<double>& mu, double alpha,
                                           double beta);

// Least-squares slope of log N(lambda) vs log lambda over the middle third
// of an ascending spectrum; needs at least 30 eigenvalues.
double weyl_fit(const std::vector<double>& lambdas);

// Serialization helpers shared by the CLI and tests.
std::string sweep_to_csv(const AlphaSweep& sweep);
AlphaSweep sweep_from_csv(const std::string& csv_text);
std::string reports_to_jsonl(const std::vector<LawReport>& reports);

namespace detail {
// Ascending-series Bessel J_nu (integer nu) with long double accumulation;
// adequate for zeros below x ~ 30. Exposed for oracle tests.
double bessel_j(int nu, double x);
// First `count` positive zeros of J_nu by scan and bisection.
std::vector<double> bessel_zeros(int nu, std::size_t count);
}  // namespace detail

}  // namespace fsl
