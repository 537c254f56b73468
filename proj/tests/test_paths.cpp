#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "fsl/geometry.hpp"
#include "fsl/paths.hpp"
#include "fsl/rng.hpp"

using namespace fsl;

namespace {

struct MeanSe {
    double mean{0.0};
    double se{0.0};
};

// Sample mean with its standard error, for 4-sigma Monte Carlo gates.
template <typename F>
MeanSe sample(std::size_t n, F&& draw) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = draw();
        s += v;
        s2 += v * v;
    }
    MeanSe out;
    out.mean = s / n;
    out.se = std::sqrt((s2 / n - out.mean * out.mean) / (n - 1.0));
    return out;
}

SurvivalEstimate synthetic_curve(const std::vector<double>& t, const std::vector<double>& p,
                                 std::size_t paths) {
    SurvivalEstimate est;
    est.domain = "interval:-1,1";
    est.alpha = 1.0;
    est.t = t;
    est.p = p;
    est.paths = paths;
    est.dt = 1e-3;
    est.se.resize(t.size());
    est.alive.resize(t.size());
    est.censored.assign(t.size(), 0);
    for (std::size_t j = 0; j < t.size(); ++j) {
        est.alive[j] = std::size_t(p[j] * paths);
        est.se[j] = std::sqrt(p[j] * (1.0 - p[j]) / paths);
    }
    return est;
}

}  // namespace

TEST_CASE("counter rng streams are deterministic and disjoint") {
    RngStream a(42, 3), b(42, 3), c(42, 4);
    CHECK(a.seed() == 42);
    CHECK(a.stream() == 3);
    bool same = true, differ = false;
    for (int i = 0; i < 100; ++i) {
        std::uint64_t va = a.next();
        same = same && (va == b.next());
        differ = differ || (va != c.next());
    }
    CHECK(same);
    CHECK(differ);

    RngStream u(7, 0);
    for (int i = 0; i < 10000; ++i) {
        double v = u.uniform();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    RngStream e(7, 1);
    for (int i = 0; i < 1000; ++i) CHECK(e.exponential() > 0.0);
}

TEST_CASE("Kanter sampler has the stable Laplace transform") {
    for (double rho : {0.25, 0.5, 0.75}) {
        RngStream rng(1, 0);
        for (double s : {0.5, 1.0, 2.0}) {
            MeanSe m = sample(200'000, [&] {
                double v = sample_positive_stable(rho, rng);
                return std::exp(-s * v);
            });
            double exact = std::exp(-std::pow(s, rho));
            CHECK(std::abs(m.mean - exact) <= 4.0 * m.se);
        }
    }

    RngStream rng(1, 1);
    for (int i = 0; i < 1000; ++i) CHECK(sample_positive_stable(0.5, rng) > 0.0);

    CHECK_THROWS_AS(sample_positive_stable(0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_positive_stable(1.0, rng), std::invalid_argument);
}

TEST_CASE("stable increments match exact tail and characteristic values") {
    const double dt = 1e-3;

    // alpha = 1 in one dimension is Cauchy with scale dt:
    // P(|dX| > 10 dt) = 1 - (2/pi) atan(10).
    {
        RngStream rng(2, 0);
        double exact = 1.0 - 2.0 / std::numbers::pi * std::atan(10.0);
        MeanSe m = sample(200'000, [&] {
            Point d = sample_stable_increment(1, 1.0, dt, rng);
            return std::abs(d[0]) > 10.0 * dt ? 1.0 : 0.0;
        });
        CHECK(std::abs(m.mean - exact) <= 4.0 * m.se);
    }

    // In two dimensions the radial tail is dt / sqrt(r^2 + dt^2):
    // at r = 10 dt this is 1/sqrt(101).
    {
        RngStream rng(2, 1);
        double exact = 1.0 / std::sqrt(101.0);
        MeanSe m = sample(200'000, [&] {
            Point d = sample_stable_increment(2, 1.0, dt, rng);
            return std::hypot(d[0], d[1]) > 10.0 * dt ? 1.0 : 0.0;
        });
        CHECK(std::abs(m.mean - exact) <= 4.0 * m.se);
    }

    // Characteristic function at xi = 1 for alpha near 2.
    {
        RngStream rng(2, 2);
        double step = 0.1;
        MeanSe m = sample(100'000, [&] {
            Point d = sample_stable_increment(1, 1.95, step, rng);
            return std::cos(d[0]);
        });
        CHECK(std::abs(m.mean - std::exp(-step)) <= 4.0 * m.se);
    }

    // Symmetry: the sample mean of a heavy-tailed symmetric law still
    // concentrates near zero at this scale.
    {
        RngStream rng(2, 3);
        MeanSe m = sample(100'000, [&] {
            return sample_stable_increment(1, 1.5, 0.01, rng)[0];
        });
        CHECK(std::abs(m.mean) < 0.01);
    }

    RngStream rng(2, 4);
    CHECK(sample_stable_increment(1, 1.0, dt, rng)[1] == 0.0);
    CHECK_THROWS_AS(sample_stable_increment(3, 1.0, dt, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_increment(1, 2.0, dt, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_increment(1, 1.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("exit simulation respects the domain and the clock") {
    Domain I = make_interval(-1.0, 1.0);
    RngStream rng(3, 0);

    CHECK_THROWS_AS(simulate_exit(I, 1.0, {1.5, 0.0}, 1e-3, 1.0, rng), std::invalid_argument);
    Domain B = make_ball({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(simulate_exit(B, 1.0, {1.0, 1.0}, 1e-3, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate_exit(I, 1.0, {0.0, 0.0}, 1e-3, 0.0, rng), std::invalid_argument);

    ExitSample ex = simulate_exit(I, 1.2, {0.0, 0.0}, 0.05, 100.0, rng);
    CHECK_FALSE(ex.censored);
    CHECK(ex.steps >= 1);
    CHECK(ex.t == doctest::Approx(ex.steps * 0.05).epsilon(1e-15));
    CHECK_FALSE(I.contains(ex.where));

    ExitSample bx = simulate_exit(B, 1.0, {0.5, 0.0}, 0.05, 200.0, rng);
    CHECK_FALSE(bx.censored);
    CHECK_FALSE(B.contains(bx.where));

    // Two steps of a microscopic clock cannot leave the interval.
    ExitSample cz = simulate_exit(I, 1.0, {0.0, 0.0}, 1e-6, 2e-6, rng);
    CHECK(cz.censored);
    CHECK(cz.t == 2e-6);
    CHECK(I.contains(cz.where));
}

TEST_CASE("survival curves start at one and decrease") {
    Domain I = make_interval(-1.0, 1.0);
    std::vector<double> grid;
    for (int j = 0; j <= 10; ++j) grid.push_back(0.1 * j);
    RngStream base(11, 0);
    SurvivalEstimate est = survival_curve(I, {0.0, 0.0}, 1.0, 10'000, grid, 1e-3, base);

    CHECK(est.domain == "interval:-1,1");
    CHECK(est.alpha == 1.0);
    CHECK(est.paths == 10'000);
    REQUIRE(est.p.size() == grid.size());
    CHECK(est.p[0] == 1.0);
    CHECK(est.alive[0] == 10'000);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(est.p[j] >= 0.0);
        CHECK(est.p[j] <= 1.0);
        CHECK(est.p[j] == double(est.alive[j]) / 10'000);
        CHECK(est.se[j] >= 0.0);
        if (j > 0) {
            CHECK(est.p[j] <= est.p[j - 1]);
            CHECK(est.censored[j - 1] <= est.censored[j]);
        }
    }
    // The clock stops at 1.0, so only the last point can carry censoring.
    CHECK(est.censored[grid.size() - 2] == 0);

    CHECK_THROWS_AS(survival_curve(I, {0.0, 0.0}, 1.0, 500, grid, 1e-3, base),
                    std::invalid_argument);
    CHECK_THROWS_AS(survival_curve(I, {0.0, 0.0}, 1.0, 10'000, {}, 1e-3, base),
                    std::invalid_argument);
    CHECK_THROWS_AS(survival_curve(I, {0.0, 0.0}, 1.0, 10'000, {0.2, 0.1}, 1e-3, base),
                    std::invalid_argument);
}

TEST_CASE("survival curves are bit-identical at any thread count") {
    Domain I = make_interval(-1.0, 1.0);
    std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    RngStream base(13, 0);

    SurvivalEstimate one = survival_curve(I, {0.0, 0.0}, 1.0, 10'000, grid, 1e-2, base, 1);
    for (int threads : {2, 8}) {
        SurvivalEstimate t = survival_curve(I, {0.0, 0.0}, 1.0, 10'000, grid, 1e-2, base, threads);
        CHECK(std::memcmp(t.p.data(), one.p.data(), one.p.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(t.se.data(), one.se.data(), one.se.size() * sizeof(double)) == 0);
        CHECK(t.alive == one.alive);
        CHECK(t.censored == one.censored);
    }
}

TEST_CASE("rate fits recover exact and late-window exponents") {
    std::vector<double> t, p;
    for (int j = 0; j <= 20; ++j) {
        t.push_back(0.1 * j);
        p.push_back(std::exp(-2.0 * 0.1 * j));
    }
    RateFit f = fit_lambda1(synthetic_curve(t, p, 1'000'000));
    CHECK(f.lambda == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(f.se >= 0.0);
    CHECK(f.points >= 4);

    // A two-mode mixture straightens out in the late window.
    std::vector<double> tm, pm;
    for (int j = 0; j <= 60; ++j) {
        double tt = 0.1 * j;
        tm.push_back(tt);
        pm.push_back((2.0 / 3.0) * std::exp(-tt) + (1.0 / 3.0) * std::exp(-3.0 * tt));
    }
    RateFit fm = fit_lambda1(synthetic_curve(tm, pm, 1'000'000));
    CHECK(std::abs(fm.lambda - 1.0) < 0.05);

    // Heavy censoring disqualifies the run.
    SurvivalEstimate cen = synthetic_curve(t, p, 100'000);
    cen.censored.back() = 2'000;
    CHECK_THROWS_AS(fit_lambda1(cen), std::runtime_error);

    // Too few usable points in the window.
    SurvivalEstimate thin = synthetic_curve({0.0, 1.0, 2.0, 3.0},
                                            {1.0, 0.14, 0.019, 0.0026}, 100'000);
    CHECK_THROWS_AS(fit_lambda1(thin, 0.25), std::runtime_error);

    SurvivalEstimate empty;
    CHECK_THROWS_AS(fit_lambda1(empty), std::invalid_argument);
    CHECK_THROWS_AS(fit_lambda1(synthetic_curve(t, p, 100'000), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_lambda1(synthetic_curve(t, p, 100'000), 1.5), std::invalid_argument);
}

TEST_CASE("mean exit times match the closed interval form") {
    Domain I = make_interval(-1.0, 1.0);
    RngStream base(17, 0);
    ExitMoments m = mean_exit_time(I, 1.0, {0.0, 0.0}, 1e-3, 8.0, 20'000, base);
    // E tau = (1 - x^2)^{1/2} = 1 at the center; the discrete clock biases
    // upward by O(dt) and the sample error is ~0.006.
    CHECK(std::abs(m.mean - 1.0) < 0.05);
    CHECK(m.se < 0.02);
    CHECK(m.censored_fraction < 0.01);
    CHECK(m.paths == 20'000);

    ExitMoments mt = mean_exit_time(I, 1.0, {0.0, 0.0}, 1e-3, 8.0, 20'000, base, 4);
    CHECK(mt.mean == m.mean);
    CHECK(mt.se == m.se);

    // Everything censored is an error, not a zero.
    CHECK_THROWS_AS(mean_exit_time(I, 1.0, {0.0, 0.0}, 1e-6, 2e-6, 100, base),
                    std::runtime_error);
}

TEST_CASE("exit times scale exactly with the domain dilation") {
    // With alpha = 1 and the clock scaled by c^alpha = 2, every path from
    // the doubled interval is the doubled path, so the sample means agree
    // bit for bit after scaling.
    RngStream base(19, 0);
    ExitMoments small = mean_exit_time(make_interval(-1.0, 1.0), 1.0, {0.0, 0.0},
                                       1e-3, 8.0, 5'000, base);
    ExitMoments big = mean_exit_time(make_interval(-2.0, 2.0), 1.0, {0.0, 0.0},
                                     2e-3, 16.0, 5'000, base);
    CHECK(big.mean == doctest::Approx(2.0 * small.mean).epsilon(1e-12));
    CHECK(big.censored_fraction == small.censored_fraction);
}

TEST_CASE("disk exit times match the closed form at the center") {
    Domain B = make_ball({0.0, 0.0}, 1.0);
    RngStream base(23, 0);
    ExitMoments m = mean_exit_time(B, 1.0, {0.0, 0.0}, 5e-4, 10.0, 20'000, base);
    // E tau at the center of the unit disk for alpha = 1 is 2/pi.
    CHECK(std::abs(m.mean - 2.0 / std::numbers::pi) < 0.02);
}

TEST_CASE("boundary decay profile shows the half-power exponent") {
    Domain I = make_interval(-1.0, 1.0);
    RngStream base(29, 0);
    DecayProfile prof = boundary_decay_profile(I, 1.0, 4'000, 1e-3, base, 1);

    REQUIRE(prof.delta.size() == 5);
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(prof.delta[k] == doctest::Approx(std::pow(2.0, -(2.0 + double(k)))).epsilon(1e-15));

    // Exit gets faster closer to the boundary, monotonically within noise.
    for (std::size_t k = 0; k + 1 < 5; ++k)
        CHECK(prof.mean_exit[k + 1] <
              prof.mean_exit[k] + 2.0 * (prof.se[k] + prof.se[k + 1]));

    CHECK(prof.exponent > 0.38);
    CHECK(prof.exponent < 0.62);

    Domain raster = I;
    raster.kind = Domain::Kind::raster;
    CHECK_THROWS_AS(boundary_decay_profile(raster, 1.0, 4'000, 1e-3, base), std::invalid_argument);
}
