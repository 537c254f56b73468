#include "fsl/laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fsl/threads.hpp"

namespace fsl {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_alphas(const std::vector<double>& alphas) {
    for (double a : alphas)
        if (!(a > 0.0) || !(a < 2.0))
            throw std::invalid_argument("alpha sweep: alpha " + std::to_string(a) +
                                        " outside the open interval (0,2)");
}

std::string pair_instance(const std::string& domain, std::size_t i, double a, double b) {
    std::ostringstream os;
    os << "domain=" << domain << ";i=" << i << ";alpha=" << a << "->" << b;
    return os.str();
}

// minimal CSV splitter: commas split fields except inside double quotes
std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
            continue;
        }
        if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    out.push_back(cur);
    return out;
}

}  // namespace

namespace detail {

double bessel_j(int nu, double x) {
    if (nu < 0) throw std::invalid_argument("bessel_j: nu must be nonnegative");
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    // ascending series; long double keeps ~18 digits so cancellation at
    // x ~ 30 still leaves ~7 correct
    long double half = 0.5L * static_cast<long double>(x);
    long double term = 1.0L;
    for (int k = 1; k <= nu; ++k) term *= half / k;
    long double sum = term;
    long double x2 = half * half;
    for (int k = 1; k < 400; ++k) {
        term *= -x2 / (static_cast<long double>(k) * (k + nu));
        sum += term;
        if (std::abs(static_cast<double>(term)) < 1e-22 * (1.0 + std::abs(static_cast<double>(sum))))
            break;
    }
    return static_cast<double>(sum);
}

std::vector<double> bessel_zeros(int nu, std::size_t count) {
    std::vector<double> zeros;
    double x = std::max(0.5, static_cast<double>(nu));
    double prev = bessel_j(nu, x);
    const double step = 0.05;
    while (zeros.size() < count) {
        double xn = x + step;
        if (xn > 60.0)
            throw std::runtime_error("bessel_zeros: series range exhausted before finding " +
                                     std::to_string(count) + " zeros of J_" + std::to_string(nu));
        double cur = bessel_j(nu, xn);
        if ((prev < 0.0) != (cur < 0.0)) {
            double lo = x, hi = xn;
            for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                if ((bessel_j(nu, mid) < 0.0) == (prev < 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        x = xn;
        prev = cur;
    }
    return zeros;
}

}  // namespace detail

AlphaSweep alpha_sweep(const Domain& dom, const std::vector<double>& alphas, std::size_t k,
                       const std::vector<double>& h_schedule, int threads,
                       const std::function<void(const GridOperator&)>& on_operator) {
    check_alphas(alphas);
    if (alphas.empty()) return {};
    if (k == 0) throw std::invalid_argument("alpha sweep: k must be positive");
    if (h_schedule.size() < 3)
        throw std::invalid_argument("alpha sweep: refinement schedule needs at least three levels");
    const std::size_t nh = h_schedule.size();
    const std::string spec = domain_spec(dom);

    // lam[a * nh + j] holds the first k eigenvalues at (alphas[a], h[j])
    std::vector<std::vector<double>> lam(alphas.size() * nh);
    run_blocks(lam.size(), threads, [&](std::size_t job) {
        double alpha = alphas[job / nh];
        double h = h_schedule[job % nh];
        try {
            GridOperator op = assemble(dom, alpha, h);
            if (on_operator) on_operator(op);
            std::vector<double> ev = eigenvalues(op);
            if (ev.size() < k)
                throw std::invalid_argument("grid has only " + std::to_string(ev.size()) +
                                            " cells, need k=" + std::to_string(k));
            ev.resize(k);
            lam[job] = std::move(ev);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "alpha sweep (alpha=" << alpha << ", h=" << h << "): " << e.what();
            throw std::runtime_error(os.str());
        }
    });

    AlphaSweep sweep;
    sweep.rows.reserve(alphas.size() * k);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<double> vals(nh);
            for (std::size_t j = 0; j < nh; ++j) vals[j] = lam[a * nh + j][i];
            ExtrapolatedValue ex = richardson(h_schedule, vals);
            SweepRow row;
            row.alpha = alphas[a];
            row.i = i + 1;
            row.lambda = ex.value;
            row.order = ex.observed_order;
            row.reliable = ex.reliable;
            row.domain = spec;
            sweep.rows.push_back(std::move(row));
        }
    }
    return sweep;
}

std::vector<double> exact_laplacian_eigs(const Domain& dom, std::size_t k) {
    if (k == 0) throw std::invalid_argument("exact_laplacian_eigs: k must be positive");
    const double pi = std::numbers::pi;
    switch (dom.kind) {
        case Domain::Kind::interval: {
            double L = dom.b - dom.a;
            std::vector<double> mu(k);
            for (std::size_t i = 0; i < k; ++i) mu[i] = std::pow((i + 1) * pi / L, 2.0);
            return mu;
        }
        case Domain::Kind::box: {
            double Lx = dom.hi[0] - dom.lo[0], Ly = dom.hi[1] - dom.lo[1];
            std::vector<double> mu;
            std::size_t K = k + 1;
            mu.reserve(K * K);
            for (std::size_t m = 1; m <= K; ++m)
                for (std::size_t n = 1; n <= K; ++n)
                    mu.push_back(std::pow(m * pi / Lx, 2.0) + std::pow(n * pi / Ly, 2.0));
            std::sort(mu.begin(), mu.end());
            mu.resize(k);
            return mu;
        }
        case Domain::Kind::ball: {
            if (k > 20)
                throw std::invalid_argument(
                    "exact_laplacian_eigs: ball supports k <= 20 (Bessel series range)");
            std::vector<double> mu;
            std::size_t per = k / 2 + 2;
            for (int nu = 0; nu <= static_cast<int>(k) + 1; ++nu) {
                for (double j : detail::bessel_zeros(nu, per)) {
                    double val = std::pow(j / dom.radius, 2.0);
                    mu.push_back(val);
                    if (nu >= 1) mu.push_back(val);  // two angular modes
                }
            }
            std::sort(mu.begin(), mu.end());
            mu.resize(k);
            return mu;
        }
        case Domain::Kind::raster:
            throw std::invalid_argument("exact_laplacian_eigs: no closed form for raster domains");
    }
    throw std::invalid_argument("exact_laplacian_eigs: unknown domain kind");
}

double convex_lower_bound(double alpha, double R) {
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw std::invalid_argument("convex_lower_bound: alpha outside (0,2]");
    if (!(R > 0.0)) throw std::invalid_argument("convex_lower_bound: inner radius must be positive");
    return std::pow(2.0, alpha) * std::tgamma(1.0 + 0.5 * alpha) * std::tgamma(0.5 * (1.0 + alpha)) /
           (std::sqrt(std::numbers::pi) * std::pow(R, alpha));
}

std::vector<LawReport> check_power_monotonicity(const AlphaSweep& sweep, double tol) {
    std::vector<LawReport> out;
    // group rows by index i, then walk adjacent alphas
    std::vector<std::size_t> is;
    for (const auto& r : sweep.rows)
        if (std::find(is.begin(), is.end(), r.i) == is.end()) is.push_back(r.i);
    for (std::size_t i : is) {
        std::vector<const SweepRow*> rows;
        for (const auto& r : sweep.rows)
            if (r.i == i) rows.push_back(&r);
        std::sort(rows.begin(), rows.end(),
                  [](const SweepRow* a, const SweepRow* b) { return a->alpha < b->alpha; });
        for (std::size_t ja = 0; ja < rows.size(); ++ja) {
            for (std::size_t jb = ja + 1; jb < rows.size(); ++jb) {
                const SweepRow* ra = rows[ja];
                const SweepRow* rb = rows[jb];
                if (!(ra->alpha < rb->alpha)) continue;
                double Ma = std::pow(ra->lambda, 1.0 / ra->alpha);
                double Mb = std::pow(rb->lambda, 1.0 / rb->alpha);
                LawReport rep;
                rep.law = "power-monotonicity";
                rep.instance = pair_instance(ra->domain, i, ra->alpha, rb->alpha);
                rep.margin = (Mb - Ma) / Mb;
                rep.pass = rep.margin >= -tol;
                out.push_back(std::move(rep));
            }
        }
    }
    return out;
}

std::vector<LawReport> check_upper_bound(const AlphaSweep& sweep, const std::vector<double>& mu,
                                         double tol) {
    std::size_t kmax = 0;
    for (const auto& r : sweep.rows) kmax = std::max(kmax, r.i);
    if (mu.size() < kmax)
        throw std::invalid_argument("check_upper_bound: " + std::to_string(mu.size()) +
                                    " reference eigenvalues cover a sweep reaching i=" +
                                    std::to_string(kmax));
    std::vector<LawReport> out;
    for (const auto& r : sweep.rows) {
        double bound = std::pow(mu[r.i - 1], 0.5 * r.alpha);
        LawReport rep;
        rep.law = "upper-bound";
        std::ostringstream os;
        os << "domain=" << r.domain << ";i=" << r.i << ";alpha=" << r.alpha;
        rep.instance = os.str();
        rep.margin = (bound - r.lambda) / bound;
        rep.pass = rep.margin >= -tol;
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<LawReport> check_sandwich(const AlphaSweep& sweep, const Domain& dom, double tol) {
    if (dom.kind == Domain::Kind::raster)
        throw std::invalid_argument("check_sandwich: raster domains are not certified convex");
    std::vector<double> mu = exact_laplacian_eigs(dom, 1);
    double R = inner_radius(dom);
    std::vector<LawReport> out;
    for (const auto& r : sweep.rows) {
        if (r.i != 1) continue;
        std::ostringstream os;
        os << "domain=" << r.domain << ";alpha=" << r.alpha;
        double lower = convex_lower_bound(r.alpha, R);
        LawReport lo;
        lo.law = "sandwich-lower";
        lo.instance = os.str();
        lo.margin = (r.lambda - lower) / r.lambda;
        lo.pass = lo.margin >= -tol;
        out.push_back(std::move(lo));
        double upper = std::pow(mu[0], 0.5 * r.alpha);
        LawReport hi;
        hi.law = "sandwich-upper";
        hi.instance = os.str();
        hi.margin = (upper - r.lambda) / upper;
        hi.pass = hi.margin >= -tol;
        out.push_back(std::move(hi));
    }
    return out;
}

LawReport check_faber_krahn(const Domain& dom, double alpha, const std::vector<double>& h_schedule,
                            double tol,
                            const std::function<void(const GridOperator&)>& on_operator) {
    if (h_schedule.size() < 3)
        throw std::invalid_argument("check_faber_krahn: refinement schedule needs three levels");
    Domain ball = schwarz_ball(dom);
    std::vector<double> ld, lb;
    for (double h : h_schedule) {
        GridOperator od = assemble(dom, alpha, h);
        if (on_operator) on_operator(od);
        ld.push_back(eigenvalues(od)[0]);
        GridOperator ob = assemble(ball, alpha, h);
        if (on_operator) on_operator(ob);
        lb.push_back(eigenvalues(ob)[0]);
    }
    ExtrapolatedValue ed = richardson(h_schedule, ld);
    ExtrapolatedValue eb = richardson(h_schedule, lb);
    bool extrapolated = ed.reliable && eb.reliable;
    double vd = extrapolated ? ed.value : ld.back();
    double vb = extrapolated ? eb.value : lb.back();
    LawReport rep;
    rep.law = "faber-krahn";
    std::ostringstream os;
    os << "domain=" << domain_spec(dom) << ";alpha=" << alpha
       << ";basis=" << (extrapolated ? "extrapolated" : "finest-grid");
    rep.instance = os.str();
    rep.margin = (vd - vb) / vd;
    rep.pass = rep.margin >= -tol;
    return rep;
}

std::vector<LawReport> check_domain_monotonicity(const Domain& inner, const Domain& outer,
                                                 double alpha, double h, std::size_t k,
                                                 double tol) {
    Grid gi = rasterize(inner, h);
    Grid go = rasterize(outer, h);
    for (std::size_t i = 0; i < gi.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < go.size(); ++j) {
            if (std::abs(gi.cx[i] - go.cx[j]) <= 1e-12 && std::abs(gi.cy[i] - go.cy[j]) <= 1e-12) {
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument(
                "check_domain_monotonicity: inner grid cell (" + std::to_string(gi.cx[i]) + "," +
                std::to_string(gi.cy[i]) + ") has no matching outer cell; lattices are incompatible");
    }
    std::vector<double> li = eigenvalues(assemble(inner, alpha, h));
    std::vector<double> lo = eigenvalues(assemble(outer, alpha, h));
    k = std::min({k, li.size(), lo.size()});
    std::vector<LawReport> out;
    for (std::size_t i = 0; i < k; ++i) {
        LawReport rep;
        rep.law = "domain-monotonicity";
        std::ostringstream os;
        os << "inner=" << domain_spec(inner) << ";outer=" << domain_spec(outer) << ";alpha=" << alpha
           << ";i=" << i + 1;
        rep.instance = os.str();
        rep.margin = (li[i] - lo[i]) / li[i];
        rep.pass = rep.margin >= -tol;
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<ContinuityRow> continuity_profile(const AlphaSweep& sweep) {
    std::vector<std::size_t> is;
    for (const auto& r : sweep.rows)
        if (std::find(is.begin(), is.end(), r.i) == is.end()) is.push_back(r.i);
    std::sort(is.begin(), is.end());
    std::vector<ContinuityRow> out;
    for (std::size_t i : is) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : sweep.rows)
            if (r.i == i) pts.emplace_back(r.alpha, r.lambda);
        std::sort(pts.begin(), pts.end());
        if (pts.size() < 2) continue;
        double step = pts[1].first - pts[0].first;
        for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
            double s = pts[j + 1].first - pts[j].first;
            if (std::abs(s - step) > 1e-9)
                throw std::invalid_argument("continuity_profile: alpha grid is not equally spaced");
        }
        std::vector<double> inc;
        bool monotone = true;
        for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
            double d = pts[j + 1].second - pts[j].second;
            if (d <= 0.0) monotone = false;
            inc.push_back(std::abs(d));
        }
        std::vector<double> sorted = inc;
        std::sort(sorted.begin(), sorted.end());
        double median = sorted.size() % 2 == 1
                            ? sorted[sorted.size() / 2]
                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        ContinuityRow row;
        row.i = i;
        row.median_increment = median;
        row.max_increment = *std::max_element(inc.begin(), inc.end());
        row.monotone = monotone;
        row.smooth = row.max_increment <= 5.0 * median;
        out.push_back(row);
    }
    return out;
}

std::vector<double> subordination_spectrum(const std::vector<double>& mu, double alpha,
                                           double beta) {
    if (!(beta > 0.0) || !(beta <= 2.0) || !(alpha > 0.0) || !(alpha <= beta))
        throw std::invalid_argument("subordination_spectrum: need 0 < alpha <= beta <= 2");
    std::vector<double> out;
    out.reserve(mu.size());
    double prev = 0.0;
    for (double m : mu) {
        if (!(m > 0.0))
            throw std::invalid_argument("subordination_spectrum: spectrum must be positive");
        if (m < prev)
            throw std::invalid_argument("subordination_spectrum: spectrum must be ascending");
        prev = m;
        out.push_back(std::pow(m, alpha / beta));
    }
    return out;
}

double weyl_fit(const std::vector<double>& lambdas) {
    if (lambdas.size() < 30)
        throw std::invalid_argument("weyl_fit: need at least 30 eigenvalues, got " +
                                    std::to_string(lambdas.size()));
    std::size_t m = lambdas.size();
    std::size_t lo = m / 3, hi = 2 * m / 3;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = 0;
    for (std::size_t j = lo; j < hi; ++j) {
        if (!(lambdas[j] > 0.0)) throw std::invalid_argument("weyl_fit: spectrum must be positive");
        double x = std::log(lambdas[j]);
        double y = std::log(static_cast<double>(j + 1));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("weyl_fit: degenerate spectrum window");
    return (n * sxy - sx * sy) / denom;
}

std::string sweep_to_csv(const AlphaSweep& sweep) {
    std::string out = "alpha,i,lambda,order,reliable,domain\n";
    for (const auto& r : sweep.rows) {
        out += g17(r.alpha);
        out += ',';
        out += std::to_string(r.i);
        out += ',';
        out += g17(r.lambda);
        out += ',';
        out += g17(r.order);
        out += ',';
        out += r.reliable ? '1' : '0';
        out += ",\"";
        out += r.domain;
        out += "\"\n";
    }
    return out;
}

AlphaSweep sweep_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || csv_fields(line).size() != 6)
        throw std::invalid_argument("sweep_from_csv: missing or malformed header");
    AlphaSweep sweep;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = csv_fields(line);
        if (f.size() != 6)
            throw std::invalid_argument("sweep_from_csv: line " + std::to_string(lineno) +
                                        " has " + std::to_string(f.size()) + " fields, expected 6");
        SweepRow row;
        try {
            row.alpha = std::stod(f[0]);
            row.i = static_cast<std::size_t>(std::stoul(f[1]));
            row.lambda = std::stod(f[2]);
            row.order = std::stod(f[3]);
            row.reliable = f[4] == "1";
            row.domain = f[5];
        } catch (const std::exception&) {
            throw std::invalid_argument("sweep_from_csv: unparseable numeric field on line " +
                                        std::to_string(lineno));
        }
        sweep.rows.push_back(std::move(row));
    }
    return sweep;
}

std::string reports_to_jsonl(const std::vector<LawReport>& reports) {
    std::string out;
    for (const auto& r : reports) {
        nlohmann::json j;
        j["law"] = r.law;
        j["instance"] = r.instance;
        j["margin"] = r.margin;
        j["pass"] = r.pass;
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace fsl
