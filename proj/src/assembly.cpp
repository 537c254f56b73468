#include "fsl/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace fsl {

namespace {

constexpr double kAlphaOneBand = 1e-9;  // |alpha-1| below this uses the log branch

// Antiderivative pair for the 1D kernel r^{-1-alpha}:
//   Psi''(r) = r^{-1-alpha},  Psi(r) = r^{1-alpha}/(alpha(alpha-1)),
// degenerating to -log r at alpha = 1 where the power form cancels to 0/0.
double psi(double r, double alpha) {
    if (std::abs(alpha - 1.0) <= kAlphaOneBand) return -std::log(r);
    return std::pow(r, 1.0 - alpha) / (alpha * (alpha - 1.0));
}

double dpsi(double r, double alpha) { return -std::pow(r, -alpha) / alpha; }

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("alpha must lie in (0,2), got " + std::to_string(alpha));
}

std::size_t checked_size(const Grid& g) {
    if (g.size() > kMaxCells)
        throw std::invalid_argument("grid has " + std::to_string(g.size()) +
                                    " cells, above the dense-assembly cap of " +
                                    std::to_string(kMaxCells));
    return g.size();
}

GridOperator assemble_1d(const Domain& dom, double alpha, double h) {
    Grid g = rasterize(dom, h);
    std::size_t n = checked_size(g);
    int M = static_cast<int>(std::ceil(diameter(dom) / h)) + 2;
    Weights1D W = weights_1d(alpha, h, M);
    double C = kernel_constant(1, alpha);

    // Diagonal counts every lattice offset once per side plus the tail;
    // exterior cells contribute only here (zero extension).
    double S = W.nu + W.tail;
    for (int m = 1; m <= M; ++m) S += W.w[m];

    GridOperator op;
    op.dim = 1;
    op.alpha = alpha;
    op.h = h;
    op.n = n;
    op.a.assign(n * n, 0.0);
    op.cx = g.cx;
    op.cy.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) op.at(i, i) = 2.0 * C * S;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            int m = g.ix[j] - g.ix[i];
            if (m > M) continue;
            double w = (m == 1) ? W.nu + W.w[1] : W.w[m];
            op.at(i, j) = op.at(j, i) = -C * w;
        }
    }
    op.kappa.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += op.at(i, j);
        op.kappa[i] = s;
    }
    return op;
}

// Near-field coefficient of the 5-point stencil sum (u_N+u_S+u_E+u_W-4u):
// the kernel integral over the disk |y| <= h against the angular average of
// the second-order Taylor term, pi h^{2-alpha}/(2(2-alpha)), divided by h^2.
double near_coeff_2d(double alpha, double h) {
    return std::numbers::pi * std::pow(h, -alpha) / (2.0 * (2.0 - alpha));
}

GridOperator assemble_2d(const Domain& dom, double alpha, double h) {
    Grid g = rasterize(dom, h);
    std::size_t n = checked_size(g);
    double C = kernel_constant(2, alpha);
    double nu = near_coeff_2d(alpha, h);

    // grid covers the bounding box; recover its extent from lattice spans
    int kx = *std::max_element(g.ix.begin(), g.ix.end()) + 1;
    int ky = *std::max_element(g.iy.begin(), g.iy.end()) + 1;
    double cx0 = g.origin[0] + 0.5 * kx * h;
    double cy0 = g.origin[1] + 0.5 * ky * h;
    double wx = 0.5 * kx * h, wy = 0.5 * ky * h;

    // Per-cell cutoff: the largest disk around the cell inscribed in the 3x
    // inflated bounding box. Exterior mass outside the disk is folded into
    // the diagonal through the exact radial tail 2 pi R^{-alpha}/alpha.
    std::vector<double> R(n);
    double Rmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        R[i] = std::min(3.0 * wx - std::abs(g.cx[i] - cx0), 3.0 * wy - std::abs(g.cy[i] - cy0));
        Rmax = std::max(Rmax, R[i]);
    }

    // All lattice offsets with h < |d| <= Rmax, sorted by radius, with
    // prefix sums of their kernel weights h^2 |d|^{-2-alpha}; the diagonal's
    // all-lattice sum is then a binary search per cell.
    int K = static_cast<int>(std::ceil(Rmax / h)) + 1;
    std::vector<double> rad2;
    rad2.reserve(std::size_t(2 * K + 1) * (2 * K + 1));
    for (int i = -K; i <= K; ++i) {
        for (int j = -K; j <= K; ++j) {
            double r2 = (double(i) * i + double(j) * j) * h * h;
            if (r2 > h * h * 1.000001 && r2 <= Rmax * Rmax) rad2.push_back(r2);
        }
    }
    std::sort(rad2.begin(), rad2.end());
    std::vector<double> prefix(rad2.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < rad2.size(); ++i) {
        acc += h * h * std::pow(rad2[i], -0.5 * (2.0 + alpha));
        prefix[i] = acc;
    }

    GridOperator op;
    op.dim = 2;
    op.alpha = alpha;
    op.h = h;
    op.n = n;
    op.a.assign(n * n, 0.0);
    op.cx = g.cx;
    op.cy = g.cy;

    const double h2 = h * h;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = g.cx[j] - g.cx[i], dy = g.cy[j] - g.cy[i];
            double r2 = dx * dx + dy * dy;
            double v = (r2 <= h2 * 1.000001) ? -C * nu
                                             : -C * h2 * std::pow(r2, -0.5 * (2.0 + alpha));
            op.at(i, j) = op.at(j, i) = v;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto it = std::upper_bound(rad2.begin(), rad2.end(), R[i] * R[i]);
        double S_all = it == rad2.begin() ? 0.0 : prefix[std::size_t(it - rad2.begin()) - 1];
        double tail = 2.0 * std::numbers::pi * std::pow(R[i], -alpha) / alpha;
        op.at(i, i) = C * (S_all + 4.0 * nu + tail);
    }
    op.kappa.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += op.at(i, j);
        op.kappa[i] = s;
    }
    return op;
}

}  // namespace

double kernel_constant(int d, double alpha) {
    if (d != 1 && d != 2) throw std::invalid_argument("kernel_constant: d must be 1 or 2");
    check_alpha(alpha);
    return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) /
           (std::pow(std::numbers::pi, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

Weights1D weights_1d(double alpha, double h, int M) {
    check_alpha(alpha);
    if (!(h > 0.0) || M < 1) throw std::invalid_argument("weights_1d: need h > 0 and M >= 1");
    Weights1D W;
    W.nu = std::pow(h, -alpha) / (2.0 - alpha);
    W.w.assign(std::size_t(M) + 1, 0.0);
    // First hat is truncated at the near-field boundary r = h:
    // w1 = (Psi(2h) - Psi(h))/h - Psi'(h); full hats are second differences.
    W.w[1] = (psi(2.0 * h, alpha) - psi(h, alpha)) / h - dpsi(h, alpha);
    for (int m = 2; m <= M; ++m)
        W.w[m] = (psi((m + 1.0) * h, alpha) - 2.0 * psi(m * h, alpha) + psi((m - 1.0) * h, alpha)) / h;
    W.tail = std::pow((M + 1.0) * h, -alpha) / alpha;
    return W;
}

GridOperator assemble(const Domain& d, double alpha, double h) {
    check_alpha(alpha);
    return d.dim == 1 ? assemble_1d(d, alpha, h) : assemble_2d(d, alpha, h);
}

double symbol_error(int d, double alpha, double h, double xi, double truncation) {
    if (d == 2) return symbol_error_2d(alpha, h, {xi, 0.0}, truncation);
    if (d != 1) throw std::invalid_argument("symbol_error: d must be 1 or 2");
    check_alpha(alpha);
    if (!(truncation > h)) throw std::invalid_argument("symbol_error: truncation must exceed h");
    int M = static_cast<int>(std::floor(truncation / h));
    Weights1D W = weights_1d(alpha, h, M);
    double C = kernel_constant(1, alpha);
    // u = cos(xi x) probed at x = 0: second difference g_m = 2(cos(xi m h) - 1)
    double s = W.nu * 2.0 * (std::cos(xi * h) - 1.0);
    for (int m = 1; m <= M; ++m) s += W.w[m] * 2.0 * (std::cos(xi * m * h) - 1.0);
    double Hu = -C * (s - 2.0 * W.tail);
    if (xi == 0.0) return std::abs(Hu);
    return std::abs(Hu / std::pow(std::abs(xi), alpha) - 1.0);
}

double symbol_error_2d(double alpha, double h, const Point& xi, double truncation) {
    check_alpha(alpha);
    if (!(truncation > h)) throw std::invalid_argument("symbol_error_2d: truncation must exceed h");
    double C = kernel_constant(2, alpha);
    double nu = near_coeff_2d(alpha, h);
    int K = static_cast<int>(std::floor(truncation / h));
    double far = 0.0;
    const double R2 = truncation * truncation;
    for (int i = -K; i <= K; ++i) {
        for (int j = -K; j <= K; ++j) {
            double r2 = (double(i) * i + double(j) * j) * h * h;
            if (r2 <= h * h * 1.000001 || r2 > R2) continue;
            double u = std::cos(xi[0] * i * h + xi[1] * j * h);
            far += h * h * (1.0 - u) * std::pow(r2, -0.5 * (2.0 + alpha));
        }
    }
    double five = 2.0 * std::cos(xi[0] * h) + 2.0 * std::cos(xi[1] * h) - 4.0;
    double tail = 2.0 * std::numbers::pi * std::pow(truncation, -alpha) / alpha;
    double Hu = C * (far - nu * five + tail);
    double sym = std::pow(xi[0] * xi[0] + xi[1] * xi[1], 0.5 * alpha);
    if (sym == 0.0) return std::abs(Hu);
    return std::abs(Hu / sym - 1.0);
}

std::vector<double> apply(const GridOperator& op, const std::vector<double>& u) {
    if (u.size() != op.n)
        throw std::invalid_argument("apply: vector length " + std::to_string(u.size()) +
                                    " does not match operator size " + std::to_string(op.n));
    std::vector<double> y(op.n, 0.0);
    for (std::size_t i = 0; i < op.n; ++i) {
        const double* row = op.a.data() + i * op.n;
        double s = 0.0;
        for (std::size_t j = 0; j < op.n; ++j) s += row[j] * u[j];
        y[i] = s;
    }
    return y;
}

Cholesky::Cholesky(const GridOperator& op) : n(op.n), L(op.a) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = L[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
        if (!(d > 0.0))
            throw std::runtime_error("Cholesky: breakdown at row " + std::to_string(j));
        d = std::sqrt(d);
        L[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = L[i * n + j];
            const double* ri = L.data() + i * n;
            const double* rj = L.data() + j * n;
            for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
            L[i * n + j] = s / d;
        }
    }
}

std::vector<double> Cholesky::solve(std::vector<double> b) const {
    if (b.size() != n)
        throw std::invalid_argument("Cholesky::solve: rhs length " + std::to_string(b.size()) +
                                    " does not match factor size " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= L[i * n + k] * b[k];
        b[i] = s / L[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= L[k * n + i] * b[k];
        b[i] = s / L[i * n + i];
    }
    return b;
}

std::vector<double> solve_linear(const GridOperator& op, const std::vector<double>& rhs) {
    if (rhs.size() != op.n)
        throw std::invalid_argument("solve_linear: rhs length " + std::to_string(rhs.size()) +
                                    " does not match operator size " + std::to_string(op.n));
    const std::size_t n = op.n;
    const Cholesky chol(op);
    std::vector<double> u = chol.solve(rhs);
    // Refinement reuses the factor; each sweep scales the residual by
    // O(eps * cond), so two sweeps cover the stiffest fine-grid operators.
    double rel = 0.0;
    for (int sweep = 0;; ++sweep) {
        std::vector<double> r = fsl::apply(op, u);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = rhs[i] - r[i];
            num += r[i] * r[i];
            den += rhs[i] * rhs[i];
        }
        rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
        if (rel <= 1e-10 || sweep == 2) break;
        std::vector<double> du = chol.solve(r);
        for (std::size_t i = 0; i < n; ++i) u[i] += du[i];
    }
    if (rel > 1e-10) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "solve_linear: residual %.3e exceeds 1e-10", rel);
        throw std::runtime_error(buf);
    }
    return u;
}

void save_operator(const GridOperator& op, const std::string& path) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("save_operator: cannot open '" + tmp.string() + "'");
        const char magic[4] = {'F', 'S', 'L', '1'};
        std::uint32_t dim = static_cast<std::uint32_t>(op.dim);
        std::uint64_t n = op.n;
        out.write(magic, 4);
        out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
        out.write(reinterpret_cast<const char*>(&op.alpha), sizeof op.alpha);
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
        out.write(reinterpret_cast<const char*>(&op.h), sizeof op.h);
        for (std::size_t i = 0; i < op.n; ++i)
            out.write(reinterpret_cast<const char*>(op.a.data() + i * op.n),
                      static_cast<std::streamsize>((i + 1) * sizeof(double)));
        out.write(reinterpret_cast<const char*>(op.kappa.data()),
                  static_cast<std::streamsize>(op.n * sizeof(double)));
        out.write(reinterpret_cast<const char*>(op.cx.data()),
                  static_cast<std::streamsize>(op.n * sizeof(double)));
        out.write(reinterpret_cast<const char*>(op.cy.data()),
                  static_cast<std::streamsize>(op.n * sizeof(double)));
        if (!out) throw std::runtime_error("save_operator: write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

GridOperator load_operator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_operator: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FSL1", 4) != 0)
        throw std::runtime_error("load_operator: '" + path + "' lacks the FSL1 magic");
    std::uint32_t dim = 0;
    std::uint64_t n = 0;
    GridOperator op;
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    in.read(reinterpret_cast<char*>(&op.alpha), sizeof op.alpha);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&op.h), sizeof op.h);
    if (!in || (dim != 1 && dim != 2) || n == 0 || n > kMaxCells)
        throw std::runtime_error("load_operator: corrupt header in '" + path + "'");
    op.dim = static_cast<int>(dim);
    op.n = n;
    op.a.assign(op.n * op.n, 0.0);
    for (std::size_t i = 0; i < op.n; ++i) {
        in.read(reinterpret_cast<char*>(op.a.data() + i * op.n),
                static_cast<std::streamsize>((i + 1) * sizeof(double)));
        for (std::size_t j = 0; j < i; ++j) op.at(j, i) = op.at(i, j);
    }
    op.kappa.assign(op.n, 0.0);
    in.read(reinterpret_cast<char*>(op.kappa.data()),
            static_cast<std::streamsize>(op.n * sizeof(double)));
    op.cx.assign(op.n, 0.0);
    in.read(reinterpret_cast<char*>(op.cx.data()),
            static_cast<std::streamsize>(op.n * sizeof(double)));
    op.cy.assign(op.n, 0.0);
    in.read(reinterpret_cast<char*>(op.cy.data()),
            static_cast<std::streamsize>(op.n * sizeof(double)));
    if (!in) throw std::runtime_error("load_operator: truncated payload in '" + path + "'");
    return op;
}

}  // namespace fsl
