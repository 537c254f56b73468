#include "fsl/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fsl {

namespace {

inline double sign_like(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Householder reduction of a symmetric matrix (row-major, n x n) to
// tridiagonal form; d receives the diagonal, e the subdiagonal in e[1..n-1].
// With accumulate set, z is overwritten by the orthogonal transform Q with
// A = Q T Q^T; otherwise z's contents are scratch afterwards.
void tridiagonalize(std::vector<double>& z, std::size_t n, std::vector<double>& d,
                    std::vector<double>& e, bool accumulate) {
    auto Z = [&](std::size_t i, std::size_t j) -> double& { return z[i * n + j]; };
    for (std::size_t i = n - 1; i >= 1; --i) {
        std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(Z(i, k));
            if (scale == 0.0) {
                e[i] = Z(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    Z(i, k) /= scale;
                    h += Z(i, k) * Z(i, k);
                }
                double f = Z(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                Z(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    if (accumulate) Z(j, i) = Z(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += Z(j, k) * Z(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += Z(k, j) * Z(i, k);
                    e[j] = g / h;
                    f += e[j] * Z(i, j);
                }
                double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = Z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) Z(j, k) -= f * e[k] + g * Z(i, k);
                }
            }
        } else {
            e[i] = Z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    if (accumulate) {
        for (std::size_t i = 0; i < n; ++i) {
            if (d[i] != 0.0) {
                for (std::size_t j = 0; j < i; ++j) {
                    double g = 0.0;
                    for (std::size_t k = 0; k < i; ++k) g += Z(i, k) * Z(k, j);
                    for (std::size_t k = 0; k < i; ++k) Z(k, j) -= g * Z(k, i);
                }
            }
            d[i] = Z(i, i);
            Z(i, i) = 1.0;
            for (std::size_t j = 0; j < i; ++j) Z(j, i) = Z(i, j) = 0.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) d[i] = Z(i, i);
    }
}

// Implicitly shifted QL sweeps on the tridiagonal (d, e). With z non-null
// the rotations are accumulated into its columns so column j ends up as the
// eigenvector of d[j]. Throws after 50 sweeps on any single eigenvalue.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::size_t n,
                 std::vector<double>* z) {
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50)
                    throw std::runtime_error("eigensolver: eigenvalue " + std::to_string(l) +
                                             " failed to converge in 50 QL sweeps");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                std::size_t i = m;
                bool underflow = false;
                while (i-- > l) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        double* zp = z->data();
                        for (std::size_t k = 0; k < n; ++k) {
                            double fk = zp[k * n + i + 1];
                            zp[k * n + i + 1] = s * zp[k * n + i] + c * fk;
                            zp[k * n + i] = c * zp[k * n + i] - s * fk;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void check_op(const GridOperator& op) {
    if (op.n == 0) throw std::invalid_argument("eigensolver: empty operator");
    if (op.a.size() != op.n * op.n)
        throw std::invalid_argument("eigensolver: matrix storage does not match n");
}

}  // namespace

Spectrum eigendecompose(const GridOperator& op, std::size_t k) {
    check_op(op);
    const std::size_t n = op.n;
    if (k == 0 || k > n) k = n;
    std::vector<double> z = op.a;
    std::vector<double> d(n), e(n, 0.0);
    if (n == 1) {
        d[0] = z[0];
        z[0] = 1.0;
    } else {
        tridiagonalize(z, n, d, e, true);
        ql_implicit(d, e, n, &z);
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    Spectrum s;
    s.dim = op.dim;
    s.alpha = op.alpha;
    s.h = op.h;
    s.lambda.resize(k);
    s.phi.assign(k, std::vector<double>(n));
    const double scale = std::pow(op.h, -0.5 * op.dim);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t c = idx[j];
        s.lambda[j] = d[c];
        auto& v = s.phi[j];
        double mx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = z[i * n + c];
            mx = std::max(mx, std::abs(v[i]));
        }
        double flip = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(v[i]) > 1e-8 * mx) {
                flip = v[i] > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (auto& vi : v) vi *= flip * scale;
    }
    return s;
}

std::vector<double> eigenvalues(const GridOperator& op) {
    check_op(op);
    const std::size_t n = op.n;
    std::vector<double> z = op.a;
    std::vector<double> d(n), e(n, 0.0);
    if (n == 1) {
        d[0] = z[0];
    } else {
        tridiagonalize(z, n, d, e, false);
        ql_implicit(d, e, n, nullptr);
    }
    std::sort(d.begin(), d.end());
    return d;
}

double rayleigh_quotient(const GridOperator& op, const std::vector<double>& u) {
    check_op(op);
    if (u.size() != op.n)
        throw std::invalid_argument("rayleigh_quotient: vector length does not match operator");
    double uu = 0.0;
    for (double v : u) uu += v * v;
    if (uu == 0.0) throw std::invalid_argument("rayleigh_quotient: zero vector");
    std::vector<double> hu = fsl::apply(op, u);
    double uhu = 0.0;
    for (std::size_t i = 0; i < op.n; ++i) uhu += hu[i] * u[i];
    return uhu / uu;
}

ExtrapolatedValue richardson(const std::vector<double>& hs, const std::vector<double>& values) {
    if (hs.size() != values.size())
        throw std::invalid_argument("richardson: h and value lists differ in length");
    if (hs.size() < 3)
        throw std::invalid_argument("richardson: need at least three refinement levels, got " +
                                    std::to_string(hs.size()));
    std::size_t m = hs.size();
    // finest three levels; the sequence must be ordered coarse to fine and halve
    double h1 = hs[m - 3], h2 = hs[m - 2], h3 = hs[m - 1];
    if (!(h1 > h2 && h2 > h3))
        throw std::invalid_argument("richardson: h sequence must strictly decrease");
    if (std::abs(h1 / h2 - 2.0) > 1e-9 || std::abs(h2 / h3 - 2.0) > 1e-9)
        throw std::invalid_argument("richardson: h must halve between refinement levels");
    double v1 = values[m - 3], v2 = values[m - 2], v3 = values[m - 1];
    double d1 = v1 - v2, d2 = v2 - v3;
    ExtrapolatedValue out;
    if (d1 == 0.0 && d2 == 0.0) {
        out.value = v3;  // constant sequence: exact, but no order estimate exists
        out.observed_order = 0.0;
        out.reliable = false;
        return out;
    }
    if (d2 == 0.0 || d1 * d2 < 0.0) {
        out.value = v3;
        out.observed_order = 0.0;
        out.reliable = false;
        return out;
    }
    double r = d1 / d2;
    out.observed_order = std::log2(r);
    if (std::abs(r - 1.0) < 1e-12 || out.observed_order <= 0.2 || out.observed_order >= 3.0) {
        out.value = v3;
        out.reliable = false;
        return out;
    }
    out.value = v3 - d2 / (r - 1.0);
    out.reliable = true;
    return out;
}

GroundState ground_state(const GridOperator& op) {
    check_op(op);
    const std::size_t n = op.n;
    Cholesky chol(op);
    std::vector<double> x(n, 1.0 / std::sqrt(double(n)));
    double lambda = 0.0;
    double hnorm = 0.0;
    for (double v : op.a) hnorm += v * v;
    hnorm = std::sqrt(hnorm);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 300; ++it) {
        x = chol.solve(x);
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (auto& v : x) v /= nrm;
        std::vector<double> hx = fsl::apply(op, x);
        lambda = 0.0;
        for (std::size_t i = 0; i < n; ++i) lambda += hx[i] * x[i];
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = hx[i] - lambda * x[i];
            r2 += e * e;
        }
        res = std::sqrt(r2);
        if (res <= 1e-11 * std::abs(lambda)) break;
    }
    if (res > 1e-9 * hnorm)
        throw std::runtime_error("ground_state: inverse iteration stalled, residual " +
                                 std::to_string(res));
    GroundState gs;
    gs.lambda = lambda;
    gs.residual = res;
    const double scale = std::pow(op.h, -0.5 * op.dim);
    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::abs(v));
    double flip = 1.0;
    for (double v : x) {
        if (std::abs(v) > 1e-8 * mx) {
            flip = v > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    gs.phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) gs.phi[i] = x[i] * flip * scale;
    return gs;
}

std::string spectrum_to_csv(const Spectrum& s) {
    auto g17 = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string out = "i,lambda,h,alpha,domain\n";
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += g17(s.lambda[i]);
        out += ',';
        out += g17(s.h);
        out += ',';
        out += g17(s.alpha);
        out += ",\"";
        out += s.domain;
        out += "\"\n";
    }
    return out;
}

}  // namespace fsl
