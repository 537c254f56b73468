#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fsl/geometry.hpp"

namespace fsl {

// Jump-kernel constant C(d,alpha) normalized so the operator's symbol is
// |xi|^alpha. Throws for d outside {1,2} or alpha outside (0,2).
double kernel_constant(int d, double alpha);

/**
 * Dense symmetric discretization of the killed generator on a grid.
 *
 * Row i applies the quadrature of C(d,a) PV int (u(x_i)-u(y)) |x_i-y|^{-d-a} dy
 * with u extended by zero outside the domain. Invariants: a(i,j) <= 0 off
 * the diagonal, a(i,i) > 0, and the row sum equals kappa[i] > 0 (the killing
 * rate out of cell i), which makes the matrix symmetric positive definite.
 */
struct GridOperator {
    int dim{1};
    double alpha{0.0};
    double h{0.0};
    std::size_t n{0};
    std::vector<double> a;       // n*n row-major, symmetric
    std::vector<double> kappa;   // row sums
    std::vector<double> cx, cy;  // cell centers; empty after deserialization

    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

// Largest matrix dimension assemble will produce.
inline constexpr std::size_t kMaxCells = 5000;

// One-dimensional closed-form weights: exact cell integrals of the kernel
// against hat functions on the lattice, a quadratic near-field cell, and an
// analytic tail beyond (M+1)h. Shared by assembly and the symbol probe.
struct Weights1D {
    double nu;               // near-field coefficient, h^{-alpha}/(2-alpha)
    std::vector<double> w;   // w[m], m = 1..M (w[0] unused)
    double tail;             // ((M+1)h)^{-alpha}/alpha
};
Weights1D weights_1d(double alpha, double h, int M);

GridOperator assemble(const Domain& d, double alpha, double h);

// Relative plane-wave symbol error |H cos(xi.x)/(|xi|^alpha cos(xi.x)) - 1|
// evaluated at the center of a free lattice truncated at radius `truncation`.
// For xi = 0 returns the absolute residual, which equals the analytic tail.
double symbol_error(int d, double alpha, double h, double xi, double truncation);

// d = 2 probe with an explicit frequency vector (direction matters only
// through lattice anisotropy; both axis and diagonal stay within tolerance).
double symbol_error_2d(double alpha, double h, const Point& xi, double truncation);

std::vector<double> apply(const GridOperator& op, const std::vector<double>& u);

// Lower-triangular Cholesky factor of an assembled operator, reusable
// across right-hand sides. The factorization exists because the matrix is
// strictly diagonally dominant with positive diagonal; breakdown throws.
struct Cholesky {
    explicit Cholesky(const GridOperator& op);
    std::vector<double> solve(std::vector<double> b) const;

    std::size_t n{0};
    std::vector<double> L;  // n*n row-major, lower triangle populated
};

// Cholesky solve of op.a * u = rhs with a residual check: throws
// std::runtime_error if the relative residual exceeds 1e-10.
std::vector<double> solve_linear(const GridOperator& op, const std::vector<double>& rhs);

// Binary format: "FSL1", u32 dim, f64 alpha, u64 n, f64 h, then the lower
// triangle row-major (n(n+1)/2 doubles), then kappa (n doubles). Native
// (little-endian) byte order. Cell centers are not stored.
void save_operator(const GridOperator& op, const std::string& path);
GridOperator load_operator(const std::string& path);

}  // namespace fsl
