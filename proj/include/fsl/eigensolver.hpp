#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fsl/assembly.hpp"

namespace fsl {

/**
 * Leading eigenpairs of a grid operator, ascending.
 *
 * Eigenvectors are grid functions scaled so that <phi_i, phi_j> h^d =
 * delta_ij; the sign is fixed by making the first component of magnitude
 * above 1e-8 of the max positive, so repeated runs agree bit for bit.
 */
struct Spectrum {
    std::vector<double> lambda;
    std::vector<std::vector<double>> phi;
    int dim{1};
    double alpha{0.0};
    double h{0.0};
    std::string domain;
};

struct ExtrapolatedValue {
    double value{0.0};
    double observed_order{0.0};
    bool reliable{false};
};

// Full dense decomposition: Householder reduction to tridiagonal form
// followed by implicitly shifted QL with eigenvector accumulation. Throws
// std::runtime_error naming the failing index if any eigenvalue needs more
// than 50 sweeps. k = 0 keeps every pair.
Spectrum eigendecompose(const GridOperator& op, std::size_t k = 0);

// Same reduction without accumulating the transform; ascending eigenvalues
// only. Used where spectra are needed at scale and vectors are not.
std::vector<double> eigenvalues(const GridOperator& op);

// <H u, u> / <u, u>; throws on a zero vector or size mismatch.
double rayleigh_quotient(const GridOperator& op, const std::vector<double>& u);

// Richardson extrapolation from the three finest entries of a refinement
// sequence with h halving between entries. observed_order is log2 of the
// successive-difference ratio; the result is flagged unreliable when the
// differences change sign, the order leaves (0.2, 3), or the sequence is
// degenerate (a constant sequence returns the constant, order 0, unreliable).
ExtrapolatedValue richardson(const std::vector<double>& hs, const std::vector<double>& values);

// Ground-state pair (lambda_1, phi_1) by inverse power iteration on the
// Cholesky factorization. phi_1 is positive (Perron vector of an M-matrix
// inverse), normalized like Spectrum vectors. Iterates until the residual
// |H phi - lambda phi| drops below 1e-11 * lambda * |phi| or 300 sweeps.
struct GroundState {
    double lambda{0.0};
    std::vector<double> phi;
    double residual{0.0};
};
GroundState ground_state(const GridOperator& op);

// CSV with header i,lambda,h,alpha,domain (i 1-based, %.17g floats, domain
// double-quoted because specs contain commas).
std::string spectrum_to_csv(const Spectrum& s);

}  // namespace fsl
