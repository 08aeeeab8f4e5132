#pragma once

#include "rhc/types.hpp"
#include "rhc/validate.hpp"

namespace rhc {

// Stabilizing solution of  A'P + P A + C'C - (1/alpha) P B B' P = 0
// together with the closed loop and its decay rate.
struct RiccatiSolution {
    Mat Pi;           // n x n, symmetric PSD
    Mat A_pi;         // A - (1/alpha) B B' Pi
    double lambda;    // -spectral_abscissa(A_pi), > 0 for a stabilizing Pi
    double residual;  // Frobenius norm of the equation residual
};

// Solves M'X + X M + RHS = 0 by Kronecker vectorization with dense LU.
// Requires that no two eigenvalues of M sum to zero; X is symmetric whenever
// RHS is. Residual certified to 1e-12 * max(1, ||RHS||_F).
Mat solve_lyapunov(const Mat& M, const Mat& RHS);

// Newton-Kleinman iteration with a Lyapunov-based stabilizing start
// (F = 0 when A is already stable). Residual certified to
// 1e-10 * max(1, ||Pi||_F); at most 100 iterations.
RiccatiSolution solve_are(const BilinearSystem& sys);

}  // namespace rhc
