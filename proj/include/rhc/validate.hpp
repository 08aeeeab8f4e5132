#pragma once

#include <complex>

#include "rhc/types.hpp"

namespace rhc {

// Diagnostics produced by validate_system.
struct SystemReport {
    bool stabilizable = false;          // (A, B) passes the eigenvalue rank test
    bool detectable = false;            // (A, C) passes the dual test
    double spectral_abscissa_A = 0.0;   // max Re of eigenvalues of A
    // Eigenvalue at which the corresponding rank test fails (meaningful only
    // when the flag above is false).
    std::complex<double> stabilizability_failure{0.0, 0.0};
    std::complex<double> detectability_failure{0.0, 0.0};
};

// Max Re over the eigenvalues of M.
double spectral_abscissa(const Mat& M);

// Eigenvalue (PBH) rank tests for stabilizability of (A, B) and detectability
// of (A, C), with rank tolerance 1e-10 * (matrix max-norm). Pure function.
SystemReport validate_system(const BilinearSystem& sys);

}  // namespace rhc
