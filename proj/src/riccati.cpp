#include "rhc/riccati.hpp"

#include <Eigen/LU>
#include <sstream>

#include "rhc/errors.hpp"

namespace rhc {

namespace {

double are_residual_norm(const BilinearSystem& sys, const Mat& P) {
    const Mat R = sys.A.transpose() * P + P * sys.A +
                  sys.C.transpose() * sys.C -
                  (1.0 / sys.alpha) * P * sys.B * (sys.B.transpose() * P);
    return R.norm();
}

// Stabilizing initial gain: shift A so that -(A + beta I) is stable, solve
// (A + beta I) P + P (A + beta I)' = 2 B B', and feed back along B through
// the pseudo-inverse of P. Produces a gain K with A - B K stable whenever
// (A, B) is stabilizable.
Mat stabilizing_gain(const Mat& A, const Vec& B) {
    const int n = static_cast<int>(A.rows());
    double beta = A.norm() + 1.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const Mat M = (A + beta * Mat::Identity(n, n)).transpose();
        const Mat rhs = -2.0 * (B * B.transpose());
        const Mat P = solve_lyapunov(M, rhs);
        const Mat K = B.transpose() *
                      P.completeOrthogonalDecomposition().pseudoInverse();
        if (spectral_abscissa(A - B * K) < 0.0) return K;
        beta *= 2.0;
    }
    throw ConvergenceError("stabilizing initial gain construction failed", 0.0);
}

}  // namespace

Mat solve_lyapunov(const Mat& M, const Mat& RHS) {
    const int n = static_cast<int>(M.rows());
    if (M.cols() != n || RHS.rows() != n || RHS.cols() != n) {
        throw InvalidInputError("solve_lyapunov: dimension mismatch");
    }
    // vec(M'X + XM) = (I (x) M' + M' (x) I) vec(X), column-major vec.
    const Mat I = Mat::Identity(n, n);
    Mat K = Mat::Zero(n * n, n * n);
    const Mat Mt = M.transpose();
    for (int j = 0; j < n; ++j) {
        // kron(I, M'): block-diagonal copies of M'.
        K.block(j * n, j * n, n, n) += Mt;
        // kron(M', I): scalar Mt(j, l) times identity in block (j, l).
        for (int l = 0; l < n; ++l) {
            K.block(j * n, l * n, n, n) += Mt(j, l) * I;
        }
    }
    Vec rhs_vec(n * n);
    for (int j = 0; j < n; ++j) rhs_vec.segment(j * n, n) = -RHS.col(j);

    Eigen::FullPivLU<Mat> lu(K);
    if (!lu.isInvertible()) {
        throw DegenerateSpectrumError(
            "solve_lyapunov: two eigenvalues of M sum to zero");
    }
    const Vec x = lu.solve(rhs_vec);
    Mat X(n, n);
    for (int j = 0; j < n; ++j) X.col(j) = x.segment(j * n, n);
    // The equation maps symmetric right-hand sides to symmetric solutions.
    if ((RHS - RHS.transpose()).norm() <= 1e-12 * std::max(1.0, RHS.norm())) {
        X = 0.5 * (X + X.transpose()).eval();
    }
    const double res = (M.transpose() * X + X * M + RHS).norm();
    const double bound = 1e-12 * std::max(1.0, RHS.norm());
    if (!(res <= bound)) {
        std::ostringstream msg;
        msg << "solve_lyapunov: residual " << res << " exceeds " << bound;
        throw DegenerateSpectrumError(msg.str());
    }
    return X;
}

RiccatiSolution solve_are(const BilinearSystem& sys) {
    sys.check();
    const SystemReport rep = validate_system(sys);
    if (!rep.stabilizable) {
        std::ostringstream msg;
        msg << "solve_are: (A, B) not stabilizable at eigenvalue "
            << rep.stabilizability_failure.real();
        if (rep.stabilizability_failure.imag() != 0.0) {
            msg << (rep.stabilizability_failure.imag() < 0 ? " - " : " + ")
                << std::abs(rep.stabilizability_failure.imag()) << "i";
        }
        throw NotStabilizableError(msg.str(), rep.stabilizability_failure);
    }
    if (!rep.detectable) {
        std::ostringstream msg;
        msg << "solve_are: (A, C) not detectable at eigenvalue "
            << rep.detectability_failure.real();
        throw NotStabilizableError(msg.str(), rep.detectability_failure);
    }

    const int n = sys.dim();
    const Mat Q = sys.C.transpose() * sys.C;

    // Policy iteration: evaluate the cost of the current stabilizing gain by
    // a Lyapunov solve, then improve the gain. Quadratically convergent and
    // monotone from a stabilizing start.
    Mat K;  // 1 x n feedback gain, u = -K y
    if (rep.spectral_abscissa_A < 0.0) {
        K = Mat::Zero(1, n);
    } else {
        K = stabilizing_gain(sys.A, sys.B);
    }
    Mat P = Mat::Zero(n, n);
    double res = 0.0;
    for (int it = 0; it < 100; ++it) {
        const Mat Acl = sys.A - sys.B * K;
        const Mat rhs = Q + sys.alpha * K.transpose() * K;
        P = solve_lyapunov(Acl, rhs);
        res = are_residual_norm(sys, P);
        if (res <= 1e-10 * std::max(1.0, P.norm())) {
            RiccatiSolution sol;
            sol.Pi = 0.5 * (P + P.transpose());
            sol.A_pi = sys.A -
                       (1.0 / sys.alpha) * sys.B * (sys.B.transpose() * sol.Pi);
            sol.lambda = -spectral_abscissa(sol.A_pi);
            sol.residual = res;
            return sol;
        }
        K = (1.0 / sys.alpha) * sys.B.transpose() * P;
    }
    throw ConvergenceError("solve_are: no convergence within 100 iterations",
                           res);
}

}  // namespace rhc
