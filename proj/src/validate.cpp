#include "rhc/validate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rhc {

namespace {

using CMat = Eigen::MatrixXcd;

// Smallest singular value of the pencil block [M - z I, R] at z = mode.
double pencil_min_sv(const Mat& M, const Mat& R, std::complex<double> mode) {
    const int n = static_cast<int>(M.rows());
    CMat pencil(n, n + R.cols());
    pencil.leftCols(n) = M.cast<std::complex<double>>();
    for (int i = 0; i < n; ++i) pencil(i, i) -= mode;
    pencil.rightCols(R.cols()) = R.cast<std::complex<double>>();
    Eigen::JacobiSVD<CMat> svd(pencil);
    return svd.singularValues().tail(1)(0);
}

// Eigenvalue rank test: for every eigenvalue of M with nonnegative real
// part, [M - z I, R] must have full row rank. Returns the first failing
// eigenvalue through `failure`.
bool eigenvalue_rank_test(const Mat& M, const Mat& R,
                          std::complex<double>& failure) {
    const double scale = std::max({1.0, M.cwiseAbs().maxCoeff(),
                                   R.cwiseAbs().maxCoeff()});
    const double tol = 1e-10 * scale;
    Eigen::EigenSolver<Mat> es(M);
    for (int i = 0; i < M.rows(); ++i) {
        const std::complex<double> z = es.eigenvalues()(i);
        if (z.real() < -1e-12) continue;  // stable mode, nothing to check
        if (pencil_min_sv(M, R, z) <= tol) {
            failure = z;
            return false;
        }
    }
    return true;
}

}  // namespace

double spectral_abscissa(const Mat& M) {
    Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

SystemReport validate_system(const BilinearSystem& sys) {
    sys.check();
    SystemReport rep;
    rep.spectral_abscissa_A = spectral_abscissa(sys.A);
    rep.stabilizable = eigenvalue_rank_test(sys.A, sys.B,
                                            rep.stabilizability_failure);
    // Detectability of (A, C) is stabilizability of the transposed pair.
    rep.detectable = eigenvalue_rank_test(sys.A.transpose(), sys.C.transpose(),
                                          rep.detectability_failure);
    return rep;
}

}  // namespace rhc
