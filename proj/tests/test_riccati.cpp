#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "rhc/checks.hpp"
#include "rhc/riccati.hpp"

using namespace rhc;

TEST_CASE("lyapunov solve against a hand-solved 2x2 instance") {
    // M'X + XM + I = 0 with M = [[-1, 2], [0, -3]] has the closed-form
    // solution X = [[1/2, 1/4], [1/4, 1/3]] (solve the three scalar
    // equations row by row).
    Mat M = (Mat(2, 2) << -1.0, 2.0, 0.0, -3.0).finished();
    Mat X = solve_lyapunov(M, Mat::Identity(2, 2));
    Mat expected = (Mat(2, 2) << 0.5, 0.25, 0.25, 1.0 / 3.0).finished();
    CHECK((X - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(X(0, 1) == X(1, 0));  // symmetric RHS gives a symmetric solution
}

TEST_CASE("lyapunov solve with a diagonal M and non-symmetric RHS") {
    // For diagonal M the equation decouples: X_ij = -RHS_ij / (m_i + m_j).
    Mat M = (Mat(2, 2) << -1.0, 0.0, 0.0, -2.0).finished();
    Mat RHS = (Mat(2, 2) << 1.0, 2.0, 0.0, 1.0).finished();
    Mat X = solve_lyapunov(M, RHS);
    Mat expected = (Mat(2, 2) << 0.5, 2.0 / 3.0, 0.0, 0.25).finished();
    CHECK((X - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("lyapunov solve rejects eigenvalue pairs summing to zero") {
    Mat M = (Mat(2, 2) << 1.0, 0.0, 0.0, -1.0).finished();
    CHECK_THROWS_AS(solve_lyapunov(M, Mat::Identity(2, 2)),
                    DegenerateSpectrumError);
}

TEST_CASE("riccati solution of the benchmark system") {
    const BilinearSystem sys = benchmark_system();
    const RiccatiSolution ric = solve_are(sys);

    // Residual recomputed from scratch, independently of the reported field.
    const Mat R = sys.A.transpose() * ric.Pi + ric.Pi * sys.A +
                  sys.C.transpose() * sys.C -
                  (1.0 / sys.alpha) * ric.Pi * sys.B * sys.B.transpose() * ric.Pi;
    CHECK(R.norm() <= 1e-10);
    CHECK(ric.residual <= 1e-10);

    // Known-good solution values (10 digits).
    CHECK(ric.Pi(0, 0) == doctest::Approx(0.5109695324).epsilon(1e-9));
    CHECK(ric.Pi(0, 1) == doctest::Approx(-0.1222576169).epsilon(1e-8));
    CHECK(ric.Pi(1, 0) == ric.Pi(0, 1));
    CHECK(ric.Pi(1, 1) == doctest::Approx(0.2694355958).epsilon(1e-9));

    // Closed loop A - (1/alpha) B B' Pi and its decay rate.
    const Mat A_pi_expected =
        sys.A - (1.0 / sys.alpha) * sys.B * sys.B.transpose() * ric.Pi;
    CHECK((ric.A_pi - A_pi_expected).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(ric.lambda == doctest::Approx(1.5).epsilon(1e-9));

    Eigen::EigenSolver<Mat> es(ric.A_pi);
    std::vector<double> re = {es.eigenvalues()(0).real(),
                              es.eigenvalues()(1).real()};
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-4.3588989435).epsilon(1e-9));
    CHECK(re[1] == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(std::abs(es.eigenvalues()(0).imag()) <= 1e-12);

    // Pi is positive definite.
    Eigen::SelfAdjointEigenSolver<Mat> sa(ric.Pi);
    CHECK(sa.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("scalar riccati equation against its closed form") {
    // 2 a p + c^2 - (b^2/alpha) p^2 = 0 has the stabilizing root
    // p = alpha (a + sqrt(a^2 + c^2 b^2 / alpha)) / b^2 and closed-loop
    // decay sqrt(a^2 + c^2 b^2 / alpha).
    BilinearSystem sys;
    const double a = 0.7, b = 1.3, c = 0.9, alpha = 0.2;
    sys.A = Mat::Constant(1, 1, a);
    sys.B = Vec::Constant(1, b);
    sys.N = Mat::Zero(1, 1);
    sys.C = Mat::Constant(1, 1, c);
    sys.alpha = alpha;

    const double disc = std::sqrt(a * a + c * c * b * b / alpha);
    const double p_expected = alpha * (a + disc) / (b * b);

    const RiccatiSolution ric = solve_are(sys);
    CHECK(ric.Pi(0, 0) == doctest::Approx(p_expected).epsilon(1e-12));
    CHECK(ric.lambda == doctest::Approx(disc).epsilon(1e-12));
}

TEST_CASE("zero output weight gives the zero solution for stable dynamics") {
    BilinearSystem sys;
    sys.A = Mat::Constant(1, 1, -0.8);
    sys.B = Vec::Constant(1, 1.0);
    sys.N = Mat::Zero(1, 1);
    sys.C = Mat::Zero(1, 1);
    sys.alpha = 0.5;

    const RiccatiSolution ric = solve_are(sys);
    CHECK(ric.Pi.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(ric.lambda == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("unstabilizable and undetectable systems are rejected") {
    BilinearSystem sys;
    sys.A = (Mat(2, 2) << 1.0, 0.0, 0.0, -1.0).finished();
    sys.B = (Vec(2) << 0.0, 1.0).finished();
    sys.N = Mat::Zero(2, 2);
    sys.C = Mat::Identity(2, 2);
    sys.alpha = 1.0;
    CHECK_THROWS_AS(solve_are(sys), NotStabilizableError);

    sys.B = (Vec(2) << 1.0, 1.0).finished();
    sys.C = (Mat(1, 2) << 0.0, 1.0).finished();
    CHECK_THROWS_AS(solve_are(sys), NotStabilizableError);
}

TEST_CASE("riccati handles an already stable drift") {
    // A stable: the Newton iteration can start from the zero gain.
    BilinearSystem sys;
    sys.A = (Mat(2, 2) << -1.0, 0.5, 0.0, -2.0).finished();
    sys.B = (Vec(2) << 1.0, 0.0).finished();
    sys.N = Mat::Zero(2, 2);
    sys.C = Mat::Identity(2, 2);
    sys.alpha = 1.0;
    const RiccatiSolution ric = solve_are(sys);
    const Mat R = sys.A.transpose() * ric.Pi + ric.Pi * sys.A +
                  sys.C.transpose() * sys.C -
                  (1.0 / sys.alpha) * ric.Pi * sys.B * sys.B.transpose() * ric.Pi;
    CHECK(R.norm() <= 1e-10);
    CHECK(ric.lambda > 0.0);
}
