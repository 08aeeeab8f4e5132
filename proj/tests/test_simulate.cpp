#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "rhc/checks.hpp"
#include "rhc/norms.hpp"
#include "rhc/simulate.hpp"

using namespace rhc;

namespace {

BilinearSystem scalar_system(double a, double b, double n, double c,
                             double alpha = 1.0) {
    BilinearSystem sys;
    sys.A = Mat::Constant(1, 1, a);
    sys.B = Vec::Constant(1, b);
    sys.N = Mat::Constant(1, 1, n);
    sys.C = Mat::Constant(1, 1, c);
    sys.alpha = alpha;
    return sys;
}

ControlSignal constant_control(const TimeGrid& g, double value) {
    return ControlSignal{g, Vec::Constant(g.steps, value)};
}

}  // namespace

TEST_CASE("one RK4 step of y' = -y reproduces the degree-4 Taylor value") {
    const BilinearSystem sys = scalar_system(-1.0, 0.0, 0.0, 1.0);
    const double h = 0.01;
    const TimeGrid g{0.0, h, 1};
    const Trajectory y =
        integrate_state(sys, constant_control(g, 0.0), Vec::Ones(1));
    const double expected =
        1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
    CHECK(y.states(0, 1) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("constant-input linear system against the matrix exponential") {
    BilinearSystem sys = benchmark_system();
    sys.N = Mat::Zero(2, 2);
    const double ub = 0.7;
    const TimeGrid g = TimeGrid::over(0.0, 2.0, 0.01);
    const Trajectory y =
        integrate_state(sys, constant_control(g, ub), benchmark_y0());

    const Mat Ainv = sys.A.inverse();
    double worst = 0.0;
    for (int k = 0; k <= g.steps; ++k) {
        const Mat E = (sys.A * g.t(k)).exp();
        const Vec exact = E * benchmark_y0() +
                          Ainv * (E - Mat::Identity(2, 2)) * sys.B * ub;
        worst = std::max(worst, (y.states.col(k) - exact).norm());
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("piecewise-constant input propagates exactly through each step") {
    BilinearSystem sys = benchmark_system();
    sys.N = Mat::Zero(2, 2);
    const TimeGrid g = TimeGrid::over(0.0, 2.0, 0.01);
    ControlSignal u{g, Vec(g.steps)};
    for (int k = 0; k < g.steps; ++k) u.values[k] = 0.5 * std::sin(k / 10.0);

    const Trajectory y = integrate_state(sys, u, benchmark_y0());

    // Exact one-step transition for a frozen input value.
    const Mat E = (sys.A * g.h).exp();
    const Mat G = sys.A.inverse() * (E - Mat::Identity(2, 2));
    Vec exact = benchmark_y0();
    double worst = 0.0;
    for (int k = 0; k < g.steps; ++k) {
        exact = E * exact + G * sys.B * u.values[k];
        worst = std::max(worst, (y.states.col(k + 1) - exact).norm());
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("RK4 converges at fourth order on a bilinear scalar problem") {
    // With constant input the dynamics are affine with rate mu = a + n u:
    // y(t) = e^{mu t} (y0 + b u / mu) - b u / mu.
    const double a = -0.6, b = 0.8, n = 0.25, ub = 0.4;
    const double mu = a + n * ub;
    const BilinearSystem sys = scalar_system(a, b, n, 1.0);
    const double y0 = 1.3;
    const auto exact = [&](double t) {
        const double c = b * ub / mu;
        return std::exp(mu * t) * (y0 + c) - c;
    };
    const auto error_at = [&](double h) {
        const TimeGrid g = TimeGrid::over(0.0, 1.0, h);
        const Trajectory y =
            integrate_state(sys, constant_control(g, ub), Vec::Constant(1, y0));
        double worst = 0.0;
        for (int k = 0; k <= g.steps; ++k) {
            worst = std::max(worst, std::abs(y.states(0, k) - exact(g.t(k))));
        }
        return worst;
    };
    const double ratio = error_at(0.02) / error_at(0.01);
    CHECK(ratio >= 14.0);
    CHECK(ratio <= 18.0);
}

TEST_CASE("non-finite states raise a divergence error") {
    const BilinearSystem sys = benchmark_system();
    const TimeGrid g = TimeGrid::over(0.0, 1.0, 0.01);
    CHECK_THROWS_AS(integrate_state(sys, constant_control(g, 1e200),
                                    benchmark_y0()),
                    DivergenceError);
}

TEST_CASE("adjoint equation with zero output weight decays exactly") {
    // With Q = C'C = 0 and A = -1: p' = p, i.e. p(t) = e^{-(T-t)} p(T).
    const BilinearSystem sys = scalar_system(-1.0, 0.0, 0.0, 0.0);
    const TimeGrid g = TimeGrid::over(0.0, 1.0, 0.01);
    const ControlSignal u = constant_control(g, 0.0);
    const Trajectory y = integrate_state(sys, u, Vec::Ones(1));
    const CostateTrajectory p = integrate_adjoint(sys, y, u, Vec::Ones(1));
    double worst = 0.0;
    for (int k = 0; k <= g.steps; ++k) {
        worst = std::max(
            worst, std::abs(p.costates(0, k) - std::exp(-(1.0 - g.t(k)))));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("adjoint equation against the augmented matrix exponential") {
    // For u = 0 the pair (y, p) solves the linear system z' = M z with
    // M = [[A, 0], [-C'C, -A']], so z(t) = e^{M (t-T)} z(T) with exact
    // terminal data z(T) = (e^{AT} y0, pT).
    BilinearSystem sys = benchmark_system();
    sys.N = Mat::Zero(2, 2);
    const double T = 1.0;
    const TimeGrid g = TimeGrid::over(0.0, T, 0.01);
    const ControlSignal u = constant_control(g, 0.0);
    const Trajectory y = integrate_state(sys, u, benchmark_y0());
    const Vec pT = (Vec(2) << 0.3, -0.2).finished();
    const CostateTrajectory p = integrate_adjoint(sys, y, u, pT);

    Mat M = Mat::Zero(4, 4);
    M.topLeftCorner(2, 2) = sys.A;
    M.bottomLeftCorner(2, 2) = -sys.C.transpose() * sys.C;
    M.bottomRightCorner(2, 2) = -sys.A.transpose();
    Vec zT(4);
    zT.head(2) = (sys.A * T).exp() * benchmark_y0();
    zT.tail(2) = pT;

    double worst = 0.0;
    for (int k = 0; k <= g.steps; ++k) {
        const Vec z = (M * (g.t(k) - T)).exp() * zT;
        worst = std::max(worst, (p.costates.col(k) - z.tail(2)).norm());
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("quadrature weights: Simpson, 3/8 tail, trapezoid") {
    const double h = 0.5;
    const Vec w4 = quadrature_weights(TimeGrid{0.0, h, 4});
    const Vec e4 = (Vec(5) << 1, 4, 2, 4, 1).finished() * (h / 3.0);
    CHECK((w4 - e4).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(w4.sum() == doctest::Approx(2.0).epsilon(1e-14));

    const Vec w5 = quadrature_weights(TimeGrid{0.0, h, 5});
    Vec e5(6);
    e5 << h / 3.0, 4.0 * h / 3.0, h / 3.0 + 3.0 * h / 8.0, 9.0 * h / 8.0,
        9.0 * h / 8.0, 3.0 * h / 8.0;
    CHECK((w5 - e5).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(w5.sum() == doctest::Approx(2.5).epsilon(1e-14));

    const Vec w1 = quadrature_weights(TimeGrid{0.0, h, 1});
    CHECK(w1[0] == doctest::Approx(h / 2.0).epsilon(1e-15));
    CHECK(w1[1] == doctest::Approx(h / 2.0).epsilon(1e-15));

    // Both Simpson and the 3/8 rule integrate cubics exactly.
    const TimeGrid g = TimeGrid::over(0.0, 1.0, 0.2);  // 5 steps
    const Vec w = quadrature_weights(g);
    double acc = 0.0;
    for (int k = 0; k <= g.steps; ++k) {
        acc += w[k] * g.t(k) * g.t(k) * g.t(k);
    }
    CHECK(acc == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("cost evaluation: state integral, exact control term, terminal") {
    // State part: 1/2 int_0^5 e^{-2t} dt = (1 - e^{-10})/4 for y' = -y.
    const BilinearSystem sys = scalar_system(-1.0, 0.0, 0.0, 1.0, 0.7);
    const TimeGrid g = TimeGrid::over(0.0, 5.0, 0.01);
    const ControlSignal u0 = constant_control(g, 0.0);
    const Trajectory y = integrate_state(sys, u0, Vec::Ones(1));
    const CostBreakdown zero_u =
        eval_cost(sys, y, u0, TerminalPenalty::Zero());
    CHECK(zero_u.state_cost ==
          doctest::Approx((1.0 - std::exp(-10.0)) / 4.0).epsilon(1e-8));
    CHECK(zero_u.control_cost == 0.0);
    CHECK(zero_u.terminal_cost == 0.0);
    CHECK(zero_u.total == zero_u.state_cost);

    // Control part is exact for piecewise-constant u: alpha/2 c^2 T.
    const ControlSignal uc = constant_control(g, 0.3);
    const Trajectory yc = integrate_state(sys, uc, Vec::Ones(1));
    const CostBreakdown with_u = eval_cost(sys, yc, uc, TerminalPenalty::Zero());
    CHECK(with_u.control_cost ==
          doctest::Approx(0.7 / 2.0 * 0.09 * 5.0).epsilon(1e-12));

    // Terminal part evaluates the penalty at the final node.
    Mat Q = Mat::Constant(1, 1, 2.0);
    const CostBreakdown with_phi =
        eval_cost(sys, yc, uc, TerminalPenalty::Quadratic(Q));
    const double yT = yc.states(0, g.steps);
    CHECK(with_phi.terminal_cost == doctest::Approx(yT * yT).epsilon(1e-14));
    CHECK(with_phi.total == doctest::Approx(with_phi.state_cost +
                                            with_phi.control_cost +
                                            with_phi.terminal_cost)
                                .epsilon(1e-14));
}

TEST_CASE("integration is deterministic") {
    const BilinearSystem sys = benchmark_system();
    const TimeGrid g = TimeGrid::over(0.0, 1.0, 0.01);
    ControlSignal u{g, Vec(g.steps)};
    for (int k = 0; k < g.steps; ++k) u.values[k] = std::cos(0.1 * k);
    const Trajectory y1 = integrate_state(sys, u, benchmark_y0());
    const Trajectory y2 = integrate_state(sys, u, benchmark_y0());
    CHECK((y1.states - y2.states).cwiseAbs().maxCoeff() == 0.0);
}
