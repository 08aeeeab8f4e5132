#pragma once

#include <optional>
#include <vector>

#include "rhc/simulate.hpp"

namespace rhc {

struct SolverOptions {
    double grad_tol = 1e-12;  // L2 norm of the reduced gradient
    int max_iters = 5000;
    int lbfgs_memory = 10;
    double h = 0.01;          // time step of the control/state grid
};

// Stationary point of a finite-horizon problem.
struct OcpSolution {
    ControlSignal u;
    Trajectory y;
    CostateTrajectory p;
    CostBreakdown cost;        // recomputed from scratch on the returned control
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    // Cost after each accepted step, cost_history[0] being the initial cost.
    std::vector<double> cost_history;
};

// L2-representer of the derivative of the discretized cost with respect to
// the piecewise-constant control:  g_k = alpha u_k + <p, N y + B> evaluated
// through the integrator-consistent stage quadrature (the exact adjoint of
// the RK4 + Simpson computational graph, so that <g, v>_{L2} matches central
// finite differences of the cost to truncation error).
Vec reduced_gradient(const BilinearSystem& sys, const ControlSignal& u,
                     const Vec& y0, const TerminalPenalty& phi);

// Reduced-gradient L-BFGS over the discretized control (memory
// opts.lbfgs_memory, backtracking Armijo line search with c1 = 1e-4).
// Accepted iterates never increase the cost. When the returned solution has
// converged == true, its grad_norm is <= opts.grad_tol. u_init, when given,
// warm-starts the iteration (defaults to the zero control).
OcpSolution solve_finite_horizon(const BilinearSystem& sys, double T,
                                 const TerminalPenalty& phi, const Vec& y0,
                                 const SolverOptions& opts,
                                 const std::optional<ControlSignal>& u_init = {});

// Long-horizon stand-in for the infinite-horizon optimal control: solves on
// (0, L) with the cubic Taylor penalty and certifies insensitivity by
// re-solving on (0, L+3); the restriction of the longer solution to (0, L)
// must agree within 1e-8 in L2, else ReferenceUnstableError. The measured
// change is written to *certificate when given.
OcpSolution reference_solution(const BilinearSystem& sys, const Vec& y0, double L,
                               const SolverOptions& opts,
                               double* certificate = nullptr);

}  // namespace rhc
