#pragma once

#include "rhc/taylor.hpp"
#include "rhc/types.hpp"

namespace rhc {

// Finite-horizon cost split into its three terms.
struct CostBreakdown {
    double state_cost = 0.0;     // 1/2 int ||C y||^2
    double control_cost = 0.0;   // alpha/2 int u^2
    double terminal_cost = 0.0;  // phi(y(T)); may be negative for Taylor3
    double total = 0.0;
};

// Classical RK4 with u held at its per-step constant value across all four
// stages. Throws DivergenceError naming the first node at which the state is
// non-finite.
Trajectory integrate_state(const BilinearSystem& sys, const ControlSignal& u,
                           const Vec& y0);

// Integrates the adjoint equation  p' = -(A + u N)' p - C'C y  backward from
// p(T) = pT by RK4, with the state interpolated at stage midpoints by the
// cubic Hermite formula on each step. y and u must share a grid.
CostateTrajectory integrate_adjoint(const BilinearSystem& sys, const Trajectory& y,
                                    const ControlSignal& u, const Vec& pT);

// Node weights w_k of the state-cost quadrature: composite Simpson for an
// even step count, Simpson with a 3/8 tail for an odd one, trapezoid for a
// single step. sum_k w_k == grid.span().
Vec quadrature_weights(const TimeGrid& grid);

// State integral sum_k w_k * 1/2 ||C y_k||^2 with the weights above, control
// integral exact for piecewise-constant u, terminal term at the final node.
CostBreakdown eval_cost(const BilinearSystem& sys, const Trajectory& y,
                        const ControlSignal& u, const TerminalPenalty& phi);

}  // namespace rhc
