#pragma once

#include <cmath>

#include "rhc/types.hpp"

namespace rhc {

// Exact L2 norm of the piecewise-constant signal: sqrt(sum h * u_k^2).
inline double l2_norm(const ControlSignal& u) {
    return std::sqrt(u.grid.h * u.values.squaredNorm());
}

// L2 norm of t -> e^{mu t} u(t), with the exponential weight evaluated at
// step midpoints (second-order accurate and sign-symmetric in mu).
inline double weighted_l2_norm(const ControlSignal& u, double mu) {
    double acc = 0.0;
    for (int k = 0; k < u.grid.steps; ++k) {
        const double w = std::exp(mu * (u.grid.t(k) + 0.5 * u.grid.h));
        const double v = w * u.values[k];
        acc += u.grid.h * v * v;
    }
    return std::sqrt(acc);
}

// Max over grid nodes of the Euclidean state norm.
inline double trajectory_sup_norm(const Trajectory& y) {
    double best = 0.0;
    for (int k = 0; k <= y.grid.steps; ++k) {
        best = std::max(best, y.states.col(k).norm());
    }
    return best;
}

// L2 distance between two signals on the same grid.
inline double l2_distance(const ControlSignal& a, const ControlSignal& b) {
    if (!same_grid(a.grid, b.grid)) {
        throw InvalidInputError("l2_distance: signals live on different grids");
    }
    return std::sqrt(a.grid.h * (a.values - b.values).squaredNorm());
}

}  // namespace rhc
