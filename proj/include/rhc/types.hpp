#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rhc/errors.hpp"

namespace rhc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Bilinear control system  y' = A y + (N y + B) u  with cost weights C, alpha:
//   J = 1/2 int ||C y||^2 + alpha/2 int u^2  (+ terminal penalty).
struct BilinearSystem {
    Mat A;         // n x n drift
    Vec B;         // n, affine control direction
    Mat N;         // n x n bilinear coupling
    Mat C;         // z x n output weighting
    double alpha;  // control cost weight, > 0

    int dim() const { return static_cast<int>(A.rows()); }
    int out_dim() const { return static_cast<int>(C.rows()); }

    // Throws InvalidInputError on inconsistent dimensions, non-finite
    // entries, or alpha <= 0.
    void check() const;
};

// Uniform time grid with nodes t_start + k*h, k = 0..steps.
struct TimeGrid {
    double t_start = 0.0;
    double h = 0.0;
    int steps = 0;

    double t(int k) const { return t_start + k * h; }
    double span() const { return steps * h; }

    // Grid covering [t_start, t_start + length]; length/h must be integral
    // within 1e-9 (relative to one step).
    static TimeGrid over(double t_start, double length, double h);
};

bool same_grid(const TimeGrid& a, const TimeGrid& b);

// Piecewise-constant control: values[k] holds on [t_k, t_{k+1}).
struct ControlSignal {
    TimeGrid grid;
    Vec values;  // length grid.steps
};

// State trajectory sampled at grid nodes (column k = y(t_k)).
struct Trajectory {
    TimeGrid grid;
    Mat states;  // n x (grid.steps + 1)
};

// Costate (adjoint) trajectory sampled at grid nodes.
struct CostateTrajectory {
    TimeGrid grid;
    Mat costates;  // n x (grid.steps + 1)
};

inline void BilinearSystem::check() const {
    const auto n = A.rows();
    if (A.cols() != n || B.size() != n || N.rows() != n || N.cols() != n ||
        C.cols() != n || C.rows() < 1) {
        throw InvalidInputError("bilinear system has inconsistent dimensions");
    }
    if (!(alpha > 0.0)) {
        throw InvalidInputError("control cost weight alpha must be positive");
    }
    if (!A.allFinite() || !B.allFinite() || !N.allFinite() || !C.allFinite()) {
        throw InvalidInputError("bilinear system has non-finite entries");
    }
}

inline TimeGrid TimeGrid::over(double t_start, double length, double h) {
    if (!(h > 0.0) || !(length > 0.0)) {
        throw InvalidInputError("time grid needs positive step and length");
    }
    const double ratio = length / h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw InvalidInputError("interval length is not an integer number of steps");
    }
    return TimeGrid{t_start, h, static_cast<int>(rounded)};
}

inline bool same_grid(const TimeGrid& a, const TimeGrid& b) {
    return a.steps == b.steps && std::abs(a.h - b.h) <= 1e-12 * std::max(a.h, b.h) &&
           std::abs(a.t_start - b.t_start) <= 1e-9;
}

}  // namespace rhc
