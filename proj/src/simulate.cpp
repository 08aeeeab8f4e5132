#include "rhc/simulate.hpp"

#include <cmath>
#include <sstream>

#include "rhc/errors.hpp"

namespace rhc {

namespace {

inline Vec dynamics(const BilinearSystem& sys, const Vec& y, double u) {
    return sys.A * y + u * (sys.N * y + sys.B);
}

void check_pair(const BilinearSystem& sys, const Trajectory& y,
                const ControlSignal& u) {
    if (!same_grid(y.grid, u.grid)) {
        throw InvalidInputError("state and control live on different grids");
    }
    if (y.states.rows() != sys.dim() || y.states.cols() != y.grid.steps + 1 ||
        u.values.size() != u.grid.steps) {
        throw InvalidInputError("trajectory/control storage has wrong shape");
    }
}

}  // namespace

Trajectory integrate_state(const BilinearSystem& sys, const ControlSignal& u,
                           const Vec& y0) {
    sys.check();
    if (y0.size() != sys.dim()) {
        throw InvalidInputError("integrate_state: y0 has wrong dimension");
    }
    if (u.values.size() != u.grid.steps || !(u.grid.h > 0.0)) {
        throw InvalidInputError("integrate_state: malformed control signal");
    }
    const int K = u.grid.steps;
    const double h = u.grid.h;
    Trajectory y;
    y.grid = u.grid;
    y.states.resize(sys.dim(), K + 1);
    y.states.col(0) = y0;
    Vec yk = y0;
    for (int k = 0; k < K; ++k) {
        const double uk = u.values[k];
        const Vec k1 = dynamics(sys, yk, uk);
        const Vec k2 = dynamics(sys, yk + 0.5 * h * k1, uk);
        const Vec k3 = dynamics(sys, yk + 0.5 * h * k2, uk);
        const Vec k4 = dynamics(sys, yk + h * k3, uk);
        yk += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!yk.allFinite()) {
            std::ostringstream msg;
            msg << "state became non-finite at node " << (k + 1);
            throw DivergenceError(msg.str(), k + 1);
        }
        y.states.col(k + 1) = yk;
    }
    return y;
}

CostateTrajectory integrate_adjoint(const BilinearSystem& sys,
                                    const Trajectory& y, const ControlSignal& u,
                                    const Vec& pT) {
    sys.check();
    check_pair(sys, y, u);
    if (pT.size() != sys.dim()) {
        throw InvalidInputError("integrate_adjoint: pT has wrong dimension");
    }
    const int K = u.grid.steps;
    const double h = u.grid.h;
    const Mat Q = sys.C.transpose() * sys.C;

    CostateTrajectory p;
    p.grid = u.grid;
    p.costates.resize(sys.dim(), K + 1);
    p.costates.col(K) = pT;

    Vec pk = pT;
    for (int k = K - 1; k >= 0; --k) {
        const double uk = u.values[k];
        const Mat Jt = (sys.A + uk * sys.N).transpose();
        const Vec ya = y.states.col(k);
        const Vec yb = y.states.col(k + 1);
        // Cubic Hermite midpoint of the state on the step (the control is
        // constant on the step, so both slopes use u_k).
        const Vec ym = 0.5 * (ya + yb) +
                       (h / 8.0) * (dynamics(sys, ya, uk) - dynamics(sys, yb, uk));
        auto rhs = [&](const Vec& pv, const Vec& yv) -> Vec {
            return -(Jt * pv) - Q * yv;
        };
        // RK4 backward in time (step -h).
        const Vec k1 = rhs(pk, yb);
        const Vec k2 = rhs(pk - 0.5 * h * k1, ym);
        const Vec k3 = rhs(pk - 0.5 * h * k2, ym);
        const Vec k4 = rhs(pk - h * k3, ya);
        pk -= (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!pk.allFinite()) {
            std::ostringstream msg;
            msg << "costate became non-finite at node " << k;
            throw DivergenceError(msg.str(), k);
        }
        p.costates.col(k) = pk;
    }
    return p;
}

Vec quadrature_weights(const TimeGrid& grid) {
    const int K = grid.steps;
    const double h = grid.h;
    if (K < 1 || !(h > 0.0)) {
        throw InvalidInputError("quadrature_weights: malformed grid");
    }
    Vec w = Vec::Zero(K + 1);
    if (K == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    // Composite Simpson over the leading even number of steps.
    const int simpson_end = (K % 2 == 0) ? K : K - 3;
    if (simpson_end >= 2) {
        w[0] += h / 3.0;
        w[simpson_end] += h / 3.0;
        for (int k = 1; k < simpson_end; ++k) {
            w[k] += (k % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
        }
    }
    if (K % 2 == 1) {
        // Simpson 3/8 on the trailing three steps.
        const int s = simpson_end;  // == K - 3, possibly 0
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

CostBreakdown eval_cost(const BilinearSystem& sys, const Trajectory& y,
                        const ControlSignal& u, const TerminalPenalty& phi) {
    sys.check();
    check_pair(sys, y, u);
    const int K = u.grid.steps;
    const Vec w = quadrature_weights(u.grid);

    CostBreakdown out;
    for (int k = 0; k <= K; ++k) {
        out.state_cost += w[k] * 0.5 * (sys.C * y.states.col(k)).squaredNorm();
    }
    out.control_cost = 0.5 * sys.alpha * u.grid.h * u.values.squaredNorm();
    out.terminal_cost = eval_penalty(phi, y.states.col(K));
    out.total = out.state_cost + out.control_cost + out.terminal_cost;
    return out;
}

}  // namespace rhc
