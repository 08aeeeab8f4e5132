#include "rhc/ocp.hpp"

#include <cfloat>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "rhc/errors.hpp"
#include "rhc/norms.hpp"
#include "rhc/taylor.hpp"

namespace rhc {

namespace {

inline Vec dynamics(const BilinearSystem& sys, const Vec& y, double u) {
    return sys.A * y + u * (sys.N * y + sys.B);
}

// Derivative of the discretized cost with respect to the per-step control
// values (not yet divided by h), computed by reversing the RK4 step map and
// the node-weight quadrature exactly. This makes directional derivatives
// match central differences of the evaluated cost down to truncation noise,
// which the terminal convergence test (grad_tol ~ 1e-12) relies on.
Vec gradient_bar(const BilinearSystem& sys, const Trajectory& y,
                 const Vec& u_values, const TerminalPenalty& phi, const Vec& w) {
    const int K = static_cast<int>(u_values.size());
    const double h = y.grid.h;
    const Mat Q = sys.C.transpose() * sys.C;

    Vec gbar(K);
    Vec pbar = grad_penalty(phi, y.states.col(K)) + w[K] * (Q * y.states.col(K));
    for (int k = K - 1; k >= 0; --k) {
        const double uk = u_values[k];
        const Mat Jt = (sys.A + uk * sys.N).transpose();
        // Recompute the stage states of step k from the stored node.
        const Vec s1 = y.states.col(k);
        const Vec k1 = dynamics(sys, s1, uk);
        const Vec s2 = s1 + 0.5 * h * k1;
        const Vec k2 = dynamics(sys, s2, uk);
        const Vec s3 = s1 + 0.5 * h * k2;
        const Vec k3 = dynamics(sys, s3, uk);
        const Vec s4 = s1 + h * k3;
        // Adjoints of the four stage slopes.
        const Vec a4 = (h / 6.0) * pbar;
        const Vec a3 = (h / 3.0) * pbar + h * (Jt * a4);
        const Vec a2 = (h / 3.0) * pbar + 0.5 * h * (Jt * a3);
        const Vec a1 = (h / 6.0) * pbar + 0.5 * h * (Jt * a2);
        gbar[k] = sys.alpha * h * uk + a1.dot(sys.N * s1 + sys.B) +
                  a2.dot(sys.N * s2 + sys.B) + a3.dot(sys.N * s3 + sys.B) +
                  a4.dot(sys.N * s4 + sys.B);
        pbar += Jt * (a1 + a2 + a3 + a4) + w[k] * (Q * y.states.col(k));
    }
    return gbar;
}

struct Objective {
    const BilinearSystem& sys;
    TimeGrid grid;
    Vec y0;
    const TerminalPenalty& phi;
    Vec w;  // quadrature weights

    double cost(const Vec& u_values, Trajectory* traj_out = nullptr) const {
        ControlSignal u{grid, u_values};
        Trajectory y = integrate_state(sys, u, y0);
        const CostBreakdown c = eval_cost(sys, y, u, phi);
        if (traj_out) *traj_out = std::move(y);
        return c.total;
    }

    // L2-density gradient and its L2 norm.
    Vec gradient(const Trajectory& y, const Vec& u_values) const {
        return gradient_bar(sys, y, u_values, phi, w) / grid.h;
    }

    double norm(const Vec& g) const { return std::sqrt(grid.h * g.squaredNorm()); }
};

}  // namespace

Vec reduced_gradient(const BilinearSystem& sys, const ControlSignal& u,
                     const Vec& y0, const TerminalPenalty& phi) {
    const Trajectory y = integrate_state(sys, u, y0);
    const Vec w = quadrature_weights(u.grid);
    return gradient_bar(sys, y, u.values, phi, w) / u.grid.h;
}

OcpSolution solve_finite_horizon(const BilinearSystem& sys, double T,
                                 const TerminalPenalty& phi, const Vec& y0,
                                 const SolverOptions& opts,
                                 const std::optional<ControlSignal>& u_init) {
    sys.check();
    if (!(opts.grad_tol > 0.0) || opts.max_iters < 1 || opts.lbfgs_memory < 1 ||
        !(opts.h > 0.0)) {
        throw InvalidInputError("solve_finite_horizon: malformed options");
    }
    const TimeGrid grid = TimeGrid::over(0.0, T, opts.h);
    const int K = grid.steps;
    const double h = grid.h;

    Vec u = Vec::Zero(K);
    if (u_init) {
        if (u_init->values.size() != K ||
            std::abs(u_init->grid.h - h) > 1e-12 * h) {
            throw InvalidInputError(
                "solve_finite_horizon: warm start lives on a different grid");
        }
        u = u_init->values;
    }

    Objective obj{sys, grid, y0, phi, quadrature_weights(grid)};

    Trajectory y;
    double J = obj.cost(u, &y);
    Vec g = obj.gradient(y, u);
    double gn = obj.norm(g);

    std::deque<Vec> S, Y;
    std::deque<double> rho;
    const double c1 = 1e-4;

    OcpSolution sol;
    sol.cost_history.push_back(J);

    // Best iterate by gradient norm. On the cost plateau the iterates keep
    // exploring (J is flat to the last bit there), and the stationary point
    // is whichever of them drives the gradient smallest.
    Vec u_best = u;
    double gn_best = gn;
    int plateau_stale = 0;

    int iter = 0;
    while (iter < opts.max_iters && gn > opts.grad_tol) {
        // Two-loop recursion in the h-weighted inner product.
        Vec d = g;
        {
            std::vector<double> alpha(S.size());
            for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
                alpha[i] = rho[i] * h * S[i].dot(d);
                d -= alpha[i] * Y[i];
            }
            if (!S.empty()) {
                const double gamma =
                    (h * S.back().dot(Y.back())) / (h * Y.back().squaredNorm());
                d *= gamma;
            }
            for (size_t i = 0; i < S.size(); ++i) {
                const double beta = rho[i] * h * Y[i].dot(d);
                d += (alpha[i] - beta) * S[i];
            }
            d = -d;
        }
        double gd = h * g.dot(d);
        if (!(gd < 0.0)) {
            d = -g;
            gd = -h * g.squaredNorm();
        }

        // Backtracking line search. Once the predicted Armijo decrease falls
        // below the floating-point noise of J, sufficient decrease can no
        // longer be measured on J; the tail is then driven by the gradient
        // norm alone (J stays flat to the last bit while g keeps shrinking).
        //
        // Trial steps are kept inside the region where the window problem is
        // meaningful: states stay finite (guard) and the terminal penalty
        // stays nonnegative. The penalty stands in for a value function,
        // nonnegative by definition, so a negative value certifies that the
        // trial left the Taylor model's validity region -- there a cubic
        // penalty is unbounded below and an Armijo "decrease" says nothing.
        // Inside the region the objective is bounded below by zero, which is
        // what makes backtracking on it sound.
        const double flat_tol = 8.0 * DBL_EPSILON * std::max(1.0, std::abs(J));
        const double guard = 1e6 * std::max(1.0, y0.norm());
        bool accepted = false;
        // A unit-length first move: with an empty quasi-Newton memory the
        // raw steepest-descent step |g| can be arbitrarily large.
        double t = (iter == 0 && S.empty())
                       ? std::min(1.0, 1.0 / std::max(gn, 1e-12))
                       : 1.0;
        Vec ut, gt;
        Trajectory yt;
        double Jt = 0.0, gnt = 0.0;
        for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
            ut = u + t * d;
            try {
                Jt = obj.cost(ut, &yt);
            } catch (const DivergenceError&) {
                continue;
            }
            if (!std::isfinite(Jt) ||
                yt.states.cwiseAbs().maxCoeff() > guard ||
                eval_penalty(phi, yt.states.col(K)) < 0.0) {
                continue;
            }
            const double pred = c1 * t * gd;
            const double target = J + pred;
            const bool measurable = (target < J);
            if (measurable) {
                // The predicted decrease is representable: ordinary Armijo.
                if (Jt > target) continue;
            } else {
                // The predicted decrease rounds away: J cannot measure
                // progress any more. Accept anything that does not raise J
                // beyond round-off; progress is judged by the best-gradient
                // tracking below, not per step. (Requiring a bitwise
                // Jt <= J here stalls against a one-ulp wall; requiring a
                // gradient decrease per step blocks the quasi-Newton steps
                // that overshoot once and then home in.)
                if (Jt > J + flat_tol) continue;
            }
            gt = obj.gradient(yt, ut);
            if (!gt.allFinite()) continue;
            gnt = obj.norm(gt);
            accepted = true;
            if (measurable) plateau_stale = -1;  // reset below on accept
            break;
        }
        if (!accepted) {
            // One restart with a cleared quasi-Newton memory: near the
            // gradient floor stale curvature pairs can poison the direction.
            if (!S.empty()) {
                S.clear();
                Y.clear();
                rho.clear();
                continue;
            }
            break;  // no measurable progress left in any direction
        }

        const Vec s = ut - u;
        const Vec yv = gt - g;
        const double sy = h * s.dot(yv);
        if (sy > 1e-30) {
            S.push_back(s);
            Y.push_back(yv);
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opts.lbfgs_memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        u = std::move(ut);
        y = std::move(yt);
        J = Jt;
        g = std::move(gt);
        gn = gnt;
        ++iter;
        sol.cost_history.push_back(J);

        if (gn < gn_best) {
            gn_best = gn;
            u_best = u;
            plateau_stale = 0;
        } else if (plateau_stale >= 0) {
            // Count only consecutive plateau steps with no new best; a
            // measurable cost decrease resets the counter (see above).
            if (++plateau_stale > 100) break;
        } else {
            plateau_stale = 0;
        }
    }

    // The last iterate is not necessarily the best one: plateau steps may
    // have wandered past the stationary point.
    if (gn_best < gn) {
        u = u_best;
        gn = gn_best;
    }

    sol.u = ControlSignal{grid, u};
    sol.y = integrate_state(sys, sol.u, y0);
    sol.p = integrate_adjoint(sys, sol.y, sol.u,
                              grad_penalty(phi, sol.y.states.col(K)));
    sol.cost = eval_cost(sys, sol.y, sol.u, phi);
    sol.grad_norm = gn;
    sol.iterations = iter;
    sol.converged = (gn <= opts.grad_tol);
    return sol;
}

OcpSolution reference_solution(const BilinearSystem& sys, const Vec& y0, double L,
                               const SolverOptions& opts, double* certificate) {
    const RiccatiSolution ric = solve_are(sys);
    const SymTensor3 T3 = solve_cubic_term(sys, ric);
    const TerminalPenalty phi = TerminalPenalty::Taylor3(ric.Pi, T3);

    OcpSolution base = solve_finite_horizon(sys, L, phi, y0, opts);
    if (!base.converged) {
        throw ConvergenceError("reference_solution: base solve unconverged",
                               base.grad_norm);
    }

    // Horizon-extension certificate: the restriction to (0, L) of the
    // solution on (0, L+3) must match the base solution.
    const TimeGrid ext_grid = TimeGrid::over(0.0, L + 3.0, opts.h);
    Vec warm = Vec::Zero(ext_grid.steps);
    warm.head(base.u.values.size()) = base.u.values;
    OcpSolution ext = solve_finite_horizon(sys, L + 3.0, phi, y0, opts,
                                           ControlSignal{ext_grid, warm});
    if (!ext.converged) {
        throw ConvergenceError("reference_solution: extended solve unconverged",
                               ext.grad_norm);
    }
    const int KL = base.u.grid.steps;
    const double change = std::sqrt(
        opts.h *
        (ext.u.values.head(KL) - base.u.values).squaredNorm());
    if (certificate) *certificate = change;
    if (!(change <= 1e-8)) {
        std::ostringstream msg;
        msg << "reference_solution: horizon extension moved the control by "
            << change << " (allowed 1e-8)";
        throw ReferenceUnstableError(msg.str(), change, 1e-8);
    }
    return base;
}

}  // namespace rhc
