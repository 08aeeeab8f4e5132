#include "rhc/rhc.hpp"

#include <cmath>
#include <sstream>

#include "rhc/norms.hpp"

namespace rhc {

namespace {

// Number of h-steps in `length`, required integral within 1e-9 relative.
int steps_in(double length, double h, const char* what) {
    const double ratio = length / h;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << what << " = " << length << " is not an integer multiple of h = "
            << h;
        throw InvalidInputError(msg.str());
    }
    return static_cast<int>(rounded);
}

}  // namespace

void RhcConfig::check() const {
    if (!(tau > 0.0) || !(T > 0.0) || !(L > 0.0)) {
        throw InvalidInputError("rhc config needs positive tau, T, L");
    }
    if (tau > T * (1.0 + 1e-12)) {
        throw InvalidInputError("rhc config needs tau <= T");
    }
    if (!(opts.h > 0.0)) {
        throw InvalidInputError("rhc config needs a positive step h");
    }
    steps_in(tau, opts.h, "tau");
    steps_in(T, opts.h, "T");
    steps_in(L, opts.h, "L");
}

namespace {
std::string format_grad(double g) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", g);
    return buf;
}
}  // namespace

RhcWindowError::RhcWindowError(int window_, double grad_norm_, RhcResult partial_)
    : Error("rhc window " + std::to_string(window_) +
            " did not converge (|g| = " + format_grad(grad_norm_) + ")"),
      window(window_),
      grad_norm(grad_norm_),
      partial(std::move(partial_)) {}

RhcResult run_rhc(const BilinearSystem& sys, const Vec& y0, const RhcConfig& cfg) {
    sys.check();
    cfg.check();
    if (y0.size() != sys.dim()) {
        throw InvalidInputError("run_rhc: y0 has wrong dimension");
    }
    const double h = cfg.opts.h;
    const int steps_tau = steps_in(cfg.tau, h, "tau");
    const int steps_L = steps_in(cfg.L, h, "L");
    const int n_windows =
        static_cast<int>(std::ceil(cfg.L / cfg.tau - 1e-9));

    RhcResult res;
    res.tau = cfg.tau;
    res.u_rh.grid = TimeGrid{0.0, h, steps_L};
    res.u_rh.values = Vec::Zero(steps_L);
    res.y_rh.grid = res.u_rh.grid;
    res.y_rh.states.resize(sys.dim(), steps_L + 1);
    res.y_rh.states.col(0) = y0;

    // Truncates the stitched result to the first `upto` grid steps, for the
    // partial payload of a failed window.
    auto truncated = [&](int upto) {
        RhcResult part;
        part.u_rh.grid = TimeGrid{0.0, h, upto};
        part.u_rh.values = res.u_rh.values.head(upto);
        part.y_rh.grid = part.u_rh.grid;
        part.y_rh.states = res.y_rh.states.leftCols(upto + 1);
        part.windows = res.windows;
        return part;
    };

    Vec y_n = y0;
    std::optional<ControlSignal> warm;
    const TimeGrid window_grid = TimeGrid::over(0.0, cfg.T, h);
    for (int n = 0; n < n_windows; ++n) {
        const int base = n * steps_tau;
        OcpSolution w;
        try {
            w = solve_finite_horizon(sys, cfg.T, cfg.phi, y_n, cfg.opts, warm);
        } catch (const DivergenceError& e) {
            std::ostringstream msg;
            msg << "run_rhc: window " << n << ": " << e.what();
            throw DivergenceError(msg.str(), e.node);
        }
        if (!w.converged) {
            throw RhcWindowError(n, w.grad_norm, truncated(base));
        }

        // Keep the first tau-span (clipped at L) of this window's control and
        // state; the window's own trajectory is the single source of truth.
        const int kept = std::min(steps_tau, steps_L - base);
        res.u_rh.values.segment(base, kept) = w.u.values.head(kept);
        res.y_rh.states.middleCols(base, kept + 1) =
            w.y.states.leftCols(kept + 1);

        WindowRecord rec;
        rec.window = n;
        rec.y_n = y_n;
        rec.converged = w.converged;
        rec.grad_norm = w.grad_norm;
        rec.cost = w.cost.total;
        res.windows.push_back(std::move(rec));

        y_n = w.y.states.col(steps_tau);

        // Warm start the next window from the shifted tail, zero-padded.
        Vec shifted = Vec::Zero(window_grid.steps);
        const int tail = window_grid.steps - steps_tau;
        if (tail > 0) shifted.head(tail) = w.u.values.tail(tail);
        warm = ControlSignal{window_grid, shifted};
    }
    return res;
}

ComparisonMetrics compare_to_reference(const BilinearSystem& sys,
                                       const RhcResult& res,
                                       const OcpSolution& ref) {
    if (!same_grid(res.u_rh.grid, ref.u.grid)) {
        throw InvalidInputError(
            "compare_to_reference: runs live on different grids");
    }
    ComparisonMetrics m;
    m.control_error = l2_distance(res.u_rh, ref.u);
    m.state_error = 0.0;
    for (int k = 0; k <= res.y_rh.grid.steps; ++k) {
        m.state_error = std::max(
            m.state_error, (res.y_rh.states.col(k) - ref.y.states.col(k)).norm());
    }
    const TerminalPenalty zero = TerminalPenalty::Zero();
    m.suboptimality = eval_cost(sys, res.y_rh, res.u_rh, zero).total -
                      eval_cost(sys, ref.y, ref.u, zero).total;

    // Per-window deviation sequences; window n starts at t = n tau.
    const int steps_L = res.u_rh.grid.steps;
    const double h = res.u_rh.grid.h;
    const int steps_tau =
        res.tau > 0.0 ? static_cast<int>(std::llround(res.tau / h)) : steps_L;
    for (const WindowRecord& w : res.windows) {
        const int node = std::min(w.window * steps_tau, steps_L);
        m.a_n.push_back((w.y_n - ref.y.states.col(node)).norm());
        m.b_n.push_back(std::sqrt(
            h * (res.u_rh.values.head(node) - ref.u.values.head(node))
                    .squaredNorm()));
    }
    return m;
}

DecayCertificate decay_certificate(const RhcResult& res, double tau) {
    if (res.windows.size() < 3) {
        throw InvalidInputError("decay_certificate: needs at least 3 windows");
    }
    std::vector<double> ts, logs;
    bool any_nonzero = false;
    for (const WindowRecord& w : res.windows) {
        const double norm = w.y_n.norm();
        if (norm > 0.0) {
            any_nonzero = true;
            ts.push_back(w.window * tau);
            logs.push_back(std::log(norm));
        }
    }
    DecayCertificate cert;
    if (!any_nonzero) {
        cert.trivially_stable = true;
        cert.passed = true;
        return cert;
    }
    if (ts.size() < 2) return cert;  // cannot fit a slope
    const int m = static_cast<int>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (int i = 0; i < m; ++i) {
        st += ts[i];
        sl += logs[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * logs[i];
    }
    const double denom = m * stt - st * st;
    if (denom == 0.0) return cert;
    const double slope = (m * stl - st * sl) / denom;
    cert.lambda_hat = -slope;
    cert.intercept = (sl - slope * st) / m;
    cert.passed = cert.lambda_hat > 0.0;
    return cert;
}

}  // namespace rhc
