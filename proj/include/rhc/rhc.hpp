#pragma once

#include <vector>

#include "rhc/ocp.hpp"

namespace rhc {

struct RhcConfig {
    double tau = 0.0;           // sampling time: span of each window that is kept
    double T = 0.0;             // prediction horizon of each window solve
    double L = 5.0;             // total simulated span
    TerminalPenalty phi;        // terminal penalty of every window problem
    SolverOptions opts;
    // Requires 0 < tau <= T, and tau/h and T/h integral within 1e-9.
    void check() const;
};

// Per-window solve record.
struct WindowRecord {
    int window = 0;             // index n; the window starts at t = n*tau
    Vec y_n;                    // initial state of the window
    bool converged = false;
    double grad_norm = 0.0;
    double cost = 0.0;          // window cost including terminal penalty
};

struct RhcResult {
    ControlSignal u_rh;         // concatenated control on (0, L)
    Trajectory y_rh;            // concatenated state on (0, L)
    std::vector<WindowRecord> windows;
    double tau = 0.0;           // window spacing used to produce the run
};

// Thrown when a window solve fails to converge; carries everything stitched
// together before the failure so callers can inspect the partial run.
class RhcWindowError : public Error {
  public:
    RhcWindowError(int window, double grad_norm, RhcResult partial);
    int window;                 // index of the window that failed
    double grad_norm;           // gradient norm it stalled at
    RhcResult partial;          // concatenation over the completed windows
};

// The receding-horizon loop: solve a horizon-T problem from y_n, keep the
// first tau-span of its control and state, advance y_{n+1} = y(n tau + tau)
// read off the window's own integrated trajectory, repeat for ceil(L/tau)
// windows, truncate to (0, L). Successive windows warm-start from the shifted
// tail of the previous window's control padded with zeros.
RhcResult run_rhc(const BilinearSystem& sys, const Vec& y0, const RhcConfig& cfg);

struct ComparisonMetrics {
    double control_error = 0.0;     // ||u_rh - u_ref||_{L2(0,L)}
    double state_error = 0.0;       // max over grid nodes of ||y_rh - y_ref||
    double suboptimality = 0.0;     // J(u_rh) - J(u_ref), terminal penalty Zero
    std::vector<double> a_n;        // per window: ||y_n - y_ref(n tau)||
    std::vector<double> b_n;        // per window: ||u_rh - u_ref||_{L2(0, n tau)}
};

// Error metrics of an RHC run against a reference solution on the same span.
// Both costs are re-evaluated on the common grid with the Zero penalty.
ComparisonMetrics compare_to_reference(const BilinearSystem& sys,
                                       const RhcResult& res,
                                       const OcpSolution& ref);

struct DecayCertificate {
    double lambda_hat = 0.0;    // fitted decay rate (slope = -lambda_hat)
    double intercept = 0.0;     // fitted log-prefactor
    bool passed = false;        // lambda_hat > 0
    bool trivially_stable = false;  // every window state was exactly zero
};

// Least-squares fit of log||y_n|| against n*tau over the window initial
// states. Windows with ||y_n|| = 0 are excluded; needs >= 3 usable points
// unless all are zero.
DecayCertificate decay_certificate(const RhcResult& res, double tau);

}  // namespace rhc
