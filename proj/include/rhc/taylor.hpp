#pragma once

#include <vector>

#include "rhc/riccati.hpp"
#include "rhc/types.hpp"

namespace rhc {

// Fully symmetric third-order tensor, stored dense (n^3 entries) with the
// symmetry enforced at construction time.
class SymTensor3 {
  public:
    SymTensor3() : n_(0) {}
    explicit SymTensor3(int n) : n_(n), c_(static_cast<size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }
    double operator()(int i, int j, int k) const { return c_[idx(i, j, k)]; }

    // Sets entry (i,j,k) and all its permutations.
    void set_sym(int i, int j, int k, double v);

    // Trilinear form T(u, v, w).
    double contract3(const Vec& u, const Vec& v, const Vec& w) const;

    // Vector T(u, v, .): component i = sum_{j,k} T(i,j,k) u_j v_k.
    Vec contract2(const Vec& u, const Vec& v) const;

    double max_abs() const;

  private:
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * n_ + j) * n_ + k;
    }
    int n_;
    std::vector<double> c_;
};

// Terminal penalty phi(y) appended to a finite-horizon problem.
//   Zero:       0
//   Quadratic:  1/2 <y, Q y>
//   Taylor2:    1/2 <y, Pi y>
//   Taylor3:    1/2 <y, Pi y> + 1/6 T3(y, y, y)
struct TerminalPenalty {
    enum class Kind { zero, quadratic, taylor2, taylor3 };

    Kind kind = Kind::zero;
    Mat Q;         // quadratic variant only
    Mat Pi;        // taylor2 / taylor3
    SymTensor3 T3; // taylor3 only

    static TerminalPenalty Zero() { return {}; }
    static TerminalPenalty Quadratic(Mat Q);
    static TerminalPenalty Taylor2(Mat Pi);
    static TerminalPenalty Taylor3(Mat Pi, SymTensor3 T3);
};

double eval_penalty(const TerminalPenalty& phi, const Vec& y);
Vec grad_penalty(const TerminalPenalty& phi, const Vec& y);

// Cubic coefficient tensor of the value function, determined by the
// cubic-order stationarity identity
//   1/2 T3(y, y, A_pi y) = (1/alpha) <Pi y, B> <Pi y, N y>   for all y,
// solved as a linear system over the distinct symmetric entries. The solve is
// certified by sampling the identity at 100 random unit vectors (residual
// <= 1e-9). Throws DegenerateSpectrumError when the linear system is
// singular (some eigenvalue triple of A_pi sums to zero).
SymTensor3 solve_cubic_term(const BilinearSystem& sys, const RiccatiSolution& ric);

}  // namespace rhc
