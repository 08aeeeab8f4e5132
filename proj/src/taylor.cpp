#include "rhc/taylor.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "rhc/errors.hpp"

namespace rhc {

void SymTensor3::set_sym(int i, int j, int k, double v) {
    c_[idx(i, j, k)] = v;
    c_[idx(i, k, j)] = v;
    c_[idx(j, i, k)] = v;
    c_[idx(j, k, i)] = v;
    c_[idx(k, i, j)] = v;
    c_[idx(k, j, i)] = v;
}

double SymTensor3::contract3(const Vec& u, const Vec& v, const Vec& w) const {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            const double uv = u[i] * v[j];
            if (uv == 0.0) continue;
            for (int k = 0; k < n_; ++k) acc += c_[idx(i, j, k)] * uv * w[k];
        }
    }
    return acc;
}

Vec SymTensor3::contract2(const Vec& u, const Vec& v) const {
    Vec out = Vec::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n_; ++j) {
            for (int k = 0; k < n_; ++k) acc += c_[idx(i, j, k)] * u[j] * v[k];
        }
        out[i] = acc;
    }
    return out;
}

double SymTensor3::max_abs() const {
    double best = 0.0;
    for (double v : c_) best = std::max(best, std::abs(v));
    return best;
}

TerminalPenalty TerminalPenalty::Quadratic(Mat Q) {
    if (Q.rows() != Q.cols()) {
        throw InvalidInputError("quadratic penalty needs a square matrix");
    }
    TerminalPenalty phi;
    phi.kind = Kind::quadratic;
    phi.Q = 0.5 * (Q + Q.transpose()).eval();
    return phi;
}

TerminalPenalty TerminalPenalty::Taylor2(Mat Pi) {
    if (Pi.rows() != Pi.cols()) {
        throw InvalidInputError("Taylor2 penalty needs a square matrix");
    }
    TerminalPenalty phi;
    phi.kind = Kind::taylor2;
    phi.Pi = 0.5 * (Pi + Pi.transpose()).eval();
    return phi;
}

TerminalPenalty TerminalPenalty::Taylor3(Mat Pi, SymTensor3 T3) {
    if (Pi.rows() != Pi.cols() || T3.dim() != Pi.rows()) {
        throw InvalidInputError("Taylor3 penalty has inconsistent dimensions");
    }
    TerminalPenalty phi;
    phi.kind = Kind::taylor3;
    phi.Pi = 0.5 * (Pi + Pi.transpose()).eval();
    phi.T3 = std::move(T3);
    return phi;
}

double eval_penalty(const TerminalPenalty& phi, const Vec& y) {
    switch (phi.kind) {
        case TerminalPenalty::Kind::zero:
            return 0.0;
        case TerminalPenalty::Kind::quadratic:
            return 0.5 * y.dot(phi.Q * y);
        case TerminalPenalty::Kind::taylor2:
            return 0.5 * y.dot(phi.Pi * y);
        case TerminalPenalty::Kind::taylor3:
            return 0.5 * y.dot(phi.Pi * y) +
                   phi.T3.contract3(y, y, y) / 6.0;
    }
    throw InvalidInputError("unknown terminal penalty kind");
}

Vec grad_penalty(const TerminalPenalty& phi, const Vec& y) {
    switch (phi.kind) {
        case TerminalPenalty::Kind::zero:
            return Vec::Zero(y.size());
        case TerminalPenalty::Kind::quadratic:
            return phi.Q * y;
        case TerminalPenalty::Kind::taylor2:
            return phi.Pi * y;
        case TerminalPenalty::Kind::taylor3:
            return phi.Pi * y + 0.5 * phi.T3.contract2(y, y);
    }
    throw InvalidInputError("unknown terminal penalty kind");
}

namespace {

// Distinct index triples i <= j <= k of a fully symmetric order-3 tensor.
std::vector<std::array<int, 3>> distinct_triples(int n) {
    std::vector<std::array<int, 3>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) out.push_back({i, j, k});
    return out;
}

// Full symmetrization of a generic order-3 tensor given by a lookup.
template <typename F>
double symmetrized(F&& t, int i, int j, int k) {
    return (t(i, j, k) + t(i, k, j) + t(j, i, k) + t(j, k, i) + t(k, i, j) +
            t(k, j, i)) /
           6.0;
}

}  // namespace

SymTensor3 solve_cubic_term(const BilinearSystem& sys,
                            const RiccatiSolution& ric) {
    const int n = sys.dim();
    const auto triples = distinct_triples(n);
    const int m = static_cast<int>(triples.size());

    // Cubic forms are identical iff their fully symmetrized coefficient
    // tensors agree entry-wise; restrict to the distinct entries i<=j<=k.
    //
    // Left side, 1/2 T(y, y, A_pi y): the tensor (p,q,s) -> 1/2 sum_r
    // T(p,q,r) A_pi(r,s), symmetrized. Linear in the unknown entries of T.
    Mat M = Mat::Zero(m, m);
    for (int col = 0; col < m; ++col) {
        SymTensor3 basis(n);
        basis.set_sym(triples[col][0], triples[col][1], triples[col][2], 1.0);
        auto lhs = [&](int p, int q, int s) {
            double acc = 0.0;
            for (int r = 0; r < n; ++r) acc += basis(p, q, r) * ric.A_pi(r, s);
            return 0.5 * acc;
        };
        for (int row = 0; row < m; ++row) {
            M(row, col) =
                symmetrized(lhs, triples[row][0], triples[row][1], triples[row][2]);
        }
    }

    // Right side, (1/alpha) <Pi y, B> <Pi y, N y>: tensor (p,q,s) ->
    // (1/alpha) (Pi B)_p (Pi N)_{q s}, symmetrized.
    const Vec PiB = ric.Pi * sys.B;
    const Mat PiN = ric.Pi * sys.N;
    auto rhs_t = [&](int p, int q, int s) {
        return (1.0 / sys.alpha) * PiB[p] * PiN(q, s);
    };
    Vec rhs(m);
    for (int row = 0; row < m; ++row) {
        rhs[row] =
            symmetrized(rhs_t, triples[row][0], triples[row][1], triples[row][2]);
    }

    Eigen::FullPivLU<Mat> lu(M);
    if (!lu.isInvertible()) {
        throw DegenerateSpectrumError(
            "solve_cubic_term: an eigenvalue triple of the closed loop sums "
            "to zero");
    }
    const Vec coeffs = lu.solve(rhs);
    SymTensor3 T3(n);
    for (int row = 0; row < m; ++row) {
        T3.set_sym(triples[row][0], triples[row][1], triples[row][2], coeffs[row]);
    }

    // Certify by sampling the defining identity on random unit vectors.
    std::mt19937 rng(20260823u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        Vec y(n);
        for (int i = 0; i < n; ++i) y[i] = gauss(rng);
        if (y.norm() == 0.0) continue;
        y /= y.norm();
        const double lhs_val = 0.5 * T3.contract3(y, y, ric.A_pi * y);
        const double rhs_val = (1.0 / sys.alpha) * (ric.Pi * y).dot(sys.B) *
                               (ric.Pi * y).dot(sys.N * y);
        worst = std::max(worst, std::abs(lhs_val - rhs_val));
    }
    if (!(worst <= 1e-9)) {
        std::ostringstream msg;
        msg << "solve_cubic_term: identity residual " << worst
            << " exceeds 1e-9";
        throw ConvergenceError(msg.str(), worst);
    }
    return T3;
}

}  // namespace rhc
