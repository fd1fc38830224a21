/**
 * @file xform.hpp
 *
 * Discrete operators on the measurement circle: the near-field operator N,
 * the Dirichlet-to-far-field map Q, the antipodal reflection R and the
 * transformed operator F = Q N Q^T R. Quadrature weights are folded into
 * the columns, so each matrix acts directly on sample vectors.
 *
 * Weight conventions differ on purpose: N integrates over arc length
 * (R dphi on the circle) while Q and R integrate over dphi.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "softscat/common.hpp"
#include "softscat/forward.hpp"
#include "softscat/specfun.hpp"

namespace softscat {

enum class OperatorKind { N, Q, R, F };

inline const char* to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::N: return "N";
        case OperatorKind::Q: return "Q";
        case OperatorKind::R: return "R";
        case OperatorKind::F: return "F";
    }
    return "?";
}

struct OperatorMatrix {
    CMatrix entries;
    OperatorKind kind = OperatorKind::N;
    bool weighted = true;  ///< quadrature weights folded into the columns
    int truncation = -1;   ///< kernel series truncation (Q, R); -1 when not applicable

    int size() const { return static_cast<int>(entries.rows()); }
};

inline OperatorMatrix assemble_N(const NearFieldData& data) {
    const auto& w = data.gamma.nodes.weights;
    if (static_cast<int>(w.size()) != data.U.cols()) throw std::invalid_argument("assemble_N: weight count mismatch");
    OperatorMatrix N{data.U, OperatorKind::N, true, -1};
    for (int j = 0; j < N.entries.cols(); ++j) N.entries.col(j) *= w[static_cast<size_t>(j)];
    return N;
}

/// Kernel prefactor of the Dirichlet-to-far-field map. With this value
/// Q maps the trace of Phi(., w) on the circle to exp(-i k xhat.w).
inline constexpr cplx kFarFieldPrefactor{0.0, -2.0 * std::numbers::inv_pi};

/// Q[i,j] = c sum_{|m|<=M} e^{im(theta_i - phi_j - pi/2)} / H_m(kR) * 2pi/n.
inline OperatorMatrix assemble_Q(double radius, double k, int n, int M) {
    if (M < 0 || M > specfun::kMaxOrder) throw std::invalid_argument("assemble_Q: truncation out of range");
    if (n <= 0 || !(radius > 0.0) || !(k > 0.0)) throw std::invalid_argument("assemble_Q: bad geometry");
    const auto h = detail::hankel_symmetric(M, k * radius);
    // The kernel depends on theta_i - phi_j only: tabulate it per index offset.
    std::vector<cplx> row(static_cast<size_t>(n));
    const double step = kTwoPi / n;
    for (int d = 0; d < n; ++d) {
        cplx s = 0.0;
        for (int m = -M; m <= M; ++m) {
            s += std::polar(1.0, m * (d * step - 0.5 * std::numbers::pi)) / h[static_cast<size_t>(m + M)];
        }
        row[static_cast<size_t>(d)] = kFarFieldPrefactor * s * step;
    }
    OperatorMatrix Q{CMatrix(n, n), OperatorKind::Q, true, M};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q.entries(i, j) = row[static_cast<size_t>(((i - j) % n + n) % n)];
    return Q;
}

/// R[i,j] = (1/2pi) sum_{|m|<=M} e^{im(theta_i - phi_j + pi)} * 2pi/n.
inline OperatorMatrix assemble_R(int n, int M) {
    if (M < 0 || n <= 0) throw std::invalid_argument("assemble_R: bad arguments");
    std::vector<cplx> row(static_cast<size_t>(n));
    const double step = kTwoPi / n;
    for (int d = 0; d < n; ++d) {
        cplx s = 0.0;
        for (int m = -M; m <= M; ++m) s += std::polar(1.0, m * (d * step + std::numbers::pi));
        row[static_cast<size_t>(d)] = s / static_cast<double>(n);
    }
    OperatorMatrix R{CMatrix(n, n), OperatorKind::R, true, M};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R.entries(i, j) = row[static_cast<size_t>(((i - j) % n + n) % n)];
    return R;
}

/// F = Q N Q^T R, with a plain (bilinear) transpose.
inline OperatorMatrix far_field_transform(const OperatorMatrix& N, const OperatorMatrix& Q, const OperatorMatrix& R) {
    if (N.kind != OperatorKind::N || Q.kind != OperatorKind::Q || R.kind != OperatorKind::R) {
        throw std::invalid_argument("far_field_transform: operands must be N, Q, R");
    }
    const int n = N.size();
    auto square = [n](const OperatorMatrix& a) { return a.entries.rows() == n && a.entries.cols() == n; };
    if (!square(N) || !square(Q) || !square(R)) {
        throw std::invalid_argument("far_field_transform: dimension mismatch");
    }
    return {Q.entries * N.entries * Q.entries.transpose() * R.entries, OperatorKind::F, true, Q.truncation};
}

/// g(theta + pi) on an even equispaced grid.
inline CVector half_rotation(const CVector& g) {
    const auto n = g.size();
    if (n % 2 != 0) throw std::invalid_argument("half_rotation needs an even number of samples");
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = g((i + n / 2) % n);
    return out;
}

/// || (R - R_M) g ||_{L^2(0,2pi)} for equispaced samples g.
inline double truncation_error_R(int M, const CVector& g) {
    const int n = static_cast<int>(g.size());
    const CVector diff = half_rotation(g) - assemble_R(n, M).entries * g;
    return std::sqrt(diff.squaredNorm() * kTwoPi / n);
}

}  // namespace softscat
