/**
 * @file forward.hpp
 *
 * Synthetic near-field data for a sound-soft obstacle. For every source
 * y_j on the measurement circle the scattered field is sought as
 *
 *     u^s(x, y_j) = sum_{|m| <= M} alpha_m(y_j) H^{(1)}_m(k|x|) e^{i m theta_x}
 *
 * with coefficients fitted to u^s = -Phi(., y_j) at the boundary nodes.
 * The collocation matrix is badly conditioned, so it is solved with a
 * truncated-SVD pseudoinverse (spectral cut-off).
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "softscat/common.hpp"
#include "softscat/geometry.hpp"
#include "softscat/specfun.hpp"

namespace softscat {

struct ForwardOptions {
    int truncation = 15;        ///< |m| <= truncation
    int boundary_nodes = 64;
    double cutoff = 1e-8;       ///< singular values below cutoff * s_max are dropped
};

struct SeriesSolution {
    CMatrix coeffs;  ///< row m + truncation, one column per source
    int truncation = 0;
    double k = 0.0;
    RadialShape shape;
    BoundaryDiscretization boundary;
    int rank = 0;                   ///< singular values kept by the cut-off
    double residual = 0.0;          ///< max_ij |u^s + Phi| on the boundary nodes
    double relative_residual = 0.0; ///< residual / max |Phi|

    cplx coeff(int m, int source) const { return coeffs(m + truncation, source); }
};

struct NearFieldData {
    CMatrix U;   ///< u^s(x_i, y_j)
    CMatrix dU;  ///< d_nu u^s(x_i, y_j)
    SourceCurve gamma;
    double k = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;

    int count() const { return static_cast<int>(U.rows()); }
};

namespace detail {

// H_m(t) for m = -mmax..mmax, stored at index m + mmax.
inline std::vector<cplx> hankel_symmetric(int mmax, double t) {
    const auto h = specfun::hankel1_sequence(mmax, t);
    std::vector<cplx> out(2 * static_cast<size_t>(mmax) + 1);
    for (int m = -mmax; m <= mmax; ++m) {
        const int a = std::abs(m);
        const double sign = (m < 0 && a % 2 == 1) ? -1.0 : 1.0;
        out[static_cast<size_t>(m + mmax)] = sign * h[static_cast<size_t>(a)];
    }
    return out;
}

}  // namespace detail

/// Fit the Hankel series for every source on `gamma`.
inline SeriesSolution solve_forward(const RadialShape& shape, const SourceCurve& gamma, double k,
                                    const ForwardOptions& opt = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("wavenumber must be positive");
    if (opt.truncation < 0 || opt.truncation > specfun::kMaxOrder) {
        throw std::invalid_argument("forward truncation out of range");
    }
    if (!(opt.cutoff > 0.0 && opt.cutoff < 1.0)) throw std::invalid_argument("cutoff must lie in (0,1)");
    require_separation(shape, gamma);

    const int M = opt.truncation;
    const int modes = 2 * M + 1;
    SeriesSolution sol;
    sol.truncation = M;
    sol.k = k;
    sol.shape = shape;
    sol.boundary = discretize(shape, opt.boundary_nodes);
    const auto& bd = sol.boundary;
    const int nb = static_cast<int>(bd.size());
    const int ns = gamma.count;

    CMatrix A(nb, modes);
    for (int i = 0; i < nb; ++i) {
        const Point2& p = bd.points[static_cast<size_t>(i)];
        const double th = std::atan2(p.y(), p.x());
        const auto h = detail::hankel_symmetric(M, k * p.norm());
        for (int m = -M; m <= M; ++m) {
            A(i, m + M) = h[static_cast<size_t>(m + M)] * std::polar(1.0, m * th);
        }
    }

    // Equilibrate the columns first: raw |H_m(kr)| spans ten or more decades
    // over |m| <= 15, and a relative cut-off on the raw matrix would discard
    // the low-order modes that carry the field.
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (int m = 0; m < modes; ++m) {
        if (!(scale(m) > 0.0)) throw NumericalError("collocation column vanished");
        A.col(m) /= scale(m);
    }

    CMatrix B(nb, ns);
    for (int j = 0; j < ns; ++j) {
        for (int i = 0; i < nb; ++i) {
            B(i, j) = -fundamental_solution(bd.points[static_cast<size_t>(i)],
                                            gamma.nodes.points[static_cast<size_t>(j)], k);
        }
    }

    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(0) > 0.0)) throw NumericalError("collocation matrix is entirely below cut-off");
    int rank = 0;
    while (rank < s.size() && s(rank) >= opt.cutoff * s(0)) ++rank;

    const CMatrix proj = svd.matrixU().leftCols(rank).adjoint() * B;
    CMatrix x = svd.matrixV().leftCols(rank) * (s.head(rank).cwiseInverse().asDiagonal() * proj);
    const CMatrix fitted = A * x;
    for (int m = 0; m < modes; ++m) x.row(m) /= scale(m);

    sol.coeffs = std::move(x);
    sol.rank = rank;
    sol.residual = (fitted - B).cwiseAbs().maxCoeff();
    sol.relative_residual = sol.residual / B.cwiseAbs().maxCoeff();
    if (!sol.coeffs.allFinite()) throw NumericalError("non-finite series coefficients");
    return sol;
}

/// Scattered field of source `source` at an exterior point (outside the
/// circumscribing circle of the obstacle).
inline cplx scattered_field(const SeriesSolution& sol, int source, const Point2& x) {
    const int M = sol.truncation;
    const auto h = detail::hankel_symmetric(M, sol.k * x.norm());
    const double th = std::atan2(x.y(), x.x());
    cplx u = 0.0;
    for (int m = -M; m <= M; ++m) u += sol.coeff(m, source) * h[static_cast<size_t>(m + M)] * std::polar(1.0, m * th);
    return u;
}

/// Cauchy data u^s and d_nu u^s on the receiver circle.
inline NearFieldData evaluate_nearfield(const SeriesSolution& sol, const SourceCurve& gamma) {
    const int M = sol.truncation;
    const int n = gamma.count;
    const double kR = sol.k * gamma.radius;
    const auto h = detail::hankel_symmetric(M + 1, kR);
    auto H = [&](int m) { return h[static_cast<size_t>(m + M + 1)]; };

    CMatrix E(n, 2 * M + 1);
    CMatrix dE(n, 2 * M + 1);
    for (int i = 0; i < n; ++i) {
        const double th = gamma.nodes.thetas[static_cast<size_t>(i)];
        for (int m = -M; m <= M; ++m) {
            const cplx e = std::polar(1.0, m * th);
            E(i, m + M) = H(m) * e;
            dE(i, m + M) = 0.5 * sol.k * (H(m - 1) - H(m + 1)) * e;
        }
    }
    NearFieldData data;
    data.U = E * sol.coeffs;
    data.dU = dE * sol.coeffs;
    data.gamma = gamma;
    data.k = sol.k;
    return data;
}

/// Complex Gaussian matrix rescaled to unit spectral norm. `stream`
/// separates independent draws sharing one seed.
inline CMatrix unit_noise_matrix(int rows, int cols, std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix e(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            const double re = normal(gen);
            const double im = normal(gen);
            e(i, j) = {re, im};
        }
    }
    return e / spectral_norm(e);
}

/// Multiplicative noise u -> u (1 + delta E_ij) on both Cauchy components,
/// with independent unit-norm matrices for U and dU.
inline NearFieldData add_noise(const NearFieldData& data, double delta, std::uint64_t seed) {
    if (!(delta >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
    NearFieldData out = data;
    out.delta = delta;
    out.seed = seed;
    if (delta == 0.0) return out;
    const int r = static_cast<int>(data.U.rows()), c = static_cast<int>(data.U.cols());
    const CMatrix e = unit_noise_matrix(r, c, seed, 0);
    const CMatrix e2 = unit_noise_matrix(r, c, seed, 1);
    out.U = data.U.cwiseProduct((CMatrix::Ones(r, c) + delta * e));
    out.dU = data.dU.cwiseProduct((CMatrix::Ones(r, c) + delta * e2));
    return out;
}

}  // namespace softscat
