/**
 * @file imaging.hpp
 *
 * Direct-sampling indicators evaluated on a rectangular grid:
 *
 *  - W_FF:   |<F phi_z, phi_z>|^p1 with the far-field-transformed operator F
 *  - W_TDSM: (sum_j P(s_j)^2 |<v_j, phi_z>|^2)^p2 with a cubic fit P of the
 *            Tikhonov filter sqrt(t)/(alpha + t) on [0, ||F||_2]
 *  - W_CD:   sum_y |sum_x conj(d_nu Phi(x,z)) u^s - conj(Phi(x,z)) d_nu u^s|^rho
 *
 * where phi_z(xhat) = exp(-i k z.xhat). Inner products conjugate the second
 * slot and carry the angular weight 2pi/n.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "softscat/common.hpp"
#include "softscat/forward.hpp"
#include "softscat/geometry.hpp"
#include "softscat/xform.hpp"

namespace softscat {

enum class Functional { FF, TDSM, CD };

inline const char* to_string(Functional f) {
    switch (f) {
        case Functional::FF: return "W_FF";
        case Functional::TDSM: return "W_TDSM";
        case Functional::CD: return "W_CD";
    }
    return "?";
}

/// phi_z(theta_j) = exp(-i k z.xhat_j), xhat_j = (cos theta_j, sin theta_j).
inline CVector probe_vector(const Point2& z, double k, int n) {
    CVector v(n);
    for (int j = 0; j < n; ++j) {
        const double t = kTwoPi * j / n;
        v(j) = std::polar(1.0, -k * (z.x() * std::cos(t) + z.y() * std::sin(t)));
    }
    return v;
}

inline double w_ff(const OperatorMatrix& F, const Point2& z, double k, double p1) {
    const int n = F.size();
    const CVector phi = probe_vector(z, k, n);
    const cplx ip = phi.dot(F.entries * phi) * (kTwoPi / n);  // dot() conjugates its first argument
    return std::pow(std::abs(ip), p1);
}

// ---------------------------------------------------------------------------
// Tikhonov filter fit

struct FilterPolynomial {
    std::array<double, 3> coeffs{};  ///< c1 t + c2 t^2 + c3 t^3
    double alpha = 0.0;
    double interval_top = 0.0;
    std::array<double, 10> nodes{};
    double fit_residual = 0.0;  ///< max |P - Gamma_alpha| over the nodes

    double operator()(double t) const { return t * (coeffs[0] + t * (coeffs[1] + t * coeffs[2])); }
};

inline double tikhonov_filter(double t, double alpha) { return std::sqrt(t) / (alpha + t); }

/// Least-squares cubic without constant term through the filter values at
/// ten equispaced nodes on [0, ||F||_2].
inline FilterPolynomial fit_filter(double interval_top, double alpha,
                                   const std::function<double(double)>& target = {}) {
    if (!(interval_top > 0.0)) throw std::invalid_argument("fit_filter: ||F||_2 must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("fit_filter: alpha must be positive");
    FilterPolynomial P;
    P.alpha = alpha;
    P.interval_top = interval_top;
    auto f = target ? target : [alpha](double t) { return tikhonov_filter(t, alpha); };
    // Fit in s = t / top to keep the normal equations well scaled.
    Eigen::Matrix<double, 10, 3> A;
    Eigen::Matrix<double, 10, 1> b;
    for (int l = 0; l < 10; ++l) {
        const double s = l / 9.0;
        P.nodes[static_cast<size_t>(l)] = s * interval_top;
        A(l, 0) = s;
        A(l, 1) = s * s;
        A(l, 2) = s * s * s;
        b(l) = f(P.nodes[static_cast<size_t>(l)]);
    }
    const Eigen::Vector3d d = A.colPivHouseholderQr().solve(b);
    for (int m = 0; m < 3; ++m) P.coeffs[static_cast<size_t>(m)] = d(m) / std::pow(interval_top, m + 1);
    for (double t : P.nodes) P.fit_residual = std::max(P.fit_residual, std::abs(P(t) - f(t)));
    return P;
}

inline FilterPolynomial fit_filter(const OperatorMatrix& F, double alpha) {
    return fit_filter(spectral_norm(F.entries), alpha);
}

/// Singular values and right singular vectors of F, computed once per image.
struct SingularSystem {
    Eigen::VectorXd values;
    CMatrix right;  ///< columns v_j

    explicit SingularSystem(const OperatorMatrix& F) {
        Eigen::JacobiSVD<CMatrix> svd(F.entries, Eigen::ComputeFullV);
        values = svd.singularValues();
        right = svd.matrixV();
    }
};

inline double w_tdsm(const SingularSystem& sys, const FilterPolynomial& P, const Point2& z, double k, double p2) {
    const int n = static_cast<int>(sys.right.rows());
    const CVector phi = probe_vector(z, k, n);
    const CVector proj = sys.right.adjoint() * phi;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < sys.values.size(); ++j) {
        const double p = P(sys.values(j));
        sum += p * p * std::norm(proj(j));
    }
    return std::pow(sum * (kTwoPi / n), p2);
}

inline double w_tdsm(const OperatorMatrix& F, const FilterPolynomial& P, const Point2& z, double k, double p2) {
    return w_tdsm(SingularSystem(F), P, z, k, p2);
}

// ---------------------------------------------------------------------------
// Cauchy-data functional

/// Inner integral over x for every source y_j:
///   sum_i w_i [conj(d_nu Phi(x_i,z)) U_ij - conj(Phi(x_i,z)) dU_ij].
inline CVector cd_inner(const NearFieldData& data, const Point2& z, double k) {
    const auto& nodes = data.gamma.nodes;
    const int n = static_cast<int>(nodes.size());
    CVector a(n), b(n);
    for (int i = 0; i < n; ++i) {
        const auto ph = fundamental_solution_pair(nodes.points[static_cast<size_t>(i)],
                                                  nodes.normals[static_cast<size_t>(i)], z, k);
        a(i) = nodes.weights[static_cast<size_t>(i)] * std::conj(ph.dnu);
        b(i) = nodes.weights[static_cast<size_t>(i)] * std::conj(ph.value);
    }
    return data.U.transpose() * a - data.dU.transpose() * b;
}

inline double w_cd(const NearFieldData& data, const Point2& z, double k, double rho) {
    const CVector inner = cd_inner(data, z, k);
    const auto& w = data.gamma.nodes.weights;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < inner.size(); ++j) sum += w[static_cast<size_t>(j)] * std::pow(std::abs(inner(j)), rho);
    return sum;
}

// ---------------------------------------------------------------------------
// Grids

struct GridSpec {
    double xmin = -2.0, xmax = 2.0, ymin = -2.0, ymax = 2.0;
    int nx = 128, ny = 128;

    double x(int i) const { return nx == 1 ? xmin : xmin + (xmax - xmin) * i / (nx - 1); }
    double y(int j) const { return ny == 1 ? ymin : ymin + (ymax - ymin) * j / (ny - 1); }
};

/// Normalized image, values[j * nx + i] at (xs[i], ys[j]).
struct ImageGrid {
    std::vector<double> xs, ys;
    std::vector<double> values;
    Functional functional = Functional::FF;
    std::map<std::string, double> params;
    double raw_max = 0.0;

    int nx() const { return static_cast<int>(xs.size()); }
    int ny() const { return static_cast<int>(ys.size()); }
    double at(int i, int j) const { return values[static_cast<size_t>(j) * xs.size() + static_cast<size_t>(i)]; }
    Point2 node(std::size_t linear) const { return {xs[linear % xs.size()], ys[linear / xs.size()]}; }

    /// Lowest linear index among the maxima.
    std::size_t argmax() const {
        return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    }
};

/// Raw indicator values at every node, evaluated in parallel over rows.
inline std::vector<double> sample_grid(const std::function<double(const Point2&)>& indicator, const GridSpec& grid,
                                       unsigned threads = 0) {
    if (grid.nx <= 0 || grid.ny <= 0) throw std::invalid_argument("empty sampling grid");
    std::vector<double> raw(static_cast<size_t>(grid.nx) * static_cast<size_t>(grid.ny));
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.ny));
    auto work = [&](unsigned part) {
        for (int j = static_cast<int>(part); j < grid.ny; j += static_cast<int>(threads)) {
            for (int i = 0; i < grid.nx; ++i) {
                raw[static_cast<size_t>(j) * grid.nx + i] = indicator(Point2(grid.x(i), grid.y(j)));
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
        work(0);
    }
    return raw;
}

/// Evaluate and divide by the maximum so the image peaks at exactly 1.
inline ImageGrid evaluate_grid(Functional tag, const std::function<double(const Point2&)>& indicator,
                               const GridSpec& grid, std::map<std::string, double> params = {}) {
    ImageGrid img;
    img.values = sample_grid(indicator, grid);
    img.functional = tag;
    img.params = std::move(params);
    for (int i = 0; i < grid.nx; ++i) img.xs.push_back(grid.x(i));
    for (int j = 0; j < grid.ny; ++j) img.ys.push_back(grid.y(j));
    for (double v : img.values) {
        if (!std::isfinite(v) || v < 0.0) throw NumericalError(std::string(to_string(tag)) + ": invalid indicator value");
    }
    img.raw_max = *std::max_element(img.values.begin(), img.values.end());
    if (!(img.raw_max > 0.0)) throw NumericalError(std::string(to_string(tag)) + ": indicator vanishes on the grid");
    for (double& v : img.values) v /= img.raw_max;
    img.values[img.argmax()] = 1.0;
    return img;
}

// ---------------------------------------------------------------------------
// Partial aperture

/// Union of half-open arcs [lo, hi) in [0, 2pi).
struct ApertureMask {
    std::vector<std::pair<double, double>> arcs{{0.0, kTwoPi}};

    bool contains(double theta) const {
        for (const auto& [lo, hi] : arcs)
            if (theta >= lo && theta < hi) return true;
        return false;
    }
    bool full() const { return arcs.size() == 1 && arcs[0].first <= 0.0 && arcs[0].second >= kTwoPi; }
};

inline int active_count(const ApertureMask& mask, const std::vector<double>& thetas) {
    return static_cast<int>(std::count_if(thetas.begin(), thetas.end(), [&](double t) { return mask.contains(t); }));
}

/// Zero every entry whose source or receiver lies outside the aperture.
inline NearFieldData apply_aperture(const NearFieldData& data, const ApertureMask& mask) {
    for (const auto& [lo, hi] : mask.arcs) {
        if (lo < 0.0 || hi > kTwoPi + 1e-12 || !(lo < hi)) throw std::invalid_argument("aperture arc outside [0, 2pi)");
    }
    NearFieldData out = data;
    const auto& th = data.gamma.nodes.thetas;
    for (int i = 0; i < out.count(); ++i) {
        if (mask.contains(th[static_cast<size_t>(i)])) continue;
        out.U.row(i).setZero();
        out.U.col(i).setZero();
        out.dU.row(i).setZero();
        out.dU.col(i).setZero();
    }
    return out;
}

}  // namespace softscat
