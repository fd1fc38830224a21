/**
 * @file specfun.hpp
 *
 * Cylinder functions of integer order and real positive argument:
 * J_m, Y_m, H^{(1)}_m and dH^{(1)}_m/dt.
 *
 * J_m is computed by the power series for t <= 2 and by Miller's backward
 * recurrence (normalized with J_0 + 2 sum J_2k = 1) above that. Y_0 and Y_1
 * come from their Neumann series in the J_2k, higher orders from the
 * forward recurrence, which is stable for Y. Negative orders are reduced
 * with the parity rule C_{-m} = (-1)^m C_m.
 *
 * Target accuracy: 1e-12 absolute for J on [0, 200], 1e-10 for Y on
 * [1e-3, 200], |m| <= 64.
 */
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace softscat {

using cplx = std::complex<double>;

namespace specfun {

/// Largest order accepted by the public entry points.
inline constexpr int kMaxOrder = 64;

namespace detail {

inline void check_order(int m) {
    if (m > kMaxOrder || m < -kMaxOrder) {
        throw std::invalid_argument("cylinder function order " + std::to_string(m) +
                                    " exceeds |m| <= " + std::to_string(kMaxOrder));
    }
}

inline void check_argument(double t, bool allow_zero) {
    if (!std::isfinite(t) || t < 0.0 || (!allow_zero && t == 0.0)) {
        throw std::domain_error("cylinder function argument out of domain: " + std::to_string(t));
    }
}

inline double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// J_0..J_nmax by the ascending series; used for small arguments.
inline std::vector<double> j_series(int nmax, double t) {
    std::vector<double> out(static_cast<size_t>(nmax) + 1, 0.0);
    const double half = 0.5 * t;
    const double q = -half * half;
    double lead = 1.0;  // (t/2)^m / m!
    for (int m = 0; m <= nmax; ++m) {
        if (m > 0) lead *= half / m;
        double term = lead;
        double sum = term;
        for (int j = 1; j < 200; ++j) {
            term *= q / (static_cast<double>(j) * (j + m));
            sum += term;
            if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        }
        out[static_cast<size_t>(m)] = sum;
    }
    return out;
}

// J_0..J_nmax by Miller's algorithm. Returns at least nmax+1 entries; the
// caller may use the extra high orders (they are accurate, just tiny).
inline std::vector<double> j_miller(int nmax, double t) {
    const double top = std::max(static_cast<double>(nmax), t);
    int start = static_cast<int>(top + 30.0 + std::sqrt(40.0 * top));
    start += start % 2;
    std::vector<double> j(static_cast<size_t>(start) + 2, 0.0);
    constexpr double kBig = 1e250;
    double next = 0.0;  // J_{n+1}
    double cur = 1e-300;  // J_n
    double norm = 0.0;
    j[static_cast<size_t>(start)] = cur;
    for (int n = start; n > 0; --n) {
        const double prev = (2.0 * n / t) * cur - next;
        next = cur;
        cur = prev;
        j[static_cast<size_t>(n - 1)] = cur;
        if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * cur;
        if (std::abs(cur) > kBig) {
            for (int i = n - 1; i <= start; ++i) j[static_cast<size_t>(i)] /= kBig;
            cur /= kBig;
            next /= kBig;
            norm /= kBig;
        }
    }
    norm += j[0];
    for (double& v : j) v /= norm;
    j.pop_back();
    return j;
}

// J_0..J_n with n >= nmax, enough headroom for the Neumann sums.
inline std::vector<double> j_table(int nmax, double t) {
    if (t == 0.0) {
        std::vector<double> out(static_cast<size_t>(nmax) + 1, 0.0);
        out[0] = 1.0;
        return out;
    }
    if (t <= 2.0) return j_series(std::max(nmax, 40), t);
    return j_miller(nmax, t);
}

// Y_0 and Y_1 from the Neumann series
//   Y0 = (2/pi)(ln(t/2)+g) J0 - (4/pi) sum (-1)^k J_2k / k
//   Y1 = -Y0' = (2/pi)[(ln(t/2)+g) J1 - J0/t] + (2/pi) sum (-1)^k (J_2k-1 - J_2k+1)/k
inline std::pair<double, double> y01(const std::vector<double>& j, double t) {
    const double lg = std::log(0.5 * t) + std::numbers::egamma;
    double s0 = 0.0;
    double s1 = 0.0;
    const int kmax = static_cast<int>(j.size() - 2) / 2;
    for (int k = kmax; k >= 1; --k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        s0 += sign * j[static_cast<size_t>(2 * k)] / k;
        s1 += sign * (j[static_cast<size_t>(2 * k - 1)] - j[static_cast<size_t>(2 * k + 1)]) / k;
    }
    const double y0 = std::numbers::inv_pi * (2.0 * lg * j[0] - 4.0 * s0);
    const double y1 = 2.0 * std::numbers::inv_pi * (lg * j[1] - j[0] / t + s1);
    return {y0, y1};
}

inline std::vector<double> y_table(int nmax, double t, const std::vector<double>& j) {
    std::vector<double> y(static_cast<size_t>(std::max(nmax, 1)) + 1);
    auto [y0, y1] = y01(j, t);
    y[0] = y0;
    y[1] = y1;
    for (int m = 1; m < nmax; ++m) {
        y[static_cast<size_t>(m + 1)] = (2.0 * m / t) * y[static_cast<size_t>(m)] - y[static_cast<size_t>(m - 1)];
    }
    y.resize(static_cast<size_t>(nmax) + 1);
    return y;
}

}  // namespace detail

/// J_m(t), t >= 0.
inline double bessel_j(int m, double t) {
    detail::check_order(m);
    detail::check_argument(t, true);
    const int a = std::abs(m);
    const double v = detail::j_table(a, t)[static_cast<size_t>(a)];
    return m < 0 ? detail::parity(a) * v : v;
}

/// Y_m(t), t > 0. Throws std::domain_error at t = 0.
inline double bessel_y(int m, double t) {
    detail::check_order(m);
    detail::check_argument(t, false);
    const int a = std::abs(m);
    const auto j = detail::j_table(a, t);
    const double v = detail::y_table(a, t, j)[static_cast<size_t>(a)];
    return m < 0 ? detail::parity(a) * v : v;
}

/// H^{(1)}_0(t) .. H^{(1)}_mmax(t) in one pass. Negative orders follow
/// from H_{-m} = (-1)^m H_m.
inline std::vector<cplx> hankel1_sequence(int mmax, double t) {
    if (mmax < 0 || mmax > kMaxOrder + 1) {
        throw std::invalid_argument("hankel1_sequence: order bound " + std::to_string(mmax) + " out of range");
    }
    detail::check_argument(t, false);
    const auto j = detail::j_table(mmax, t);
    const auto y = detail::y_table(mmax, t, j);
    std::vector<cplx> h(static_cast<size_t>(mmax) + 1);
    for (int m = 0; m <= mmax; ++m) h[static_cast<size_t>(m)] = {j[static_cast<size_t>(m)], y[static_cast<size_t>(m)]};
    return h;
}

/// H^{(1)}_m(t) = J_m(t) + i Y_m(t), t > 0.
inline cplx hankel1(int m, double t) {
    detail::check_order(m);
    const int a = std::abs(m);
    const cplx v = hankel1_sequence(a, t)[static_cast<size_t>(a)];
    return m < 0 ? detail::parity(a) * v : v;
}

/// d/dt H^{(1)}_m(t) = (H_{m-1}(t) - H_{m+1}(t)) / 2.
inline cplx hankel1_deriv(int m, double t) {
    detail::check_order(m);
    const int a = std::abs(m);
    const auto h = hankel1_sequence(a + 1, t);
    auto at = [&](int n) {
        const int b = std::abs(n);
        return n < 0 ? detail::parity(b) * h[static_cast<size_t>(b)] : h[static_cast<size_t>(b)];
    };
    return 0.5 * (at(m - 1) - at(m + 1));
}

}  // namespace specfun
}  // namespace softscat
