// Independent reference computations for the test suites. Nothing in the
// library includes this header.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "softscat/geometry.hpp"
#include "softscat/specfun.hpp"

namespace softscat::oracle {

/// J_m(t) = sum_j (-1)^j (t/2)^{2j+m} / (j! (j+m)!), accumulated in long double.
inline double bessel_j_series(int m, double t) {
    const long double h = 0.5L * t;
    long double term = 1.0L;
    for (int i = 1; i <= m; ++i) term *= h / i;
    long double sum = term;
    for (int j = 1; j < 400; ++j) {
        term *= -h * h / (static_cast<long double>(j) * (j + m));
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum) && j > t) break;
    }
    return static_cast<double>(sum);
}

/// Y_0(t) = (2/pi)(ln(t/2) + gamma) J_0(t) + (2/pi) sum_{k>=1} (-1)^{k+1} H_k (t^2/4)^k / (k!)^2.
/// Usable for t <= ~10 in long double.
inline double bessel_y0_series(double t) {
    const long double q = 0.25L * t * t;
    long double term = 1.0L, harmonic = 0.0L, sum = 0.0L;
    for (int k = 1; k < 400; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        harmonic += 1.0L / k;
        sum -= term * harmonic;
        if (std::fabs(term * harmonic) < 1e-24L) break;
    }
    const long double lg = std::log(0.5L * t) + std::numbers::egamma_v<long double>;
    return static_cast<double>(2.0L / std::numbers::pi_v<long double> * (lg * bessel_j_series(0, t) + sum));
}

/// Y_1(t) = -2/(pi t) + (2/pi) ln(t/2) J_1(t)
///          - (t/(2 pi)) sum_k [psi(k+1) + psi(k+2)] (-t^2/4)^k / (k! (k+1)!).
inline double bessel_y1_series(double t) {
    const long double pi = std::numbers::pi_v<long double>;
    const long double g = std::numbers::egamma_v<long double>;
    const long double q = -0.25L * t * t;
    long double term = 1.0L;  // (-t^2/4)^k / (k!(k+1)!)
    long double hk = 0.0L;    // H_k
    long double sum = 0.0L;
    for (int k = 0; k < 400; ++k) {
        if (k > 0) {
            term *= q / (static_cast<long double>(k) * (k + 1));
            hk += 1.0L / k;
        }
        const long double psi_sum = (-g + hk) + (-g + hk + 1.0L / (k + 1));
        sum += psi_sum * term;
        if (k > 2 && std::fabs(term) < 1e-24L) break;
    }
    return static_cast<double>(-2.0L / (pi * t) + 2.0L / pi * std::log(0.5L * t) * bessel_j_series(1, t) -
                               t / (2.0L * pi) * sum);
}

/// Modified Bessel I_m(x) by its power series.
inline double bessel_i_series(int m, double x) {
    const long double h = 0.5L * x;
    long double term = 1.0L;
    for (int i = 1; i <= m; ++i) term *= h / i;
    long double sum = term;
    for (int j = 1; j < 200; ++j) {
        term *= h * h / (static_cast<long double>(j) * (j + m));
        sum += term;
        if (term < 1e-24L * sum) break;
    }
    return static_cast<double>(sum);
}

/// Sound-soft disk of radius a, point source at y (|y| > a):
///   alpha_m(y) = -(i/4) e^{-i m theta_y} H_m(k|y|) J_m(ka) / H_m(ka)
/// from Graf's addition theorem. Evaluated with the series oracles above
/// for J and the library only for H of large argument.
inline std::complex<double> disk_coefficient(int m, double a, double k, const Point2& y) {
    const double ty = std::atan2(y.y(), y.x());
    const double jm = bessel_j_series(std::abs(m), k * a) * ((m < 0 && (m % 2)) ? -1.0 : 1.0);
    const std::complex<double> hka = specfun::hankel1(m, k * a);
    const std::complex<double> hky = specfun::hankel1(m, k * y.norm());
    return std::complex<double>(0.0, -0.25) * std::polar(1.0, -m * ty) * hky * jm / hka;
}

/// Method of fundamental solutions: u^s(x, y) = sum_l c_l Phi(x, s_l) with
/// sources on rho * r(theta) inside the obstacle, collocated densely on the
/// boundary. Returns U[i,j] = u^s(x_i, y_j) on the receiver circle.
inline Eigen::MatrixXcd mfs_nearfield(const RadialShape& shape, double k, double radius, int count,
                                      int collocation = 600, int sources = 300, double rho = 0.8) {
    auto phi = [k](const Point2& x, const Point2& y) {
        return std::complex<double>(0.0, 0.25) * specfun::hankel1(0, k * (x - y).norm());
    };
    std::vector<Point2> bnd, src, rcv;
    for (int i = 0; i < collocation; ++i) bnd.push_back(shape.point(kTwoPi * i / collocation));
    for (int l = 0; l < sources; ++l) src.push_back(rho * shape.point(kTwoPi * l / sources));
    for (int j = 0; j < count; ++j) {
        const double t = kTwoPi * j / count;
        rcv.emplace_back(radius * std::cos(t), radius * std::sin(t));
    }
    Eigen::MatrixXcd A(collocation, sources), B(collocation, count), E(count, sources);
    for (int i = 0; i < collocation; ++i) {
        for (int l = 0; l < sources; ++l) A(i, l) = phi(bnd[i], src[l]);
        for (int j = 0; j < count; ++j) B(i, j) = -phi(bnd[i], rcv[j]);
    }
    for (int i = 0; i < count; ++i)
        for (int l = 0; l < sources; ++l) E(i, l) = phi(rcv[i], src[l]);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    return E * svd.solve(B);
}

}  // namespace softscat::oracle
