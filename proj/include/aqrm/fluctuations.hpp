#pragma once

// Linearized quantum fluctuations around the mean field: dynamical matrices
// and closed-form eigenvalues for both phases, steady-state excitation
// numbers, the displaced-frame effective-Hamiltonian coefficients of the SP,
// asymptotic decay rates, and power-law exponent fits.
//
// Everything here is in units of omega0 unless noted.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aqrm/meanfield.hpp"

namespace aqrm {

struct BoundaryDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// First-moment dynamical matrix of the NP, L_np/omega0, acting on (<a>, <a^+>).
inline Eigen::Matrix2cd np_matrix(double g_r, double g_cr, double kappa_bar) {
    const complexd i(0.0, 1.0);
    Eigen::Matrix2cd L;
    const double s = g_r * g_r + g_cr * g_cr;
    L << i * (s - 1.0) - kappa_bar, 2.0 * i * g_r * g_cr,
        -2.0 * i * g_r * g_cr, i * (1.0 - s) - kappa_bar;
    return L;
}

/// Closed-form eigenvalues of L_np/omega0 (principal square root; a negative
/// radicand gives the underdamped regime).
inline std::pair<complexd, complexd> np_eigenvalues(double g, double epsilon,
                                                    double kappa_bar) {
    const double d = 1.0 - epsilon * epsilon;
    const double g2 = g * g;
    const double inner = 2.0 * g2 * (1.0 + epsilon * epsilon) - g2 * g2 * d * d - 1.0;
    const complexd r = std::sqrt(complexd(inner, 0.0));
    return {-kappa_bar + r, -kappa_bar - r};
}

/// Steady-state oscillator excitation number in the NP. The denominator is
/// exactly the NP stability coefficient, so it vanishes at g_c^+-.
inline double np_excitation(double g, double epsilon, double kappa_bar) {
    const double den = np_stability_A(g, epsilon, kappa_bar);
    if (std::abs(den) < 1e-12)
        throw BoundaryDivergence("np_excitation: denominator vanishes at the boundary");
    const double g2 = g * g;
    return 2.0 * g2 * g2 * epsilon * epsilon / den;
}

/// Second-moment route: steady state of (<a^+a>, <a^2>, <a^+2>) from the 3x3
/// linear system. Independent of the closed form above.
inline Eigen::Vector3cd np_second_moments(double g_r, double g_cr,
                                          double kappa_bar) {
    const complexd i(0.0, 1.0);
    const double s = g_r * g_r + g_cr * g_cr;
    const double q = g_r * g_cr;
    Eigen::Matrix3cd M;
    M << -2.0 * kappa_bar, -2.0 * i * q, 2.0 * i * q,
        4.0 * i * q, 2.0 * i * (s - 1.0) - 2.0 * kappa_bar, 0.0,
        -4.0 * i * q, 0.0, 2.0 * i * (1.0 - s) - 2.0 * kappa_bar;
    Eigen::Vector3cd Y(0.0, 2.0 * i * q, -2.0 * i * q);
    return M.partialPivLu().solve(-Y);
}

/// Coefficients of the displaced-frame quadratic SP Hamiltonian
/// H_q = P a^+a + Q aa + Q* a^+a^+, plus the transformed coupling amplitudes.
/// P, Q, and the ground-energy pieces are in units of omega0.
struct SpCoefficients {
    double xi = 1.0;      // 1 + 4|g_r ab* + g_cr ab|^2 = 1/s_z^2
    complexd u_bar, v_bar, w_bar;
    double P = 0.0;
    complexd Q;
    double s_z = -1.0;
    int sign = +1;
    // E_sp/omega0 = eta * e_sp_eta_coeff + e_sp_const (reported only)
    double e_sp_eta_coeff = 0.0;
    double e_sp_const = 0.0;

    double ground_energy(double eta) const {
        return eta * e_sp_eta_coeff + e_sp_const;
    }
};

namespace detail {

inline void finish_sp_coefficients(SpCoefficients& c, double abs_alpha2) {
    const double a = std::abs(c.s_z);
    c.P = 1.0 - a * (std::norm(c.u_bar) + std::norm(c.v_bar));
    c.Q = -a * std::conj(c.u_bar) * c.v_bar;
    c.e_sp_eta_coeff = abs_alpha2 - 1.0 / (2.0 * a);
    c.e_sp_const = -a * std::norm(c.v_bar);
}

}  // namespace detail

/// Simplified closed forms for u_bar, v_bar obtained by substituting the
/// mean-field coherence. The imaginary parts carry the sign of (1 - eps^2);
/// for eps > 1 this is what the general transformation actually yields, and
/// P, Q are unaffected either way.
inline SpCoefficients sp_coefficients(double g, double epsilon, double kappa_bar,
                                      int sign = +1) {
    auto sol = sp_solution(g, epsilon, kappa_bar, sign);
    if (!sol)
        throw BoundaryDivergence("sp_coefficients: no SP solution at this point");
    SpCoefficients c;
    c.s_z = sol->s_z;
    c.sign = sign;
    c.xi = 1.0 / (sol->s_z * sol->s_z);
    const double a = std::abs(sol->s_z);
    const double root = std::sqrt(sp_discriminant(epsilon, kappa_bar));
    const double d2 = 1.0 - epsilon * epsilon;
    c.u_bar = complexd(g / 2.0 * (1.0 + a - 0.5 * (1.0 - a) * root),
                       g / 4.0 * (1.0 - a) * d2 * kappa_bar);
    c.v_bar = complexd(
        g / 2.0 * (epsilon * (1.0 + a) - (1.0 - a) * root / (2.0 * epsilon)),
        g / (4.0 * epsilon) * (1.0 - a) * d2 * kappa_bar);
    const complexd cc =
        g * std::conj(sol->alpha_bar) + epsilon * g * sol->alpha_bar;
    c.w_bar = (g * cc + epsilon * g * std::conj(cc)) / std::sqrt(c.xi);
    detail::finish_sp_coefficients(c, std::norm(sol->alpha_bar));
    return c;
}

/// General route: the rotated coupling amplitudes evaluated directly from the
/// mean-field coherence. Cross-validates the simplified forms. (The second
/// term carries a factor 4 from the off-diagonal entries 2c of the rotation.)
inline SpCoefficients sp_coefficients_general(double g, double epsilon,
                                              double kappa_bar, int sign = +1) {
    auto sol = sp_solution(g, epsilon, kappa_bar, sign);
    if (!sol)
        throw BoundaryDivergence("sp_coefficients_general: no SP solution");
    const double g_r = g, g_cr = epsilon * g;
    const complexd ab = sol->alpha_bar;
    const complexd cc = g_r * std::conj(ab) + g_cr * ab;
    const double xi = 1.0 + 4.0 * std::norm(cc);
    const double rxi = std::sqrt(xi);
    SpCoefficients c;
    c.s_z = sol->s_z;
    c.sign = sign;
    c.xi = xi;
    c.u_bar = 0.5 * (g_r * (1.0 + 1.0 / rxi) - 4.0 * g_cr * cc * cc / (xi + rxi));
    c.v_bar = 0.5 * (g_cr * (1.0 + 1.0 / rxi) - 4.0 * g_r * cc * cc / (xi + rxi));
    c.w_bar = (g_r * cc + g_cr * std::conj(cc)) / rxi;
    detail::finish_sp_coefficients(c, std::norm(ab));
    return c;
}

/// First-moment dynamical matrix of the SP, L_sp/omega0.
inline Eigen::Matrix2cd sp_matrix(const SpCoefficients& c, double kappa_bar) {
    const complexd i(0.0, 1.0);
    Eigen::Matrix2cd L;
    L << -i * c.P - kappa_bar, -2.0 * i * std::conj(c.Q),
        2.0 * i * c.Q, i * c.P - kappa_bar;
    return L;
}

inline std::pair<complexd, complexd> sp_eigenvalues(const SpCoefficients& c,
                                                    double kappa_bar) {
    const complexd r =
        std::sqrt(complexd(4.0 * std::norm(c.Q) - c.P * c.P, 0.0));
    return {-kappa_bar + r, -kappa_bar - r};
}

inline double sp_excitation(const SpCoefficients& c, double kappa_bar) {
    const double den =
        c.P * c.P - 4.0 * std::norm(c.Q) + kappa_bar * kappa_bar;
    if (std::abs(den) < 1e-12)
        throw BoundaryDivergence("sp_excitation: denominator vanishes at the boundary");
    return 2.0 * std::norm(c.Q) / den;
}

/// Steady state of (<a^+a>, <a^2>, <a^+2>) under H = P a^+a + Q aa + Q* a^+a^+
/// with the cavity dissipator; reduces to the published NP moment system for
/// real Q. Second, independent route to the excitation numbers.
inline Eigen::Vector3cd quadratic_second_moments(double P, complexd Q,
                                                 double kappa_bar) {
    const complexd i(0.0, 1.0);
    Eigen::Matrix3cd M;
    M << -2.0 * kappa_bar, 2.0 * i * Q, -2.0 * i * std::conj(Q),
        -4.0 * i * std::conj(Q), -2.0 * i * P - 2.0 * kappa_bar, 0.0,
        4.0 * i * Q, 0.0, 2.0 * i * P - 2.0 * kappa_bar;
    Eigen::Vector3cd Y(0.0, -2.0 * i * std::conj(Q), 2.0 * i * Q);
    return M.partialPivLu().solve(-Y);
}

inline Eigen::Vector3cd sp_second_moments(const SpCoefficients& c,
                                          double kappa_bar) {
    return quadratic_second_moments(c.P, c.Q, kappa_bar);
}

enum class Phase { np, sp };

/// Asymptotic decay rate -Re l^+ of the requested phase (kappa_bar in the
/// underdamped regime by construction).
inline double adr(double g_r, double g_cr, double kappa_bar, Phase phase) {
    if (phase == Phase::np) {
        const double gs = std::max(g_r, g_cr);
        const double eps = gs > 0.0 ? std::min(g_r, g_cr) / gs : 0.0;
        return -np_eigenvalues(gs, eps, kappa_bar).first.real();
    }
    const auto c = sp_coefficients(g_r, g_cr / g_r, kappa_bar);
    return -sp_eigenvalues(c, kappa_bar).first.real();
}

/// Location of the minimum NP decay rate along a line: coarse scan first
/// (the overdamped dip is narrow inside a flat underdamped plateau at
/// kappa_bar), then golden-section refinement between the flanking samples.
inline double adr_touch_point(const CouplingLine& line, double kappa_bar,
                              double g_lo, double g_hi, int scan_points = 4000) {
    auto f = [&](double g) { return adr(g, line.g_cr(g), kappa_bar, Phase::np); };
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= scan_points; ++i) {
        const double g = g_lo + (g_hi - g_lo) * i / scan_points;
        const double v = f(g);
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    double a = g_lo + (g_hi - g_lo) * std::max(0, best - 1) / scan_points;
    double b = g_lo + (g_hi - g_lo) * std::min(scan_points, best + 1) / scan_points;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    for (int it = 0; it < 200; ++it) {
        if (f(x1) < f(x2)) b = x2;
        else a = x1;
        x1 = b - gr * (b - a);
        x2 = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

struct ExponentFit {
    double nu = 0.0;
    double r_squared = 0.0;
};

/// Least-squares slope of log(value) against log|g - g_c|, negated for
/// diverging quantities so nu is always reported positive for a power law.
inline ExponentFit fit_exponent(std::span<const std::pair<double, double>> samples,
                                double g_c, bool diverging) {
    if (samples.size() < 8)
        throw FitDegenerate("fit_exponent: need at least 8 samples");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::vector<double> lx, ly;
    lx.reserve(samples.size());
    ly.reserve(samples.size());
    for (const auto& [g, v] : samples) {
        const double d = std::abs(g - g_c);
        if (!(d > 0.0) || !(v > 0.0))
            throw FitDegenerate("fit_exponent: nonpositive distance or value");
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        lx.push_back(std::log(d));
        ly.push_back(std::log(v));
    }
    if (hi / lo < 10.0)
        throw FitDegenerate("fit_exponent: samples span less than one decade");
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double my = sy / n;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double yhat = slope * lx[i] + icept;
        ss_res += (ly[i] - yhat) * (ly[i] - yhat);
        ss_tot += (ly[i] - my) * (ly[i] - my);
    }
    ExponentFit f;
    f.nu = diverging ? -slope : slope;
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace aqrm
