#pragma once

// Mean-field steady states of the anisotropic open quantum Rabi model,
// their linear stability, and the resulting phase diagram.
//
// Conventions: g = g_r, epsilon = g_cr/g_r, kappa_bar = kappa/omega0.
// alpha_bar = x + i y is the renormalized oscillator coherence,
// (s_x, s_y, s_z) the spin expectations.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aqrm {

using complexd = std::complex<double>;

enum class Branch { np_down, np_up, sp_minus, sp_plus };

struct MeanFieldSolution {
    complexd alpha_bar{0.0, 0.0};
    double s_x = 0.0, s_y = 0.0, s_z = -1.0;
    Branch branch = Branch::np_down;
    int sign = +1;  // Z2 sign of the SP coherence; irrelevant for NP
    bool stable = false;
    double stability_A = 0.0;
    double stability_B = 1.0;
};

// |epsilon - 1| below this uses the dedicated symmetric-limit closed forms
// (the general expressions are 0/0 there).
inline constexpr double kSymmetricBand = 1e-7;
// stability verdict band: |A| <= this is treated as marginal / boundary
inline constexpr double kStabilityBand = 1e-12;

inline double sp_discriminant(double epsilon, double kappa_bar) {
    const double d = 1.0 - epsilon * epsilon;
    return 4.0 * epsilon * epsilon - kappa_bar * kappa_bar * d * d;
}

/// Window of anisotropies admitting an SP solution. At kappa_bar = 0 the
/// window is the open half line (0, inf), returned as a sentinel pair.
inline std::pair<double, double> epsilon_bounds(double kappa_bar) {
    if (kappa_bar <= 0.0)
        return {0.0, std::numeric_limits<double>::infinity()};
    const double s = std::sqrt(1.0 + kappa_bar * kappa_bar);
    return {(-1.0 + s) / kappa_bar, (1.0 + s) / kappa_bar};
}

struct CriticalCouplings {
    double g_c_minus;
    double g_c_plus;  // +inf in the symmetric limit
};

/// Both roots of the NP boundary condition, or nothing outside the epsilon
/// window. g_c^- uses the conjugate form (1+kb^2)/[(1+eps^2)+sqrt(disc)],
/// which is cancellation-free and reduces to sqrt(1+kb^2)/2 at eps = 1;
/// inside the symmetric band g_c^+ is the +inf sentinel.
inline std::optional<CriticalCouplings> critical_couplings(double epsilon,
                                                           double kappa_bar) {
    const double d = sp_discriminant(epsilon, kappa_bar);
    if (d < 0.0) return std::nullopt;
    const double sum = (1.0 + epsilon * epsilon) + std::sqrt(d);
    const double gm = std::sqrt((1.0 + kappa_bar * kappa_bar) / sum);
    if (std::abs(epsilon - 1.0) < kSymmetricBand)
        return CriticalCouplings{gm, std::numeric_limits<double>::infinity()};
    const double den = (1.0 - epsilon * epsilon) * (1.0 - epsilon * epsilon);
    return CriticalCouplings{gm, std::sqrt(sum / den)};
}

/// Nontrivial spin polarization of the SP branch; nullopt when the
/// discriminant is negative or the root falls outside (-1, 0). Evaluated in
/// the conjugate form -(1+kb^2)/(g^2 [(1+eps^2)+sqrt(disc)]), which is exact
/// through the symmetric point.
inline std::optional<double> sp_spin_z(double g, double epsilon, double kappa_bar) {
    if (!(g > 0.0)) return std::nullopt;
    const double d = sp_discriminant(epsilon, kappa_bar);
    if (d < 0.0) return std::nullopt;
    const double sz = -(1.0 + kappa_bar * kappa_bar) /
                      (g * g * ((1.0 + epsilon * epsilon) + std::sqrt(d)));
    if (!(sz > -1.0 && sz < 0.0)) return std::nullopt;
    return sz;
}

/// The other root of the determinant condition (unstable branch, App. B).
inline std::optional<double> sp_spin_z_plus(double g, double epsilon,
                                            double kappa_bar) {
    if (!(g > 0.0) || std::abs(epsilon - 1.0) < kSymmetricBand) return std::nullopt;
    const double d = sp_discriminant(epsilon, kappa_bar);
    if (d < 0.0) return std::nullopt;
    const double den = (1.0 - epsilon * epsilon) * (1.0 - epsilon * epsilon);
    const double sz = -((1.0 + epsilon * epsilon) + std::sqrt(d)) / (den * g * g);
    if (!(sz > -1.0 && sz < 1.0)) return std::nullopt;
    return sz;
}

/// Stability coefficients A, B of the linearized mean-field dynamics in the
/// Omega/omega0 -> infinity limit. Stable iff A > 0 (B is always positive).
inline std::pair<double, double> stability_coefficients(double g, double epsilon,
                                                        double kappa_bar, double x,
                                                        double y, double s_z) {
    const double kb2 = kappa_bar * kappa_bar;
    const double m = (1.0 - epsilon) * (1.0 - epsilon) * y * y +
                     (1.0 + epsilon) * (1.0 + epsilon) * x * x;
    const double d2 = (1.0 - epsilon * epsilon) * (1.0 - epsilon * epsilon);
    const double g2 = g * g;
    const double A = 1.0 + kb2 + 4.0 * g2 * (1.0 + kb2) * m +
                     2.0 * g2 * (1.0 + epsilon * epsilon) * s_z +
                     g2 * g2 * d2 * (s_z * s_z + 4.0 * s_z * (x * x + y * y));
    const double B = 1.0 + 4.0 * g2 * m;
    return {A, B};
}

inline std::pair<double, double> stability_coefficients(
    const MeanFieldSolution& sol, double g, double epsilon, double kappa_bar) {
    return stability_coefficients(g, epsilon, kappa_bar, sol.alpha_bar.real(),
                                  sol.alpha_bar.imag(), sol.s_z);
}

/// Slow eigenvalue pair mu/omega0 = -kb +- sqrt(kb^2 - A/B).
inline std::pair<complexd, complexd> stability_eigenvalues(double A, double B,
                                                           double kappa_bar) {
    const complexd r = std::sqrt(complexd(kappa_bar * kappa_bar - A / B, 0.0));
    return {-kappa_bar + r, -kappa_bar - r};
}

/// NP stability coefficient, Eq. in closed form; its roots in g are the
/// critical couplings.
inline double np_stability_A(double g, double epsilon, double kappa_bar) {
    const double d = 1.0 - epsilon * epsilon;
    const double g2 = g * g;
    return 1.0 + kappa_bar * kappa_bar - 2.0 * (1.0 + epsilon * epsilon) * g2 +
           d * d * g2 * g2;
}

/// Trivial solutions with the spin fully polarized. sz_sign = -1 is the NP;
/// sz_sign = +1 is always stable but unphysical in the large-frequency limit.
inline MeanFieldSolution np_solution(double g, double epsilon, double kappa_bar,
                                     int sz_sign = -1) {
    MeanFieldSolution s;
    s.s_z = sz_sign > 0 ? 1.0 : -1.0;
    s.branch = sz_sign > 0 ? Branch::np_up : Branch::np_down;
    auto [A, B] = stability_coefficients(g, epsilon, kappa_bar, 0.0, 0.0, s.s_z);
    s.stability_A = A;
    s.stability_B = B;
    s.stable = A > kStabilityBand;
    return s;
}

namespace detail {

inline MeanFieldSolution assemble_sp(double g, double epsilon, double kappa_bar,
                                     double sz, int sign, Branch branch) {
    const double one = 1.0 - sz * sz;
    const double p = 1.0 + epsilon, m = 1.0 - epsilon;
    const double kb2 = kappa_bar * kappa_bar;
    const double tx = 1.0 + g * g * m * m * sz;
    const double ty = 1.0 + g * g * p * p * sz;
    const double bx = p * p + kb2 * m * m / (tx * tx);
    const double by = m * m + kb2 * p * p / (ty * ty);
    const double x = sign * std::sqrt(one / (4.0 * g * g * sz * sz * bx));
    const double y = (x >= 0.0 ? 1.0 : -1.0) *
                     std::sqrt(one / (4.0 * g * g * sz * sz * by));
    MeanFieldSolution s;
    s.alpha_bar = {x, y};
    s.s_x = -2.0 * g * p * x * sz;
    s.s_y = 2.0 * g * m * y * sz;
    s.s_z = sz;
    s.branch = branch;
    s.sign = sign;
    auto [A, B] = stability_coefficients(g, epsilon, kappa_bar, x, y, sz);
    s.stability_A = A;
    s.stability_B = B;
    s.stable = A > kStabilityBand;
    return s;
}

}  // namespace detail

/// Superradiant fixed point for the chosen Z2 sign. The symmetric corner
/// epsilon = 1, kappa_bar = 0 has a U(1)-degenerate manifold and is rejected.
inline std::optional<MeanFieldSolution> sp_solution(double g, double epsilon,
                                                    double kappa_bar,
                                                    int sign = +1) {
    if (std::abs(epsilon - 1.0) < kSymmetricBand && kappa_bar <= 0.0)
        throw std::invalid_argument("sp_solution: epsilon = 1 requires kappa_bar > 0");
    auto sz = sp_spin_z(g, epsilon, kappa_bar);
    if (!sz) return std::nullopt;
    return detail::assemble_sp(g, epsilon, kappa_bar, *sz, sign, Branch::sp_minus);
}

/// The s_z^+ branch. Unstable wherever it is physical (App. B).
inline std::optional<MeanFieldSolution> sp_plus_branch(double g, double epsilon,
                                                       double kappa_bar,
                                                       int sign = +1) {
    auto sz = sp_spin_z_plus(g, epsilon, kappa_bar);
    if (!sz) return std::nullopt;
    return detail::assemble_sp(g, epsilon, kappa_bar, *sz, sign, Branch::sp_plus);
}

/// Max-norm residual of the steady-state equations; an independent check
/// that a solution really is a fixed point.
inline double fixed_point_residual(const MeanFieldSolution& s, double g_r,
                                   double g_cr, double kappa_bar) {
    const complexd ab = s.alpha_bar;
    const complexd sp = complexd(s.s_x, s.s_y) / 2.0;
    const complexd i(0.0, 1.0);
    const complexd r1 =
        -(1.0 - i * kappa_bar) * ab + g_r * std::conj(sp) + g_cr * sp;
    const complexd r2 = sp + (g_r * std::conj(ab) + g_cr * ab) * s.s_z;
    const complexd r3 = (g_r * ab + g_cr * std::conj(ab)) * sp -
                        (g_r * std::conj(ab) + g_cr * ab) * std::conj(sp);
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
}

enum class PhaseLabel { np, sp, bistable, boundary };

inline const char* to_string(PhaseLabel p) {
    switch (p) {
        case PhaseLabel::np: return "NP";
        case PhaseLabel::sp: return "SP";
        case PhaseLabel::bistable: return "Bistable";
        default: return "Boundary";
    }
}

struct PhasePoint {
    double g_r = 0.0, g_cr = 0.0, kappa_bar = 0.0;
    PhaseLabel phase = PhaseLabel::np;
    std::vector<MeanFieldSolution> stable_solutions;  // NP_down and/or SP(+1)
    double A_np = 0.0;
    double A_sp = std::numeric_limits<double>::quiet_NaN();  // NaN: no SP here
    std::optional<MeanFieldSolution> np_up;  // tracked, never enters the label
};

/// Stability census at one parameter point. The s_z = +1 branch is computed
/// but excluded from the label. Points with a marginal coefficient
/// (|A| <= 1e-12) are labeled boundary rather than flipped by noise.
inline PhasePoint classify_phase(double g_r, double g_cr, double kappa_bar) {
    if (!(kappa_bar > 0.0))
        throw std::invalid_argument("classify_phase: kappa_bar must be positive");
    PhasePoint pt;
    pt.g_r = g_r;
    pt.g_cr = g_cr;
    pt.kappa_bar = kappa_bar;

    // A_np is symmetric in g_r <-> g_cr; evaluate in the (g, eps) chart with
    // the larger coupling as scale so the g_r = 0 axis stays well defined.
    const double gs = std::max(g_r, g_cr);
    const double eps_sym = gs > 0.0 ? std::min(g_r, g_cr) / gs : 0.0;
    pt.A_np = np_stability_A(gs, eps_sym, kappa_bar);

    MeanFieldSolution np = np_solution(gs, eps_sym, kappa_bar, -1);
    pt.np_up = np_solution(gs, eps_sym, kappa_bar, +1);

    std::optional<MeanFieldSolution> sp;
    if (g_r > 0.0) {
        sp = sp_solution(g_r, g_cr / g_r, kappa_bar, +1);
        if (sp) pt.A_sp = sp->stability_A;
    }

    const bool np_marginal = std::abs(pt.A_np) <= kStabilityBand;
    const bool sp_marginal = sp && std::abs(sp->stability_A) <= kStabilityBand;
    const bool np_stable = pt.A_np > kStabilityBand;
    const bool sp_stable = sp && sp->stability_A > kStabilityBand;

    if (np_marginal || sp_marginal) {
        pt.phase = PhaseLabel::boundary;
    } else if (np_stable && sp_stable) {
        pt.phase = PhaseLabel::bistable;
    } else if (sp_stable) {
        pt.phase = PhaseLabel::sp;
    } else {
        pt.phase = PhaseLabel::np;  // NP stable, or nothing else exists
    }
    if (np_stable) pt.stable_solutions.push_back(np);
    if (sp_stable) pt.stable_solutions.push_back(*sp);
    return pt;
}

/// The two multicritical points (g_r, g_cr) where g_c^- meets the first-order
/// boundary line g_cr = eps_min(max) * g_r; there the discriminant vanishes
/// and g_c^- = g_c^+ = sqrt(1+eps^2)/|1-eps^2|.
inline std::array<std::pair<double, double>, 2> tricritical_points(
    double kappa_bar) {
    if (!(kappa_bar > 0.0))
        throw std::invalid_argument("tricritical_points: kappa_bar must be positive");
    auto [emin, emax] = epsilon_bounds(kappa_bar);
    std::array<std::pair<double, double>, 2> out;
    int k = 0;
    for (double e : {emin, emax}) {
        const double g = std::sqrt(1.0 + e * e) / std::abs(1.0 - e * e);
        out[k++] = {g, e * g};
    }
    return out;
}

struct PhaseBoundaries {
    std::optional<double> g_c_minus, g_c_plus;
    double epsilon_min = 0.0, epsilon_max = 0.0;
    std::array<std::pair<double, double>, 2> tricritical{};
};

inline PhaseBoundaries phase_boundaries(double epsilon, double kappa_bar) {
    PhaseBoundaries b;
    auto [emin, emax] = epsilon_bounds(kappa_bar);
    b.epsilon_min = emin;
    b.epsilon_max = emax;
    if (auto gc = critical_couplings(epsilon, kappa_bar)) {
        b.g_c_minus = gc->g_c_minus;
        b.g_c_plus = gc->g_c_plus;
    }
    if (kappa_bar > 0.0) b.tricritical = tricritical_points(kappa_bar);
    return b;
}

/// A straight path g_cr = slope * g_r + intercept in the coupling plane,
/// traversed by g = g_r.
struct CouplingLine {
    double slope = 0.0;
    double intercept = 0.0;
    double g_cr(double g_r) const { return slope * g_r + intercept; }
    double epsilon(double g_r) const { return g_cr(g_r) / g_r; }
};

/// Phase-change couplings encountered along a line, found by bisecting the
/// sign changes of A_np and of the SP existence condition.
inline std::vector<double> line_transitions(const CouplingLine& line,
                                            double kappa_bar, double g_lo,
                                            double g_hi, int scan_points = 4096) {
    auto label = [&](double g) {
        return classify_phase(g, line.g_cr(g), kappa_bar).phase;
    };
    auto a_np = [&](double g) {
        const double gcr = line.g_cr(g);
        const double gs = std::max(g, gcr);
        return np_stability_A(gs, std::min(g, gcr) / gs, kappa_bar);
    };
    auto sp_exists = [&](double g) {
        return sp_spin_z(g, line.epsilon(g), kappa_bar).has_value() ? 1.0 : -1.0;
    };
    std::vector<double> roots;
    auto bisect = [&](auto f, double a, double b) {
        double fa = f(a);
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = f(m);
            if ((fa < 0) == (fm < 0)) a = m, fa = fm;
            else b = m;
        }
        return 0.5 * (a + b);
    };
    double prev_g = g_lo;
    PhaseLabel prev = label(g_lo);
    for (int i = 1; i <= scan_points; ++i) {
        const double g = g_lo + (g_hi - g_lo) * i / scan_points;
        const PhaseLabel cur = label(g);
        if (cur != prev && cur != PhaseLabel::boundary &&
            prev != PhaseLabel::boundary) {
            // decide which condition flipped in (prev_g, g)
            const bool np_flip = (a_np(prev_g) < 0) != (a_np(g) < 0);
            roots.push_back(np_flip ? bisect(a_np, prev_g, g)
                                    : bisect(sp_exists, prev_g, g));
            prev = cur;
        } else if (cur != PhaseLabel::boundary) {
            prev = cur;
        }
        prev_g = g;
    }
    return roots;
}

}  // namespace aqrm
