#pragma once

// Semiclassical dynamics: the rescaled finite-eta mean-field equations of
// motion, the adiabatically eliminated cavity equation, attractor
// classification against the mean-field fixed points, and hysteresis sweeps.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "aqrm/meanfield.hpp"
#include "aqrm/ode.hpp"

namespace aqrm {

struct SemiclassicalState {
    complexd alpha_bar{0.0, 0.0};
    double s_x = 0.0, s_y = 0.0, s_z = -1.0;
    double t_bar = 0.0;
};

/// Spin configuration slaved to the cavity field (instantaneous-following
/// limit); used both as the initial-condition map and to reconstruct spins
/// along adiabatic trajectories.
inline SemiclassicalState spin_from_alpha(complexd alpha_bar, double g_r,
                                          double g_cr, int sz_sign = -1) {
    const complexd u = g_cr * alpha_bar + g_r * std::conj(alpha_bar);
    const double sz = sz_sign / std::sqrt(1.0 + 4.0 * std::norm(u));
    const complexd sp = -u * sz;
    return {alpha_bar, 2.0 * sp.real(), 2.0 * sp.imag(), sz, 0.0};
}

/// Full finite-eta equations of motion in rescaled time t_bar = omega0 * t.
/// State layout: (Re a, Im a, s_x, s_y, s_z); the spin equations carry eta.
/// The s_z equation carries the factor 2 of the unrescaled master-equation
/// form i2(lambda_r <a> + lambda_cr <a^+>)<sigma_+> + c.c.; this is what
/// conserves the spin norm exactly.
inline void full_rhs(const std::array<double, 5>& y, double g_r, double g_cr,
                     double kappa_bar, double eta, std::array<double, 5>& dy) {
    const complexd ab(y[0], y[1]);
    const complexd sp(0.5 * y[2], 0.5 * y[3]);
    const double sz = y[4];
    const complexd i(0.0, 1.0);
    const complexd da = -i * (1.0 - i * kappa_bar) * ab +
                        i * (g_r * std::conj(sp) + g_cr * sp);
    const complexd dsp = eta * (i * sp + i * (g_r * std::conj(ab) + g_cr * ab) * sz);
    const complexd w = (g_r * ab + g_cr * std::conj(ab)) * sp;
    const double dsz = 2.0 * eta * (i * (w - std::conj(w))).real();
    dy[0] = da.real();
    dy[1] = da.imag();
    dy[2] = 2.0 * dsp.real();
    dy[3] = 2.0 * dsp.imag();
    dy[4] = dsz;
}

/// Nonlinear cavity equation after adiabatic elimination of the spin.
inline complexd adiabatic_rhs(complexd alpha_bar, double g_r, double g_cr,
                              double kappa_bar, int sz_sign = -1) {
    const complexd i(0.0, 1.0);
    const complexd u = g_cr * alpha_bar + g_r * std::conj(alpha_bar);
    const double sz = sz_sign / std::sqrt(1.0 + 4.0 * std::norm(u));
    return -i * (1.0 - i * kappa_bar) * alpha_bar -
           i * sz *
               ((g_r * g_r + g_cr * g_cr) * alpha_bar +
                2.0 * g_r * g_cr * std::conj(alpha_bar));
}

enum class Attractor { np_down, np_up, sp, unresolved };

inline const char* to_string(Attractor a) {
    switch (a) {
        case Attractor::np_down: return "NP_down";
        case Attractor::np_up: return "NP_up";
        case Attractor::sp: return "SP";
        default: return "Unresolved";
    }
}

struct TrajectoryControls {
    double t_max = 200.0;
    double rtol = 1e-9;
    double atol = 1e-12;
    double sample_dt = 0.05;     // trajectory sampling interval in t_bar
    double fp_tol = 1e-4;        // attractor proximity, final 10% of the run
    double var_tol = 1e-6;       // terminal |alpha| variance limit-cycle guard
    double alpha_cap = 1e3;      // overflow guard on |alpha|
};

struct Trajectory {
    std::vector<SemiclassicalState> samples;
    Attractor attractor = Attractor::unresolved;
    int sp_sign = 0;        // sign of Re(alpha) at the SP attractor
    bool overflow = false;  // |alpha| exceeded the cap; run aborted
};

namespace detail {

inline double state_distance(const SemiclassicalState& a,
                             const SemiclassicalState& b) {
    const double dx = a.alpha_bar.real() - b.alpha_bar.real();
    const double dy = a.alpha_bar.imag() - b.alpha_bar.imag();
    const double d1 = a.s_x - b.s_x, d2 = a.s_y - b.s_y, d3 = a.s_z - b.s_z;
    return std::sqrt(dx * dx + dy * dy + d1 * d1 + d2 * d2 + d3 * d3);
}

inline void classify(Trajectory& tr, double g_r, double g_cr, double kappa_bar,
                     const TrajectoryControls& c) {
    if (tr.overflow || tr.samples.empty()) return;
    std::vector<std::pair<SemiclassicalState, Attractor>> fps;
    fps.push_back({SemiclassicalState{{0, 0}, 0, 0, -1, 0}, Attractor::np_down});
    fps.push_back({SemiclassicalState{{0, 0}, 0, 0, +1, 0}, Attractor::np_up});
    if (g_r > 0.0) {
        for (int sign : {+1, -1}) {
            if (auto sp = sp_solution(g_r, g_cr / g_r, kappa_bar, sign)) {
                fps.push_back(
                    {SemiclassicalState{sp->alpha_bar, sp->s_x, sp->s_y, sp->s_z, 0},
                     Attractor::sp});
            }
        }
    }
    const std::size_t tail = std::max<std::size_t>(1, tr.samples.size() / 10);
    const std::size_t from = tr.samples.size() - tail;
    double mean = 0.0, mean2 = 0.0;
    for (std::size_t i = from; i < tr.samples.size(); ++i) {
        const double m = std::abs(tr.samples[i].alpha_bar);
        mean += m;
        mean2 += m * m;
    }
    mean /= tail;
    const double var = std::max(0.0, mean2 / tail - mean * mean);
    for (const auto& [fp, label] : fps) {
        double worst = 0.0;
        for (std::size_t i = from; i < tr.samples.size(); ++i)
            worst = std::max(worst, state_distance(tr.samples[i], fp));
        if (worst < c.fp_tol) {
            tr.attractor = label;
            if (label == Attractor::sp)
                tr.sp_sign = fp.alpha_bar.real() >= 0.0 ? +1 : -1;
            return;
        }
    }
    (void)var;  // non-converged runs stay unresolved, with or without a cycle
}

}  // namespace detail

/// Integrate the full finite-eta system from an initial cavity amplitude,
/// spin set by the instantaneous-following map with the chosen s_z sign.
inline Trajectory integrate_full(complexd alpha0, double g_r, double g_cr,
                                 double kappa_bar, double eta,
                                 const TrajectoryControls& c = {},
                                 int sz_sign = -1) {
    Trajectory tr;
    const SemiclassicalState init = spin_from_alpha(alpha0, g_r, g_cr, sz_sign);
    std::array<double, 5> y{init.alpha_bar.real(), init.alpha_bar.imag(),
                            init.s_x, init.s_y, init.s_z};
    OdeControls oc;
    oc.rtol = c.rtol;
    oc.atol = c.atol;
    tr.samples.push_back(init);
    double next_sample = c.sample_dt;
    auto rhs = [&](double, const std::array<double, 5>& s,
                   std::array<double, 5>& d) {
        full_rhs(s, g_r, g_cr, kappa_bar, eta, d);
    };
    auto obs = [&](double t, const std::array<double, 5>& s) {
        if (t >= next_sample || t >= c.t_max) {
            tr.samples.push_back({{s[0], s[1]}, s[2], s[3], s[4], t});
            next_sample += c.sample_dt;
        }
        if (s[0] * s[0] + s[1] * s[1] > c.alpha_cap * c.alpha_cap)
            tr.overflow = true;
    };
    integrate_dp54(rhs, y, 0.0, c.t_max, oc, obs);
    detail::classify(tr, g_r, g_cr, kappa_bar, c);
    return tr;
}

/// Integrate the adiabatically eliminated cavity equation; spins in the
/// returned samples are reconstructed through the slaving map.
inline Trajectory integrate_adiabatic(complexd alpha0, double g_r, double g_cr,
                                      double kappa_bar,
                                      const TrajectoryControls& c = {},
                                      int sz_sign = -1) {
    Trajectory tr;
    std::array<double, 2> y{alpha0.real(), alpha0.imag()};
    OdeControls oc;
    oc.rtol = c.rtol;
    oc.atol = c.atol;
    tr.samples.push_back(spin_from_alpha(alpha0, g_r, g_cr, sz_sign));
    double next_sample = c.sample_dt;
    auto rhs = [&](double, const std::array<double, 2>& s,
                   std::array<double, 2>& d) {
        const complexd da =
            adiabatic_rhs({s[0], s[1]}, g_r, g_cr, kappa_bar, sz_sign);
        d[0] = da.real();
        d[1] = da.imag();
    };
    auto obs = [&](double t, const std::array<double, 2>& s) {
        if (t >= next_sample || t >= c.t_max) {
            auto st = spin_from_alpha({s[0], s[1]}, g_r, g_cr, sz_sign);
            st.t_bar = t;
            tr.samples.push_back(st);
            next_sample += c.sample_dt;
        }
        if (s[0] * s[0] + s[1] * s[1] > c.alpha_cap * c.alpha_cap)
            tr.overflow = true;
    };
    integrate_dp54(rhs, y, 0.0, c.t_max, oc, obs);
    detail::classify(tr, g_r, g_cr, kappa_bar, c);
    return tr;
}

struct HysteresisPoint {
    double g;
    double amp_forward;   // |alpha| steady value sweeping g upward
    double amp_backward;  // |alpha| steady value sweeping g downward
};

/// Quasi-static forward/backward sweep along a coupling line; each point is
/// seeded with the previous endpoint plus a small kick so an unstable NP can
/// actually be left. Uses the adiabatic cavity equation.
inline std::vector<HysteresisPoint> hysteresis_scan(
    const CouplingLine& line, double kappa_bar, double g_lo, double g_hi, int n,
    const TrajectoryControls& c = {}, double seed_kick = 1e-6) {
    std::vector<HysteresisPoint> out(n);
    auto settle = [&](complexd a0, double g) {
        std::array<double, 2> y{a0.real() + seed_kick, a0.imag() + seed_kick};
        OdeControls oc;
        oc.rtol = c.rtol;
        oc.atol = c.atol;
        const double gcr = line.g_cr(g);
        auto rhs = [&](double, const std::array<double, 2>& s,
                       std::array<double, 2>& d) {
            const complexd da = adiabatic_rhs({s[0], s[1]}, g, gcr, kappa_bar, -1);
            d[0] = da.real();
            d[1] = da.imag();
        };
        integrate_dp54(rhs, y, 0.0, c.t_max, oc);
        return complexd(y[0], y[1]);
    };
    complexd state(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        const double g = g_lo + (g_hi - g_lo) * i / (n - 1);
        state = settle(state, g);
        out[i].g = g;
        out[i].amp_forward = std::abs(state);
    }
    state = complexd(0.0, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        state = settle(state, out[i].g);
        out[i].amp_backward = std::abs(state);
    }
    return out;
}

}  // namespace aqrm
