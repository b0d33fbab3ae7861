#pragma once

// Embedded Dormand-Prince 5(4) integrator with PI-free standard step control.
// Works on any indexable state with a value_type supporting the usual
// arithmetic (std::array<double, N>, Eigen vectors, complex vectors).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

namespace aqrm {

struct OdeControls {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_init = 1e-4;
    double h_min = 1e-14;
    double h_max = 1.0;
    std::size_t max_steps = 400'000'000;
};

struct OdeStats {
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    bool reached_t_end = false;
};

namespace detail {

template <class State>
double scalar_abs(const State& y, std::size_t i) {
    using std::abs;
    return abs(y[i]);
}

}  // namespace detail

// Dormand-Prince coefficients (the classic ode45 tableau, FSAL).
// rhs: void(double t, const State& y, State& dydt)
// observer: called after each accepted step; may be a no-op.
template <class State, class Rhs, class Observer>
OdeStats integrate_dp54(Rhs&& rhs, State& y, double t0, double t_end,
                        const OdeControls& c, Observer&& observe) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;

    const std::size_t n = y.size();
    State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y,
          ynew = y;

    OdeStats st;
    double t = t0;
    double h = std::min(c.h_init, t_end - t0);
    rhs(t, y, k1);
    bool fsal_valid = true;

    while (t < t_end) {
        if (st.n_accepted + st.n_rejected >= c.max_steps) return st;
        h = std::min({h, c.h_max, t_end - t});
        if (!fsal_valid) rhs(t, y, k1);
        fsal_valid = true;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                  a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                 e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            using std::abs;
            const double sc =
                c.atol + c.rtol * std::max(detail::scalar_abs(y, i),
                                           detail::scalar_abs(ynew, i));
            const double q = abs(ei) / sc;
            err += q * q;
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0 || h <= c.h_min) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            ++st.n_accepted;
            observe(t, y);
        } else {
            ++st.n_rejected;
            fsal_valid = false;
        }
        const double fac =
            std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h = std::max(h * fac, c.h_min);
    }
    st.reached_t_end = true;
    return st;
}

template <class State, class Rhs>
OdeStats integrate_dp54(Rhs&& rhs, State& y, double t0, double t_end,
                        const OdeControls& c) {
    return integrate_dp54(std::forward<Rhs>(rhs), y, t0, t_end, c,
                          [](double, const State&) {});
}

}  // namespace aqrm
