#pragma once

// Wigner function of a Fock-basis oscillator state via the displaced-parity
// form W(alpha) = (2/pi) Tr[D^+(alpha) rho D(alpha) Pi]. Evaluated through a
// scaled associated-Laguerre recursion that folds the Gaussian prefactor in,
// so it stays finite for large cutoffs and amplitudes. Normalization:
// integral of W over the plane equals Tr rho, vacuum peak 2/pi.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "aqrm/util.hpp"

namespace aqrm {

struct WignerGrid {
    Eigen::VectorXd re_axis, im_axis;
    Eigen::MatrixXd values;  // values(i, j) = W(re_axis[j] + i*im_axis[i])

    double integral() const {
        const double dx = re_axis.size() > 1 ? re_axis[1] - re_axis[0] : 0.0;
        const double dy = im_axis.size() > 1 ? im_axis[1] - im_axis[0] : 0.0;
        return values.sum() * dx * dy;
    }
};

namespace detail {

inline double wigner_point(const Eigen::MatrixXcd& rho, double re, double im,
                           const std::vector<int>& active_diagonals) {
    const int M = int(rho.rows());
    const double x = 4.0 * (re * re + im * im);
    const double theta = std::atan2(im, re);
    double w = 0.0;
    for (int k : active_diagonals) {
        // F_m = exp(-x/2) sqrt(m!/(m+k)!) (2|a|)^k L_m^(k)(x)
        double F0;
        if (k == 0) {
            F0 = std::exp(-x / 2.0);
        } else if (x == 0.0) {
            F0 = 0.0;
        } else {
            F0 = std::exp(-x / 2.0 + 0.5 * k * std::log(x) -
                          0.5 * std::lgamma(double(k) + 1.0));
        }
        std::complex<double> acc = 0.0;
        double Fm = F0, Fm1 = 0.0;
        double sign = 1.0;
        for (int m = 0; m < M - k; ++m) {
            const std::complex<double> r = rho(m, m + k);
            acc += sign * r * Fm;
            sign = -sign;
            if (m + 1 < M - k) {
                const double den = std::sqrt(double(m + 1) * double(m + 1 + k));
                const double c1 = (2.0 * m + k + 1.0 - x) / den;
                const double c2 = std::sqrt(double(m) * double(m + k)) / den;
                const double Fn = c1 * Fm - c2 * Fm1;
                Fm1 = Fm;
                Fm = Fn;
            }
        }
        if (k == 0)
            w += acc.real();
        else
            w += 2.0 * (std::polar(1.0, k * theta) * acc).real();
    }
    return 2.0 / M_PI * w;
}

}  // namespace detail

inline WignerGrid wigner(const Eigen::MatrixXcd& rho_osc,
                         const Eigen::VectorXd& re_axis,
                         const Eigen::VectorXd& im_axis, unsigned threads = 1) {
    const int M = int(rho_osc.rows());
    std::vector<int> diags;
    for (int k = 0; k < M; ++k) {
        double mx = 0.0;
        for (int m = 0; m < M - k; ++m) mx = std::max(mx, std::abs(rho_osc(m, m + k)));
        if (mx > 1e-18) diags.push_back(k);
    }
    WignerGrid g;
    g.re_axis = re_axis;
    g.im_axis = im_axis;
    g.values.resize(im_axis.size(), re_axis.size());
    parallel_for(std::size_t(im_axis.size()), threads, [&](std::size_t i) {
        for (Eigen::Index j = 0; j < re_axis.size(); ++j)
            g.values(Eigen::Index(i), j) =
                detail::wigner_point(rho_osc, re_axis[j], im_axis[Eigen::Index(i)], diags);
    });
    return g;
}

/// Square grid sized from the state: radius sqrt(<n>) + pad covers the
/// support of displaced states with a few vacuum widths to spare.
inline WignerGrid wigner_auto(const Eigen::MatrixXcd& rho_osc, int points = 141,
                              double pad = 3.5, unsigned threads = 1) {
    const double tr = rho_osc.trace().real();
    double nbar = 0.0;
    for (int n = 0; n < rho_osc.rows(); ++n) nbar += n * rho_osc(n, n).real();
    if (tr > 1e-12) nbar /= tr;
    const double r = std::sqrt(std::max(nbar, 0.0)) + pad;
    Eigen::VectorXd ax = Eigen::VectorXd::LinSpaced(points, -r, r);
    return wigner(rho_osc, ax, ax, threads);
}

struct WignerPeak {
    double re, im, value;
};

/// Local maxima of the surface, plateau-merged within merge_radius, kept if
/// above rel_threshold of the global peak. The count is the modality.
inline std::vector<WignerPeak> wigner_peaks(const WignerGrid& g,
                                            double rel_threshold = 0.1,
                                            double merge_radius = 0.6) {
    std::vector<WignerPeak> cand;
    const auto& W = g.values;
    for (Eigen::Index i = 1; i + 1 < W.rows(); ++i)
        for (Eigen::Index j = 1; j + 1 < W.cols(); ++j) {
            const double w = W(i, j);
            if (w <= 1e-12) continue;
            bool top = true;
            for (int di = -1; di <= 1 && top; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if ((di || dj) && W(i + di, j + dj) > w) {
                        top = false;
                        break;
                    }
            if (top) cand.push_back({g.re_axis[j], g.im_axis[i], w});
        }
    std::sort(cand.begin(), cand.end(),
              [](const WignerPeak& a, const WignerPeak& b) { return a.value > b.value; });
    std::vector<WignerPeak> merged;
    for (const auto& p : cand) {
        bool close = false;
        for (const auto& q : merged) {
            const double dx = p.re - q.re, dy = p.im - q.im;
            if (dx * dx + dy * dy < merge_radius * merge_radius) {
                close = true;
                break;
            }
        }
        if (!close) merged.push_back(p);
    }
    if (merged.empty()) return merged;
    const double cut = rel_threshold * merged.front().value;
    std::erase_if(merged, [&](const WignerPeak& p) { return p.value < cut; });
    return merged;
}

inline int wigner_modality(const WignerGrid& g, double rel_threshold = 0.1,
                           double merge_radius = 0.6) {
    return int(wigner_peaks(g, rel_threshold, merge_radius).size());
}

}  // namespace aqrm
