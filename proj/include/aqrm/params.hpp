#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace aqrm {

struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Physical model parameters in absolute units (hbar = 1).
struct ModelParams {
    double omega0;            // oscillator frequency, > 0
    double Omega;             // qubit frequency, > 0
    double lambda_r;          // rotating coupling, >= 0
    double lambda_cr;         // counterrotating coupling, >= 0
    double kappa;             // oscillator damping rate, >= 0
    double gamma_spin = 0.0;  // optional spin damping rate, >= 0

    double eta() const { return Omega / omega0; }
};

/// Dimensionless parameters. (g_r, g_cr) is the canonical coordinate pair;
/// (g, epsilon) is derived. epsilon() is +inf on the anti-JC axis (g_r = 0,
/// g_cr > 0) and NaN when both couplings vanish.
struct RenormalizedParams {
    double g_r;
    double g_cr;
    double kappa_bar;

    double g() const { return g_r; }
    double epsilon() const {
        if (g_r > 0.0) return g_cr / g_r;
        if (g_cr > 0.0) return std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::quiet_NaN();
    }
};

inline std::vector<std::string> validate(const ModelParams& p) {
    std::vector<std::string> v;
    if (!(p.omega0 > 0.0)) v.push_back("omega0 > 0");
    if (!(p.Omega > 0.0)) v.push_back("Omega > 0");
    if (!(p.lambda_r >= 0.0)) v.push_back("lambda_r >= 0");
    if (!(p.lambda_cr >= 0.0)) v.push_back("lambda_cr >= 0");
    if (!(p.kappa >= 0.0)) v.push_back("kappa >= 0");
    if (!(p.gamma_spin >= 0.0)) v.push_back("gamma_spin >= 0");
    return v;
}

inline RenormalizedParams renormalize(const ModelParams& p) {
    if (!(p.omega0 > 0.0) || !(p.Omega > 0.0))
        throw InvalidParams("renormalize: omega0 and Omega must be positive");
    const double s = std::sqrt(p.omega0 * p.Omega);
    return {p.lambda_r / s, p.lambda_cr / s, p.kappa / p.omega0};
}

/// Inverse of renormalize with the gauge omega0 = 1, Omega = eta.
inline ModelParams denormalize(const RenormalizedParams& r, double eta,
                               double gamma_spin = 0.0) {
    if (!(eta > 0.0)) throw InvalidParams("denormalize: eta must be positive");
    const double s = std::sqrt(eta);
    return {1.0, eta, r.g_r * s, r.g_cr * s, r.kappa_bar, gamma_spin};
}

}  // namespace aqrm
