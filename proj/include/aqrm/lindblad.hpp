#pragma once

// Finite-frequency-ratio quantum solution: truncated spin (x) Fock operators,
// the vectorized Liouvillian, its null-space steady state, slow-mode spectrum,
// time evolution, and Wigner-function diagnostics.
//
// Dissipator convention (fixes all rates in this file): for a collapse
// operator C with rate r, the contribution is r * (2 C rho C^+ - C^+C rho -
// rho C^+C). This is the factor-2 form, so <a^+a> of an empty cavity decays
// at 2*kappa; many references use the 1/2 convention instead.
//
// Basis: |spin> (x) |n>, index = s*N + n with s = 0 down, s = 1 up.
// Vectorization is column stacking: rho_{ij} sits at index j*(2N) + i.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "aqrm/ode.hpp"
#include "aqrm/params.hpp"
#include "aqrm/util.hpp"

namespace aqrm {

using SparseC = Eigen::SparseMatrix<std::complex<double>>;
using Triplet = Eigen::Triplet<std::complex<double>>;

struct DegenerateSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationUnsafe : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncatedOperator {
    int dim_fock = 0;
    SparseC matrix;  // 2N x 2N
};

// ---- elementary operators -------------------------------------------------

inline SparseC fock_annihilation(int N) {
    SparseC a(N, N);
    std::vector<Triplet> t;
    t.reserve(N);
    for (int n = 1; n < N; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

inline SparseC sparse_kron(const SparseC& A, const SparseC& B) {
    SparseC K(A.rows() * B.rows(), A.cols() * B.cols());
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(A.nonZeros()) * B.nonZeros());
    for (int ka = 0; ka < A.outerSize(); ++ka)
        for (SparseC::InnerIterator ia(A, ka); ia; ++ia)
            for (int kb = 0; kb < B.outerSize(); ++kb)
                for (SparseC::InnerIterator ib(B, kb); ib; ++ib)
                    t.emplace_back(ia.row() * B.rows() + ib.row(),
                                   ia.col() * B.cols() + ib.col(),
                                   ia.value() * ib.value());
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

inline SparseC sparse_identity(int n) {
    SparseC I(n, n);
    I.setIdentity();
    return I;
}

/// a, sigma_z, sigma_+, sigma_- embedded in the product space.
struct ProductOperators {
    SparseC a, n_phot, sz, sp, sm;
};

inline ProductOperators product_operators(int N) {
    SparseC a1 = fock_annihilation(N);
    SparseC IN = sparse_identity(N);
    SparseC szs(2, 2), sps(2, 2);
    szs.insert(0, 0) = -1.0;
    szs.insert(1, 1) = 1.0;
    sps.insert(1, 0) = 1.0;  // |up><down|
    szs.makeCompressed();
    sps.makeCompressed();
    SparseC sms = SparseC(sps.adjoint());
    ProductOperators p;
    p.a = sparse_kron(sparse_identity(2), a1);
    p.n_phot = SparseC(p.a.adjoint() * p.a);
    p.sz = sparse_kron(szs, IN);
    p.sp = sparse_kron(sps, IN);
    p.sm = sparse_kron(sms, IN);
    return p;
}

/// H = omega0 a^+a + (Omega/2) sigma_z - lambda_r (a s+ + a^+ s-)
///                                     - lambda_cr (a s- + a^+ s+).
inline TruncatedOperator build_hamiltonian(const ModelParams& p, int dim_fock) {
    if (dim_fock < 2)
        throw std::invalid_argument("build_hamiltonian: dim_fock must be >= 2");
    auto ops = product_operators(dim_fock);
    SparseC ad = SparseC(ops.a.adjoint());
    SparseC H = p.omega0 * ops.n_phot + (p.Omega / 2.0) * ops.sz -
                p.lambda_r * SparseC(ops.a * ops.sp + ad * ops.sm) -
                p.lambda_cr * SparseC(ops.a * ops.sm + ad * ops.sp);
    H.prune(complexd(0.0, 0.0));
    return {dim_fock, H};
}

// ---- superoperators ---------------------------------------------------------

inline SparseC spre(const SparseC& A) {
    return sparse_kron(sparse_identity(int(A.rows())), A);
}
inline SparseC spost(const SparseC& A) {
    return sparse_kron(SparseC(A.transpose()), sparse_identity(int(A.rows())));
}

inline SparseC dissipator(const SparseC& C, double rate) {
    SparseC CdC = SparseC(C.adjoint() * C);
    return rate * (2.0 * sparse_kron(SparseC(C.conjugate()), C) - spre(CdC) -
                   spost(CdC));
}

/// Vectorized generator: dvec(rho)/dt = L vec(rho). Includes kappa D[a]
/// always and gamma_spin D[sigma_-] when positive.
inline SparseC build_liouvillian(const TruncatedOperator& H, double kappa,
                                 double gamma_spin = 0.0) {
    const complexd i(0.0, 1.0);
    auto ops = product_operators(H.dim_fock);
    SparseC L = (-i) * (spre(H.matrix) - spost(H.matrix)) +
                dissipator(ops.a, kappa);
    if (gamma_spin > 0.0) L = L + dissipator(ops.sm, gamma_spin);
    L.makeCompressed();
    return L;
}

// ---- density matrices -------------------------------------------------------

struct DensityMatrix {
    int dim_fock = 0;
    Eigen::MatrixXcd matrix;  // 2N x 2N

    double trace() const { return matrix.trace().real(); }
    double hermiticity_defect() const {
        return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    }
    /// Population on the top 5% of Fock levels (at least the top one),
    /// both spin blocks.
    double top_fock_population() const {
        const int N = dim_fock;
        const int from = std::min(N - 1, static_cast<int>(std::ceil(N * 0.95)));
        double s = 0.0;
        for (int blk = 0; blk < 2; ++blk)
            for (int n = from; n < N; ++n)
                s += matrix(blk * N + n, blk * N + n).real();
        return s;
    }
};

inline Eigen::MatrixXcd project_spin_down(const DensityMatrix& rho) {
    return rho.matrix.topLeftCorner(rho.dim_fock, rho.dim_fock);
}

inline Eigen::MatrixXcd partial_trace_spin(const DensityMatrix& rho) {
    const int N = rho.dim_fock;
    return rho.matrix.topLeftCorner(N, N) + rho.matrix.bottomRightCorner(N, N);
}

inline complexd expectation(const Eigen::MatrixXcd& rho, const SparseC& op) {
    if (rho.rows() != op.cols() || rho.cols() != op.rows())
        throw DimensionMismatch("expectation: operator/state dimensions differ");
    complexd tr = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SparseC::InnerIterator it(op, k); it; ++it)
            tr += it.value() * rho(it.col(), it.row());
    return tr;
}

inline complexd expectation(const DensityMatrix& rho, const SparseC& op) {
    return expectation(rho.matrix, op);
}

// ---- steady state -----------------------------------------------------------

struct SteadyStateOptions {
    double sigma = 0.05;          // shift for the slow-mode solver (units of L)
    int arnoldi_dim = 48;         // Krylov dimension for the mode spectrum
    bool check_gap = true;        // uniqueness test + gap estimate
    double top_pop_max = 1e-6;    // truncation-safety threshold
    double eig_floor = -1e-8;     // eigenvalues above this are clipped to 0
    double degeneracy_ratio = 1e3;
};

struct LiouvillianMode {
    complexd lambda;
    double photon_overlap = 0.0;  // max(|Tr a R|, |Tr a^+ R|)/||R||_F
    double down_weight = 0.0;     // ||P_down R P_down||_F / ||R||_F
};

struct SteadyStateResult {
    DensityMatrix rho;
    double trace_defect = 0.0;      // |Tr - 1| before normalization
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;    // before flooring
    double top_fock_pop = 0.0;
    double residual = 0.0;          // ||L vec(rho)|| / ||vec(rho)||
    double second_mode_residual = 0.0;  // deflated inverse-iteration residual
    double gap_estimate = std::numeric_limits<double>::quiet_NaN();
    std::vector<LiouvillianMode> modes;
};

namespace detail {

inline Eigen::VectorXcd deterministic_unit_vector(Eigen::Index n) {
    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = complexd(u(rng), u(rng));
    v.normalize();
    return v;
}

/// Plain Arnoldi on the shift-inverted operator; returns Ritz eigenpairs of
/// L closest to sigma.
struct ArnoldiResult {
    std::vector<complexd> lambdas;
    Eigen::MatrixXcd vectors;  // columns are Ritz vectors of L
};

inline ArnoldiResult shift_invert_arnoldi(
    const Eigen::SparseLU<SparseC>& lu_shifted, complexd sigma, Eigen::Index n,
    int k) {
    Eigen::MatrixXcd V(n, k + 1);
    Eigen::MatrixXcd Hh = Eigen::MatrixXcd::Zero(k + 1, k);
    V.col(0) = deterministic_unit_vector(n);
    int m = k;
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXcd w = lu_shifted.solve(V.col(j));
        for (int rep = 0; rep < 2; ++rep) {  // re-orthogonalized MGS
            for (int i = 0; i <= j; ++i) {
                const complexd h = V.col(i).dot(w);
                Hh(i, j) += h;
                w -= h * V.col(i);
            }
        }
        const double nw = w.norm();
        Hh(j + 1, j) = nw;
        if (nw < 1e-13) {
            m = j + 1;
            break;
        }
        V.col(j + 1) = w / nw;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Hh.topLeftCorner(m, m));
    ArnoldiResult r;
    r.lambdas.resize(m);
    r.vectors.resize(n, m);
    for (int i = 0; i < m; ++i) {
        const complexd theta = es.eigenvalues()[i];
        r.lambdas[i] = sigma + 1.0 / theta;
        r.vectors.col(i) = V.leftCols(m) * es.eigenvectors().col(i);
    }
    return r;
}

}  // namespace detail

/// Null vector of L normalized to unit trace, via sparse LU with the first
/// equation replaced by the trace functional. Hygiene checks and positivity
/// flooring per the DensityMatrix contract; a deflated inverse iteration
/// guards against a degenerate null space.
inline SteadyStateResult steady_state(const SparseC& L, int dim_fock,
                                      const SteadyStateOptions& opt = {}) {
    const Eigen::Index D = 2 * dim_fock;
    const Eigen::Index n = D * D;
    if (L.rows() != n)
        throw DimensionMismatch("steady_state: Liouvillian/dim_fock mismatch");

    // M = L with row 0 <- trace row
    SparseC M(n, n);
    {
        std::vector<Triplet> t;
        t.reserve(L.nonZeros() + D);
        for (int k = 0; k < L.outerSize(); ++k)
            for (SparseC::InnerIterator it(L, k); it; ++it)
                if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
        for (Eigen::Index j = 0; j < D; ++j)
            t.emplace_back(0, j * D + j, complexd(1.0, 0.0));
        M.setFromTriplets(t.begin(), t.end());
    }
    Eigen::SparseLU<SparseC> lu;
    lu.compute(M);
    Eigen::VectorXcd x;
    if (lu.info() == Eigen::Success) {
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
        b[0] = 1.0;
        x = lu.solve(b);
    }
    SteadyStateResult out;

    Eigen::SparseLU<SparseC> lu_shifted;
    const bool need_shifted = opt.check_gap || lu.info() != Eigen::Success;
    if (need_shifted) {
        SparseC S = L;
        for (Eigen::Index j = 0; j < n; ++j) S.coeffRef(j, j) -= opt.sigma;
        S.makeCompressed();
        lu_shifted.compute(S);
        if (lu_shifted.info() != Eigen::Success)
            throw std::runtime_error("steady_state: shifted LU factorization failed");
    }
    if (lu.info() != Eigen::Success) {
        // fallback: inverse iteration toward the eigenvalue nearest sigma ~ 0
        Eigen::VectorXcd v = detail::deterministic_unit_vector(n);
        for (int it = 0; it < 50; ++it) {
            v = lu_shifted.solve(v);
            v.normalize();
        }
        x = v;
    }

    // normalize to unit trace
    complexd tr = 0.0;
    for (Eigen::Index j = 0; j < D; ++j) tr += x[j * D + j];
    if (std::abs(tr) < 1e-300)
        throw DegenerateSteadyState("steady_state: traceless null vector");
    x /= tr;
    out.residual = (L * x).norm() / x.norm();

    if (opt.check_gap) {
        // deflated inverse iteration for a second near-null direction
        Eigen::VectorXcd v0 = x / x.norm();
        Eigen::VectorXcd w = detail::deterministic_unit_vector(n);
        w -= v0.dot(w) * v0;
        for (int it = 0; it < 25; ++it) {
            w = lu_shifted.solve(w);
            w -= v0.dot(w) * v0;
            w.normalize();
        }
        out.second_mode_residual = (L * w).norm();
        if (out.second_mode_residual <
            opt.degeneracy_ratio * std::max(out.residual, 1e-11))
            throw DegenerateSteadyState(
                "steady_state: null space is not one-dimensional");

        auto ar = detail::shift_invert_arnoldi(lu_shifted, opt.sigma, n,
                                               opt.arnoldi_dim);
        const SparseC a = sparse_kron(sparse_identity(2),
                                      fock_annihilation(dim_fock));
        out.modes.reserve(ar.lambdas.size());
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ar.lambdas.size(); ++i) {
            Eigen::MatrixXcd R =
                Eigen::Map<const Eigen::MatrixXcd>(ar.vectors.col(i).data(), D, D);
            const double nrm = R.norm();
            LiouvillianMode md;
            md.lambda = ar.lambdas[i];
            complexd ta = 0.0, tad = 0.0;
            for (int kk = 0; kk < a.outerSize(); ++kk)
                for (SparseC::InnerIterator it(a, kk); it; ++it) {
                    ta += it.value() * R(it.col(), it.row());
                    tad += std::conj(it.value()) * R(it.row(), it.col());
                }
            md.photon_overlap = std::max(std::abs(ta), std::abs(tad)) / nrm;
            md.down_weight =
                R.topLeftCorner(dim_fock, dim_fock).norm() / nrm;
            out.modes.push_back(md);
            if (std::abs(md.lambda) > 1e-9 && md.photon_overlap > 0.2 &&
                md.down_weight > 0.5 && md.lambda.real() > best)
                best = md.lambda.real();
        }
        if (std::isfinite(best)) out.gap_estimate = -best;
    }

    // density-matrix hygiene
    Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), D, D);
    out.trace_defect = std::abs(rho.trace() - 1.0);
    out.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    rho = 0.5 * (rho + rho.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    if (out.min_eigenvalue < opt.eig_floor)
        throw DegenerateSteadyState(
            "steady_state: negative eigenvalue beyond round-off floor");
    if (out.min_eigenvalue < 0.0) {
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        rho = es.eigenvectors() * ev.asDiagonal() *
              es.eigenvectors().adjoint();
        rho /= rho.trace().real();
    }
    out.rho = {dim_fock, rho};
    out.top_fock_pop = out.rho.top_fock_population();
    if (out.top_fock_pop > opt.top_pop_max)
        throw TruncationUnsafe("steady_state: top Fock levels are populated");
    return out;
}

// ---- time evolution ---------------------------------------------------------

/// rho(t) by adaptive integration of the vectorized master equation.
inline DensityMatrix time_evolve(const DensityMatrix& rho0, const SparseC& L,
                                 double t, const OdeControls& c = {.rtol = 1e-9,
                                                                  .atol = 1e-12,
                                                                  .h_init = 1e-4,
                                                                  .h_min = 1e-14,
                                                                  .h_max = 0.05}) {
    const Eigen::Index D = rho0.matrix.rows();
    if (L.rows() != D * D)
        throw DimensionMismatch("time_evolve: Liouvillian/state mismatch");
    Eigen::VectorXcd y =
        Eigen::Map<const Eigen::VectorXcd>(rho0.matrix.data(), D * D);
    auto rhs = [&](double, const Eigen::VectorXcd& v, Eigen::VectorXcd& d) {
        d.noalias() = L * v;
    };
    integrate_dp54(rhs, y, 0.0, t, c);
    DensityMatrix out{rho0.dim_fock, Eigen::Map<Eigen::MatrixXcd>(y.data(), D, D)};
    return out;
}

inline double trace_distance(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd d = a - b;
    d = 0.5 * (d + d.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace aqrm
