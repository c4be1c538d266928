#pragma once

// Adiabatic approximation: within each displaced-oscillator manifold n the
// system reduces to a 2x2 non-Hermitian block
//
//   H_n = (n w - g^2/w) Id + [[i eps/2, Omega_n/2], [Omega_n/2, -i eps/2]]
//
// in the basis { D(+g/w)|n> x |+x>, D(-g/w)|n> x |-x> } with the tunneling
// amplitude Omega_n = Delta exp(-2 g^2/w^2) L_n(4 g^2/w^2).  Everything in
// this header is closed form apart from one-dimensional root bracketing.

#include "model.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace ptqrm {

// Laguerre polynomial L_n(x) by upward recurrence, stable for the argument
// ranges used here (x = 4 g^2/w^2 up to ~15).
inline double laguerre(int n, double x) {
    if (n < 0) throw std::invalid_argument("laguerre: n must be >= 0");
    if (n == 0) return 1.0;
    double lm = 1.0, l = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double lp = ((2.0 * k + 1.0 - x) * l - k * lm) / (k + 1.0);
        lm = l;
        l = lp;
    }
    return l;
}

// Associated Laguerre L_n^(k)(x), same recurrence with offset k.
inline double laguerre_assoc(int n, int k, double x) {
    if (n < 0 || k < 0) throw std::invalid_argument("laguerre_assoc: indices must be >= 0");
    if (n == 0) return 1.0;
    double lm = 1.0, l = 1.0 + k - x;
    for (int j = 1; j < n; ++j) {
        const double lp = ((2.0 * j + 1.0 + k - x) * l - (j + k) * lm) / (j + 1.0);
        lm = l;
        l = lp;
    }
    return l;
}

// Effective tunneling amplitude of manifold n.
inline double aa_tunneling(const ModelParams& p, int n) {
    const double r = p.g / p.omega;
    return p.delta * std::exp(-2.0 * r * r) * laguerre(n, 4.0 * r * r);
}

struct AAPair {
    int n = 0;
    double omega_n = 0.0;       // tunneling amplitude of this manifold
    cxd e_plus, e_minus;        // e_plus carries +Im in the broken phase
    Eigen::Vector2cd v_plus, v_minus;  // unit eigenvectors in the displaced basis
    double w_plus = 0.0, w_minus = 0.0;  // two-level weights (1 +- Re s/Omega)/2
    double photon = 0.0;        // n + g^2/w^2, branch independent
    double fidelity = 0.0;      // |<v+|v->|^2
    bool coalesced = false;     // |Omega_n| == eps != 0, eigenvectors merged
    bool degenerate = false;    // Omega_n == eps == 0, any basis works
};

// Closed-form eigensystem of the 2x2 manifold block.  The square root uses
// the principal branch so e_plus is the growing branch once eps exceeds
// |Omega_n|.  Trace invariant: e_plus + e_minus = 2 (n w - g^2/w).
inline AAPair aa_pair(const ModelParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("aa_pair: n must be >= 0");
    AAPair out;
    out.n = n;
    out.omega_n = aa_tunneling(p, n);
    out.photon = double(n) + (p.g / p.omega) * (p.g / p.omega);

    const double base = n * p.omega - p.g * p.g / p.omega;
    const double disc = out.omega_n * out.omega_n - p.epsilon * p.epsilon;
    const cxd s = std::sqrt(cxd(disc, 0.0));
    out.e_plus = base + 0.5 * s;
    out.e_minus = base - 0.5 * s;

    if (out.omega_n == 0.0) {
        // Block is diagonal (i eps/2, -i eps/2); eigenvectors are the basis
        // vectors themselves.  With eps = 0 the block vanishes entirely.
        out.v_plus << 1.0, 0.0;
        out.v_minus << 0.0, 1.0;
        out.degenerate = (p.epsilon == 0.0);
        out.w_plus = out.degenerate ? 1.0 : 0.5;
        out.w_minus = out.degenerate ? 0.0 : 0.5;
    } else {
        const cxd ie(0.0, p.epsilon);
        out.v_plus << (ie + s) / out.omega_n, 1.0;
        out.v_minus << (ie - s) / out.omega_n, 1.0;
        out.v_plus.normalize();
        out.v_minus.normalize();
        out.coalesced = (disc == 0.0 && p.epsilon != 0.0);
        const double t = std::real(s / out.omega_n);  // 0 in the broken phase
        out.w_plus = 0.5 * (1.0 + t);
        out.w_minus = 0.5 * (1.0 - t);
    }
    out.fidelity = std::norm(out.v_plus.dot(out.v_minus));
    return out;
}

inline double aa_fidelity(const ModelParams& p, int n) { return aa_pair(p, n).fidelity; }

inline double aa_photon(const ModelParams& p, int n) {
    return double(n) + (p.g / p.omega) * (p.g / p.omega);
}

// eps value at which manifold n coalesces for the given coupling.
inline double aa_ep_epsilon(const ModelParams& p, int n) {
    return std::abs(aa_tunneling(p, n));
}

namespace detail {

// Bisection on a bracketing interval, refined to xtol.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// All sign-change roots of f on (lo, hi], located on a uniform scan grid and
// refined by bisection.
template <typename F>
std::vector<double> scan_roots(F&& f, double lo, double hi, int samples, double xtol) {
    std::vector<double> roots;
    if (!(hi > lo)) return roots;
    double xp = lo, fp = f(lo);
    for (int i = 1; i <= samples; ++i) {
        const double x = lo + (hi - lo) * i / samples;
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if ((fp < 0.0 && fx > 0.0) || (fp > 0.0 && fx < 0.0)) {
            roots.push_back(bisect(f, xp, x, xtol));
        }
        xp = x;
        fp = fx;
    }
    return roots;
}

}  // namespace detail

// Couplings g in (0, g_max] where the tunneling amplitude of pair n vanishes,
// i.e. where the two branches cross at eps = 0.  These follow the roots x_k of
// L_n via g = w sqrt(x_k)/2.
inline std::vector<double> juddian_points(int n, double omega, double g_max) {
    if (n < 0) throw std::invalid_argument("juddian_points: n must be >= 0");
    if (omega <= 0.0 || g_max <= 0.0)
        throw std::invalid_argument("juddian_points: omega and g_max must be positive");
    // Roots of L_n lie in (0, 4n+2).
    const double x_hi = std::min(4.0 * n + 2.0, 4.0 * g_max * g_max / (omega * omega));
    auto f = [n](double x) { return laguerre(n, x); };
    std::vector<double> roots = detail::scan_roots(f, 0.0, x_hi, std::max(64, 32 * (n + 1)), 1e-12);
    for (double& x : roots) x = 0.5 * omega * std::sqrt(x);
    return roots;
}

// Couplings in (0, g_max] where |Omega_n(g)| = eps: seeds for the exact
// exceptional-point search.  Scans densely because Omega_n oscillates.
inline std::vector<double> aa_ep_couplings(const ModelParams& p, int n, double g_max) {
    p.validate();
    if (g_max <= 0.0) throw std::invalid_argument("aa_ep_couplings: g_max must be positive");
    auto f = [&](double g) {
        ModelParams q = p;
        q.g = g;
        return std::abs(aa_tunneling(q, n)) - p.epsilon;
    };
    return detail::scan_roots(f, 0.0, g_max, std::max(512, 256 * (n + 1)), 1e-12);
}

// Matrix elements <m|D|n> of D(alpha) = exp[-alpha (a' - a)] for real alpha.
// The prefactor sqrt(n!/m!) beta^(m-n) is accumulated as a running product of
// beta/sqrt(j) to avoid factorial overflow.
inline Matrix displacement_matrix(double alpha, const FockTruncation& trunc) {
    trunc.validate();
    const double beta = -alpha;  // D(alpha) = exp[beta a' - beta a]
    const int d = trunc.fock_dim();
    Matrix D(d, d);
    const double e = std::exp(-0.5 * beta * beta);
    for (int n = 0; n < d; ++n) {
        double pref = e;
        for (int m = n; m < d; ++m) {
            if (m > n) pref *= beta / std::sqrt(double(m));
            const double val = pref * laguerre_assoc(n, m - n, beta * beta);
            D(m, n) = val;
            // <m|D|n> for m < n follows from transposing with alternating sign.
            D(n, m) = ((m + n) % 2 == 0) ? val : -val;
        }
    }
    return D;
}

// Branch of an adiabatic pair expressed in the bare product basis k = 2n + q.
// The displaced components interfere, so the result is renormalized.
enum class AABranch { Plus, Minus };

inline Vector aa_state_in_bare_basis(const ModelParams& p, int n, AABranch branch,
                                     const FockTruncation& trunc) {
    p.validate();
    trunc.validate();
    if (n < 0 || n > trunc.n_max)
        throw std::invalid_argument("aa_state_in_bare_basis: manifold outside truncation");
    const AAPair pair = aa_pair(p, n);
    const Eigen::Vector2cd c = (branch == AABranch::Plus) ? pair.v_plus : pair.v_minus;
    const Matrix Dp = displacement_matrix(p.g / p.omega, trunc);
    const Matrix Dm = displacement_matrix(-p.g / p.omega, trunc);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Vector psi = Vector::Zero(trunc.full_dim());
    for (int m = 0; m <= trunc.n_max; ++m) {
        const cxd up = c(0) * Dp(m, n);    // sigma_x = +1 component
        const cxd dn = c(1) * Dm(m, n);    // sigma_x = -1 component
        psi(2 * m) = (up - dn) * inv_sqrt2;      // |-z>
        psi(2 * m + 1) = (up + dn) * inv_sqrt2;  // |+z>
    }
    psi.normalize();
    return psi;
}

}  // namespace ptqrm
