#include <catch2/catch_amalgamated.hpp>

#include <ptqrm/adiabatic.hpp>
#include <ptqrm/model.hpp>
#include <ptqrm/spectral.hpp>

#include <cmath>

using namespace ptqrm;
using Catch::Approx;

TEST_CASE("Laguerre recurrences match the low-order polynomials", "[adiabatic]") {
    REQUIRE(laguerre(0, 3.7) == 1.0);
    REQUIRE(laguerre(1, 0.4) == Approx(0.6).epsilon(1e-14));
    REQUIRE(laguerre(2, 0.3) == Approx(1.0 - 0.6 + 0.045).epsilon(1e-14));
    const double x = 2.5;
    REQUIRE(laguerre(3, x) ==
            Approx(1.0 - 3.0 * x + 1.5 * x * x - x * x * x / 6.0).epsilon(1e-13));
    REQUIRE(laguerre_assoc(2, 0, 1.7) == Approx(laguerre(2, 1.7)).epsilon(1e-14));
    REQUIRE(laguerre_assoc(1, 3, 0.9) == Approx(4.0 - 0.9).epsilon(1e-14));
    REQUIRE(laguerre_assoc(2, 1, 1.2) == Approx(3.0 - 3.6 + 0.72).epsilon(1e-13));
    REQUIRE_THROWS_AS(laguerre(-1, 0.0), std::invalid_argument);
}

TEST_CASE("tunneling amplitude follows the displaced-oscillator overlap", "[adiabatic]") {
    const ModelParams p{0.5, 0.0, 1.0, 0.3};
    const double r2 = 0.09;
    REQUIRE(aa_tunneling(p, 0) == Approx(0.5 * std::exp(-2.0 * r2)).epsilon(1e-14));
    REQUIRE(aa_tunneling(p, 1) ==
            Approx(0.5 * std::exp(-2.0 * r2) * (1.0 - 4.0 * r2)).epsilon(1e-14));
    REQUIRE(aa_ep_epsilon(p, 0) == Approx(std::abs(aa_tunneling(p, 0))).epsilon(1e-15));
}

TEST_CASE("manifold pair in the symmetric phase", "[adiabatic]") {
    const ModelParams p{0.5, 0.1, 1.0, 0.2};
    const int n = 1;
    const AAPair a = aa_pair(p, n);
    const double omega_n = aa_tunneling(p, n);
    REQUIRE(p.epsilon < std::abs(omega_n));
    const double base = n * p.omega - p.g * p.g / p.omega;
    const double s = std::sqrt(omega_n * omega_n - p.epsilon * p.epsilon);
    REQUIRE(a.e_plus.imag() == Approx(0.0).margin(1e-15));
    REQUIRE(a.e_plus.real() == Approx(base + 0.5 * s).epsilon(1e-13));
    REQUIRE(a.e_minus.real() == Approx(base - 0.5 * s).epsilon(1e-13));
    // trace invariant of the 2x2 block
    REQUIRE((a.e_plus + a.e_minus).real() == Approx(2.0 * base).epsilon(1e-13));
    REQUIRE(a.fidelity ==
            Approx(p.epsilon * p.epsilon / (omega_n * omega_n)).epsilon(1e-12));
    REQUIRE(a.w_plus + a.w_minus == Approx(1.0).epsilon(1e-13));
    REQUIRE(a.photon == Approx(n + p.g * p.g).epsilon(1e-14));
    REQUIRE(a.v_plus.norm() == Approx(1.0).epsilon(1e-14));
    REQUIRE_FALSE(a.coalesced);
    REQUIRE_FALSE(a.degenerate);
}

TEST_CASE("manifold pair in the broken phase", "[adiabatic]") {
    // g large enough that the n = 0 tunneling shrinks below eps.
    const ModelParams p{0.5, 0.3, 1.0, 0.8};
    const AAPair a = aa_pair(p, 0);
    const double omega_n = aa_tunneling(p, 0);
    REQUIRE(p.epsilon > std::abs(omega_n));
    const double y = 0.5 * std::sqrt(p.epsilon * p.epsilon - omega_n * omega_n);
    REQUIRE(a.e_plus.imag() == Approx(y).epsilon(1e-13));
    REQUIRE(a.e_minus.imag() == Approx(-y).epsilon(1e-13));
    REQUIRE(a.e_plus.real() == Approx(a.e_minus.real()).epsilon(1e-13));
    REQUIRE(a.fidelity ==
            Approx(omega_n * omega_n / (p.epsilon * p.epsilon)).epsilon(1e-12));
    REQUIRE(a.w_plus == Approx(0.5).margin(1e-12));
    REQUIRE(a.w_minus == Approx(0.5).margin(1e-12));
}

TEST_CASE("coalescence and the degenerate corner", "[adiabatic]") {
    ModelParams p{0.5, 0.0, 1.0, 0.0};
    p.epsilon = aa_tunneling(p, 0);  // g = 0, so this is just delta
    const AAPair at_ep = aa_pair(p, 0);
    REQUIRE(at_ep.coalesced);
    REQUIRE(at_ep.fidelity == Approx(1.0).margin(1e-12));
    REQUIRE(at_ep.e_plus == at_ep.e_minus);

    // Omega_1 = 0 at the first crossing; with eps = 0 the block is scalar.
    ModelParams q{0.5, 0.0, 1.0, 0.5};
    REQUIRE(std::abs(aa_tunneling(q, 1)) < 1e-15);
    const AAPair deg = aa_pair(q, 1);
    REQUIRE(deg.degenerate);
    REQUIRE(std::abs(deg.e_plus - deg.e_minus) < 1e-14);
}

TEST_CASE("crossing couplings are Laguerre roots", "[adiabatic]") {
    const auto none = juddian_points(0, 1.0, 2.0);
    REQUIRE(none.empty());

    const auto one = juddian_points(1, 1.0, 2.0);
    REQUIRE(one.size() == 1);
    REQUIRE(one[0] == Approx(0.5).margin(1e-10));

    // L_2 roots 2 -+ sqrt(2) land on sin/cos of pi/8.
    const auto two = juddian_points(2, 1.0, 1.0);
    REQUIRE(two.size() == 2);
    REQUIRE(two[0] == Approx(std::sin(M_PI / 8.0)).margin(1e-10));
    REQUIRE(two[1] == Approx(std::cos(M_PI / 8.0)).margin(1e-10));

    // cutoff excludes the upper root
    const auto cut = juddian_points(2, 1.0, 0.5);
    REQUIRE(cut.size() == 1);

    // frequency scaling: g scales linearly with omega
    const auto scaled = juddian_points(1, 2.0, 2.0);
    REQUIRE(scaled[0] == Approx(1.0).margin(1e-10));
}

TEST_CASE("coalescence couplings solve |Omega_n(g)| = eps", "[adiabatic]") {
    const ModelParams p{0.5, 0.1, 1.0, 0.0};
    const auto g0 = aa_ep_couplings(p, 0, 1.5);
    REQUIRE(g0.size() == 1);
    REQUIRE(g0[0] == Approx(std::sqrt(0.5 * std::log(5.0))).margin(1e-9));
    for (int n = 1; n <= 3; ++n) {
        const auto roots = aa_ep_couplings(p, n, 1.5);
        REQUIRE_FALSE(roots.empty());
        for (size_t i = 0; i < roots.size(); ++i) {
            ModelParams q = p;
            q.g = roots[i];
            REQUIRE(std::abs(std::abs(aa_tunneling(q, n)) - p.epsilon) < 1e-9);
            if (i > 0) REQUIRE(roots[i] > roots[i - 1]);
        }
    }
}

TEST_CASE("displacement matrix is unitary and reproduces coherent amplitudes", "[adiabatic]") {
    const FockTruncation trunc{40};
    const double alpha = 0.3;
    const Matrix D = displacement_matrix(alpha, trunc);
    const Matrix id = Matrix::Identity(trunc.fock_dim(), trunc.fock_dim());
    // The boundary columns spill past the cutoff, so unitarity only holds on
    // the interior block.
    REQUIRE(((D.adjoint() * D - id).topLeftCorner(25, 25)).norm() < 1e-12);
    REQUIRE((displacement_matrix(0.0, trunc) - id).norm() == 0.0);
    // column 0 is the coherent state of amplitude -alpha
    const double e = std::exp(-0.5 * alpha * alpha);
    double fact = 1.0;
    for (int m = 0; m <= 6; ++m) {
        if (m > 0) fact *= m;
        const double want = e * std::pow(-alpha, m) / std::sqrt(fact);
        REQUIRE(D(m, 0).real() == Approx(want).margin(1e-13));
    }
    // group property on the displaced vacuum
    const Matrix D2 = displacement_matrix(2.0 * alpha, trunc);
    REQUIRE((D * D.col(0) - D2.col(0)).norm() < 1e-10);
}

TEST_CASE("branch states reduce to bare states at zero coupling", "[adiabatic]") {
    const ModelParams p{0.5, 0.0, 1.0, 0.0};
    const FockTruncation trunc{8};
    const Vector plus = aa_state_in_bare_basis(p, 2, AABranch::Plus, trunc);
    const Vector minus = aa_state_in_bare_basis(p, 2, AABranch::Minus, trunc);
    REQUIRE(plus.norm() == Approx(1.0).epsilon(1e-14));
    REQUIRE(std::abs(plus(2 * 2 + 1)) == Approx(1.0).margin(1e-13));
    REQUIRE(std::abs(minus(2 * 2)) == Approx(1.0).margin(1e-13));
    REQUIRE_THROWS_AS(aa_state_in_bare_basis(p, 9, AABranch::Plus, trunc),
                      std::invalid_argument);
}

TEST_CASE("branch states approximate exact eigenstates at weak coupling", "[adiabatic]") {
    const ModelParams p{0.5, 0.05, 1.0, 0.1};
    const FockTruncation trunc{30};
    const Matrix H = build_hamiltonian(p, Representation::BareZ, trunc);
    const AAPair a = aa_pair(p, 0);
    const Vector psi = aa_state_in_bare_basis(p, 0, AABranch::Minus, trunc);
    // the residual is first order in the neglected inter-manifold coupling,
    // the eigenvalue error second order
    REQUIRE((H * psi - a.e_minus * psi).norm() < 0.1);
    const auto d = eigendecompose(H);
    REQUIRE(std::abs(d.values(0) - a.e_minus) < 0.01);
}
