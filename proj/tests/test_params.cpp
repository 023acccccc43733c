#include <cmath>
#include <complex>

#include "doctest.h"
#include "spinmag/constants.hpp"
#include "spinmag/errors.hpp"
#include "spinmag/params.hpp"

using namespace spinmag;
using namespace spinmag::params;
using cplx = std::complex<double>;

namespace {

// Canonical working point: blue-detuned kHz-scale effective detunings with
// GHz mechanics and ten-percent linearized couplings.
PhysicalParams canonical_phys() {
    PhysicalParams p;
    p.omega_a = angular(2e9);
    p.omega_c = angular(2e9);
    p.omega_b = angular(1e9);
    p.omega_q = angular(2e9);
    p.omega_m = angular(2e9);
    p.omega_a_d = angular(2e9);
    p.omega_c_d = angular(2e9);
    p.g_q = angular(20e3);
    p.g_m = angular(20e3);
    p.kappa_a = angular(1e6);
    p.kappa_b = angular(1e5);
    p.kappa_c = angular(1e6);
    p.kappa_m = angular(1e6);
    p.gamma_q = angular(1e3);
    return p;
}

CascadeOptions canonical_opts() {
    CascadeOptions o;
    o.Delta_a_p = angular(-1e3);
    o.Delta_c_p = angular(-1e3);
    o.G_a = angular(1e8);
    o.G_c = angular(1e8);
    o.Delta_q_over_Gq = 10.0;
    o.Delta_m_over_Gm = 10.0;
    o.Wc_over_OmegaA = 1e6;
    return o;
}

} // namespace

TEST_CASE("detunings follow the two drive frames") {
    PhysicalParams p = canonical_phys();
    SUBCASE("resonant drive gives zero detuning") {
        CHECK(detunings(p).Delta_a == 0.0);
        CHECK(detunings(p).Delta_q == 0.0);
    }
    SUBCASE("magnon detunes against the cavity-c drive") {
        p.omega_m = p.omega_c_d + angular(5e6);
        CHECK(detunings(p).Delta_m == doctest::Approx(angular(5e6)));
    }
    SUBCASE("drive above the cavity gives a negative detuning") {
        p.omega_a_d = p.omega_a + angular(1e3);
        CHECK(detunings(p).Delta_a == doctest::Approx(angular(-1e3)));
    }
}

TEST_CASE("steady state fixed point") {
    PhysicalParams p = canonical_phys();
    p.g_a = angular(100.0);
    p.g_c = angular(100.0);

    SUBCASE("undriven gives the origin") {
        const SteadyState s = steady_state(p);
        CHECK(s.mean_a == cplx{0.0});
        CHECK(s.mean_c == cplx{0.0});
        CHECK(s.mean_b == cplx{0.0});
    }
    SUBCASE("decoupled linear cavity matches the closed form") {
        p.g_a = p.g_c = 0.0;
        p.F_a = angular(1e6);
        p.omega_a_d = p.omega_a - angular(2e5);   // Delta_a = 2 pi 200 kHz
        const SteadyState s = steady_state(p);
        const double Delta_a = detunings(p).Delta_a;
        const cplx expect = cplx{0.0, -1.0} * p.F_a / (p.kappa_a + cplx{0.0, 1.0} * Delta_a);
        CHECK(std::abs(s.mean_a - expect) <= 1e-12 * std::abs(expect));
        CHECK(s.mean_b == cplx{0.0});
    }
    SUBCASE("symmetric drive cancels the mechanical displacement") {
        p.F_a = angular(1e6);
        p.F_c = angular(1e6);
        const SteadyState s = steady_state(p);
        CHECK(std::abs(s.mean_b) <= 1e-9 * std::abs(s.mean_a));
        // residual oracle: the returned point substituted into the flow
        CHECK(steady_state_residual(p, s.mean_a, s.mean_c, s.mean_b) <= 1e-12);
    }
    SUBCASE("zero decay is rejected") {
        p.kappa_a = 0.0;
        p.F_a = angular(1e6);
        CHECK_THROWS_AS(steady_state(p), DomainError);
    }
}

TEST_CASE("linearized couplings and shifted detunings") {
    PhysicalParams p = canonical_phys();
    p.g_a = angular(1e5);
    p.g_c = angular(1e5);
    SUBCASE("zero amplitude keeps only the displacement shift") {
        const cplx mean_b{3.0, -1.0};
        const auto lc = linearized_couplings(p, 0.0, 0.0, mean_b);
        CHECK(lc.G_a == 0.0);
        CHECK(lc.Delta_a_p == doctest::Approx(detunings(p).Delta_a + p.g_a * 6.0));
        CHECK(lc.Delta_c_p == doctest::Approx(detunings(p).Delta_c - p.g_c * 6.0));
    }
    SUBCASE("amplitude 1000 reaches ten percent of the mechanical frequency") {
        const auto lc = linearized_couplings(p, cplx{0.0, 1000.0}, cplx{-1000.0, 0.0}, 0.0);
        CHECK(lc.G_a == doctest::Approx(0.1 * p.omega_b));
        CHECK(lc.G_c == doctest::Approx(0.1 * p.omega_b));
        CHECK(lc.G_a >= 0.0);
        CHECK(lc.G_c >= 0.0);
    }
    SUBCASE("purely imaginary mechanical amplitude leaves detunings alone") {
        const auto lc = linearized_couplings(p, 1.0, 1.0, cplx{0.0, 7.0});
        CHECK(lc.Delta_a_p == detunings(p).Delta_a);
        CHECK(lc.Delta_c_p == detunings(p).Delta_c);
    }
}

TEST_CASE("dispersive coefficients") {
    const double Dp = angular(-1e3);
    const double wb = angular(1e9);
    const double G = angular(1e8);
    SUBCASE("canonical point reproduces the second-order nonlinearity") {
        const auto dc = dispersive_coefficients(Dp, Dp, wb, G, G);
        CHECK(dc.chi_a == doctest::Approx(-1.2566e8).epsilon(1e-3));
        CHECK(dc.chi_c == dc.chi_a);
        // symmetric case: the induced cross coupling equals chi exactly
        CHECK(dc.G_ac == dc.chi_a);
    }
    SUBCASE("one decoupled cavity") {
        const auto dc = dispersive_coefficients(Dp, Dp, wb, 0.0, G);
        CHECK(dc.xi_a_p == 0.0);
        CHECK(dc.xi_a_m == 0.0);
        CHECK(dc.chi_a == 0.0);
        // G_ac = (G_a .. + G_c (xi_a+ - xi_a-))/2 collapses with xi_a = 0
        CHECK(dc.G_ac == 0.0);
    }
    SUBCASE("mechanical resonance is rejected") {
        CHECK_THROWS_AS(dispersive_coefficients(-wb, Dp, wb, G, G), DomainError);
    }
}

TEST_CASE("squeezing parameters") {
    SUBCASE("canonical point") {
        const auto r = squeezing_parameters(angular(-1e3), angular(-1e3), -1.2566e8, -1.2566e8);
        CHECK(r.r_a == doctest::Approx(2.649).epsilon(5e-3));
    }
    SUBCASE("no nonlinearity, no squeezing") {
        const auto r = squeezing_parameters(-1.0, -1.0, 0.0, 0.0);
        CHECK(r.r_a == 0.0);
        CHECK(r.r_c == 0.0);
    }
    SUBCASE("ratio four gives a quarter of ln 9") {
        const auto r = squeezing_parameters(-1000.0, -1000.0, -4000.0, -4000.0);
        CHECK(r.r_a == doctest::Approx(0.25 * std::log(9.0)).epsilon(1e-12));
    }
    SUBCASE("breakdown is reported with the cavity name") {
        CHECK_THROWS_WITH_AS(squeezing_parameters(-1.0, -1.0, 0.6, 0.0),
                             doctest::Contains("cavity a"), DomainError);
    }
}

TEST_CASE("squeezed-frame frequencies and coupling") {
    const double Dp = angular(-1e3);
    SUBCASE("canonical point lands near 0.9e6 rad/s") {
        const double chi = -1.25664e8;
        const auto f = squeezed_frame(Dp, Dp, chi, chi, 2.649, 2.649, chi);
        CHECK(f.W_a == doctest::Approx(8.886e5).epsilon(1e-2));
    }
    SUBCASE("zero nonlinearity keeps the bare detuning magnitude") {
        const auto f = squeezed_frame(Dp, Dp, 0.0, 0.0, 0.0, 0.0, -123.0);
        CHECK(f.W_a == doctest::Approx(std::abs(Dp)));
        CHECK(f.G_sq == -123.0);
    }
    SUBCASE("exponential enhancement of the cross coupling") {
        const double G_ac = -1.2566e8;
        const auto f = squeezed_frame(Dp, Dp, -1.2566e8, -1.2566e8, 2.649, 2.649, G_ac);
        CHECK(f.G_sq == doctest::Approx(G_ac * std::exp(5.298)).epsilon(1e-6));
        CHECK(std::abs(f.G_sq) > 1e10);   // far beyond the critical coupling
    }
    SUBCASE("negative radicand is rejected") {
        CHECK_THROWS_AS(squeezed_frame(-1.0, -1.0, -0.5, 2.0, 0.0, 0.0, 0.0), DomainError);
    }
}

TEST_CASE("polariton spectrum") {
    SUBCASE("decoupled modes keep their frequencies ordered") {
        const auto s = polariton_spectrum(2.0, 5.0, 0.0);
        CHECK(std::sqrt(s.Omega_A_sq) == doctest::Approx(2.0));
        CHECK(std::sqrt(s.Omega_C_sq) == doctest::Approx(5.0));
    }
    SUBCASE("resonant critical point") {
        const double W = 8.886e5;
        const auto s = polariton_spectrum(W, W, 0.5 * W);
        CHECK(std::abs(s.Omega_A_sq) <= 1e-10 * W * W);
        CHECK(s.theta == doctest::Approx(std::numbers::pi / 4));
    }
    SUBCASE("blueshifted critical point at W_a = 4 W_c") {
        const double Wc = 1.0;
        const auto s = polariton_spectrum(4.0 * Wc, Wc, Wc);
        CHECK(std::abs(s.Omega_A_sq) <= 1e-10 * 4.0 * Wc * Wc);
    }
}

TEST_CASE("critical couplings with and without decay") {
    SUBCASE("dissipationless limit is exact") {
        const auto c = critical_coupling(3.7, 1.9, 0.0);
        CHECK(c.G_cp == c.G_cp_prime);
    }
    SUBCASE("redshifted critical point at W_a = 0.01 W_c") {
        const double Wc = 2.0;
        const auto c = critical_coupling(0.01 * Wc, Wc, 0.0);
        CHECK(c.G_cp == doctest::Approx(0.05 * Wc).epsilon(1e-12));
    }
    SUBCASE("equal frequency and decay") {
        const double W = 1.3e6;
        const auto c = critical_coupling(W, W, W);
        CHECK(c.G_cp_prime == doctest::Approx(W).epsilon(1e-12));
        CHECK(c.G_cp_prime > c.G_cp);
    }
}

TEST_CASE("near-critical enhanced couplings") {
    SUBCASE("million-to-one ratio gives the canonical zero-point fluctuation") {
        const double Wc = 8.886e5;
        const auto c = cp_effective_couplings(Wc, Wc / 1e6, angular(20e3), angular(20e3),
                                              2.649, 2.649);
        CHECK(c.x_zpf == doctest::Approx(353.5534).epsilon(5e-3));
        CHECK(c.Gq_cp == doctest::Approx(3.145e8).epsilon(2e-2));
    }
    SUBCASE("unit fluctuation and no squeezing halves the bare coupling") {
        const auto c = cp_effective_couplings(8.0, 1.0, 12.0, 34.0, 0.0, 0.0);
        CHECK(c.x_zpf == doctest::Approx(1.0));
        CHECK(c.Gq_cp == doctest::Approx(6.0));
        CHECK(c.Gm_cp == doctest::Approx(17.0));
    }
    SUBCASE("at or beyond criticality is rejected") {
        CHECK_THROWS_AS(cp_effective_couplings(1.0, 0.0, 1.0, 1.0, 0.0, 0.0), DomainError);
        CHECK_THROWS_AS(cp_effective_couplings(1.0, -1.0, 1.0, 1.0, 0.0, 0.0), DomainError);
    }
}

TEST_CASE("effective spin-magnon parameters") {
    const double G = 3.1416e8;
    SUBCASE("ten-to-one detuning gives a tenth of the coupling") {
        const auto e = effective_spin_magnon(G, G, 10.0 * G, 10.0 * G, 0.0, 0.0);
        CHECK(e.zeta_q == doctest::Approx(0.1));
        CHECK(e.G_eff == doctest::Approx(0.1 * G));
        CHECK(e.stark_shift == doctest::Approx(0.2 * G));
        CHECK(e.dispersive_ok);
    }
    SUBCASE("one polariton shifts the spin by three zeta couplings") {
        const auto e = effective_spin_magnon(G, G, 10.0 * G, 10.0 * G, 0.0, 1.0);
        CHECK(e.Delta_q_eff == doctest::Approx(10.3 * G).epsilon(1e-12));
        CHECK(e.Delta_m_eff == doctest::Approx(10.1 * G).epsilon(1e-12));
    }
    SUBCASE("zero coupling decouples everything") {
        const auto e = effective_spin_magnon(0.0, G, 10.0 * G, 10.0 * G, 0.0, 0.0);
        CHECK(e.zeta_q == 0.0);
        CHECK(e.stark_shift == 0.0);
        CHECK(e.G_eff == doctest::Approx(0.5 * G * 0.0));
        CHECK(e.G_eff == 0.0);
    }
    SUBCASE("large zeta is returned but flagged") {
        const auto e = effective_spin_magnon(G, G, 1.5 * G, 1.5 * G, 0.0, 0.0);
        CHECK_FALSE(e.dispersive_ok);
        CHECK(e.zeta_q == doctest::Approx(1.0 / 1.5));
    }
}

TEST_CASE("spin-cavity coupling estimate") {
    const double omega = angular(2e9);
    const double L = 2e-9;
    SUBCASE("frozen baseline from an independent constant-by-constant evaluation") {
        // I_rms = sqrt(hbar w / 2L); B = mu0 I / (2 pi d); g = 2 g_e mu_B B / hbar
        const double hbar = 1.054571817e-34;
        const double I_rms = std::sqrt(hbar * omega / (2.0 * L));
        const double B_50um = 1.25663706212e-6 * I_rms / (two_pi * 50e-6);
        const double expect_50um = 2.0 * 2.00231930436256 * 9.2740100783e-24 * B_50um / hbar;
        CHECK(estimate_spin_cavity_coupling(50e-6, omega, L) ==
              doctest::Approx(expect_50um).epsilon(1e-12));
        // about 2 pi x 4.1 Hz; the regression baseline at 50 nm is 1000x that
        CHECK(expect_50um / two_pi == doctest::Approx(4.08).epsilon(2e-2));
        CHECK(estimate_spin_cavity_coupling(50e-9, omega, L) ==
              doctest::Approx(1000.0 * expect_50um).epsilon(1e-12));
    }
    SUBCASE("inverse-distance scaling") {
        const double g1 = estimate_spin_cavity_coupling(1e-5, omega, L);
        const double g2 = estimate_spin_cavity_coupling(2e-5, omega, L);
        CHECK(g1 == doctest::Approx(2.0 * g2).epsilon(1e-12));
    }
    SUBCASE("joint sqrt(omega/L)/d scaling") {
        const double g = estimate_spin_cavity_coupling(1e-5, omega, L);
        CHECK(estimate_spin_cavity_coupling(1e-5, 4.0 * omega, L) ==
              doctest::Approx(2.0 * g).epsilon(1e-12));
        CHECK(estimate_spin_cavity_coupling(1e-5, omega, 4.0 * L) ==
              doctest::Approx(0.5 * g).epsilon(1e-12));
        CHECK(estimate_spin_cavity_coupling(2e-5, 4.0 * omega, 4.0 * L) ==
              doctest::Approx(0.5 * g).epsilon(1e-12));
    }
}

TEST_CASE("full cascade at the canonical working point") {
    const auto res = derive_cascade(canonical_phys(), canonical_opts());
    const DerivedParams& d = res.derived;
    CHECK(d.chi_a == doctest::Approx(-1.2566e8).epsilon(1e-3));
    CHECK(d.r_a == doctest::Approx(2.649).epsilon(5e-3));
    CHECK(d.W_c == doctest::Approx(8.886e5).epsilon(1e-2));
    CHECK(d.x_zpf == doctest::Approx(353.55).epsilon(5e-3));
    CHECK(d.Gq_cp == doctest::Approx(3.145e8).epsilon(2e-2));
    CHECK(d.G_eff == doctest::Approx(3.145e7).epsilon(2e-2));
    CHECK(d.stark_shift == doctest::Approx(0.2 * d.Gq_cp).epsilon(1e-9));
    CHECK(res.regime.all_required_pass());

    SUBCASE("determinism: identical inputs give bit-identical outputs") {
        const auto res2 = derive_cascade(canonical_phys(), canonical_opts());
        CHECK(res2.derived.chi_a == d.chi_a);
        CHECK(res2.derived.r_a == d.r_a);
        CHECK(res2.derived.G_sq == d.G_sq);
        CHECK(res2.derived.G_sq_eff == d.G_sq_eff);
        CHECK(res2.derived.G_eff == d.G_eff);
        CHECK(res2.derived.Delta_q_eff == d.Delta_q_eff);
        CHECK(res2.derived.x_zpf == d.x_zpf);
    }
    SUBCASE("the reported effective coupling knob matches the requested Omega_A") {
        const auto s = polariton_spectrum(d.W_a, d.W_c, d.G_sq_eff);
        CHECK(std::sqrt(s.Omega_A_sq) == doctest::Approx(d.W_c / 1e6).epsilon(1e-9));
    }
    SUBCASE("zero drives zero every drive-enhanced coupling") {
        auto o = canonical_opts();
        o.G_a = 0.0;
        o.G_c = 0.0;
        const auto z = derive_cascade(canonical_phys(), o).derived;
        CHECK(z.G_a == 0.0);
        CHECK(z.G_ac == 0.0);
        CHECK(z.chi_a == 0.0);
        CHECK(z.r_a == 0.0);
        CHECK(z.G_sq == 0.0);
    }
}

TEST_CASE("regime report") {
    SUBCASE("canonical point passes every mandatory condition") {
        const auto res = derive_cascade(canonical_phys(), canonical_opts());
        for (const auto& c : res.regime.conditions) CHECK(c.pass);
        CHECK(res.regime.conditions.size() == 12);
    }
    SUBCASE("positive effective detuning fails the blue-detuning condition") {
        auto o = canonical_opts();
        o.Delta_a_p = angular(1e3);
        const auto res = derive_cascade(canonical_phys(), o);
        bool found = false;
        for (const auto& c : res.regime.conditions) {
            if (c.name == "Delta_a' < 0") {
                found = true;
                CHECK_FALSE(c.pass);
            }
        }
        CHECK(found);
        CHECK_FALSE(res.regime.all_required_pass());
    }
    SUBCASE("large zeta is flagged by the dispersive condition") {
        auto o = canonical_opts();
        o.Delta_q_over_Gq = 2.0;   // zeta_q = 0.5 above the 0.2 ceiling
        const auto res = derive_cascade(canonical_phys(), o);
        bool found = false;
        for (const auto& c : res.regime.conditions) {
            if (c.name == "zeta_q << 1") {
                found = true;
                CHECK_FALSE(c.pass);
            }
        }
        CHECK(found);
    }
}

TEST_CASE("cascade invariant: leading-order nonlinearity for small detunings") {
    const double wb = angular(1e9);
    for (const double Dp : {angular(-1e3), angular(-1e5), angular(-1e6)}) {
        for (const double G : {0.02 * wb, 0.1 * wb}) {
            const auto dc = dispersive_coefficients(Dp, Dp, wb, G, G);
            const double leading = -2.0 * G * G / wb;
            CHECK(std::abs(dc.chi_a - leading) <= 1e-3 * std::abs(dc.chi_a));
        }
    }
}

TEST_CASE("cascade invariant: squeezing grows with the nonlinearity ratio") {
    double prev = -1.0;
    for (const double ratio : {0.1, 0.5, 1.0, 5.0, 50.0, 5000.0}) {
        const double Dp = -1000.0;
        const auto r = squeezing_parameters(Dp, Dp, 0.5 * ratio * Dp, 0.5 * ratio * Dp);
        CHECK(r.r_a > prev);
        prev = r.r_a;
    }
}

TEST_CASE("cascade invariant: lower branch vanishes exactly at the critical coupling") {
    const double Ws[] = {0.3, 1.0, 4.7e5, 8.886e5, 2.2e9};
    for (const double W_a : Ws) {
        for (const double W_c : Ws) {
            const double G_cp = critical_coupling(W_a, W_c, 0.0).G_cp;
            const auto s = polariton_spectrum(W_a, W_c, G_cp);
            CHECK(std::abs(s.Omega_A_sq) <= 1e-10 * W_a * W_c);
        }
    }
}

TEST_CASE("cascade invariant: decay strictly raises the critical coupling") {
    const double W_a = 8.886e5, W_c = 7.1e5;
    double prev = critical_coupling(W_a, W_c, 0.0).G_cp_prime;
    CHECK(prev == critical_coupling(W_a, W_c, 0.0).G_cp);
    for (int k = 1; k <= 100; ++k) {
        const double K = k * 2e4;
        const double cur = critical_coupling(W_a, W_c, K).G_cp_prime;
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("cascade invariant: zeta scaling halves the effective coupling exactly") {
    const double G = 3.1416e8;
    const auto e10 = effective_spin_magnon(G, G, 10.0 * G, 10.0 * G, 0.0, 0.0);
    const auto e20 = effective_spin_magnon(G, G, 20.0 * G, 20.0 * G, 0.0, 0.0);
    CHECK(e10.G_eff == 2.0 * e20.G_eff);
}
