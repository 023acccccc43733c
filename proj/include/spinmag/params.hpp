#pragma once

// Raw physical parameters of the two-cavity optomechanical interface and
// the full cascade of derived quantities: drive-frame detunings, the
// deterministic steady state, linearized couplings, mechanically induced
// dispersive coefficients, squeezing parameters, polariton spectra,
// critical couplings, the near-critical enhanced couplings, and the
// effective spin–magnon Hamiltonian parameters.
//
// Everything here is a pure function of its inputs; all frequencies and
// rates are angular (rad/s).

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace spinmag::params {

using cplx = std::complex<double>;

struct PhysicalParams {
    double omega_a{0.0}, omega_c{0.0};      // cavity frequencies
    double omega_b{0.0};                    // mechanical frequency
    double omega_q{0.0};                    // spin transition frequency
    double omega_m{0.0};                    // magnon frequency
    double omega_a_d{0.0}, omega_c_d{0.0};  // drive frequencies
    double F_a{0.0}, F_c{0.0};              // drive amplitudes
    double g_a{0.0}, g_c{0.0};              // single-photon optomechanical couplings
    double g_q{0.0}, g_m{0.0};              // spin-cavity and magnon-cavity couplings
    double kappa_a{0.0}, kappa_b{0.0}, kappa_c{0.0};
    double kappa_m{0.0};                    // magnon decay
    double gamma_q{0.0};                    // spin transversal relaxation
    double K{0.0};                          // squeezed-cavity decay (equal for both)

    // Throws ConfigError on non-finite values or negative couplings/rates.
    void validate() const;
};

struct Detunings {
    double Delta_a{0.0}, Delta_c{0.0}, Delta_q{0.0}, Delta_m{0.0};
};

// Drive-frame detunings: a and q share the drive on cavity a, c and m share
// the drive on cavity c.
Detunings detunings(const PhysicalParams& p);

struct SteadyState {
    cplx mean_a{0.0}, mean_c{0.0}, mean_b{0.0};
    int iterations{0};
    double residual{0.0};   // flow magnitude relative to the largest term
};

struct SteadyStateOptions {
    double mixing{0.5};
    int max_iterations{10000};
    double tol{1e-12};
};

// Fixed point of the deterministic Langevin flow with drives, solved by
// damped iteration. Non-convergence signals a bistable or unstable drive
// regime; callers may instead supply G_a, G_c directly.
SteadyState steady_state(const PhysicalParams& p, const SteadyStateOptions& opts = {});

// Flow residual of a candidate fixed point, relative to the largest term.
double steady_state_residual(const PhysicalParams& p, cplx mean_a, cplx mean_c, cplx mean_b);

struct LinearizedCouplings {
    double G_a{0.0}, G_c{0.0};          // real non-negative by phase convention
    double Delta_a_p{0.0}, Delta_c_p{0.0};
};

// Enhanced optomechanical couplings G_a = g_a<a>, G_c = -g_c<c> with phases
// absorbed so both are real non-negative, and the displacement-shifted
// detunings (+ shift for cavity a, - for cavity c).
LinearizedCouplings linearized_couplings(const PhysicalParams& p, cplx mean_a, cplx mean_c,
                                         cplx mean_b);

struct DispersiveCoefficients {
    double xi_a_p{0.0}, xi_a_m{0.0};   // xi^(+), xi^(-) for cavity a
    double xi_c_p{0.0}, xi_c_m{0.0};
    double G_ac{0.0};                  // mechanically induced cavity-cavity coupling
    double chi_a{0.0}, chi_c{0.0};     // second-order nonlinearity coefficients
};

// Second-order coefficients of the mechanical-mode elimination. A detuning
// at resonance with the mechanical mode invalidates the reduction.
DispersiveCoefficients dispersive_coefficients(double Delta_a_p, double Delta_c_p,
                                               double omega_b, double G_a, double G_c);

struct SqueezingParameters {
    double r_a{0.0}, r_c{0.0};
};

// r = (1/4) ln(1 + 2 chi / Delta'); an argument at or below zero signals
// squeezing-frame breakdown for that cavity.
SqueezingParameters squeezing_parameters(double Delta_a_p, double Delta_c_p, double chi_a,
                                         double chi_c);

struct SqueezedFrame {
    double W_a{0.0}, W_c{0.0};   // squeezed-mode frequencies
    double G_sq{0.0};            // G_ac exp(r_a + r_c)
};

SqueezedFrame squeezed_frame(double Delta_a_p, double Delta_c_p, double chi_a, double chi_c,
                             double r_a, double r_c, double G_ac);

struct PolaritonSpectrum {
    double Omega_A_sq{0.0};
    double Omega_C_sq{0.0};
    double theta{0.0};
};

PolaritonSpectrum polariton_spectrum(double W_a, double W_c, double G_sq);

struct CriticalCoupling {
    double G_cp{0.0};
    double G_cp_prime{0.0};
};

CriticalCoupling critical_coupling(double W_a, double W_c, double K);

struct CpCouplings {
    double x_zpf{0.0};
    double Gq_cp{0.0};
    double Gm_cp{0.0};
};

// Zero-point fluctuation of the lower-branch polariton near criticality and
// the squeezing-enhanced spin/magnon couplings to it. Omega_A <= 0 signals
// at-or-beyond criticality where the projection is undefined.
CpCouplings cp_effective_couplings(double W_c, double Omega_A, double g_q, double g_m,
                                   double r_a, double r_c);

struct EffectiveSpinMagnon {
    double zeta_q{0.0}, zeta_m{0.0};
    double G_eff{0.0};
    double Delta_q_eff{0.0}, Delta_m_eff{0.0};
    double stark_shift{0.0};       // single-polariton Stark shift 2 Gq zeta_q
    bool dispersive_ok{true};      // false when |zeta| >= 1 (values still returned)
};

// Second-order elimination of the lower-branch polariton.
EffectiveSpinMagnon effective_spin_magnon(double Gq_cp, double Gm_cp, double Delta_q,
                                          double Delta_m, double Omega_A, double N_A);

// Spin-cavity coupling estimate from the rms vacuum current of a lumped
// resonator: g_q = 2 g_e mu_B B_rms / hbar with B_rms = mu_0 I_rms/(2 pi d),
// I_rms = sqrt(hbar omega_a / (2 L_a)). Inputs in SI (m, rad/s, H).
double estimate_spin_cavity_coupling(double distance, double omega_a, double inductance);

struct RegimeThresholds {
    double ratio_wb{10.0};     // omega_b dominance over detunings/couplings
    double ratio_chi{100.0};   // |chi| dominance over |Delta'|
    double ratio_gr{10.0};     // detuning dominance over g e^r / 2
    double zeta_max{0.2};      // dispersive-parameter ceiling
};

struct RegimeCondition {
    std::string name;
    double left{0.0};
    double right{0.0};
    double margin{0.0};   // >= 1 means pass, with the threshold folded in
    bool pass{false};
    bool required{true};
};

struct RegimeReport {
    std::vector<RegimeCondition> conditions;
    bool all_required_pass() const;
    std::vector<std::string> failed_names() const;
};

struct DerivedParams {
    PhysicalParams phys;   // resolved inputs, carried for builders and metadata

    double Delta_a{0.0}, Delta_c{0.0}, Delta_q{0.0}, Delta_m{0.0};
    cplx mean_a{0.0}, mean_c{0.0}, mean_b{0.0};
    double Delta_a_p{0.0}, Delta_c_p{0.0};
    double G_a{0.0}, G_c{0.0};
    double xi_a_p{0.0}, xi_a_m{0.0}, xi_c_p{0.0}, xi_c_m{0.0};
    double G_ac{0.0};
    double chi_a{0.0}, chi_c{0.0};
    double r_a{0.0}, r_c{0.0};
    double W_a{0.0}, W_c{0.0};
    double G_sq{0.0};        // cascade value G_ac e^(r_a + r_c)
    double G_sq_eff{0.0};    // value actually used downstream (override or knob)
    double theta{0.0};
    double Omega_A_sq{0.0}, Omega_C_sq{0.0};
    double Omega_A{0.0}, Omega_C{0.0};   // NaN when the square is negative
    double G_cp{0.0}, G_cp_prime{0.0};
    double x_zpf{0.0};
    double Gq_cp{0.0}, Gm_cp{0.0};
    double zeta_q{0.0}, zeta_m{0.0};
    double G_eff{0.0};
    double Delta_q_eff{0.0}, Delta_m_eff{0.0};
    double stark_shift{0.0};
    double N_A{0.0};
    bool dispersive_ok{true};
};

// Knobs resolving quantities the raw parameters do not pin down. The
// squeezed-frame coupling used downstream is an independent knob: either a
// fraction of the critical coupling, or implied by the Omega_A ratio (the
// corresponding coupling is reported in G_sq_eff).
struct CascadeOptions {
    std::optional<double> Delta_a_p, Delta_c_p;   // direct detuning overrides (rad/s)
    std::optional<double> G_a, G_c;               // direct linearized couplings (rad/s)
    std::optional<double> Delta_q, Delta_m;       // direct spin/magnon detunings (rad/s)
    std::optional<double> Delta_q_over_Gq, Delta_m_over_Gm;
    std::optional<double> G_frac_of_Gcp;          // sets Omega_A via the spectrum
    double Wc_over_OmegaA{1e6};                   // default Omega_A knob
    double N_A{0.0};
    RegimeThresholds thresholds{};
};

struct CascadeResult {
    DerivedParams derived;
    RegimeReport regime;
};

// Runs the whole reduction chain. Deterministic: identical inputs produce
// bit-identical outputs.
CascadeResult derive_cascade(const PhysicalParams& p, const CascadeOptions& opts = {});

// The regime diagnostics alone, for a precomputed cascade.
RegimeReport validate_regime(const DerivedParams& d, const RegimeThresholds& thresholds = {});

} // namespace spinmag::params
