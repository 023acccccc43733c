#pragma once

// Algebra of two-mode quadratic boson Hamiltonians
//   H = W_a a†a + W_c c†c + G (a†+a)(c†+c)
// over the operator vector v = (a, a†, c, c†): coefficient matrices,
// decay-dressed dynamical matrices and their closed-form eigenvalues,
// polariton (Bogoliubov) diagonalization, the near-critical mode
// projection, and stability classification.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace spinmag::quadratic {

using cplx = std::complex<double>;

struct QuadraticBosonForm {
    double W_a{0.0};   // mode frequency of a (rad/s)
    double W_c{0.0};   // mode frequency of c (rad/s)
    double G{0.0};     // cross coupling on (a†+a)(c†+c) (rad/s)
};

// Hermitian 4x4 coefficient matrix M with H = 1/2 Σ M_ij v_i† v_j + const.
Eigen::Matrix4cd coefficient_matrix(const QuadraticBosonForm& form);

struct PolaritonSpectrum {
    double Omega_A_sq{0.0};   // may be negative (unstable branch)
    double Omega_C_sq{0.0};
    double theta{0.0};        // mixing angle, in [0, pi/2)
};

// Eigenfrequency squares of the two polariton branches and the mixing angle.
// Resonant W_a = W_c gives theta = pi/4.
PolaritonSpectrum polariton_spectrum(double W_a, double W_c, double G);

// Coupling at which the lower branch crosses zero, without decay.
double critical_coupling_ideal(double W_a, double W_c);

// Decay-shifted critical coupling; reduces to the ideal value at K = 0.
double critical_coupling_damped(double W_a, double W_c, double K);

struct DynamicalMatrix {
    Eigen::Matrix4cd D;       // dv/dt = D v (noise terms dropped)
    double K_a{0.0};
    double K_c{0.0};
};

// Drift matrix of the quantum Langevin equations with per-mode decays on
// the diagonal. i*D carries the eigenfrequencies in its real parts and the
// effective decay rates in its imaginary parts.
DynamicalMatrix dynamical_matrix(const QuadraticBosonForm& form, double K_a, double K_c);

// Closed-form eigenvalues of i*D for equal decays K_a = K_c = K, in the
// order (Omega_A_minus, Omega_A_plus, Omega_C_minus, Omega_C_plus).
// For a negative lower-branch radicand the root is taken with Im <= 0 so
// that Omega_A_minus is the branch that destabilizes: at the damped
// critical coupling Omega_A_minus = 0 and Omega_A_plus = -2iK.
std::array<cplx, 4> closed_form_eigenvalues(double W_a, double W_c, double G, double K);

struct BogoliubovMap {
    // Rows of `forward` give (A, A†, C, C†) in terms of v = (a, a†, c, c†);
    // `inverse` maps back. Coefficients are real in the stable region.
    Eigen::Matrix4d forward;
    Eigen::Matrix4d inverse;
    double Omega_A{0.0};
    double Omega_C{0.0};
    double theta{0.0};
};

// Commutation metric [v_i, v_j] for the (a, a†, c, c†) ordering; a map B is
// symplectic when B Sigma B^T = Sigma.
Eigen::Matrix4d commutation_metric();

// Polariton transformation that diagonalizes the form to
// Omega_A A†A + Omega_C C†C. Requires the stable region Omega_A^2 > 0.
BogoliubovMap bogoliubov_diagonalize(const QuadraticBosonForm& form);

struct CpProjection {
    double a_coeff{0.0};   // a_s ≈ +x_zpf (A + A†)
    double c_coeff{0.0};   // c_s ≈ -x_zpf (A + A†)
    double x_zpf{0.0};
};

// Near-critical projection of the resonant pair onto the lower-branch
// position quadrature. Valid only for Omega_A much below W_c; the ratio
// threshold rejects configurations with Omega_A / W_c above it.
CpProjection cp_mode_projection(double W_c, double Omega_A, double ratio_threshold = 1e-2);

struct DecayDressedCoeffs {
    double abs_a_plus{0.0};
    double abs_a_minus{0.0};
    double abs_c_plus{0.0};
    double abs_c_minus{0.0};
    double phi_a_plus{0.0};    // phases in (-pi, pi]
    double phi_a_minus{0.0};
    double phi_c_plus{0.0};
    double phi_c_minus{0.0};
};

// Magnitudes and phases of the non-unitary transformation coefficients for
// the resonant equal-decay case, evaluated at the supplied complex branch
// frequencies. Omega at zero signals a degenerate normalization.
DecayDressedCoeffs decay_dressed_coeffs(double W, double K, cplx Omega_A, cplx Omega_C);

enum class Stability { stable, critical, unstable };

// Classification against the damped critical coupling (equal decays).
// Critical within 1e-9 relative of the damped critical value; at K = 0 the
// lower-branch frequency square decides.
Stability stability_classify(double W_a, double W_c, double G, double K);

const char* to_string(Stability s);

} // namespace spinmag::quadratic
