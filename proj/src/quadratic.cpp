#include "spinmag/quadratic.hpp"

#include <cmath>
#include <limits>

#include "spinmag/errors.hpp"

namespace spinmag::quadratic {

namespace {

constexpr cplx I{0.0, 1.0};

void require_positive_frequencies(double W_a, double W_c) {
    if (!(W_a > 0.0) || !(W_c > 0.0)) {
        throw DomainError("quadratic: mode frequencies must be positive");
    }
}

// Square root with Im <= 0 for negative real radicands, positive real
// branch otherwise. Keeps the '-' eigenvalue branch the one that loses its
// decay and destabilizes.
cplx lower_branch_sqrt(double radicand) {
    if (radicand >= 0.0) return cplx{std::sqrt(radicand), 0.0};
    return cplx{0.0, -std::sqrt(-radicand)};
}

} // namespace

Eigen::Matrix4cd coefficient_matrix(const QuadraticBosonForm& form) {
    const double G = form.G;
    Eigen::Matrix4cd M;
    M << form.W_a, 0.0, G, G,
         0.0, form.W_a, G, G,
         G, G, form.W_c, 0.0,
         G, G, 0.0, form.W_c;
    return M;
}

PolaritonSpectrum polariton_spectrum(double W_a, double W_c, double G) {
    require_positive_frequencies(W_a, W_c);
    const double sum = W_a * W_a + W_c * W_c;
    const double diff = W_a * W_a - W_c * W_c;
    const double root = std::sqrt(diff * diff + 16.0 * G * G * W_a * W_c);
    PolaritonSpectrum s;
    s.Omega_A_sq = 0.5 * (sum - root);
    s.Omega_C_sq = 0.5 * (sum + root);
    // Mixing angle from tan(2 theta) = 4|G| sqrt(W_a W_c) / (W_c^2 - W_a^2),
    // kept in [0, pi/2); the coupling sign is a gauge on mode c.
    s.theta = 0.5 * std::atan2(4.0 * std::abs(G) * std::sqrt(W_a * W_c), -diff);
    return s;
}

double critical_coupling_ideal(double W_a, double W_c) {
    require_positive_frequencies(W_a, W_c);
    return 0.5 * std::sqrt(W_a * W_c);
}

double critical_coupling_damped(double W_a, double W_c, double K) {
    require_positive_frequencies(W_a, W_c);
    if (K < 0.0) throw DomainError("quadratic: decay rate must be non-negative");
    if (K == 0.0) return critical_coupling_ideal(W_a, W_c);
    return 0.5 * std::sqrt((W_a * W_a + K * K) * (W_c * W_c + K * K) / (W_a * W_c));
}

DynamicalMatrix dynamical_matrix(const QuadraticBosonForm& form, double K_a, double K_c) {
    const cplx iG = I * form.G;
    DynamicalMatrix d;
    d.K_a = K_a;
    d.K_c = K_c;
    d.D << -K_a - I * form.W_a, 0.0, -iG, -iG,
           0.0, -K_a + I * form.W_a, iG, iG,
           -iG, -iG, -K_c - I * form.W_c, 0.0,
           iG, iG, 0.0, -K_c + I * form.W_c;
    return d;
}

std::array<cplx, 4> closed_form_eigenvalues(double W_a, double W_c, double G, double K) {
    require_positive_frequencies(W_a, W_c);
    const double sum = 0.5 * (W_a * W_a + W_c * W_c);
    const double diff = W_a * W_a - W_c * W_c;
    const double root = 0.5 * std::sqrt(diff * diff + 16.0 * G * G * W_a * W_c);
    const cplx sA = lower_branch_sqrt(sum - root);
    const cplx sC = lower_branch_sqrt(sum + root);
    const cplx shift = -I * K;
    return {shift - sA, shift + sA, shift - sC, shift + sC};
}

Eigen::Matrix4d commutation_metric() {
    Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
    S(0, 1) = 1.0;
    S(1, 0) = -1.0;
    S(2, 3) = 1.0;
    S(3, 2) = -1.0;
    return S;
}

BogoliubovMap bogoliubov_diagonalize(const QuadraticBosonForm& form) {
    const auto spec = polariton_spectrum(form.W_a, form.W_c, form.G);
    if (!(spec.Omega_A_sq > 0.0)) {
        throw DomainError("bogoliubov_diagonalize: lower branch unstable or critical, "
                          "no polariton map exists");
    }
    const double W_a = form.W_a;
    const double W_c = form.W_c;
    const double Omega_A = std::sqrt(spec.Omega_A_sq);
    const double Omega_C = std::sqrt(spec.Omega_C_sq);
    const double ct = std::cos(spec.theta);
    const double st = std::sin(spec.theta);

    const double cA = ct / (2.0 * std::sqrt(W_a * Omega_A));
    const double sA = st / (2.0 * std::sqrt(W_c * Omega_A));
    const double sC = st / (2.0 * std::sqrt(W_a * Omega_C));
    const double cC = ct / (2.0 * std::sqrt(W_c * Omega_C));

    BogoliubovMap map;
    map.Omega_A = Omega_A;
    map.Omega_C = Omega_C;
    map.theta = spec.theta;
    map.forward << cA * (Omega_A + W_a), cA * (Omega_A - W_a),
                   -sA * (Omega_A + W_c), -sA * (Omega_A - W_c),
                   cA * (Omega_A - W_a), cA * (Omega_A + W_a),
                   -sA * (Omega_A - W_c), -sA * (Omega_A + W_c),
                   sC * (Omega_C + W_a), sC * (Omega_C - W_a),
                   cC * (Omega_C + W_c), cC * (Omega_C - W_c),
                   sC * (Omega_C - W_a), sC * (Omega_C + W_a),
                   cC * (Omega_C - W_c), cC * (Omega_C + W_c);

    // Negative coupling is the gauge c -> -c: flip the c columns.
    if (form.G < 0.0) {
        map.forward.col(2) *= -1.0;
        map.forward.col(3) *= -1.0;
    }

    // Symplectic inverse: B^{-1} = -Sigma B^T Sigma.
    const Eigen::Matrix4d S = commutation_metric();
    map.inverse = -S * map.forward.transpose() * S;
    return map;
}

CpProjection cp_mode_projection(double W_c, double Omega_A, double ratio_threshold) {
    if (!(W_c > 0.0) || !(Omega_A > 0.0)) {
        throw DomainError("cp_mode_projection: requires W_c > 0 and Omega_A > 0");
    }
    if (Omega_A > ratio_threshold * W_c) {
        throw DomainError("cp_mode_projection: Omega_A/W_c above the validity threshold, "
                          "projection invalid");
    }
    CpProjection p;
    p.x_zpf = std::sqrt(W_c / (8.0 * Omega_A));
    p.a_coeff = p.x_zpf;
    p.c_coeff = -p.x_zpf;
    return p;
}

namespace {

// One coefficient pair for a complex branch frequency Omega. The magnitude
// follows the closed-form expression
//   (|W - iK|^2 + |Omega|^2 +- 2 (K Im(Omega) - W Re(Omega)))
//       / (2 |W - iK| |Omega|)
// and the phase is the principal argument of (W - iK +- Omega) /
// sqrt(2 (W - iK) Omega).
struct CoeffPair {
    double abs_plus, abs_minus, phi_plus, phi_minus;
};

CoeffPair dressed_pair(double W, double K, cplx Omega) {
    const double abs_O = std::abs(Omega);
    if (abs_O == 0.0) {
        throw DomainError("decay_dressed_coeffs: zero branch frequency gives a "
                          "degenerate normalization");
    }
    const cplx Wt{W, -K};
    const double abs_Wt = std::abs(Wt);
    const double cross = 2.0 * (K * Omega.imag() - W * Omega.real());
    const double denom = 2.0 * abs_Wt * abs_O;
    const cplx root = std::sqrt(2.0 * Wt * Omega);
    CoeffPair c;
    c.abs_plus = (abs_Wt * abs_Wt + abs_O * abs_O + cross) / denom;
    c.abs_minus = (abs_Wt * abs_Wt + abs_O * abs_O - cross) / denom;
    c.phi_plus = std::arg((Wt + Omega) / root);
    c.phi_minus = std::arg((Wt - Omega) / root);
    return c;
}

} // namespace

DecayDressedCoeffs decay_dressed_coeffs(double W, double K, cplx Omega_A, cplx Omega_C) {
    if (!(W > 0.0)) throw DomainError("decay_dressed_coeffs: requires W > 0");
    const CoeffPair a = dressed_pair(W, K, Omega_A);
    const CoeffPair c = dressed_pair(W, K, Omega_C);
    DecayDressedCoeffs out;
    out.abs_a_plus = a.abs_plus;
    out.abs_a_minus = a.abs_minus;
    out.phi_a_plus = a.phi_plus;
    out.phi_a_minus = a.phi_minus;
    out.abs_c_plus = c.abs_plus;
    out.abs_c_minus = c.abs_minus;
    out.phi_c_plus = c.phi_plus;
    out.phi_c_minus = c.phi_minus;
    return out;
}

Stability stability_classify(double W_a, double W_c, double G, double K) {
    const double G_crit = critical_coupling_damped(W_a, W_c, K);
    const double g = std::abs(G);
    if (std::abs(g - G_crit) <= 1e-9 * G_crit) return Stability::critical;
    if (K == 0.0) {
        return polariton_spectrum(W_a, W_c, G).Omega_A_sq > 0.0 ? Stability::stable
                                                                : Stability::unstable;
    }
    // Equal decays: the lower branch loses decay at rate sqrt(-Omega_A^2)
    // once the radicand goes negative; growth starts past K.
    const double rad = polariton_spectrum(W_a, W_c, G).Omega_A_sq;
    if (rad >= 0.0) return Stability::stable;
    return std::sqrt(-rad) < K ? Stability::stable : Stability::unstable;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::critical: return "critical";
        case Stability::unstable: return "unstable";
    }
    return "unknown";
}

} // namespace spinmag::quadratic
