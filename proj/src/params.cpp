#include "spinmag/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinmag/constants.hpp"
#include "spinmag/errors.hpp"
#include "spinmag/quadratic.hpp"

namespace spinmag::params {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ConfigError(std::string("non-finite parameter: ") + name);
}

void require_non_negative(double v, const char* name) {
    if (v < 0.0) throw ConfigError(std::string("negative parameter: ") + name);
}

} // namespace

void PhysicalParams::validate() const {
    const struct { double v; const char* n; } fields[] = {
        {omega_a, "omega_a"}, {omega_c, "omega_c"}, {omega_b, "omega_b"},
        {omega_q, "omega_q"}, {omega_m, "omega_m"}, {omega_a_d, "omega_a_d"},
        {omega_c_d, "omega_c_d"}, {F_a, "F_a"}, {F_c, "F_c"},
        {g_a, "g_a"}, {g_c, "g_c"}, {g_q, "g_q"}, {g_m, "g_m"},
        {kappa_a, "kappa_a"}, {kappa_b, "kappa_b"}, {kappa_c, "kappa_c"},
        {kappa_m, "kappa_m"}, {gamma_q, "gamma_q"}, {K, "K"},
    };
    for (const auto& f : fields) require_finite(f.v, f.n);
    require_non_negative(omega_a, "omega_a");
    require_non_negative(omega_c, "omega_c");
    require_non_negative(omega_b, "omega_b");
    require_non_negative(omega_q, "omega_q");
    require_non_negative(omega_m, "omega_m");
    require_non_negative(g_a, "g_a");
    require_non_negative(g_c, "g_c");
    require_non_negative(g_q, "g_q");
    require_non_negative(g_m, "g_m");
    require_non_negative(kappa_a, "kappa_a");
    require_non_negative(kappa_b, "kappa_b");
    require_non_negative(kappa_c, "kappa_c");
    require_non_negative(kappa_m, "kappa_m");
    require_non_negative(gamma_q, "gamma_q");
    require_non_negative(K, "K");
}

Detunings detunings(const PhysicalParams& p) {
    Detunings d;
    d.Delta_a = p.omega_a - p.omega_a_d;
    d.Delta_q = p.omega_q - p.omega_a_d;
    d.Delta_c = p.omega_c - p.omega_c_d;
    d.Delta_m = p.omega_m - p.omega_c_d;
    return d;
}

namespace {

struct Flow {
    cplx da, dc, db;
    double scale;   // largest contributing term magnitude
};

Flow langevin_flow(const PhysicalParams& p, const Detunings& det, cplx a, cplx c, cplx b) {
    const double disp = 2.0 * b.real();   // <b> + <b>*
    const cplx ta1 = -(p.kappa_a + I * (det.Delta_a + p.g_a * disp)) * a;
    const cplx ta2 = -I * p.F_a;
    const cplx tc1 = -(p.kappa_c + I * (det.Delta_c - p.g_c * disp)) * c;
    const cplx tc2 = -I * p.F_c;
    const cplx tb1 = -(p.kappa_b + I * p.omega_b) * b;
    const cplx tb2 = -I * (p.g_a * std::norm(a) - p.g_c * std::norm(c));
    Flow f;
    f.da = ta1 + ta2;
    f.dc = tc1 + tc2;
    f.db = tb1 + tb2;
    f.scale = std::max({std::abs(ta1), std::abs(ta2), std::abs(tc1), std::abs(tc2),
                        std::abs(tb1), std::abs(tb2)});
    return f;
}

} // namespace

double steady_state_residual(const PhysicalParams& p, cplx mean_a, cplx mean_c, cplx mean_b) {
    const Flow f = langevin_flow(p, detunings(p), mean_a, mean_c, mean_b);
    const double v = std::max({std::abs(f.da), std::abs(f.dc), std::abs(f.db)});
    if (f.scale == 0.0) return v;
    return v / f.scale;
}

SteadyState steady_state(const PhysicalParams& p, const SteadyStateOptions& opts) {
    if (!(p.kappa_a > 0.0 && p.kappa_b > 0.0 && p.kappa_c > 0.0)) {
        throw DomainError("steady_state: decay rates kappa_a, kappa_b, kappa_c must be "
                          "positive");
    }
    const Detunings det = detunings(p);
    SteadyState s;
    if (p.F_a == 0.0 && p.F_c == 0.0) return s;   // undriven fixed point

    cplx a{0.0}, c{0.0}, b{0.0};
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const double disp = 2.0 * b.real();
        const cplx a_new = -I * p.F_a / (p.kappa_a + I * (det.Delta_a + p.g_a * disp));
        const cplx c_new = -I * p.F_c / (p.kappa_c + I * (det.Delta_c - p.g_c * disp));
        const cplx b_new = -I * (p.g_a * std::norm(a_new) - p.g_c * std::norm(c_new)) /
                           (p.kappa_b + I * p.omega_b);
        a = (1.0 - opts.mixing) * a + opts.mixing * a_new;
        c = (1.0 - opts.mixing) * c + opts.mixing * c_new;
        b = (1.0 - opts.mixing) * b + opts.mixing * b_new;
        const double res = steady_state_residual(p, a, c, b);
        if (res < opts.tol) {
            s.mean_a = a;
            s.mean_c = c;
            s.mean_b = b;
            s.iterations = it;
            s.residual = res;
            return s;
        }
    }
    throw NumericalError("steady_state: no convergence after iteration cap; bistable or "
                         "unstable drive regime (supply G_a, G_c directly instead)");
}

LinearizedCouplings linearized_couplings(const PhysicalParams& p, cplx mean_a, cplx mean_c,
                                         cplx mean_b) {
    const Detunings det = detunings(p);
    const double disp = 2.0 * mean_b.real();
    LinearizedCouplings lc;
    lc.G_a = p.g_a * std::abs(mean_a);
    lc.G_c = p.g_c * std::abs(mean_c);
    lc.Delta_a_p = det.Delta_a + p.g_a * disp;
    lc.Delta_c_p = det.Delta_c - p.g_c * disp;
    return lc;
}

DispersiveCoefficients dispersive_coefficients(double Delta_a_p, double Delta_c_p,
                                               double omega_b, double G_a, double G_c) {
    const double scale = std::max({std::abs(Delta_a_p), std::abs(Delta_c_p), omega_b});
    const auto xi = [&](double Delta_p, double G, double sign) {
        const double denom = Delta_p + sign * omega_b;
        if (std::abs(denom) <= 1e-12 * scale) {
            throw DomainError("dispersive_coefficients: detuning resonant with the "
                              "mechanical mode, dispersive reduction invalid");
        }
        return -G / denom;
    };
    DispersiveCoefficients dc;
    dc.xi_a_p = xi(Delta_a_p, G_a, +1.0);
    dc.xi_a_m = xi(Delta_a_p, G_a, -1.0);
    dc.xi_c_p = xi(Delta_c_p, G_c, +1.0);
    dc.xi_c_m = xi(Delta_c_p, G_c, -1.0);
    dc.G_ac = 0.5 * (G_a * (dc.xi_c_p - dc.xi_c_m) + G_c * (dc.xi_a_p - dc.xi_a_m));
    dc.chi_a = G_a * (dc.xi_a_p - dc.xi_a_m);
    dc.chi_c = G_c * (dc.xi_c_p - dc.xi_c_m);
    return dc;
}

SqueezingParameters squeezing_parameters(double Delta_a_p, double Delta_c_p, double chi_a,
                                         double chi_c) {
    const auto r = [](double Delta_p, double chi, const char* cavity) {
        if (Delta_p == 0.0) {
            throw DomainError(std::string("squeezing_parameters: zero detuning for cavity ") +
                              cavity);
        }
        const double arg = 1.0 + 2.0 * chi / Delta_p;
        if (!(arg > 0.0)) {
            throw DomainError(std::string("squeezing_parameters: squeezing-frame breakdown "
                                          "for cavity ") + cavity +
                              " (1 + 2 chi/Delta' <= 0)");
        }
        return 0.25 * std::log(arg);
    };
    return {r(Delta_a_p, chi_a, "a"), r(Delta_c_p, chi_c, "c")};
}

SqueezedFrame squeezed_frame(double Delta_a_p, double Delta_c_p, double chi_a, double chi_c,
                             double r_a, double r_c, double G_ac) {
    const auto W = [](double Delta_p, double chi, const char* cavity) {
        const double rad = Delta_p * (Delta_p + chi);
        if (rad < 0.0) {
            throw DomainError(std::string("squeezed_frame: imaginary squeezed-mode "
                                          "frequency for cavity ") + cavity);
        }
        return std::sqrt(rad);
    };
    SqueezedFrame f;
    f.W_a = W(Delta_a_p, chi_a, "a");
    f.W_c = W(Delta_c_p, chi_c, "c");
    f.G_sq = G_ac * std::exp(r_a + r_c);
    return f;
}

PolaritonSpectrum polariton_spectrum(double W_a, double W_c, double G_sq) {
    const auto s = quadratic::polariton_spectrum(W_a, W_c, G_sq);
    return {s.Omega_A_sq, s.Omega_C_sq, s.theta};
}

CriticalCoupling critical_coupling(double W_a, double W_c, double K) {
    return {quadratic::critical_coupling_ideal(W_a, W_c),
            quadratic::critical_coupling_damped(W_a, W_c, K)};
}

CpCouplings cp_effective_couplings(double W_c, double Omega_A, double g_q, double g_m,
                                   double r_a, double r_c) {
    if (!(Omega_A > 0.0)) {
        throw DomainError("cp_effective_couplings: Omega_A <= 0, at or beyond criticality, "
                          "projection undefined");
    }
    CpCouplings c;
    c.x_zpf = std::sqrt(W_c / (8.0 * Omega_A));
    c.Gq_cp = 0.5 * g_q * std::exp(r_a) * c.x_zpf;
    c.Gm_cp = 0.5 * g_m * std::exp(r_c) * c.x_zpf;
    return c;
}

EffectiveSpinMagnon effective_spin_magnon(double Gq_cp, double Gm_cp, double Delta_q,
                                          double Delta_m, double Omega_A, double N_A) {
    if (Delta_q == Omega_A || Delta_m == Omega_A) {
        throw DomainError("effective_spin_magnon: detuning equals Omega_A, dispersive "
                          "elimination undefined");
    }
    EffectiveSpinMagnon e;
    e.zeta_q = Gq_cp / (Delta_q - Omega_A);
    e.zeta_m = Gm_cp / (Delta_m - Omega_A);
    e.G_eff = 0.5 * (Gq_cp * e.zeta_m + Gm_cp * e.zeta_q);
    e.Delta_q_eff = Delta_q + Gq_cp * e.zeta_q * (2.0 * N_A + 1.0);
    e.Delta_m_eff = Delta_m + Gm_cp * e.zeta_m;
    e.stark_shift = 2.0 * Gq_cp * e.zeta_q;
    e.dispersive_ok = std::abs(e.zeta_q) < 1.0 && std::abs(e.zeta_m) < 1.0;
    return e;
}

double estimate_spin_cavity_coupling(double distance, double omega_a, double inductance) {
    if (!(distance > 0.0) || !(inductance > 0.0)) {
        throw DomainError("estimate_spin_cavity_coupling: distance and inductance must be "
                          "positive");
    }
    using namespace codata;
    const double I_rms = std::sqrt(hbar * omega_a / (2.0 * inductance));
    const double B_rms = mu_0 * I_rms / (two_pi * distance);
    return 2.0 * g_e * mu_bohr * B_rms / hbar;
}

bool RegimeReport::all_required_pass() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const RegimeCondition& c) { return !c.required || c.pass; });
}

std::vector<std::string> RegimeReport::failed_names() const {
    std::vector<std::string> names;
    for (const auto& c : conditions) {
        if (c.required && !c.pass) names.push_back(c.name);
    }
    return names;
}

RegimeReport validate_regime(const DerivedParams& d, const RegimeThresholds& th) {
    RegimeReport rep;
    const auto dominates = [&](std::string name, double big, double small, double ratio) {
        RegimeCondition c;
        c.name = std::move(name);
        c.left = big;
        c.right = small;
        c.margin = small == 0.0 ? std::numeric_limits<double>::infinity()
                                : big / (ratio * small);
        c.pass = c.margin >= 1.0;
        rep.conditions.push_back(c);
    };
    const auto negative = [&](std::string name, double value) {
        RegimeCondition c;
        c.name = std::move(name);
        c.left = value;
        c.right = 0.0;
        c.margin = value < 0.0 ? 1.0 : 0.0;
        c.pass = value < 0.0;
        rep.conditions.push_back(c);
    };

    dominates("omega_b >> |Delta_a'|", d.phys.omega_b, std::abs(d.Delta_a_p), th.ratio_wb);
    dominates("omega_b >> |Delta_c'|", d.phys.omega_b, std::abs(d.Delta_c_p), th.ratio_wb);
    dominates("omega_b >> G_a", d.phys.omega_b, d.G_a, th.ratio_wb);
    dominates("omega_b >> G_c", d.phys.omega_b, d.G_c, th.ratio_wb);
    negative("Delta_a' < 0", d.Delta_a_p);
    negative("Delta_c' < 0", d.Delta_c_p);
    dominates("|chi_a| >> |Delta_a'|", std::abs(d.chi_a), std::abs(d.Delta_a_p), th.ratio_chi);
    dominates("|chi_c| >> |Delta_c'|", std::abs(d.chi_c), std::abs(d.Delta_c_p), th.ratio_chi);
    dominates("Delta_q >> g_q e^{r_a}/2", d.Delta_q,
              0.5 * d.phys.g_q * std::exp(d.r_a), th.ratio_gr);
    dominates("Delta_m >> g_m e^{r_c}/2", d.Delta_m,
              0.5 * d.phys.g_m * std::exp(d.r_c), th.ratio_gr);
    dominates("zeta_q << 1", 1.0, std::abs(d.zeta_q), 1.0 / th.zeta_max);
    dominates("zeta_m << 1", 1.0, std::abs(d.zeta_m), 1.0 / th.zeta_max);
    return rep;
}

CascadeResult derive_cascade(const PhysicalParams& p, const CascadeOptions& opts) {
    p.validate();
    DerivedParams d;
    d.phys = p;
    d.N_A = opts.N_A;

    const Detunings det = detunings(p);
    d.Delta_a = det.Delta_a;
    d.Delta_c = det.Delta_c;
    d.Delta_q = det.Delta_q;
    d.Delta_m = det.Delta_m;

    // Linearized couplings and shifted detunings: direct overrides win,
    // otherwise they come from the steady state.
    if (opts.G_a && opts.G_c) {
        d.G_a = *opts.G_a;
        d.G_c = *opts.G_c;
        d.Delta_a_p = opts.Delta_a_p.value_or(det.Delta_a);
        d.Delta_c_p = opts.Delta_c_p.value_or(det.Delta_c);
    } else {
        const SteadyState s = steady_state(p);
        d.mean_a = s.mean_a;
        d.mean_c = s.mean_c;
        d.mean_b = s.mean_b;
        const LinearizedCouplings lc = linearized_couplings(p, s.mean_a, s.mean_c, s.mean_b);
        d.G_a = opts.G_a.value_or(lc.G_a);
        d.G_c = opts.G_c.value_or(lc.G_c);
        d.Delta_a_p = opts.Delta_a_p.value_or(lc.Delta_a_p);
        d.Delta_c_p = opts.Delta_c_p.value_or(lc.Delta_c_p);
    }

    const DispersiveCoefficients dc =
        dispersive_coefficients(d.Delta_a_p, d.Delta_c_p, p.omega_b, d.G_a, d.G_c);
    d.xi_a_p = dc.xi_a_p;
    d.xi_a_m = dc.xi_a_m;
    d.xi_c_p = dc.xi_c_p;
    d.xi_c_m = dc.xi_c_m;
    d.G_ac = dc.G_ac;
    d.chi_a = dc.chi_a;
    d.chi_c = dc.chi_c;

    const SqueezingParameters sq =
        squeezing_parameters(d.Delta_a_p, d.Delta_c_p, d.chi_a, d.chi_c);
    d.r_a = sq.r_a;
    d.r_c = sq.r_c;

    const SqueezedFrame sf =
        squeezed_frame(d.Delta_a_p, d.Delta_c_p, d.chi_a, d.chi_c, d.r_a, d.r_c, d.G_ac);
    d.W_a = sf.W_a;
    d.W_c = sf.W_c;
    d.G_sq = sf.G_sq;

    const CriticalCoupling cc = critical_coupling(d.W_a, d.W_c, p.K);
    d.G_cp = cc.G_cp;
    d.G_cp_prime = cc.G_cp_prime;

    // The coupling knob: explicit fraction of the critical value, or implied
    // by the Omega_A ratio (with the matching coupling reported).
    if (opts.G_frac_of_Gcp) {
        d.G_sq_eff = *opts.G_frac_of_Gcp * d.G_cp;
        const PolaritonSpectrum ps = polariton_spectrum(d.W_a, d.W_c, d.G_sq_eff);
        d.Omega_A_sq = ps.Omega_A_sq;
        d.Omega_C_sq = ps.Omega_C_sq;
        d.theta = ps.theta;
    } else {
        if (!(opts.Wc_over_OmegaA > 0.0)) {
            throw ConfigError("derive_cascade: Wc_over_OmegaA must be positive");
        }
        const double Omega_A = d.W_c / opts.Wc_over_OmegaA;
        const double sum = d.W_a * d.W_a + d.W_c * d.W_c;
        const double diff = d.W_a * d.W_a - d.W_c * d.W_c;
        const double root = sum - 2.0 * Omega_A * Omega_A;   // value of the inner radical
        if (root < std::abs(diff)) {
            throw DomainError("derive_cascade: requested Omega_A unreachable for these "
                              "squeezed-mode frequencies");
        }
        d.G_sq_eff = std::sqrt((root * root - diff * diff) / (16.0 * d.W_a * d.W_c));
        d.Omega_A_sq = Omega_A * Omega_A;
        d.Omega_C_sq = 0.5 * (sum + root);
        d.theta = quadratic::polariton_spectrum(d.W_a, d.W_c, d.G_sq_eff).theta;
    }
    d.Omega_A = d.Omega_A_sq >= 0.0 ? std::sqrt(d.Omega_A_sq) : nan;
    d.Omega_C = d.Omega_C_sq >= 0.0 ? std::sqrt(d.Omega_C_sq) : nan;

    if (d.Omega_A_sq > 0.0) {
        const CpCouplings cp =
            cp_effective_couplings(d.W_c, d.Omega_A, p.g_q, p.g_m, d.r_a, d.r_c);
        d.x_zpf = cp.x_zpf;
        d.Gq_cp = cp.Gq_cp;
        d.Gm_cp = cp.Gm_cp;
    } else {
        d.x_zpf = d.Gq_cp = d.Gm_cp = nan;
    }

    // Spin/magnon detunings: direct override, then the ratio knob against
    // the enhanced couplings, then the drive-frame values.
    if (opts.Delta_q) {
        d.Delta_q = *opts.Delta_q;
    } else if (opts.Delta_q_over_Gq && std::isfinite(d.Gq_cp)) {
        d.Delta_q = *opts.Delta_q_over_Gq * d.Gq_cp;
    }
    if (opts.Delta_m) {
        d.Delta_m = *opts.Delta_m;
    } else if (opts.Delta_m_over_Gm && std::isfinite(d.Gm_cp)) {
        d.Delta_m = *opts.Delta_m_over_Gm * d.Gm_cp;
    }

    if (std::isfinite(d.Gq_cp) && std::isfinite(d.Gm_cp)) {
        const EffectiveSpinMagnon e = effective_spin_magnon(d.Gq_cp, d.Gm_cp, d.Delta_q,
                                                            d.Delta_m, d.Omega_A, d.N_A);
        d.zeta_q = e.zeta_q;
        d.zeta_m = e.zeta_m;
        d.G_eff = e.G_eff;
        d.Delta_q_eff = e.Delta_q_eff;
        d.Delta_m_eff = e.Delta_m_eff;
        d.stark_shift = e.stark_shift;
        d.dispersive_ok = e.dispersive_ok;
    } else {
        d.zeta_q = d.zeta_m = d.G_eff = d.Delta_q_eff = d.Delta_m_eff = d.stark_shift = nan;
        d.dispersive_ok = false;
    }

    CascadeResult res;
    res.derived = d;
    res.regime = validate_regime(d, opts.thresholds);
    return res;
}

} // namespace spinmag::params
