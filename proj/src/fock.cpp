#include "spinmag/fock.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "spinmag/errors.hpp"

namespace spinmag::fock {

SpaceSpec::SpaceSpec(std::vector<Subsystem> subsystems) : subs_(std::move(subsystems)) {
    if (subs_.empty()) throw std::invalid_argument("SpaceSpec: no subsystems");
    std::set<std::string> seen;
    for (auto& s : subs_) {
        if (!seen.insert(s.label).second) {
            throw std::invalid_argument("SpaceSpec: duplicate label " + s.label);
        }
        if (s.kind == SubsystemKind::two_level) {
            s.dim = 2;
        } else if (s.dim < 2) {
            throw std::invalid_argument("SpaceSpec: boson cutoff must be >= 2 for " + s.label);
        }
    }
    strides_.assign(subs_.size(), 1);
    for (int k = static_cast<int>(subs_.size()) - 2; k >= 0; --k) {
        strides_[static_cast<size_t>(k)] =
            strides_[static_cast<size_t>(k) + 1] * subs_[static_cast<size_t>(k) + 1].dim;
    }
    dim_ = strides_[0] * subs_[0].dim;
}

bool SpaceSpec::has(const std::string& label) const {
    for (const auto& s : subs_) {
        if (s.label == label) return true;
    }
    return false;
}

int SpaceSpec::index_of(const std::string& label) const {
    for (size_t k = 0; k < subs_.size(); ++k) {
        if (subs_[k].label == label) return static_cast<int>(k);
    }
    throw std::invalid_argument("SpaceSpec: unknown subsystem label " + label);
}

SpacePtr make_space(std::vector<Subsystem> subsystems) {
    return std::make_shared<const SpaceSpec>(std::move(subsystems));
}

bool is_hermitian(const Operator& op, double rel_tol) {
    const double scale = op.max_abs();
    if (scale == 0.0) return true;
    return (op.m - op.m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void DensityMatrix::validate() const {
    if (rho.rows() != space->dim() || rho.cols() != space->dim()) {
        throw std::invalid_argument("DensityMatrix: dimension mismatch with space");
    }
    const double scale = std::max(rho.cwiseAbs().maxCoeff(), 1e-300);
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10) {
        throw std::invalid_argument("DensityMatrix: trace not 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
}

Operator identity(const SpacePtr& space) {
    return {space, Eigen::MatrixXcd::Identity(space->dim(), space->dim())};
}

namespace {

using Factors = std::vector<std::pair<std::string, Eigen::MatrixXcd>>;

Eigen::MatrixXcd local_ladder(int dim) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::MatrixXcd local_number(int dim) {
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) n(i, i) = static_cast<double>(i);
    return n;
}

// Two-level basis: index 0 ground, index 1 excited.
Eigen::MatrixXcd local_pauli(Pauli which) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2, 2);
    switch (which) {
        case Pauli::z:
            s(0, 0) = -1.0;
            s(1, 1) = 1.0;
            break;
        case Pauli::plus:
            s(1, 0) = 1.0;
            break;
        case Pauli::minus:
            s(0, 1) = 1.0;
            break;
    }
    return s;
}

// target += coeff * (product of local factors, identity elsewhere), written
// in place so large builds never materialize per-term matrices.
void accumulate(Eigen::MatrixXcd& target, const SpaceSpec& sp, cplx coeff,
                const Factors& factors) {
    if (coeff == cplx{0.0, 0.0}) return;

    std::vector<int> support;
    for (const auto& [label, local] : factors) {
        const int k = sp.index_of(label);
        const int dim = sp.at(k).dim;
        if (local.rows() != dim || local.cols() != dim) {
            throw std::invalid_argument("embed: local operator dimension mismatch for " +
                                        label);
        }
        for (int prev : support) {
            if (prev == k) throw std::invalid_argument("embed: duplicate factor on " + label);
        }
        support.push_back(k);
    }

    // Full indices with every support digit at zero; row/col offsets are
    // added per local entry.
    std::vector<int> bases;
    for (int idx = 0; idx < sp.dim(); ++idx) {
        bool zeroed = true;
        for (int k : support) {
            if ((idx / sp.stride(k)) % sp.at(k).dim != 0) {
                zeroed = false;
                break;
            }
        }
        if (zeroed) bases.push_back(idx);
    }

    const int nf = static_cast<int>(factors.size());
    std::vector<int> row_digit(static_cast<size_t>(nf), 0);
    std::vector<int> col_digit(static_cast<size_t>(nf), 0);
    const auto advance = [&](std::vector<int>& digits) {
        for (int k = nf - 1; k >= 0; --k) {
            const int dim = sp.at(support[static_cast<size_t>(k)]).dim;
            if (++digits[static_cast<size_t>(k)] < dim) return true;
            digits[static_cast<size_t>(k)] = 0;
        }
        return false;
    };

    do {
        std::fill(col_digit.begin(), col_digit.end(), 0);
        do {
            cplx value = coeff;
            for (int k = 0; k < nf && value != cplx{0.0, 0.0}; ++k) {
                value *= factors[static_cast<size_t>(k)].second(
                    row_digit[static_cast<size_t>(k)], col_digit[static_cast<size_t>(k)]);
            }
            if (value != cplx{0.0, 0.0}) {
                int ro = 0, co = 0;
                for (int k = 0; k < nf; ++k) {
                    const int stride = sp.stride(support[static_cast<size_t>(k)]);
                    ro += row_digit[static_cast<size_t>(k)] * stride;
                    co += col_digit[static_cast<size_t>(k)] * stride;
                }
                for (int base : bases) target(base + ro, base + co) += value;
            }
        } while (advance(col_digit));
    } while (advance(row_digit));
}

// coeff * (x† y + h.c.) on two distinct subsystems.
void accumulate_exchange(Eigen::MatrixXcd& target, const SpaceSpec& sp, double coeff,
                         const std::string& la, const Eigen::MatrixXcd& x,
                         const std::string& lb, const Eigen::MatrixXcd& y) {
    accumulate(target, sp, coeff, {{la, x.adjoint()}, {lb, y}});
    accumulate(target, sp, coeff, {{la, x}, {lb, y.adjoint()}});
}

} // namespace

Operator embed(const SpacePtr& space,
               const std::vector<std::pair<std::string, Eigen::MatrixXcd>>& factors) {
    Operator out{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    accumulate(out.m, *space, cplx{1.0, 0.0}, factors);
    return out;
}

Operator ladder(const SpacePtr& space, const std::string& label) {
    const int k = space->index_of(label);
    return embed(space, {{label, local_ladder(space->at(k).dim)}});
}

Operator pauli(const SpacePtr& space, const std::string& label, Pauli which) {
    const int k = space->index_of(label);
    if (space->at(k).kind != SubsystemKind::two_level) {
        throw std::invalid_argument("pauli: subsystem " + label + " is not two-level");
    }
    return embed(space, {{label, local_pauli(which)}});
}

Operator number_op(const SpacePtr& space, const std::string& label) {
    const int k = space->index_of(label);
    return embed(space, {{label, local_number(space->at(k).dim)}});
}

StateVector basis_state(const SpacePtr& space, const std::map<std::string, int>& occupation) {
    int idx = 0;
    for (const auto& [label, n] : occupation) {
        const int k = space->index_of(label);
        if (n < 0 || n >= space->at(k).dim) {
            throw std::invalid_argument("basis_state: occupation out of range for " + label);
        }
        idx += n * space->stride(k);
    }
    StateVector psi{space, Eigen::VectorXcd::Zero(space->dim())};
    psi.v(idx) = 1.0;
    return psi;
}

DensityMatrix pure_density(const StateVector& psi) {
    return {psi.space, psi.v * psi.v.adjoint()};
}

// ----------------------------- Hamiltonian builders --------------------------

namespace {

void require_labels(const SpacePtr& space, std::initializer_list<const char*> labels,
                    const char* builder) {
    for (const char* l : labels) {
        if (!space->has(l)) {
            throw std::invalid_argument(std::string(builder) + ": space lacks subsystem " + l);
        }
    }
}

int dim_of(const SpacePtr& space, const std::string& label) {
    return space->at(space->index_of(label)).dim;
}

Eigen::MatrixXcd local_x(const SpacePtr& space, const std::string& label) {
    const Eigen::MatrixXcd a = local_ladder(dim_of(space, label));
    return a + a.adjoint().eval();
}

} // namespace

Operator build_H_L(const params::DerivedParams& d, const SpacePtr& space) {
    require_labels(space, {"q", "a", "b", "c", "m"}, "build_H_L");
    Operator H{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    const SpaceSpec& sp = *space;

    accumulate(H.m, sp, d.Delta_a_p, {{"a", local_number(dim_of(space, "a"))}});
    accumulate(H.m, sp, d.phys.omega_b, {{"b", local_number(dim_of(space, "b"))}});
    accumulate(H.m, sp, d.Delta_c_p, {{"c", local_number(dim_of(space, "c"))}});
    accumulate(H.m, sp, d.Delta_m, {{"m", local_number(dim_of(space, "m"))}});
    accumulate(H.m, sp, 0.5 * d.Delta_q, {{"q", local_pauli(Pauli::z)}});

    const Eigen::MatrixXcd xb = local_x(space, "b");
    accumulate(H.m, sp, d.G_a, {{"a", local_x(space, "a")}, {"b", xb}});
    accumulate(H.m, sp, d.G_c, {{"c", local_x(space, "c")}, {"b", xb}});

    accumulate_exchange(H.m, sp, d.phys.g_q, "a", local_ladder(dim_of(space, "a")), "q",
                        local_pauli(Pauli::minus));
    accumulate_exchange(H.m, sp, d.phys.g_m, "c", local_ladder(dim_of(space, "c")), "m",
                        local_ladder(dim_of(space, "m")));
    return H;
}

Operator build_H_T(const params::DerivedParams& d, const SpacePtr& space) {
    require_labels(space, {"q", "a", "c", "m"}, "build_H_T");
    if (space->has("b")) {
        throw std::invalid_argument("build_H_T: space must not contain the mechanical mode");
    }
    Operator H{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    const SpaceSpec& sp = *space;

    accumulate(H.m, sp, d.Delta_a_p, {{"a", local_number(dim_of(space, "a"))}});
    accumulate(H.m, sp, d.Delta_c_p, {{"c", local_number(dim_of(space, "c"))}});
    accumulate(H.m, sp, d.Delta_m, {{"m", local_number(dim_of(space, "m"))}});
    accumulate(H.m, sp, 0.5 * d.Delta_q, {{"q", local_pauli(Pauli::z)}});

    const Eigen::MatrixXcd xa = local_x(space, "a");
    const Eigen::MatrixXcd xc = local_x(space, "c");
    accumulate(H.m, sp, d.G_ac, {{"a", xa}, {"c", xc}});
    accumulate(H.m, sp, 0.5 * d.chi_a, {{"a", (xa * xa).eval()}});
    accumulate(H.m, sp, 0.5 * d.chi_c, {{"c", (xc * xc).eval()}});

    accumulate_exchange(H.m, sp, d.phys.g_q, "a", local_ladder(dim_of(space, "a")), "q",
                        local_pauli(Pauli::minus));
    accumulate_exchange(H.m, sp, d.phys.g_m, "c", local_ladder(dim_of(space, "c")), "m",
                        local_ladder(dim_of(space, "m")));
    return H;
}

Operator build_H_squeezed(const params::DerivedParams& d, const SpacePtr& space,
                          const SqueezeFormOptions& opts) {
    require_labels(space, {"q", "a", "c", "m"}, "build_H_squeezed");
    Operator H{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    const SpaceSpec& sp = *space;

    accumulate(H.m, sp, d.W_a, {{"a", local_number(dim_of(space, "a"))}});
    accumulate(H.m, sp, d.W_c, {{"c", local_number(dim_of(space, "c"))}});
    accumulate(H.m, sp, d.Delta_m, {{"m", local_number(dim_of(space, "m"))}});
    accumulate(H.m, sp, 0.5 * d.Delta_q, {{"q", local_pauli(Pauli::z)}});

    const Eigen::MatrixXcd xa = local_x(space, "a");
    const Eigen::MatrixXcd xc = local_x(space, "c");
    accumulate(H.m, sp, d.G_sq_eff, {{"a", xa}, {"c", xc}});

    const Eigen::MatrixXcd a_local = local_ladder(dim_of(space, "a"));
    const Eigen::MatrixXcd c_local = local_ladder(dim_of(space, "c"));
    const Eigen::MatrixXcd m_local = local_ladder(dim_of(space, "m"));
    const Eigen::MatrixXcd sp_op = local_pauli(Pauli::plus);
    const Eigen::MatrixXcd sm_op = local_pauli(Pauli::minus);

    if (opts.rwa) {
        accumulate_exchange(H.m, sp, 0.5 * d.phys.g_q * std::exp(d.r_a), "a", a_local, "q",
                            sm_op);
        accumulate_exchange(H.m, sp, 0.5 * d.phys.g_m * std::exp(d.r_c), "c", c_local, "m",
                            m_local);
        return H;
    }

    // (g/2) e^{+r} (a† + a)(sigma+ + sigma-) plus, unless dropped, the
    // correction -(g/2) e^{-r} (a† - a)(sigma+ - sigma-); same pattern for
    // the magnon.
    const Eigen::MatrixXcd sx = (sp_op + sm_op).eval();
    const Eigen::MatrixXcd xm = (m_local + m_local.adjoint()).eval();
    accumulate(H.m, sp, 0.5 * d.phys.g_q * std::exp(d.r_a), {{"a", xa}, {"q", sx}});
    accumulate(H.m, sp, 0.5 * d.phys.g_m * std::exp(d.r_c), {{"c", xc}, {"m", xm}});

    if (!opts.drop_weak_terms) {
        const Eigen::MatrixXcd pa = (a_local.adjoint() - a_local).eval();
        const Eigen::MatrixXcd pc = (c_local.adjoint() - c_local).eval();
        const Eigen::MatrixXcd sy = (sp_op - sm_op).eval();
        const Eigen::MatrixXcd pm = (m_local.adjoint() - m_local).eval();
        accumulate(H.m, sp, -0.5 * d.phys.g_q * std::exp(-d.r_a), {{"a", pa}, {"q", sy}});
        accumulate(H.m, sp, -0.5 * d.phys.g_m * std::exp(-d.r_c), {{"c", pc}, {"m", pm}});
    }
    return H;
}

Operator build_H_polariton(const params::DerivedParams& d, const SpacePtr& space) {
    require_labels(space, {"q", "m", "A"}, "build_H_polariton");
    Operator H{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    const SpaceSpec& sp = *space;
    accumulate(H.m, sp, d.Delta_m, {{"m", local_number(dim_of(space, "m"))}});
    accumulate(H.m, sp, d.Omega_A, {{"A", local_number(dim_of(space, "A"))}});
    accumulate(H.m, sp, 0.5 * d.Delta_q, {{"q", local_pauli(Pauli::z)}});

    accumulate_exchange(H.m, sp, d.Gq_cp, "A", local_ladder(dim_of(space, "A")), "q",
                        local_pauli(Pauli::minus));
    accumulate_exchange(H.m, sp, d.Gm_cp, "A", local_ladder(dim_of(space, "A")), "m",
                        local_ladder(dim_of(space, "m")));
    return H;
}

Operator build_H_eff_smp(const params::DerivedParams& d, const SpacePtr& space) {
    require_labels(space, {"q", "m", "A"}, "build_H_eff_smp");
    Operator H{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    const SpaceSpec& sp = *space;
    accumulate(H.m, sp, d.Delta_m, {{"m", local_number(dim_of(space, "m"))}});
    accumulate(H.m, sp, d.Omega_A, {{"A", local_number(dim_of(space, "A"))}});
    accumulate(H.m, sp, 0.5 * d.Delta_q, {{"q", local_pauli(Pauli::z)}});

    Eigen::MatrixXcd nA_half = local_number(dim_of(space, "A"));
    nA_half.diagonal().array() += 0.5;
    accumulate(H.m, sp, d.Gq_cp * d.zeta_q, {{"A", nA_half}, {"q", local_pauli(Pauli::z)}});
    accumulate(H.m, sp, -d.Gm_cp * d.zeta_m, {{"A", local_number(dim_of(space, "A"))}});
    accumulate(H.m, sp, d.Gm_cp * d.zeta_m, {{"m", local_number(dim_of(space, "m"))}});

    accumulate_exchange(H.m, sp, d.G_eff, "m", local_ladder(dim_of(space, "m")), "q",
                        local_pauli(Pauli::minus));
    return H;
}

Operator build_H_eff(const params::DerivedParams& d, const SpacePtr& space) {
    require_labels(space, {"q", "m"}, "build_H_eff");
    Operator H{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    const SpaceSpec& sp = *space;
    accumulate(H.m, sp, d.Delta_m_eff, {{"m", local_number(dim_of(space, "m"))}});
    accumulate(H.m, sp, 0.5 * d.Delta_q_eff, {{"q", local_pauli(Pauli::z)}});
    accumulate_exchange(H.m, sp, d.G_eff, "m", local_ladder(dim_of(space, "m")), "q",
                        local_pauli(Pauli::minus));
    return H;
}

Operator build_H_decay_full(const params::DerivedParams& d,
                            const quadratic::DecayDressedCoeffs& coeffs,
                            const SpacePtr& space) {
    require_labels(space, {"q", "m", "A", "C"}, "build_H_decay_full");
    Operator H{space, Eigen::MatrixXcd::Zero(space->dim(), space->dim())};
    const SpaceSpec& sp = *space;
    accumulate(H.m, sp, d.Delta_m, {{"m", local_number(dim_of(space, "m"))}});
    accumulate(H.m, sp, d.Omega_A, {{"A", local_number(dim_of(space, "A"))}});
    accumulate(H.m, sp, d.Omega_C, {{"C", local_number(dim_of(space, "C"))}});
    accumulate(H.m, sp, 0.5 * d.Delta_q, {{"q", local_pauli(Pauli::z)}});

    const double Gq_a = d.phys.g_q * std::exp(d.r_a) * coeffs.abs_a_plus;
    const double Gq_c = d.phys.g_q * std::exp(d.r_a) * coeffs.abs_c_plus;
    const double Gm_a = -d.phys.g_m * std::exp(d.r_c) * coeffs.abs_a_plus;
    const double Gm_c = -d.phys.g_m * std::exp(d.r_c) * coeffs.abs_c_plus;
    const cplx pa = std::polar(1.0, coeffs.phi_a_plus);
    const cplx pc = std::polar(1.0, coeffs.phi_c_plus);

    const Eigen::MatrixXcd A_local = local_ladder(dim_of(space, "A"));
    const Eigen::MatrixXcd C_local = local_ladder(dim_of(space, "C"));
    const Eigen::MatrixXcd m_dag = local_ladder(dim_of(space, "m")).adjoint();
    const Eigen::MatrixXcd s_plus = local_pauli(Pauli::plus);

    // (G_q^a e^{i phi_a} A + G_q^c e^{i phi_c} C) sigma+ + h.c., and the
    // magnon line with m†.
    const auto add_pair = [&](cplx coeff, const std::string& mode,
                              const Eigen::MatrixXcd& mode_op, const std::string& target,
                              const Eigen::MatrixXcd& target_op) {
        accumulate(H.m, sp, coeff, {{mode, mode_op}, {target, target_op}});
        accumulate(H.m, sp, std::conj(coeff),
                   {{mode, mode_op.adjoint()}, {target, target_op.adjoint()}});
    };
    add_pair(Gq_a * pa, "A", A_local, "q", s_plus);
    add_pair(Gq_c * pc, "C", C_local, "q", s_plus);
    add_pair(Gm_a * pa, "A", A_local, "m", m_dag);
    add_pair(Gm_c * pc, "C", C_local, "m", m_dag);
    return H;
}

void write_matrix_csv(const Operator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
    char buf[64];
    for (Eigen::Index i = 0; i < op.m.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.m.cols(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", op.m(i, j).real(), op.m(i, j).imag());
            out << buf;
        }
        out << '\n';
    }
}

} // namespace spinmag::fock
