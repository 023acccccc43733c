#pragma once

// Truncated tensor-product Fock spaces and dense operators on them, plus
// builders for every Hamiltonian level of the reduction chain: the full
// linearized model, the mechanically eliminated model, the squeezed-frame
// model, the polariton-level models, and the decay-dressed two-polariton
// model.

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinmag/params.hpp"
#include "spinmag/quadratic.hpp"

namespace spinmag::fock {

using cplx = std::complex<double>;

enum class SubsystemKind { boson, two_level };

struct Subsystem {
    std::string label;
    SubsystemKind kind{SubsystemKind::boson};
    int dim{2};   // Fock cutoff for bosons (>= 2), 2 for two-level systems
};

class SpaceSpec {
public:
    explicit SpaceSpec(std::vector<Subsystem> subsystems);

    int dim() const { return dim_; }
    int count() const { return static_cast<int>(subs_.size()); }
    const Subsystem& at(int k) const { return subs_[static_cast<size_t>(k)]; }
    const std::vector<Subsystem>& subsystems() const { return subs_; }

    bool has(const std::string& label) const;
    int index_of(const std::string& label) const;   // throws on unknown label
    int stride(int k) const { return strides_[static_cast<size_t>(k)]; }

private:
    std::vector<Subsystem> subs_;
    std::vector<int> strides_;   // last subsystem varies fastest
    int dim_{1};
};

using SpacePtr = std::shared_ptr<const SpaceSpec>;

SpacePtr make_space(std::vector<Subsystem> subsystems);

struct Operator {
    SpacePtr space;
    Eigen::MatrixXcd m;

    Operator adjoint() const { return {space, m.adjoint()}; }
    double max_abs() const { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
};

bool is_hermitian(const Operator& op, double rel_tol = 1e-12);

struct StateVector {
    SpacePtr space;
    Eigen::VectorXcd v;

    double norm() const { return v.norm(); }
};

struct DensityMatrix {
    SpacePtr space;
    Eigen::MatrixXcd rho;

    // Hermitian within 1e-10, unit trace within 1e-10, smallest eigenvalue
    // above -1e-8.
    void validate() const;
};

Operator identity(const SpacePtr& space);

// Annihilation operator of a bosonic subsystem, embedded with identities on
// all other factors.
Operator ladder(const SpacePtr& space, const std::string& label);

enum class Pauli { z, plus, minus };

Operator pauli(const SpacePtr& space, const std::string& label, Pauli which);

// Occupation operator: photon/phonon number for bosons, sigma+ sigma- for
// two-level subsystems.
Operator number_op(const SpacePtr& space, const std::string& label);

// Product of local operators on distinct subsystems, identity elsewhere.
Operator embed(const SpacePtr& space,
               const std::vector<std::pair<std::string, Eigen::MatrixXcd>>& factors);

// Basis state from label -> occupation (unlisted labels at 0).
StateVector basis_state(const SpacePtr& space, const std::map<std::string, int>& occupation);

DensityMatrix pure_density(const StateVector& psi);

// ----------------------------- Hamiltonian builders --------------------------
//
// Builders take the derived-parameter cascade and a space containing the
// required subsystems (checked). Subsystem labels: "q" spin qubit, "a"/"c"
// cavities, "b" mechanical mode, "m" magnon, "A"/"C" polariton branches.
// All builders return Hermitian operators.

// Full linearized model: both cavities, the mechanical mode, the spin and
// the magnon.
Operator build_H_L(const params::DerivedParams& d, const SpacePtr& space);

// Mechanically eliminated model with the induced cavity-cavity coupling and
// the second-order nonlinearities. The space must not contain "b".
Operator build_H_T(const params::DerivedParams& d, const SpacePtr& space);

struct SqueezeFormOptions {
    bool drop_weak_terms{false};   // drop the e^{-r} correction terms
    bool rwa{false};               // additionally drop counter-rotating couplings
};

// Squeezed-frame model on (q, a, c, m): squeezed-mode frequencies, the
// enhanced cross coupling, and the spin/magnon couplings with both e^{+r}
// and e^{-r} parts unless dropped.
Operator build_H_squeezed(const params::DerivedParams& d, const SpacePtr& space,
                          const SqueezeFormOptions& opts = {});

// Near-critical polariton model on (q, m, A) with the enhanced couplings.
Operator build_H_polariton(const params::DerivedParams& d, const SpacePtr& space);

// Effective spin-magnon-polariton model after the second-order elimination,
// on (q, m, A).
Operator build_H_eff_smp(const params::DerivedParams& d, const SpacePtr& space);

// Effective spin-magnon model on (q, m) with the dressed detunings.
Operator build_H_eff(const params::DerivedParams& d, const SpacePtr& space);

// Decay-dressed two-polariton model on (q, m, A, C) with the non-unitary
// transformation coefficients and explicit phases.
Operator build_H_decay_full(const params::DerivedParams& d,
                            const quadratic::DecayDressedCoeffs& coeffs,
                            const SpacePtr& space);

// Golden-matrix dump: row-major "re,im" pairs as CSV.
void write_matrix_csv(const Operator& op, const std::string& path);

} // namespace spinmag::fock
