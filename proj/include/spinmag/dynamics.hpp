#pragma once

// Time evolution of closed (Schrödinger) and open (Lindblad) systems with a
// fixed-step fourth-order integrator, and extraction of named observable
// trajectories.

#include <string>
#include <utility>
#include <vector>

#include "spinmag/fock.hpp"

namespace spinmag::dynamics {

struct TimeSeries {
    std::vector<double> t;                              // strictly increasing (s)
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;            // values[obs][k]
    std::vector<std::pair<std::string, std::string>> metadata;

    // Integration diagnostics.
    double norm_drift{0.0};          // max |norm - 1| (closed) or |trace - 1| (open)
    double min_rho_eigenvalue{0.0};  // smallest reported eigenvalue (open runs)
    int refinements{0};

    const std::vector<double>& column(const std::string& name) const;
};

struct LindbladModel {
    fock::Operator H;
    std::vector<std::pair<fock::Operator, double>> collapse;   // (operator, rate >= 0)
};

struct EvolveOptions {
    double step_safety{50.0};          // dt <= 1 / (step_safety * rate scale)
    double norm_tol{1e-8};
    double positivity_floor{-1e-6};
    int max_refinements{2};
};

using Observables = std::vector<std::pair<std::string, fock::Operator>>;

// Number operators for every bosonic subsystem ("n_<label>") and sigma_z for
// every two-level subsystem ("sz_<label>").
Observables standard_observables(const fock::SpacePtr& space);

std::vector<double> make_grid(double t_end, int n_points);

// Fixed-step fourth-order evolution of a pure state under a Hermitian H,
// with step at most 1/(50 |H|_max). The step is halved and the run repeated
// if the norm drifts beyond tolerance; persistent drift is an error.
TimeSeries evolve_state(const fock::Operator& H, const fock::StateVector& psi0,
                        const std::vector<double>& grid, const Observables& observables,
                        const EvolveOptions& opts = {});

// Lindblad master equation d rho/dt = -i[H, rho] + sum rate D[o] rho with
// D[o] rho = o rho o† - (o†o rho + rho o†o)/2. Hermiticity is enforced by
// symmetrization each step; trace drift and reported-state positivity are
// checked at every grid point.
TimeSeries evolve_density(const LindbladModel& model, const fock::DensityMatrix& rho0,
                          const std::vector<double>& grid, const Observables& observables,
                          const EvolveOptions& opts = {});

struct ObservableDeviation {
    std::string name;
    double max_abs{0.0};
    double rms{0.0};
};

struct DeviationReport {
    std::vector<ObservableDeviation> per_observable;

    double max_abs(const std::string& name) const;
    double overall_max() const;
};

// Per-observable max and RMS absolute deviation between two series on
// identical grids (observables compared by shared name).
DeviationReport compare_levels(const TimeSeries& a, const TimeSeries& b);

// CSV with '#'-prefixed metadata lines, a "t,<obs1>,..." header row and
// 17-significant-digit decimal floats.
void write_csv(const TimeSeries& series, const std::string& path);

} // namespace spinmag::dynamics
