#include "spinmag/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/SparseCore>

#include "spinmag/errors.hpp"

namespace spinmag::dynamics {

using cplx = std::complex<double>;

const std::vector<double>& TimeSeries::column(const std::string& name) const {
    for (size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return values[k];
    }
    throw std::invalid_argument("TimeSeries: no observable named " + name);
}

Observables standard_observables(const fock::SpacePtr& space) {
    Observables obs;
    for (const auto& s : space->subsystems()) {
        if (s.kind == fock::SubsystemKind::boson) {
            obs.emplace_back("n_" + s.label, fock::number_op(space, s.label));
        } else {
            obs.emplace_back("sz_" + s.label, fock::pauli(space, s.label, fock::Pauli::z));
        }
    }
    return obs;
}

std::vector<double> make_grid(double t_end, int n_points) {
    if (!(t_end > 0.0) || n_points < 2) {
        throw std::invalid_argument("make_grid: need t_end > 0 and at least 2 points");
    }
    std::vector<double> t(static_cast<size_t>(n_points));
    for (int k = 0; k < n_points; ++k) {
        t[static_cast<size_t>(k)] = t_end * static_cast<double>(k) /
                                    static_cast<double>(n_points - 1);
    }
    return t;
}

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("evolve: grid needs at least 2 points");
    for (size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            throw std::invalid_argument("evolve: grid must be strictly increasing");
        }
    }
}

void check_observables(const fock::SpacePtr& space, const Observables& obs) {
    for (const auto& [name, op] : obs) {
        if (op.space->dim() != space->dim()) {
            throw std::invalid_argument("evolve: observable " + name +
                                        " lives on a different space");
        }
    }
}

int substeps(double interval, double dt_cap) {
    if (dt_cap <= 0.0 || !std::isfinite(dt_cap)) return 1;
    return std::max(1, static_cast<int>(std::ceil(interval / dt_cap)));
}

} // namespace

TimeSeries evolve_state(const fock::Operator& H, const fock::StateVector& psi0,
                        const std::vector<double>& grid, const Observables& observables,
                        const EvolveOptions& opts) {
    check_grid(grid);
    check_observables(H.space, observables);
    if (psi0.space->dim() != H.space->dim()) {
        throw std::invalid_argument("evolve_state: state/Hamiltonian dimension mismatch");
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("evolve_state: initial state not normalized");
    }
    if (!fock::is_hermitian(H)) {
        throw std::invalid_argument("evolve_state: Hamiltonian not Hermitian");
    }

    // The Hamiltonians here are sums of few-mode terms, so the dense matrix
    // is mostly zeros; stepping through a compressed copy keeps large
    // convergence-check spaces affordable.
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> S = H.m.sparseView();
    S.makeCompressed();
    std::vector<Eigen::SparseMatrix<cplx, Eigen::RowMajor>> obs_sparse;
    obs_sparse.reserve(observables.size());
    for (const auto& [name, op] : observables) obs_sparse.push_back(op.m.sparseView());

    const double scale = H.max_abs();
    double dt_cap = scale > 0.0 ? 1.0 / (opts.step_safety * scale)
                                : grid.back() - grid.front();

    TimeSeries series;
    for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
        series = TimeSeries{};
        series.t = grid;
        series.refinements = attempt;
        for (const auto& [name, op] : observables) {
            series.names.push_back(name);
            series.values.emplace_back();
            series.values.back().reserve(grid.size());
        }

        Eigen::VectorXcd psi = psi0.v;
        Eigen::VectorXcd k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()),
            tmp(psi.size());
        double max_drift = 0.0;

        const auto record = [&](const Eigen::VectorXcd& state) {
            max_drift = std::max(max_drift, std::abs(state.norm() - 1.0));
            for (size_t j = 0; j < observables.size(); ++j) {
                const cplx e = state.dot(obs_sparse[j] * state);
                series.values[j].push_back(e.real());
            }
        };

        record(psi);
        const cplx mi{0.0, -1.0};
        for (size_t k = 1; k < grid.size(); ++k) {
            const double interval = grid[k] - grid[k - 1];
            const int n = substeps(interval, dt_cap);
            const double h = interval / n;
            for (int s = 0; s < n; ++s) {
                k1.noalias() = S * psi;
                k1 *= mi;
                tmp = psi + 0.5 * h * k1;
                k2.noalias() = S * tmp;
                k2 *= mi;
                tmp = psi + 0.5 * h * k2;
                k3.noalias() = S * tmp;
                k3 *= mi;
                tmp = psi + h * k3;
                k4.noalias() = S * tmp;
                k4 *= mi;
                psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            record(psi);
        }

        series.norm_drift = max_drift;
        if (max_drift <= opts.norm_tol) return series;
        dt_cap *= 0.5;
    }
    throw NumericalError("evolve_state: norm drift above tolerance after step refinements");
}

TimeSeries evolve_density(const LindbladModel& model, const fock::DensityMatrix& rho0,
                          const std::vector<double>& grid, const Observables& observables,
                          const EvolveOptions& opts) {
    check_grid(grid);
    check_observables(model.H.space, observables);
    rho0.validate();
    if (rho0.space->dim() != model.H.space->dim()) {
        throw std::invalid_argument("evolve_density: state/Hamiltonian dimension mismatch");
    }
    if (!fock::is_hermitian(model.H)) {
        throw std::invalid_argument("evolve_density: Hamiltonian not Hermitian");
    }

    double scale = model.H.max_abs();
    for (const auto& [op, rate] : model.collapse) {
        if (rate < 0.0) throw std::invalid_argument("evolve_density: negative collapse rate");
        if (op.space->dim() != model.H.space->dim()) {
            throw std::invalid_argument("evolve_density: collapse operator on wrong space");
        }
        scale += rate * (op.m.adjoint() * op.m).cwiseAbs().maxCoeff();
    }
    double dt_cap = scale > 0.0 ? 1.0 / (opts.step_safety * scale)
                                : grid.back() - grid.front();

    struct Channel {
        Eigen::MatrixXcd L;
        Eigen::MatrixXcd LdagL;
        double rate;
    };
    std::vector<Channel> channels;
    for (const auto& [op, rate] : model.collapse) {
        if (rate == 0.0) continue;
        channels.push_back({op.m, op.m.adjoint() * op.m, rate});
    }

    const Eigen::MatrixXcd& H = model.H.m;
    const auto rhs = [&](const Eigen::MatrixXcd& rho) {
        Eigen::MatrixXcd d = cplx{0.0, -1.0} * (H * rho - rho * H);
        for (const auto& ch : channels) {
            d.noalias() += ch.rate * (ch.L * rho * ch.L.adjoint());
            const Eigen::MatrixXcd anti = ch.LdagL * rho + rho * ch.LdagL;
            d.noalias() -= (0.5 * ch.rate) * anti;
        }
        return d;
    };

    TimeSeries series;
    for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
        series = TimeSeries{};
        series.t = grid;
        series.refinements = attempt;
        for (const auto& [name, op] : observables) {
            series.names.push_back(name);
            series.values.emplace_back();
            series.values.back().reserve(grid.size());
        }

        Eigen::MatrixXcd rho = rho0.rho;
        double max_drift = 0.0;
        double min_eig = 1.0;
        bool positivity_ok = true;

        const auto record = [&](const Eigen::MatrixXcd& state) {
            max_drift = std::max(max_drift, std::abs(state.trace().real() - 1.0));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state, Eigen::EigenvaluesOnly);
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
            if (min_eig < opts.positivity_floor) positivity_ok = false;
            for (size_t j = 0; j < observables.size(); ++j) {
                series.values[j].push_back((observables[j].second.m * state).trace().real());
            }
        };

        record(rho);
        for (size_t k = 1; k < grid.size() && positivity_ok; ++k) {
            const double interval = grid[k] - grid[k - 1];
            const int n = substeps(interval, dt_cap);
            const double h = interval / n;
            for (int s = 0; s < n; ++s) {
                const Eigen::MatrixXcd k1 = rhs(rho);
                const Eigen::MatrixXcd k2 = rhs(rho + 0.5 * h * k1);
                const Eigen::MatrixXcd k3 = rhs(rho + 0.5 * h * k2);
                const Eigen::MatrixXcd k4 = rhs(rho + h * k3);
                rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                rho = 0.5 * (rho + rho.adjoint().eval());   // keep Hermitian
            }
            record(rho);
        }

        series.norm_drift = max_drift;
        series.min_rho_eigenvalue = min_eig;
        if (positivity_ok && max_drift <= opts.norm_tol) return series;
        dt_cap *= 0.5;
    }
    throw NumericalError("evolve_density: trace drift or positivity violation persists "
                         "after step refinements");
}

double DeviationReport::max_abs(const std::string& name) const {
    for (const auto& d : per_observable) {
        if (d.name == name) return d.max_abs;
    }
    throw std::invalid_argument("DeviationReport: no observable named " + name);
}

double DeviationReport::overall_max() const {
    double m = 0.0;
    for (const auto& d : per_observable) m = std::max(m, d.max_abs);
    return m;
}

DeviationReport compare_levels(const TimeSeries& a, const TimeSeries& b) {
    if (a.t.size() != b.t.size()) {
        throw std::invalid_argument("compare_levels: grid size mismatch");
    }
    for (size_t k = 0; k < a.t.size(); ++k) {
        if (a.t[k] != b.t[k]) throw std::invalid_argument("compare_levels: grid mismatch");
    }
    DeviationReport rep;
    for (size_t i = 0; i < a.names.size(); ++i) {
        for (size_t j = 0; j < b.names.size(); ++j) {
            if (a.names[i] != b.names[j]) continue;
            ObservableDeviation d;
            d.name = a.names[i];
            double sum_sq = 0.0;
            for (size_t k = 0; k < a.t.size(); ++k) {
                const double diff = std::abs(a.values[i][k] - b.values[j][k]);
                d.max_abs = std::max(d.max_abs, diff);
                sum_sq += diff * diff;
            }
            d.rms = std::sqrt(sum_sq / static_cast<double>(a.t.size()));
            rep.per_observable.push_back(d);
        }
    }
    if (rep.per_observable.empty()) {
        throw std::invalid_argument("compare_levels: no shared observables");
    }
    return rep;
}

void write_csv(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (const auto& [key, value] : series.metadata) {
        out << "# " << key << " = " << value << '\n';
    }
    out << 't';
    for (const auto& name : series.names) out << ',' << name;
    out << '\n';
    char buf[32];
    for (size_t k = 0; k < series.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", series.t[k]);
        out << buf;
        for (const auto& col : series.values) {
            std::snprintf(buf, sizeof buf, "%.17g", col[k]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

} // namespace spinmag::dynamics
