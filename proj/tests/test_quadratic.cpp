#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "spinmag/errors.hpp"
#include "spinmag/quadratic.hpp"

using namespace spinmag;
using namespace spinmag::quadratic;
using cplx = std::complex<double>;

namespace {

std::array<cplx, 4> numeric_eigenvalues(const QuadraticBosonForm& form, double K) {
    const auto dm = dynamical_matrix(form, K, K);
    const Eigen::Matrix4cd M = cplx{0.0, 1.0} * dm.D;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M, false);
    std::array<cplx, 4> ev;
    for (int i = 0; i < 4; ++i) ev[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return ev;
}

// Best-assignment distance between two unordered sets of four eigenvalues.
double match_distance(std::array<cplx, 4> a, const std::array<cplx, 4>& b) {
    std::array<int, 4> idx{0, 1, 2, 3};
    double best = std::numeric_limits<double>::infinity();
    std::sort(idx.begin(), idx.end());
    do {
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            worst = std::max(worst, std::abs(a[static_cast<size_t>(idx[static_cast<size_t>(i)])] -
                                             b[static_cast<size_t>(i)]));
        }
        best = std::min(best, worst);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

double scale_of(const std::array<cplx, 4>& ev) {
    double s = 0.0;
    for (const auto& v : ev) s = std::max(s, std::abs(v));
    return s;
}

} // namespace

TEST_CASE("dynamical matrix layout") {
    SUBCASE("decoupled lossless modes are diagonal") {
        const auto dm = dynamical_matrix({2.0, 5.0, 0.0}, 0.0, 0.0);
        Eigen::Matrix4cd expect = Eigen::Matrix4cd::Zero();
        expect.diagonal() << cplx{0.0, -2.0}, cplx{0.0, 2.0}, cplx{0.0, -5.0}, cplx{0.0, 5.0};
        CHECK((dm.D - expect).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("coefficient matrix relation D = -i eta M - K") {
        const QuadraticBosonForm form{1.3, 0.7, 0.21};
        const auto dm = dynamical_matrix(form, 0.11, 0.07);
        Eigen::Matrix4cd eta = Eigen::Matrix4cd::Zero();
        eta.diagonal() << 1.0, -1.0, 1.0, -1.0;
        Eigen::Matrix4cd Kd = Eigen::Matrix4cd::Zero();
        Kd.diagonal() << 0.11, 0.11, 0.07, 0.07;
        const Eigen::Matrix4cd rebuilt =
            cplx{0.0, -1.0} * eta * coefficient_matrix(form) - Kd;
        CHECK((dm.D - rebuilt).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("resonant critical point gives a doubly degenerate zero") {
        const double W = 8.886e5;
        const auto ev = numeric_eigenvalues({W, W, critical_coupling_ideal(W, W)}, 0.0);
        int zeros = 0;
        for (const auto& v : ev) {
            if (std::abs(v) <= 1e-6 * W) ++zeros;
        }
        CHECK(zeros == 2);
    }
    SUBCASE("decoupled damped modes shift down by iK") {
        const double W_a = 2.0, W_c = 5.0, K = 0.3;
        const auto ev = numeric_eigenvalues({W_a, W_c, 0.0}, K);
        const std::array<cplx, 4> expect{cplx{W_a, -K}, cplx{-W_a, -K}, cplx{W_c, -K},
                                         cplx{-W_c, -K}};
        CHECK(match_distance(ev, expect) <= 1e-12 * scale_of(expect));
    }
}

TEST_CASE("closed-form eigenvalues at the quoted special points") {
    const double W = 1.7e6;
    SUBCASE("lossless resonant critical point collapses the lower pair to zero") {
        const auto ev = closed_form_eigenvalues(W, W, 0.5 * W, 0.0);
        CHECK(std::abs(ev[0]) <= 1e-12 * W);
        CHECK(std::abs(ev[1]) <= 1e-12 * W);
    }
    SUBCASE("ideal critical point with decay gives -iK twice") {
        const double K = 0.2 * W;
        const auto ev = closed_form_eigenvalues(W, W, critical_coupling_ideal(W, W), K);
        CHECK(std::abs(ev[0] - cplx{0.0, -K}) <= 1e-12 * W);
        CHECK(std::abs(ev[1] - cplx{0.0, -K}) <= 1e-12 * W);
        CHECK(std::abs(ev[2] - (cplx{-std::sqrt(2.0) * W, -K})) <= 1e-9 * W);
        CHECK(std::abs(ev[3] - (cplx{std::sqrt(2.0) * W, -K})) <= 1e-9 * W);
    }
    SUBCASE("damped critical point pins the minus branch at zero") {
        const double W_a = 2.3e5, W_c = 8.1e5, K = 9.7e4;
        const auto ev =
            closed_form_eigenvalues(W_a, W_c, critical_coupling_damped(W_a, W_c, K), K);
        CHECK(std::abs(ev[0]) <= 1e-9 * W_c);                     // Omega_A^(-) = 0
        CHECK(std::abs(ev[1] - cplx{0.0, -2.0 * K}) <= 1e-9 * W_c);   // Omega_A^(+) = -2iK
    }
}

TEST_CASE("closed form matches the numeric spectrum on random draws") {
    std::mt19937_64 rng(20240817u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double W_a = std::pow(10.0, -1.0 + 2.0 * u(rng));
        const double W_c = std::pow(10.0, -1.0 + 2.0 * u(rng));
        const double G = 2.0 * critical_coupling_ideal(W_a, W_c) * u(rng);
        const double K = (trial % 5 == 0) ? 0.0 : 0.5 * std::max(W_a, W_c) * u(rng);
        const auto cf = closed_form_eigenvalues(W_a, W_c, G, K);
        const auto nv = numeric_eigenvalues({W_a, W_c, G}, K);
        CHECK(match_distance(nv, cf) <= 1e-10 * std::max(scale_of(cf), 1e-300));
    }
}

TEST_CASE("polariton diagonalization") {
    const Eigen::Matrix4d Sigma = commutation_metric();
    SUBCASE("decoupled modes give the identity map") {
        const auto map = bogoliubov_diagonalize({1.0, 3.0, 0.0});
        CHECK((map.forward - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(map.Omega_A == doctest::Approx(1.0));
        CHECK(map.Omega_C == doctest::Approx(3.0));
    }
    SUBCASE("resonant mixing is balanced") {
        const auto map = bogoliubov_diagonalize({2.0, 2.0, 0.4});
        CHECK(std::cos(map.theta) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(std::sin(map.theta) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("random stable forms: symplectic, invertible, diagonalizing") {
        std::mt19937_64 rng(7070707u);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 300; ++trial) {
            const double W_a = std::pow(10.0, -1.0 + 2.0 * u(rng));
            const double W_c = std::pow(10.0, -1.0 + 2.0 * u(rng));
            double G = 0.95 * critical_coupling_ideal(W_a, W_c) * u(rng);
            if (trial % 7 == 0) G = -G;   // coupling sign is a mode-c gauge
            const QuadraticBosonForm form{W_a, W_c, G};
            const auto map = bogoliubov_diagonalize(form);

            const Eigen::Matrix4d comm =
                map.forward * Sigma * map.forward.transpose() - Sigma;
            CHECK(comm.cwiseAbs().maxCoeff() <= 1e-12);

            const Eigen::Matrix4d round =
                map.forward * map.inverse - Eigen::Matrix4d::Identity();
            CHECK(round.cwiseAbs().maxCoeff() <= 1e-12);

            const Eigen::Matrix4cd M = coefficient_matrix(form);
            const Eigen::Matrix4cd Mnew =
                map.inverse.cast<cplx>().adjoint() * M * map.inverse.cast<cplx>();
            Eigen::Matrix4cd expect = Eigen::Matrix4cd::Zero();
            expect.diagonal() << map.Omega_A, map.Omega_A, map.Omega_C, map.Omega_C;
            CHECK((Mnew - expect).cwiseAbs().maxCoeff() <=
                  1e-10 * std::max(std::max(W_a, W_c), map.Omega_C));
        }
    }
    SUBCASE("critical and unstable forms are rejected") {
        const double G_cp = critical_coupling_ideal(1.0, 1.0);
        CHECK_THROWS_AS(bogoliubov_diagonalize({1.0, 1.0, G_cp}), DomainError);
        CHECK_THROWS_AS(bogoliubov_diagonalize({1.0, 1.0, 1.2 * G_cp}), DomainError);
    }
}

TEST_CASE("near-critical mode projection") {
    SUBCASE("canonical zero-point fluctuation") {
        const double W = 8.886e5;
        const auto p = cp_mode_projection(W, W / 1e6);
        CHECK(p.x_zpf == doctest::Approx(353.5534).epsilon(1e-6));
        CHECK(p.a_coeff == p.x_zpf);
        CHECK(p.c_coeff == -p.x_zpf);
    }
    SUBCASE("boundary value is unity once the threshold admits it") {
        const auto p = cp_mode_projection(8.0, 1.0, 0.5);
        CHECK(p.x_zpf == doctest::Approx(1.0));
        // the default threshold rejects the same ratio
        CHECK_THROWS_AS(cp_mode_projection(8.0, 1.0), DomainError);
    }
    SUBCASE("halving the branch frequency grows the fluctuation by sqrt(2)") {
        const double W = 1.0;
        const auto p1 = cp_mode_projection(W, 1e-4);
        const auto p2 = cp_mode_projection(W, 0.5e-4);
        CHECK(p2.x_zpf == doctest::Approx(std::sqrt(2.0) * p1.x_zpf).epsilon(1e-12));
    }
}

TEST_CASE("projection coefficient is the limit of the polariton map") {
    // the A / A-dagger coefficients of a_s approach x_zpf as Omega_A -> 0
    const double W = 2.4e6;
    const double Omega_A = 1e-4 * W;
    const double G = (W * W - Omega_A * Omega_A) / (2.0 * W);
    const auto map = bogoliubov_diagonalize({W, W, G});
    CHECK(map.Omega_A == doctest::Approx(Omega_A).epsilon(1e-9));
    const double x_zpf = cp_mode_projection(W, Omega_A).x_zpf;
    CHECK(map.inverse(0, 0) == doctest::Approx(x_zpf).epsilon(1e-2));
    CHECK(map.inverse(0, 1) == doctest::Approx(x_zpf).epsilon(1e-2));
}

TEST_CASE("decay-dressed coefficients") {
    const cplx I{0.0, 1.0};
    SUBCASE("ideal critical point with decay") {
        const double W = 3.0, K = 0.7;
        const auto c = decay_dressed_coeffs(W, K, -I * K, std::sqrt(2.0) * W - I * K);
        CHECK(c.abs_a_plus ==
              doctest::Approx(W * W / (2.0 * K * std::sqrt(W * W + K * K))).epsilon(1e-12));
    }
    SUBCASE("equal frequency and decay") {
        const auto c = decay_dressed_coeffs(1.0, 1.0, -I, std::sqrt(2.0) - I);
        CHECK(c.abs_a_plus == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
    }
    SUBCASE("upper-branch values at the ideal critical point match both signs") {
        const double W = 2.0, K = 0.5;
        const auto up = decay_dressed_coeffs(W, K, -I * K, std::sqrt(2.0) * W - I * K);
        const auto dn = decay_dressed_coeffs(W, K, -I * K, -std::sqrt(2.0) * W - I * K);
        const double denom = 2.0 * std::sqrt((W * W + K * K) * (K * K + 2.0 * W * W));
        CHECK(up.abs_c_plus ==
              doctest::Approx((3.0 - 2.0 * std::sqrt(2.0)) * W * W / denom).epsilon(1e-12));
        CHECK(dn.abs_c_plus ==
              doctest::Approx((3.0 + 2.0 * std::sqrt(2.0)) * W * W / denom).epsilon(1e-12));
    }
    SUBCASE("zero branch frequency is degenerate") {
        CHECK_THROWS_AS(decay_dressed_coeffs(1.0, 0.5, 0.0, 1.0), DomainError);
    }
    SUBCASE("lossless limit reproduces the squared polariton-map coefficients") {
        // At K = 0 the closed-form magnitudes are the squares of twice the
        // resonant map coefficients, with the +- labels swapped.
        const double W = 1.9;
        const double Omega_A = 0.23 * W;
        const double G = (W * W - Omega_A * Omega_A) / (2.0 * W);
        const auto map = bogoliubov_diagonalize({W, W, G});
        const double alpha_p = map.forward(0, 0);   // cos(theta）-scaled (Omega+W) part
        const double alpha_m = map.forward(0, 1);
        const auto c = decay_dressed_coeffs(W, 0.0, Omega_A, map.Omega_C);
        CHECK(c.abs_a_minus == doctest::Approx(4.0 * alpha_p * alpha_p).epsilon(1e-10));
        CHECK(c.abs_a_plus == doctest::Approx(4.0 * alpha_m * alpha_m).epsilon(1e-10));
    }
    SUBCASE("near-critical divergence follows four times the squared fluctuation") {
        const double W = 5.0e5;
        double prev = 0.0;
        for (const double ratio : {1e-3, 5e-4, 2.5e-4, 1.25e-4}) {
            const double Omega_A = ratio * W;
            const auto c = decay_dressed_coeffs(W, 0.0, Omega_A, std::sqrt(2.0) * W);
            const double x_zpf = cp_mode_projection(W, Omega_A).x_zpf;
            CHECK(c.abs_a_plus == doctest::Approx(4.0 * x_zpf * x_zpf).epsilon(2.0 * ratio));
            CHECK(c.abs_a_plus > prev);   // halving Omega_A doubles the coefficient
            if (prev > 0.0) CHECK(c.abs_a_plus == doctest::Approx(2.0 * prev).epsilon(1e-3));
            prev = c.abs_a_plus;
        }
    }
    SUBCASE("phases stay in the principal interval") {
        const auto c = decay_dressed_coeffs(1.0, 0.4, cplx{0.3, -0.4}, cplx{-1.5, -0.4});
        for (const double phi : {c.phi_a_plus, c.phi_a_minus, c.phi_c_plus, c.phi_c_minus}) {
            CHECK(phi > -std::numbers::pi);
            CHECK(phi <= std::numbers::pi);
        }
    }
}

TEST_CASE("stability classification") {
    const double W = 8.886e5;
    const double G_cp = critical_coupling_ideal(W, W);
    SUBCASE("lossless") {
        CHECK(stability_classify(W, W, 0.9 * G_cp, 0.0) == Stability::stable);
        CHECK(stability_classify(W, W, 1.1 * G_cp, 0.0) == Stability::unstable);
        CHECK(stability_classify(W, W, G_cp, 0.0) == Stability::critical);
    }
    SUBCASE("decay extends the stable region to the damped critical coupling") {
        const double K = 0.3 * W;
        const double G_cpp = critical_coupling_damped(W, W, K);
        CHECK(G_cpp > G_cp);
        CHECK(stability_classify(W, W, 0.5 * (G_cp + G_cpp), K) == Stability::stable);
        CHECK(stability_classify(W, W, G_cpp, K) == Stability::critical);
        CHECK(stability_classify(W, W, 1.01 * G_cpp, K) == Stability::unstable);
    }
}

TEST_CASE("upper branch is real and positive for any coupling") {
    const double W_a = 3.3e5, W_c = 1.2e6;
    for (int k = 0; k <= 400; ++k) {
        const double G = k * 0.02 * critical_coupling_ideal(W_a, W_c);
        const auto s = polariton_spectrum(W_a, W_c, G);
        CHECK(s.Omega_C_sq > 0.0);
    }
}
