#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace oracle {

/// J_n(x) from the ascending series, summed in long double.
inline double bessel_series(int n, double x) {
    const bool flip = n < 0 && (n % 2 != 0);
    n = std::abs(n);
    long double term = 1.0L;
    for (int k = 1; k <= n; ++k) term *= static_cast<long double>(x) / (2.0L * k);
    long double sum = term;
    const long double q = -static_cast<long double>(x) * x / 4.0L;
    for (int k = 1; k < 400; ++k) {
        term *= q / (static_cast<long double>(k) * (k + n));
        sum += term;
        if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
    }
    return static_cast<double>(flip ? -sum : sum);
}

/// J_n(x) from the standard library, extended to negative order and argument.
inline double bessel_std(int n, double x) {
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2) sign = -sign;
    }
    if (x < 0) {
        x = -x;
        if (n % 2) sign = -sign;
    }
    return sign * std::cyl_bessel_j(static_cast<double>(n), x);
}

/// F_r(eta, dphi) summed directly over |s| <= 80 with library Bessel values.
inline std::complex<double> dressed_sum(int r, double eta, double dphi) {
    std::complex<double> total = 0.0;
    for (int s = -80; s <= 80; ++s) {
        total += bessel_std(s, eta) * bessel_std(s + r, eta) * std::polar(1.0, (s + 0.5 * r) * dphi);
    }
    return total;
}

/// psi(t) = V exp(-i E t) V^dagger psi0 for a time-independent Hermitian matrix.
inline Eigen::VectorXcd propagate(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi0, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -es.eigenvalues()[k] * t);
    return es.eigenvectors() * c;
}

/// Plain lab-frame RK4 of i psi' = H(t) psi with dense matrices.
template <class H>
Eigen::VectorXcd rk4(const H& hamiltonian, Eigen::VectorXcd psi, double t_final, std::size_t steps) {
    const std::complex<double> mi(0.0, -1.0);
    const double h = t_final / static_cast<double>(steps);
    double t = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
        const Eigen::VectorXcd k1 = mi * (hamiltonian(t) * psi);
        const Eigen::VectorXcd k2 = mi * (hamiltonian(t + h / 2) * (psi + h / 2 * k1));
        const Eigen::VectorXcd k3 = mi * (hamiltonian(t + h / 2) * (psi + h / 2 * k2));
        const Eigen::VectorXcd k4 = mi * (hamiltonian(t + h) * (psi + h * k3));
        psi += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return psi;
}

/// Rhombic ladder Bloch energies 0, +-sqrt(|f_a|^2 + |f_c|^2) with
/// f_a = J1 + J2 e^{i(phi+k)}, f_c = J2 + J1 e^{ik}, for k = 2 pi m / p.
inline std::vector<double> ladder_bloch_levels(int p, double j1, double j2, double phi) {
    std::vector<double> levels;
    for (int m = 0; m < p; ++m) {
        const double k = 2.0 * std::numbers::pi * m / p;
        const double e = std::sqrt(2.0 * (j1 * j1 + j2 * j2) + 2.0 * j1 * j2 * (std::cos(k + phi) + std::cos(k)));
        levels.push_back(-e);
        levels.push_back(0.0);
        levels.push_back(e);
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

}  // namespace oracle
