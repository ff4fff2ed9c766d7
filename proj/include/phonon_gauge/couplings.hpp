#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phonon_gauge/model.hpp"

namespace phonon_gauge {

/// Largest |x| accepted by the Bessel routines.
inline constexpr double kBesselArgumentLimit = 50.0;

/// Bessel function of the first kind J_order(x) for integer order, |x| <= 50.
double bessel_j(int order, double x);

/// J_0(x) ... J_max_order(x) from a single backward-recurrence sweep.
std::vector<double> bessel_j_sequence(int max_order, double x);

/// Number of terms kept on each side of the dressed-factor series for a drive strength.
int dressed_factor_terms(double strength);

/// Photon-assisted renormalization
///   F_r(eta, dphi) = sum_s J_s(eta) J_{s+r}(eta) exp(i (s + r/2) dphi).
std::complex<double> dressed_factor(int order, double strength, double phase_difference);

struct Dressing {
    int order = 1;
    double strength = 0.0;
    double phase_x = 0.0;
    double phase_y = 0.0;
};

/// Hopping amplitudes between sites for one vibrational direction.
/// amplitudes(i, j) multiplies a_i^dagger a_j; the matrix is Hermitian with zero diagonal.
struct CouplingMatrix {
    Eigen::MatrixXcd amplitudes;
    Direction direction = Direction::z;
    std::optional<Dressing> dressing;

    std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes.rows()); }
    std::complex<double> operator()(std::size_t i, std::size_t j) const {
        return amplitudes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

/// Dipolar couplings in the harmonic approximation. Pairs whose lattice (Chebyshev)
/// distance exceeds cutoff_range are dropped.
CouplingMatrix bare_coupling_matrix(const TrapArray& array, Direction direction,
                                    int cutoff_range = 3);

/// Photon-assisted couplings: bonds stepping one column in x are dressed by F_r and the
/// site-phase gauge factor, same-column bonds keep the bare value, longer x-steps vanish.
CouplingMatrix effective_coupling_matrix(const TrapArray& array, const DriveSpec& drive,
                                         int cutoff_range = 3);

/// Product of amplitudes along a closed path, M[c0,c1] M[c1,c2] ... M[c_{n-1},c0].
std::complex<double> loop_amplitude(const Eigen::MatrixXcd& matrix,
                                    std::span<const std::size_t> cycle);

/// Gauge-invariant phase of loop_amplitude in (-pi, pi].
double plaquette_flux(const Eigen::MatrixXcd& matrix, std::span<const std::size_t> cycle);
double plaquette_flux(const CouplingMatrix& matrix, std::span<const std::size_t> cycle);

/// M_ij -> exp(i theta_i) M_ij exp(-i theta_j).
Eigen::MatrixXcd gauge_transform(const Eigen::MatrixXcd& matrix, std::span<const double> angles);

/// Notes for parameter choices outside the hierarchy
/// omega >> {Delta omega, omega_d} >> J that the effective description needs.
std::vector<std::string> validity_warnings(const TrapArray& array, const DriveSpec& drive);

}  // namespace phonon_gauge
