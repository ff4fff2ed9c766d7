#include "phonon_gauge/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phonon_gauge/errors.hpp"

namespace phonon_gauge {

namespace {

using cplx = std::complex<double>;

int lattice_distance(const Site& a, const Site& b) {
    return std::max(std::abs(a.coord.x - b.coord.x), std::abs(a.coord.y - b.coord.y));
}

double dipolar_coupling(const TrapArray& array, std::size_t i, std::size_t j, Direction d) {
    const Eigen::Vector3d sep = array.site(i).position - array.site(j).position;
    const double r2 = sep.squaredNorm();
    if (r2 == 0.0) {
        throw InvalidGeometry("sites " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide");
    }
    const double r = std::sqrt(r2);
    const double along = sep[static_cast<Eigen::Index>(d)];
    const double geometric = (3.0 * along * along - r2) / (r2 * r2 * r);
    const double mass_factor = 1.0 / std::sqrt(array.frequency(i, d) * array.frequency(j, d));
    return -0.5 * array.coulomb_strength() * mass_factor * geometric;
}

}  // namespace

int dressed_factor_terms(double strength) {
    return 25 + static_cast<int>(std::ceil(3.0 * std::abs(strength)));
}

std::complex<double> dressed_factor(int order, double strength, double phase_difference) {
    if (order < 0) throw DomainError("dressed factor order must be >= 0");
    if (strength < 0.0) throw DomainError("drive strength must be non-negative");
    const int terms = dressed_factor_terms(strength);
    const auto positive = bessel_j_sequence(terms + order, strength);
    auto j = [&](int s) {
        const double v = positive[static_cast<std::size_t>(std::abs(s))];
        return (s < 0 && (-s) % 2 == 1) ? -v : v;
    };
    cplx sum = 0.0;
    for (int s = -terms; s <= terms; ++s) {
        const double weight = j(s) * j(s + order);
        if (weight == 0.0) continue;
        sum += weight * std::polar(1.0, (s + 0.5 * order) * phase_difference);
    }
    return sum;
}

CouplingMatrix bare_coupling_matrix(const TrapArray& array, Direction direction,
                                    int cutoff_range) {
    if (cutoff_range < 1) throw DomainError("cutoff range must be >= 1");
    const auto n = static_cast<Eigen::Index>(array.size());
    CouplingMatrix out;
    out.direction = direction;
    out.amplitudes = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < array.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (lattice_distance(array.site(i), array.site(j)) > cutoff_range) continue;
            const double value = dipolar_coupling(array, i, j, direction);
            out.amplitudes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
            out.amplitudes(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
        }
    }
    return out;
}

CouplingMatrix effective_coupling_matrix(const TrapArray& array, const DriveSpec& drive,
                                         int cutoff_range) {
    if (array.gradient() == 0.0) {
        throw ConfigurationError("photon-assisted couplings need a frequency gradient along x");
    }
    if (array.gradient_direction() != drive.direction) {
        throw ConfigurationError("gradient direction and driven direction differ");
    }
    const double mismatch = std::abs(drive.order * drive.frequency - array.gradient());
    if (mismatch > 1e-9 * std::abs(array.gradient())) {
        std::ostringstream msg;
        msg << "drive is off resonance: r*omega_d = " << drive.order * drive.frequency
            << " but gradient = " << array.gradient();
        throw ConfigurationError(msg.str());
    }

    CouplingMatrix out = bare_coupling_matrix(array, drive.direction, cutoff_range);
    out.dressing = Dressing{drive.order, drive.strength, drive.phase_x, drive.phase_y};
    const double r = drive.order;
    for (std::size_t i = 0; i < array.size(); ++i) {
        for (std::size_t j = 0; j < array.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const int step = array.site(i).coord.x - array.site(j).coord.x;
            if (step == 0) continue;
            if (std::abs(step) >= 2) {
                out.amplitudes(ii, jj) = 0.0;
                continue;
            }
            if (step != 1) continue;  // filled as the conjugate of the (j, i) bond
            const cplx bare = out.amplitudes(ii, jj);
            if (bare == 0.0) continue;
            const double phi_i = drive.site_phase(array.site(i).coord);
            const double phi_j = drive.site_phase(array.site(j).coord);
            const cplx value = bare * dressed_factor(drive.order, drive.strength, phi_i - phi_j) *
                               std::polar(1.0, -0.5 * r * (phi_i + phi_j));
            out.amplitudes(ii, jj) = value;
            out.amplitudes(jj, ii) = std::conj(value);
        }
    }
    return out;
}

std::complex<double> loop_amplitude(const Eigen::MatrixXcd& matrix,
                                    std::span<const std::size_t> cycle) {
    if (cycle.size() < 3) throw BrokenCycle("a closed path needs at least 3 sites");
    const auto n = static_cast<std::size_t>(matrix.rows());
    const double scale = matrix.cwiseAbs().maxCoeff();
    cplx product = 1.0;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const std::size_t a = cycle[k];
        const std::size_t b = cycle[(k + 1) % cycle.size()];
        if (a >= n || b >= n) throw BrokenCycle("cycle references a site outside the matrix");
        const cplx bond = matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (!(std::abs(bond) > 1e-12 * scale)) {
            throw BrokenCycle("bond " + std::to_string(a) + "-" + std::to_string(b) +
                              " on the cycle vanishes");
        }
        product *= bond;
    }
    return product;
}

double plaquette_flux(const Eigen::MatrixXcd& matrix, std::span<const std::size_t> cycle) {
    const double phase = std::arg(loop_amplitude(matrix, cycle));
    return phase <= -std::numbers::pi ? phase + 2.0 * std::numbers::pi : phase;
}

double plaquette_flux(const CouplingMatrix& matrix, std::span<const std::size_t> cycle) {
    return plaquette_flux(matrix.amplitudes, cycle);
}

Eigen::MatrixXcd gauge_transform(const Eigen::MatrixXcd& matrix, std::span<const double> angles) {
    if (angles.size() != static_cast<std::size_t>(matrix.rows())) {
        throw DomainError("gauge transform needs one angle per site");
    }
    Eigen::VectorXcd phases(matrix.rows());
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        phases[i] = std::polar(1.0, angles[static_cast<std::size_t>(i)]);
    }
    return phases.asDiagonal() * matrix * phases.conjugate().asDiagonal();
}

std::vector<std::string> validity_warnings(const TrapArray& array, const DriveSpec& drive) {
    std::vector<std::string> notes;
    auto say = [&](const std::string& s) { notes.push_back(s); };
    if (array.coulomb_strength() > 0.05) {
        say("beta = " + std::to_string(array.coulomb_strength()) +
            " is not small; the harmonic, number-conserving coupling is questionable");
    }
    const auto bare = bare_coupling_matrix(array, drive.direction, static_cast<int>(array.size()));
    const double j_max = bare.amplitudes.cwiseAbs().maxCoeff();
    if (array.size() > 1 && std::abs(array.gradient()) < 10.0 * j_max) {
        say("gradient is not large compared with the bare coupling; resonant-term selection "
            "is inaccurate");
    }
    if (drive.frequency > 0.1) {
        say("drive frequency is not small compared with the trap frequency");
    }
    if (drive.laser) {
        const double eta = drive.laser->lamb_dicke[static_cast<std::size_t>(drive.direction)];
        if (eta > 0.3) say("Lamb-Dicke parameter is not small; second-order expansion is poor");
        if (drive.laser->rabi * eta > 0.3) {
            say("Omega_L * eta is not small compared with the trap frequency");
        }
    }
    return notes;
}

}  // namespace phonon_gauge
