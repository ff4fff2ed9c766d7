#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace phonon_gauge {

// Units throughout: hbar = 1, frequencies in units of the base trap frequency of the
// simulated direction, lengths in units of the x spacing d_x.

enum class Direction { x = 0, y = 1, z = 2 };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

enum class Layout { link, plaquette, rhombic_ladder, square };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view text);

struct LatticeCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const LatticeCoord&, const LatticeCoord&) = default;
};

struct Site {
    LatticeCoord coord;
    Eigen::Vector3d position;            ///< equilibrium position r0
    std::array<double, 3> frequency{};   ///< trap frequency per direction
};

/// Inputs of build_array.
///
/// `dims` is interpreted per layout: link uses dims[0] sites along x, plaquette is always
/// the 2x2 ring and only checks dims for positivity, rhombic_ladder uses dims[0] cells,
/// square uses dims[0] x dims[1] sites.
struct ArraySpec {
    Layout layout = Layout::link;
    std::array<int, 2> dims{2, 1};
    std::array<double, 2> spacings{1.0, 1.0};
    std::array<double, 3> base_frequencies{1.0, 1.0, 1.0};
    Direction gradient_direction = Direction::z;
    double gradient = 0.0;       ///< frequency step per unit i_x
    double coulomb_strength = 0.002;  ///< beta = e^2 / (M w^2 d_x^3)
};

/// Microtrap array. Immutable once built.
class TrapArray {
public:
    TrapArray(Layout layout, std::vector<Site> sites, double spacing_x, double spacing_y,
              Direction gradient_direction, double gradient, double coulomb_strength);

    Layout layout() const noexcept { return layout_; }
    std::size_t size() const noexcept { return sites_.size(); }
    const std::vector<Site>& sites() const noexcept { return sites_; }
    const Site& site(std::size_t i) const { return sites_.at(i); }

    double spacing_x() const noexcept { return spacing_x_; }
    double spacing_y() const noexcept { return spacing_y_; }
    Direction gradient_direction() const noexcept { return gradient_direction_; }
    double gradient() const noexcept { return gradient_; }
    double coulomb_strength() const noexcept { return beta_; }

    double frequency(std::size_t i, Direction d) const {
        return sites_.at(i).frequency[static_cast<std::size_t>(d)];
    }

    std::optional<std::size_t> index_of(LatticeCoord c) const;

    /// Counterclockwise elementary cycle (x,y) -> (x+1,y) -> (x+1,y+1) -> (x,y+1).
    /// Empty if any corner is absent.
    std::vector<std::size_t> elementary_plaquette(LatticeCoord lower_left) const;

private:
    Layout layout_;
    std::vector<Site> sites_;
    double spacing_x_;
    double spacing_y_;
    Direction gradient_direction_;
    double gradient_;
    double beta_;
};

TrapArray build_array(const ArraySpec& spec);

enum class DriveMode { cosine, laser };

std::string_view to_string(DriveMode mode);

/// Two-photon Raman parameters of the optical driving.
struct LaserParameters {
    double rabi = 0.0;                      ///< Omega_L
    double beat_frequency = 0.0;            ///< omega_L
    std::array<double, 3> lamb_dicke{};     ///< eta_alpha per direction
};

/// Periodic driving of the trap frequencies.
///
/// Site phases follow phi_i = phi_x i_x + phi_y i_y. For laser driving the equivalent
/// cosine parameters are omega_d = omega_L, eta_d = Omega_L eta^2 / omega_L and the laser
/// phase Delta k . r0_i equals -phi_i.
struct DriveSpec {
    DriveMode mode = DriveMode::cosine;
    double frequency = 0.0;   ///< omega_d
    double strength = 0.0;    ///< eta_d (dimensionless)
    int order = 1;            ///< resonance order r
    double phase_x = 0.0;
    double phase_y = 0.0;
    std::optional<LaserParameters> laser;
    Direction direction = Direction::z;  ///< simulated direction

    static DriveSpec cosine(double frequency, double strength, int order, double phase_x,
                            double phase_y, Direction direction = Direction::z);

    /// Fills frequency and strength from the laser identifications.
    static DriveSpec from_laser(const LaserParameters& laser, int order, double phase_x,
                                double phase_y, Direction direction = Direction::z);

    double site_phase(LatticeCoord c) const noexcept {
        return phase_x * c.x + phase_y * c.y;
    }

    /// Delta k . r0 for a site; equals -site_phase.
    double laser_phase(LatticeCoord c) const noexcept { return -site_phase(c); }
};

/// Drive whose order times frequency matches the array gradient.
DriveSpec resonant_cosine_drive(const TrapArray& array, double strength, int order,
                                double phase_x, double phase_y);

}  // namespace phonon_gauge
