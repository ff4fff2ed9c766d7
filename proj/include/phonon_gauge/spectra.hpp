#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace phonon_gauge {

enum class Boundary { open, periodic };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

/// Single-particle lattice Hamiltonian. `cell[i]` is the unit cell of site i; the lowest
/// and highest cells are the boundary cells used for edge metrics.
struct TightBinding {
    Eigen::MatrixXcd matrix;
    std::vector<int> cell;
    Boundary boundary = Boundary::open;

    std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

/// Rhombic three-leg ladder with legs a, b (hub), c:
///   H = sum_j J1 (b_j^+ a_j + c_j^+ b_{j+1}) + J2 (b_j^+ c_j + e^{i flux} a_j^+ b_{j+1}) + h.c.
/// Sites are ordered b_0, a_0, c_0, b_1, ... Open ladders end on a hub (3p+1 sites);
/// periodic ones identify b_p with b_0 (3p sites).
TightBinding rhombic_ladder_matrix(int cells, double j1, double j2, double flux,
                                   Boundary boundary = Boundary::open);

/// Index of hub b_j, leg a_j and leg c_j in rhombic_ladder_matrix.
inline std::size_t ladder_hub(int j) { return 3 * static_cast<std::size_t>(j); }
inline std::size_t ladder_upper(int j) { return 3 * static_cast<std::size_t>(j) + 1; }
inline std::size_t ladder_lower(int j) { return 3 * static_cast<std::size_t>(j) + 2; }

/// |J2| from the trap geometry: J1 |F_r(eta_d, dphi)| (d_y / d_x)^3.
double ladder_j2_from_geometry(double j1, int order, double strength, double phase_difference,
                               double spacing_x, double spacing_y);

/// Landau-gauge square lattice: x-bonds J_x exp(-i alpha i_y), y-bonds J_y / m^3 for
/// ranges m = 1..m_max. Site index i_y * L_x + i_x; cells are columns.
TightBinding square_lattice_matrix(int lx, int ly, double alpha, double jx, double jy,
                                   int m_max = 1, Boundary boundary = Boundary::open);

/// Counterclockwise cycle around the plaquette whose lower-left corner is (x, y).
std::vector<std::size_t> square_plaquette(int lx, int x, int y);

struct SpectrumResult {
    Eigen::VectorXd eigenvalues;       ///< ascending
    Eigen::MatrixXcd eigenvectors;     ///< columns, largest component real positive
    Eigen::VectorXd ipr;               ///< sum_i |v_i|^4
    Eigen::VectorXd boundary_weight;   ///< probability on the two boundary cells
    std::vector<int> band;             ///< cluster label per state
    std::vector<int> cell;
    Boundary boundary = Boundary::open;
    double flux = std::numeric_limits<double>::quiet_NaN();

    std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    /// Probability of state n on each cell, indexed from the lowest cell.
    std::vector<double> cell_probabilities(std::size_t n) const;
};

/// Default greedy clustering tolerance, 1e-8 max|E| (absolute 1e-8 for a zero spectrum).
double default_cluster_tolerance(const Eigen::VectorXd& eigenvalues);

/// Dense Hermitian diagonalization with metrics. Rejects inputs that are not Hermitian
/// to 1e-12 (relative to the largest entry).
SpectrumResult eigensystem(const TightBinding& model, double cluster_tol = -1.0);
SpectrumResult eigensystem(const Eigen::MatrixXcd& matrix, double cluster_tol = -1.0);

struct BandCluster {
    double energy = 0.0;  ///< mean of the members
    std::size_t count = 0;
    double spread = 0.0;  ///< max - min
    std::size_t first = 0;  ///< index of the lowest member
};

/// Greedy 1D clustering: consecutive eigenvalues closer than cluster_tol share a cluster.
std::vector<BandCluster> flat_band_report(const SpectrumResult& spectrum, double cluster_tol);
std::vector<BandCluster> cluster_levels(const Eigen::VectorXd& sorted, double cluster_tol);

struct GapWindow {
    double lower = 0.0;
    double upper = 0.0;
};

/// Open intervals between consecutive sorted levels separated by more than min_width.
std::vector<GapWindow> spectral_gaps(const Eigen::VectorXd& sorted, double min_width);

struct EdgeState {
    std::size_t index = 0;
    double energy = 0.0;
    double boundary_weight = 0.0;
    /// Amplitude decay length in cells from an exponential fit; 0 when the state is
    /// confined to the boundary cells, infinity when it does not decay.
    double localization_length = 0.0;
};

/// Gaps between `band_count` equal-size groups of sorted (bulk) levels, where positive.
std::vector<GapWindow> band_gap_windows(const Eigen::VectorXd& sorted, std::size_t band_count);

/// States strictly inside one of the windows with boundary weight above the threshold.
/// Always empty for periodic boundaries.
std::vector<EdgeState> edge_state_report(const SpectrumResult& spectrum,
                                         const std::vector<GapWindow>& gap_windows,
                                         double weight_threshold = 0.5);

double localization_length(const SpectrumResult& spectrum, std::size_t n);

/// Smallest gap between `band_count` equal-size groups of sorted levels; NaN when the
/// level count is not divisible.
double minimal_band_gap(const Eigen::VectorXd& sorted, std::size_t band_count);

struct FluxSweep {
    std::vector<double> flux;
    std::vector<Eigen::VectorXd> eigenvalues;
    std::vector<double> min_gap;
};

/// Spectra over a flux grid in [-pi, pi].
FluxSweep flux_sweep(const std::function<TightBinding(double)>& model_builder,
                     const std::vector<double>& flux_grid, std::size_t band_count = 0,
                     unsigned jobs = 1);

/// n points evenly spaced over [lo, hi] inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace phonon_gauge
