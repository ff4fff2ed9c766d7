#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phonon_gauge/couplings.hpp"
#include "phonon_gauge/fock.hpp"
#include "phonon_gauge/model.hpp"

namespace phonon_gauge {

/// Site-local diagonal contribution f(t) * levels[n_site]. `integral` must return the
/// antiderivative of `coefficient` with integral(0) == 0; the integrator removes these
/// terms exactly through a diagonal frame change.
struct LocalDiagonalTerm {
    std::size_t site = 0;
    Eigen::VectorXd levels;
    std::function<double(double)> coefficient;
    std::function<double(double)> integral;
};

/// c(t) * op. The sum over all operator terms plus the static part must be Hermitian.
struct OperatorTerm {
    Operator op;
    std::function<std::complex<double>(double)> coefficient;
};

/// H(t) = sum_k f_k(t) diag_k + static + sum_k c_k(t) op_k on a truncated Fock space.
class DrivenHamiltonian {
public:
    explicit DrivenHamiltonian(FockSpace space);

    const FockSpace& space() const noexcept { return space_; }

    /// effective, cosine_exact or laser_exact; copied into EvolutionResult.
    const std::string& model() const noexcept { return model_; }
    void set_model(std::string model) { model_ = std::move(model); }

    void add_diagonal(LocalDiagonalTerm term);
    void add_static(const Operator& op);
    void add_drive(OperatorTerm term);

    /// Largest frequency the integrator has to resolve.
    double max_frequency() const;
    void set_characteristic_frequency(double w) { characteristic_frequency_ = w; }

    /// Full operator at time t.
    Operator at(double t) const;

    /// Accumulated phase of the diagonal terms for every basis state.
    Eigen::VectorXd frame_phase(double t) const;

    /// exp(-i frame_phase(t)) per basis state; all ones without diagonal terms.
    Eigen::VectorXcd frame_factors(double t) const;

    /// out = -i U(t)^dagger V(t) U(t) in, where U(t) = exp(-i frame_phase(t)) and V is
    /// everything except the diagonal terms.
    void interaction_derivative(double t, const Eigen::VectorXcd& in,
                                Eigen::VectorXcd& out) const;
    /// Same, with factors = frame_factors(t) supplied by the caller.
    void interaction_derivative(double t, const Eigen::VectorXcd& factors,
                                const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

    /// Frame state -> lab state at time t.
    Eigen::VectorXcd to_lab(double t, const Eigen::VectorXcd& frame_state) const;

private:
    // static_ and every drive operator merged row by row; term 0 is static_, term k + 1
    // is drives_[k].
    struct FusedRows {
        std::vector<int> start;
        std::vector<int> column;
        std::vector<int> term;
        std::vector<std::complex<double>> value;
    };
    void rebuild_fused();
    void apply_fused(double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

    FockSpace space_;
    std::vector<LocalDiagonalTerm> diagonal_;
    Operator static_;
    std::vector<OperatorTerm> drives_;
    double characteristic_frequency_ = 0.0;
    std::string model_ = "custom";
    FusedRows fused_;
};

struct HamiltonianOptions {
    /// Keep J (a_i a_j + h.c.) from the Coulomb coupling (off by default).
    bool counter_rotating = false;
};

/// sum_{i != j} J_ij a_i^dagger a_j in the frame rotating with the traps.
DrivenHamiltonian effective_hamiltonian(const CouplingMatrix& matrix, const FockSpace& space);

/// Lab-frame traps with cosine-modulated frequencies plus bare hopping.
DrivenHamiltonian cosine_driven_hamiltonian(const TrapArray& array, const DriveSpec& drive,
                                            const CouplingMatrix& bare, const FockSpace& space,
                                            const HamiltonianOptions& options = {});

/// Lab-frame traps plus bare hopping plus the full Raman coupling
/// (Omega_L/2) sum_i [exp(i(theta_i - omega_L t)) D_i(eta) + h.c.].
DrivenHamiltonian laser_driven_hamiltonian(const TrapArray& array, const DriveSpec& drive,
                                           const CouplingMatrix& bare, const FockSpace& space,
                                           const HamiltonianOptions& options = {});

inline constexpr int kDefaultStepsPerPeriod = 256;

struct EvolutionOptions {
    double t_final = 0.0;
    /// Fixed step; 0 selects 2 pi / (max_frequency * steps_per_period).
    double dt = 0.0;
    int steps_per_period = kDefaultStepsPerPeriod;
    /// Uniformly spaced output times including 0 and t_final.
    std::size_t samples = 201;
    double abort_drift = 1e-4;
};

struct EvolutionResult {
    std::string model;
    std::vector<double> times;
    Eigen::MatrixXd populations;  ///< rows: times, columns: sites
    std::vector<double> norms;
    double dt = 0.0;
    Eigen::VectorXcd final_state;  ///< lab frame

    double max_norm_drift() const;
    double total_population(std::size_t sample) const { return populations.row(static_cast<Eigen::Index>(sample)).sum(); }
};

/// Classical fixed-step RK4 for i d(psi)/dt = H(t) psi.
EvolutionResult evolve(const DrivenHamiltonian& hamiltonian, const Eigen::VectorXcd& initial,
                       const EvolutionOptions& options);

// Two-ion link: effective vs laser-driven transfer after t* = pi / (2 |J_[r]|).

struct LinkScanParams {
    double gradient = 0.05;
    double lamb_dicke = 0.2;
    double rabi = 0.75;
    double coulomb_strength = 0.002;
    int order = 1;
    int n_max = 4;
    double spacing = 1.0;
    Direction direction = Direction::z;
    int steps_per_period = kDefaultStepsPerPeriod;
    double suppression_threshold = 1e-6;
    bool counter_rotating = false;
};

struct LinkScanPoint {
    double phase_difference = 0.0;
    bool defined = false;
    double effective_coupling = 0.0;  ///< |J_[r]|
    double t_star = 0.0;
    double effective_transfer = 0.0;  ///< n_2 at t*, effective model
    double exact_transfer = 0.0;      ///< n_2 at t*, laser-driven model
    double exact_norm_drift = 0.0;
};

struct LinkScanResult {
    LinkScanParams params;
    std::vector<LinkScanPoint> points;
};

DriveSpec link_drive(const LinkScanParams& params, double phase_difference);
TrapArray link_array(const LinkScanParams& params);

LinkScanPoint link_transfer_point(const LinkScanParams& params, double phase_difference);

LinkScanResult link_transfer_scan(const LinkScanParams& params,
                                  const std::vector<double>& phase_grid, unsigned jobs = 1);

// Four-ion plaquette, sites ordered (0,0), (1,0), (1,1), (0,1).

struct PlaquetteParams {
    double phase_x = 3.141592653589793;
    double phase_y = 3.141592653589793;
    double rabi = 0.25;
    double lamb_dicke = 0.2;
    double gradient = 0.05;
    double coulomb_strength = 0.002;
    int order = 1;
    int n_max = 2;
    /// d_x = d_y |F_r(eta_d, phase_x)|^aspect_exponent.
    double aspect_exponent = 1.0 / 3.0;
    /// Window length in units of pi / |J_x| (effective x-bond).
    double window = 2.0;
    std::size_t samples = 201;
    int steps_per_period = kDefaultStepsPerPeriod;
    std::size_t initial_site = 0;
    bool counter_rotating = false;
};

/// Presets: flux 0 uses phi_y = 0, Omega_L = 0.75; flux pi uses phi_y = pi,
/// Omega_L = 0.25.
PlaquetteParams plaquette_preset(bool pi_flux);

struct PlaquetteResult {
    PlaquetteParams params;
    double spacing_y = 1.0;
    double window = 0.0;
    double flux = 0.0;  ///< counterclockwise flux of the effective couplings
    CouplingMatrix effective_couplings;
    EvolutionResult effective;
    EvolutionResult exact;
};

TrapArray plaquette_array(const PlaquetteParams& params);
DriveSpec plaquette_drive(const PlaquetteParams& params);

PlaquetteResult plaquette_experiment(const PlaquetteParams& params, bool run_exact = true);

}  // namespace phonon_gauge
