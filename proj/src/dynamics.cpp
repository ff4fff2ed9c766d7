#include "phonon_gauge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phonon_gauge/errors.hpp"
#include "phonon_gauge/parallel.hpp"

namespace phonon_gauge {

using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

double row_sum_norm(const Operator& op) {
    double best = 0.0;
    for (Eigen::Index r = 0; r < op.outerSize(); ++r) {
        double sum = 0.0;
        for (Operator::InnerIterator it(op, r); it; ++it) sum += std::abs(it.value());
        best = std::max(best, sum);
    }
    return best;
}

void check_sizes(const TrapArray& array, const CouplingMatrix& bare, const FockSpace& space) {
    if (bare.size() != array.size() || space.sites() != array.size()) {
        throw DomainError("array, coupling matrix and Fock space disagree on the site count");
    }
}

Operator coupling_operator(const CouplingMatrix& matrix, const FockSpace& space,
                           bool counter_rotating) {
    const auto dim = static_cast<Eigen::Index>(space.dimension());
    Operator h(dim, dim);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            if (i == j) continue;
            const cplx value = matrix(i, j);
            if (value == 0.0) continue;
            h += value * hopping_operator(space, i, j);
            if (counter_rotating && i < j) {
                const Operator lower_i = ladder_matrix(space, i, LadderKind::lower);
                const Operator lower_j = ladder_matrix(space, j, LadderKind::lower);
                const Operator pair = lower_i * lower_j;
                h += value * pair;
                h += std::conj(value) * Operator(pair.adjoint());
            }
        }
    }
    h.prune(cplx(0.0));
    return h;
}

Eigen::VectorXd number_levels(const FockSpace& space) {
    return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(space.local_dimension()), 0.0,
                                      static_cast<double>(space.n_max()));
}

LocalDiagonalTerm trap_term(const FockSpace& space, std::size_t site, double frequency) {
    return {site, number_levels(space), [frequency](double) { return frequency; },
            [frequency](double t) { return frequency * t; }};
}

}  // namespace

DrivenHamiltonian::DrivenHamiltonian(FockSpace space)
    : space_(std::move(space)),
      static_(static_cast<Eigen::Index>(space_.dimension()),
              static_cast<Eigen::Index>(space_.dimension())) {
    rebuild_fused();
}

void DrivenHamiltonian::add_diagonal(LocalDiagonalTerm term) {
    if (term.site >= space_.sites()) throw DomainError("diagonal term on a missing site");
    if (static_cast<std::size_t>(term.levels.size()) != space_.local_dimension()) {
        throw DomainError("diagonal term levels do not match n_max");
    }
    diagonal_.push_back(std::move(term));
}

void DrivenHamiltonian::add_static(const Operator& op) {
    if (op.rows() != static_.rows() || op.cols() != static_.cols()) {
        throw DomainError("static operator dimension mismatch");
    }
    static_ += op;
    rebuild_fused();
}

void DrivenHamiltonian::add_drive(OperatorTerm term) {
    if (term.op.rows() != static_.rows() || term.op.cols() != static_.cols()) {
        throw DomainError("drive operator dimension mismatch");
    }
    drives_.push_back(std::move(term));
    rebuild_fused();
}

void DrivenHamiltonian::rebuild_fused() {
    FusedRows f;
    const auto rows = static_cast<Eigen::Index>(space_.dimension());
    f.start.reserve(static_cast<std::size_t>(rows) + 1);
    f.start.push_back(0);
    auto append = [&f](const Operator& op, Eigen::Index row, int term) {
        for (Operator::InnerIterator it(op, row); it; ++it) {
            if (it.value() == cplx(0.0)) continue;
            f.column.push_back(static_cast<int>(it.col()));
            f.term.push_back(term);
            f.value.push_back(it.value());
        }
    };
    for (Eigen::Index row = 0; row < rows; ++row) {
        append(static_, row, 0);
        for (std::size_t k = 0; k < drives_.size(); ++k) append(drives_[k].op, row, static_cast<int>(k) + 1);
        f.start.push_back(static_cast<int>(f.column.size()));
    }
    fused_ = std::move(f);
}

void DrivenHamiltonian::apply_fused(double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    // plain real arithmetic; std::complex products carry NaN recovery branches
    std::vector<double> coef_re(drives_.size() + 1), coef_im(drives_.size() + 1);
    coef_re[0] = 1.0;
    coef_im[0] = 0.0;
    for (std::size_t k = 0; k < drives_.size(); ++k) {
        const cplx c = drives_[k].coefficient(t);
        coef_re[k + 1] = c.real();
        coef_im[k + 1] = c.imag();
    }
    const auto rows = static_cast<Eigen::Index>(space_.dimension());
    out.resize(rows);
    for (Eigen::Index row = 0; row < rows; ++row) {
        double acc_re = 0.0, acc_im = 0.0;
        auto k = static_cast<std::size_t>(fused_.start[static_cast<std::size_t>(row)]);
        const auto end = static_cast<std::size_t>(fused_.start[static_cast<std::size_t>(row) + 1]);
        // entries of one term are contiguous within a row
        while (k < end) {
            const auto term = static_cast<std::size_t>(fused_.term[k]);
            double run_re = 0.0, run_im = 0.0;
            for (; k < end && static_cast<std::size_t>(fused_.term[k]) == term; ++k) {
                const double vr = fused_.value[k].real(), vi = fused_.value[k].imag();
                const cplx x = in[fused_.column[k]];
                run_re += vr * x.real() - vi * x.imag();
                run_im += vr * x.imag() + vi * x.real();
            }
            acc_re += coef_re[term] * run_re - coef_im[term] * run_im;
            acc_im += coef_re[term] * run_im + coef_im[term] * run_re;
        }
        out[row] = cplx(acc_re, acc_im);
    }
}

double DrivenHamiltonian::max_frequency() const {
    double w = std::max(characteristic_frequency_, row_sum_norm(static_));
    for (const auto& d : drives_) w = std::max(w, row_sum_norm(d.op) * std::abs(d.coefficient(0.0)));
    return w;
}

Operator DrivenHamiltonian::at(double t) const {
    const auto dim = static_cast<Eigen::Index>(space_.dimension());
    Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(dim);
    for (const auto& term : diagonal_) {
        const double f = term.coefficient(t);
        for (Eigen::Index m = 0; m < dim; ++m) {
            diag[m] += f * term.levels[space_.occupation(static_cast<std::size_t>(m), term.site)];
        }
    }
    Operator h = static_;
    for (const auto& d : drives_) h += d.coefficient(t) * d.op;
    Operator d(dim, dim);
    d.reserve(Eigen::VectorXi::Constant(dim, 1));
    for (Eigen::Index m = 0; m < dim; ++m) {
        if (diag[m] != 0.0) d.insert(m, m) = diag[m];
    }
    h += d;
    return h;
}

Eigen::VectorXd DrivenHamiltonian::frame_phase(double t) const {
    const auto dim = static_cast<Eigen::Index>(space_.dimension());
    Eigen::VectorXd phase = Eigen::VectorXd::Zero(dim);
    for (const auto& term : diagonal_) {
        const double a = term.integral(t);
        for (Eigen::Index m = 0; m < dim; ++m) {
            phase[m] += a * term.levels[space_.occupation(static_cast<std::size_t>(m), term.site)];
        }
    }
    return phase;
}

Eigen::VectorXcd DrivenHamiltonian::frame_factors(double t) const {
    const std::size_t sites = space_.sites();
    const auto local = static_cast<Eigen::Index>(space_.local_dimension());
    Eigen::MatrixXd site_phase = Eigen::MatrixXd::Zero(local, static_cast<Eigen::Index>(sites));
    for (const auto& term : diagonal_) {
        site_phase.col(static_cast<Eigen::Index>(term.site)) += term.integral(t) * term.levels;
    }
    Eigen::MatrixXcd site_factor(local, static_cast<Eigen::Index>(sites));
    for (Eigen::Index s = 0; s < site_factor.cols(); ++s) {
        for (Eigen::Index n = 0; n < local; ++n) site_factor(n, s) = std::polar(1.0, -site_phase(n, s));
    }
    const auto dim = static_cast<Eigen::Index>(space_.dimension());
    Eigen::VectorXcd factors(dim);
    for (Eigen::Index m = 0; m < dim; ++m) {
        cplx f = 1.0;
        for (std::size_t s = 0; s < sites; ++s) {
            f *= site_factor(space_.occupation(static_cast<std::size_t>(m), s),
                             static_cast<Eigen::Index>(s));
        }
        factors[m] = f;
    }
    return factors;
}

void DrivenHamiltonian::interaction_derivative(double t, const Eigen::VectorXcd& in,
                                               Eigen::VectorXcd& out) const {
    interaction_derivative(t, frame_factors(t), in, out);
}

void DrivenHamiltonian::interaction_derivative(double t, const Eigen::VectorXcd& factors,
                                               const Eigen::VectorXcd& in,
                                               Eigen::VectorXcd& out) const {
    const cplx minus_i(0.0, -1.0);
    if (diagonal_.empty()) {
        apply_fused(t, in, out);
        out *= minus_i;
        return;
    }
    const Eigen::VectorXcd lab = factors.cwiseProduct(in);
    apply_fused(t, lab, out);
    out = minus_i * factors.conjugate().cwiseProduct(out);
}

Eigen::VectorXcd DrivenHamiltonian::to_lab(double t, const Eigen::VectorXcd& frame_state) const {
    if (diagonal_.empty()) return frame_state;
    return frame_factors(t).cwiseProduct(frame_state);
}

DrivenHamiltonian effective_hamiltonian(const CouplingMatrix& matrix, const FockSpace& space) {
    if (matrix.size() != space.sites()) {
        throw DomainError("coupling matrix has " + std::to_string(matrix.size()) +
                          " sites but the Fock space has " + std::to_string(space.sites()));
    }
    DrivenHamiltonian h(space);
    h.add_static(coupling_operator(matrix, space, false));
    h.set_model("effective");
    return h;
}

DrivenHamiltonian cosine_driven_hamiltonian(const TrapArray& array, const DriveSpec& drive,
                                            const CouplingMatrix& bare, const FockSpace& space,
                                            const HamiltonianOptions& options) {
    if (drive.mode != DriveMode::cosine) {
        throw ConfigurationError("cosine-driven Hamiltonian needs a cosine drive");
    }
    check_sizes(array, bare, space);
    DrivenHamiltonian h(space);
    double w_max = 0.0;
    const double amplitude = drive.strength * drive.frequency;
    const double w_d = drive.frequency;
    const double eta = drive.strength;
    for (std::size_t j = 0; j < array.size(); ++j) {
        const double w = array.frequency(j, drive.direction);
        w_max = std::max(w_max, w);
        h.add_diagonal(trap_term(space, j, w));
        const double phi = drive.site_phase(array.site(j).coord);
        h.add_diagonal({j, number_levels(space),
                        [=](double t) { return amplitude * std::cos(w_d * t + phi); },
                        [=](double t) { return eta * (std::sin(w_d * t + phi) - std::sin(phi)); }});
    }
    h.add_static(coupling_operator(bare, space, options.counter_rotating));
    h.set_characteristic_frequency((options.counter_rotating ? 2.0 : 1.0) * w_max + amplitude);
    h.set_model("cosine_exact");
    return h;
}

DrivenHamiltonian laser_driven_hamiltonian(const TrapArray& array, const DriveSpec& drive,
                                           const CouplingMatrix& bare, const FockSpace& space,
                                           const HamiltonianOptions& options) {
    if (drive.mode != DriveMode::laser) {
        throw ConfigurationError("laser-driven Hamiltonian needs a laser drive");
    }
    if (!drive.laser) throw ConfigurationError("laser drive is missing its laser parameters");
    check_sizes(array, bare, space);
    const LaserParameters& laser = *drive.laser;
    const double eta = laser.lamb_dicke[static_cast<std::size_t>(drive.direction)];
    const double rabi = laser.rabi;
    const double w_l = laser.beat_frequency;

    const Eigen::MatrixXcd displacement = local_displacement(space.n_max(), eta);
    const Eigen::VectorXd diagonal_levels = displacement.diagonal().real();
    Eigen::MatrixXcd off_diagonal = displacement;
    off_diagonal.diagonal().setZero();

    DrivenHamiltonian h(space);
    double w_max = w_l;
    for (std::size_t j = 0; j < array.size(); ++j) {
        const double w = array.frequency(j, drive.direction);
        w_max = std::max(w_max, w);
        h.add_diagonal(trap_term(space, j, w));

        const double theta = drive.laser_phase(array.site(j).coord);
        h.add_diagonal({j, diagonal_levels,
                        [=](double t) { return rabi * std::cos(theta - w_l * t); },
                        [=](double t) {
                            return rabi * (std::sin(theta) - std::sin(theta - w_l * t)) / w_l;
                        }});
        if (rabi == 0.0 || eta == 0.0) continue;
        const Operator raising_part = embed_local(space, j, off_diagonal);
        h.add_drive({raising_part,
                     [=](double t) { return 0.5 * rabi * std::polar(1.0, theta - w_l * t); }});
        h.add_drive({Operator(raising_part.adjoint()),
                     [=](double t) { return 0.5 * rabi * std::polar(1.0, w_l * t - theta); }});
    }
    h.add_static(coupling_operator(bare, space, options.counter_rotating));
    h.set_characteristic_frequency((options.counter_rotating ? 2.0 : 1.0) * w_max + rabi);
    h.set_model("laser_exact");
    return h;
}

double EvolutionResult::max_norm_drift() const {
    double drift = 0.0;
    for (double n : norms) drift = std::max(drift, std::abs(n - 1.0));
    return drift;
}

EvolutionResult evolve(const DrivenHamiltonian& hamiltonian, const Eigen::VectorXcd& initial,
                       const EvolutionOptions& options) {
    const FockSpace& space = hamiltonian.space();
    if (static_cast<std::size_t>(initial.size()) != space.dimension()) {
        throw DomainError("initial state dimension does not match the Hamiltonian");
    }
    if (std::abs(initial.squaredNorm() - 1.0) > 1e-10) {
        throw DomainError("initial state is not normalized");
    }
    if (!(options.t_final >= 0.0)) throw DomainError("t_final must be non-negative");
    if (options.dt < 0.0) throw DomainError("dt must be positive");
    if (options.steps_per_period < 1) throw DomainError("steps_per_period must be >= 1");

    double dt = options.dt;
    if (dt == 0.0) {
        const double w = hamiltonian.max_frequency();
        dt = w > 0.0 ? 2.0 * pi / (w * options.steps_per_period) : std::max(options.t_final, 1.0);
    }

    const std::size_t samples = options.t_final == 0.0 ? 1 : std::max<std::size_t>(options.samples, 2);
    const double interval = samples > 1 ? options.t_final / static_cast<double>(samples - 1) : 0.0;
    const std::size_t steps_per_sample =
        samples > 1 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(interval / dt - 1e-9)))
                    : 0;
    const double h = samples > 1 ? interval / static_cast<double>(steps_per_sample) : dt;

    EvolutionResult result;
    result.model = hamiltonian.model();
    result.dt = h;
    result.populations.resize(static_cast<Eigen::Index>(samples),
                              static_cast<Eigen::Index>(space.sites()));

    Eigen::VectorXcd psi = initial;
    const auto dim = initial.size();
    Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), stage(dim);

    auto record = [&](std::size_t k, double t) {
        result.times.push_back(t);
        result.populations.row(static_cast<Eigen::Index>(k)) = site_populations(space, psi);
        const double norm = psi.squaredNorm();
        result.norms.push_back(norm);
        if (std::abs(norm - 1.0) > options.abort_drift) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "norm drift " << std::abs(norm - 1.0) << " exceeds " << options.abort_drift
                << " at t = " << t << "; step dt = " << h << " is too large";
            throw IntegrationFailure(msg.str());
        }
    };

    record(0, 0.0);
    // the end of one step is the start of the next, so each step needs two new frames
    Eigen::VectorXcd f_start = hamiltonian.frame_factors(0.0), f_mid(dim), f_end(dim);
    for (std::size_t k = 1; k < samples; ++k) {
        const double t0 = interval * static_cast<double>(k - 1);
        for (std::size_t step = 0; step < steps_per_sample; ++step) {
            const double t = t0 + h * static_cast<double>(step);
            f_mid = hamiltonian.frame_factors(t + 0.5 * h);
            f_end = hamiltonian.frame_factors(t + h);
            hamiltonian.interaction_derivative(t, f_start, psi, k1);
            stage = psi + (0.5 * h) * k1;
            hamiltonian.interaction_derivative(t + 0.5 * h, f_mid, stage, k2);
            stage = psi + (0.5 * h) * k2;
            hamiltonian.interaction_derivative(t + 0.5 * h, f_mid, stage, k3);
            stage = psi + h * k3;
            hamiltonian.interaction_derivative(t + h, f_end, stage, k4);
            psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            f_start.swap(f_end);
        }
        record(k, interval * static_cast<double>(k));
    }
    result.final_state = hamiltonian.to_lab(options.t_final, psi);
    return result;
}

TrapArray link_array(const LinkScanParams& params) {
    ArraySpec spec;
    spec.layout = Layout::link;
    spec.dims = {2, 1};
    spec.spacings = {params.spacing, params.spacing};
    spec.gradient_direction = params.direction;
    spec.gradient = params.gradient;
    spec.coulomb_strength = params.coulomb_strength;
    return build_array(spec);
}

DriveSpec link_drive(const LinkScanParams& params, double phase_difference) {
    LaserParameters laser;
    laser.rabi = params.rabi;
    laser.beat_frequency = params.gradient / params.order;
    laser.lamb_dicke[static_cast<std::size_t>(params.direction)] = params.lamb_dicke;
    return DriveSpec::from_laser(laser, params.order, phase_difference, 0.0, params.direction);
}

LinkScanPoint link_transfer_point(const LinkScanParams& params, double phase_difference) {
    LinkScanPoint point;
    point.phase_difference = phase_difference;
    const TrapArray array = link_array(params);
    const DriveSpec drive = link_drive(params, phase_difference);
    const CouplingMatrix effective = effective_coupling_matrix(array, drive);
    point.effective_coupling = std::abs(effective(1, 0));
    if (point.effective_coupling < params.suppression_threshold) return point;

    point.defined = true;
    point.t_star = pi / (2.0 * point.effective_coupling);
    const FockSpace space(2, params.n_max);
    const Eigen::VectorXcd start = single_excitation_state(space, 0);

    EvolutionOptions options;
    options.t_final = point.t_star;
    options.samples = 2;
    options.steps_per_period = params.steps_per_period;

    const auto eff = evolve(effective_hamiltonian(effective, space), start, options);
    point.effective_transfer = eff.populations(1, 1);

    const CouplingMatrix bare = bare_coupling_matrix(array, params.direction);
    const auto exact = evolve(
        laser_driven_hamiltonian(array, drive, bare, space, {params.counter_rotating}), start,
        options);
    point.exact_transfer = exact.populations(1, 1);
    point.exact_norm_drift = exact.max_norm_drift();
    return point;
}

LinkScanResult link_transfer_scan(const LinkScanParams& params,
                                  const std::vector<double>& phase_grid, unsigned jobs) {
    LinkScanResult result;
    result.params = params;
    result.points.resize(phase_grid.size());
    parallel_for(phase_grid.size(), jobs, [&](std::size_t i) {
        result.points[i] = link_transfer_point(params, phase_grid[i]);
    });
    return result;
}

PlaquetteParams plaquette_preset(bool pi_flux) {
    PlaquetteParams p;
    p.phase_x = pi;
    p.phase_y = pi_flux ? pi : 0.0;
    p.rabi = pi_flux ? 0.25 : 0.75;
    return p;
}

DriveSpec plaquette_drive(const PlaquetteParams& params) {
    LaserParameters laser;
    laser.rabi = params.rabi;
    laser.beat_frequency = params.gradient / params.order;
    laser.lamb_dicke[static_cast<std::size_t>(Direction::z)] = params.lamb_dicke;
    return DriveSpec::from_laser(laser, params.order, params.phase_x, params.phase_y, Direction::z);
}

TrapArray plaquette_array(const PlaquetteParams& params) {
    const DriveSpec drive = plaquette_drive(params);
    const double dressing = std::abs(dressed_factor(params.order, drive.strength, params.phase_x));
    if (!(dressing > 0.0)) {
        throw ConfigurationError("x-bonds are fully suppressed; the plaquette aspect ratio is undefined");
    }
    ArraySpec spec;
    spec.layout = Layout::plaquette;
    spec.dims = {2, 2};
    spec.spacings = {1.0, std::pow(dressing, -params.aspect_exponent)};
    spec.gradient_direction = Direction::z;
    spec.gradient = params.gradient;
    spec.coulomb_strength = params.coulomb_strength;
    return build_array(spec);
}

PlaquetteResult plaquette_experiment(const PlaquetteParams& params, bool run_exact) {
    if (params.initial_site >= 4) throw DomainError("plaquette initial site must be 0..3");
    if (!(params.window > 0.0)) throw DomainError("plaquette window must be positive");
    PlaquetteResult result;
    result.params = params;
    const TrapArray array = plaquette_array(params);
    const DriveSpec drive = plaquette_drive(params);
    result.spacing_y = array.spacing_y();
    result.effective_couplings = effective_coupling_matrix(array, drive);
    const double j_x = std::abs(result.effective_couplings(1, 0));
    result.window = params.window * pi / j_x;
    const std::size_t ring[4] = {0, 1, 2, 3};
    result.flux = plaquette_flux(result.effective_couplings, ring);

    const FockSpace space(4, params.n_max);
    const Eigen::VectorXcd start = single_excitation_state(space, params.initial_site);
    EvolutionOptions options;
    options.t_final = result.window;
    options.samples = params.samples;
    options.steps_per_period = params.steps_per_period;

    result.effective = evolve(effective_hamiltonian(result.effective_couplings, space), start, options);
    if (run_exact) {
        const CouplingMatrix bare = bare_coupling_matrix(array, Direction::z);
        result.exact = evolve(
            laser_driven_hamiltonian(array, drive, bare, space, {params.counter_rotating}), start,
            options);
    }
    return result;
}

}  // namespace phonon_gauge
