#include "phonon_gauge/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "phonon_gauge/couplings.hpp"
#include "phonon_gauge/errors.hpp"
#include "phonon_gauge/parallel.hpp"

namespace phonon_gauge {

using cplx = std::complex<double>;
using std::numbers::pi;

std::string_view to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary parse_boundary(std::string_view text) {
    if (text == "open") return Boundary::open;
    if (text == "periodic") return Boundary::periodic;
    throw DomainError("unknown boundary '" + std::string(text) + "'");
}

namespace {

void add_bond(Eigen::MatrixXcd& h, std::size_t i, std::size_t j, cplx value) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    h(ii, jj) += value;
    h(jj, ii) += std::conj(value);
}

}  // namespace

TightBinding rhombic_ladder_matrix(int cells, double j1, double j2, double flux,
                                   Boundary boundary) {
    if (cells < 1) throw InvalidGeometry("rhombic ladder needs at least one cell");
    if (!(j1 >= 0.0) || !(j2 >= 0.0)) throw DomainError("ladder couplings must be non-negative");
    const bool periodic = boundary == Boundary::periodic;
    const std::size_t n = 3 * static_cast<std::size_t>(cells) + (periodic ? 0 : 1);
    auto hub = [&](int j) { return periodic ? ladder_hub(j % cells) : ladder_hub(j); };

    TightBinding tb;
    tb.boundary = boundary;
    tb.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (int j = 0; j < cells; ++j) {
        add_bond(tb.matrix, hub(j), ladder_upper(j), j1);
        add_bond(tb.matrix, ladder_lower(j), hub(j + 1), j1);
        add_bond(tb.matrix, hub(j), ladder_lower(j), j2);
        add_bond(tb.matrix, ladder_upper(j), hub(j + 1), j2 * std::polar(1.0, flux));
    }
    tb.cell.resize(n);
    for (std::size_t i = 0; i < n; ++i) tb.cell[i] = std::min(static_cast<int>(i / 3), cells - 1);
    return tb;
}

double ladder_j2_from_geometry(double j1, int order, double strength, double phase_difference,
                               double spacing_x, double spacing_y) {
    if (!(spacing_x > 0.0) || !(spacing_y > 0.0)) throw InvalidGeometry("spacings must be positive");
    const double ratio = spacing_y / spacing_x;
    return j1 * std::abs(dressed_factor(order, strength, phase_difference)) * ratio * ratio * ratio;
}

TightBinding square_lattice_matrix(int lx, int ly, double alpha, double jx, double jy, int m_max,
                                   Boundary boundary) {
    if (lx < 1 || ly < 1) throw InvalidGeometry("square lattice dimensions must be >= 1");
    if (m_max < 1) throw DomainError("dipolar range m_max must be >= 1");
    const bool periodic = boundary == Boundary::periodic;
    if (periodic && ly > 1) {
        const double winding = std::remainder(alpha * ly, 2.0 * pi);
        if (std::abs(winding) > 1e-9) {
            throw DomainError("periodic Landau gauge needs alpha * L_y to be a multiple of 2 pi");
        }
    }
    const auto n = static_cast<std::size_t>(lx) * static_cast<std::size_t>(ly);
    auto site = [lx](int x, int y) { return static_cast<std::size_t>(y) * lx + x; };

    TightBinding tb;
    tb.boundary = boundary;
    tb.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            const cplx hop_x = jx * std::polar(1.0, -alpha * y);
            if (x + 1 < lx) {
                add_bond(tb.matrix, site(x, y), site(x + 1, y), hop_x);
            } else if (periodic && lx > 1) {
                add_bond(tb.matrix, site(x, y), site(0, y), hop_x);
            }
            for (int m = 1; m <= m_max; ++m) {
                const double hop_y = jy / (static_cast<double>(m) * m * m);
                if (y + m < ly) {
                    add_bond(tb.matrix, site(x, y), site(x, y + m), hop_y);
                } else if (periodic && m < ly) {
                    add_bond(tb.matrix, site(x, y), site(x, (y + m) % ly), hop_y);
                }
            }
        }
    }
    tb.cell.resize(n);
    for (std::size_t i = 0; i < n; ++i) tb.cell[i] = static_cast<int>(i % static_cast<std::size_t>(lx));
    return tb;
}

std::vector<std::size_t> square_plaquette(int lx, int x, int y) {
    auto site = [lx](int sx, int sy) { return static_cast<std::size_t>(sy) * lx + sx; };
    return {site(x, y), site(x + 1, y), site(x + 1, y + 1), site(x, y + 1)};
}

std::vector<double> SpectrumResult::cell_probabilities(std::size_t n) const {
    const auto [lo, hi] = std::minmax_element(cell.begin(), cell.end());
    std::vector<double> p(static_cast<std::size_t>(*hi - *lo) + 1, 0.0);
    for (std::size_t i = 0; i < cell.size(); ++i) {
        p[static_cast<std::size_t>(cell[i] - *lo)] +=
            std::norm(eigenvectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)));
    }
    return p;
}

double default_cluster_tolerance(const Eigen::VectorXd& eigenvalues) {
    const double scale = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    return scale > 0.0 ? 1e-8 * scale : 1e-8;
}

std::vector<BandCluster> cluster_levels(const Eigen::VectorXd& sorted, double cluster_tol) {
    std::vector<BandCluster> clusters;
    const auto n = static_cast<std::size_t>(sorted.size());
    std::size_t start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && sorted[static_cast<Eigen::Index>(i)] - sorted[static_cast<Eigen::Index>(i - 1)] <= cluster_tol) {
            continue;
        }
        BandCluster c;
        c.first = start;
        c.count = i - start;
        c.energy = sorted.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(c.count)).mean();
        c.spread = sorted[static_cast<Eigen::Index>(i - 1)] - sorted[static_cast<Eigen::Index>(start)];
        clusters.push_back(c);
        start = i;
    }
    return clusters;
}

SpectrumResult eigensystem(const TightBinding& model, double cluster_tol) {
    const Eigen::MatrixXcd& h = model.matrix;
    if (h.rows() != h.cols()) throw DomainError("matrix is not square");
    if (model.cell.size() != model.size()) throw DomainError("cell labels do not match the matrix");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asymmetry = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (asymmetry > 1e-12 * scale) {
        throw DomainError("matrix is not Hermitian (max |H - H^dagger| = " +
                          std::to_string(asymmetry) + ")");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw DomainError("Hermitian eigensolver failed");

    SpectrumResult out;
    out.boundary = model.boundary;
    out.cell = model.cell;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    const auto n = h.rows();
    out.ipr.resize(n);
    out.boundary_weight.resize(n);

    const auto [lo, hi] = std::minmax_element(model.cell.begin(), model.cell.end());
    for (Eigen::Index k = 0; k < n; ++k) {
        auto v = out.eigenvectors.col(k);
        Eigen::Index pivot = 0;
        const double largest = v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v[i]) >= largest * (1.0 - 1e-12)) {
                pivot = i;
                break;
            }
        }
        v *= std::conj(v[pivot]) / std::abs(v[pivot]);
        v[pivot] = std::abs(v[pivot]);

        out.ipr[k] = v.cwiseAbs2().cwiseAbs2().sum();
        double edge = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = model.cell[static_cast<std::size_t>(i)];
            if (c == *lo || c == *hi) edge += std::norm(v[i]);
        }
        out.boundary_weight[k] = edge;
    }

    const double tol = cluster_tol > 0.0 ? cluster_tol : default_cluster_tolerance(out.eigenvalues);
    out.band.assign(static_cast<std::size_t>(n), 0);
    int label = 0;
    for (const auto& c : cluster_levels(out.eigenvalues, tol)) {
        for (std::size_t i = 0; i < c.count; ++i) out.band[c.first + i] = label;
        ++label;
    }
    return out;
}

SpectrumResult eigensystem(const Eigen::MatrixXcd& matrix, double cluster_tol) {
    TightBinding tb;
    tb.matrix = matrix;
    tb.cell.resize(static_cast<std::size_t>(matrix.rows()));
    for (std::size_t i = 0; i < tb.cell.size(); ++i) tb.cell[i] = static_cast<int>(i);
    return eigensystem(tb, cluster_tol);
}

std::vector<BandCluster> flat_band_report(const SpectrumResult& spectrum, double cluster_tol) {
    return cluster_levels(spectrum.eigenvalues, cluster_tol);
}

std::vector<GapWindow> spectral_gaps(const Eigen::VectorXd& sorted, double min_width) {
    std::vector<GapWindow> gaps;
    for (Eigen::Index i = 1; i < sorted.size(); ++i) {
        if (sorted[i] - sorted[i - 1] > min_width) gaps.push_back({sorted[i - 1], sorted[i]});
    }
    return gaps;
}

std::vector<GapWindow> band_gap_windows(const Eigen::VectorXd& sorted, std::size_t band_count) {
    std::vector<GapWindow> gaps;
    const auto n = static_cast<std::size_t>(sorted.size());
    if (band_count < 2 || n % band_count != 0) return gaps;
    const std::size_t group = n / band_count;
    for (std::size_t k = 1; k < band_count; ++k) {
        const auto i = static_cast<Eigen::Index>(k * group);
        if (sorted[i] > sorted[i - 1]) gaps.push_back({sorted[i - 1], sorted[i]});
    }
    return gaps;
}

double localization_length(const SpectrumResult& spectrum, std::size_t n) {
    const auto cells = spectrum.cell_probabilities(n);
    const std::size_t count = cells.size();
    // fold both ends onto the distance from the nearest boundary cell
    std::map<std::size_t, double> folded;
    for (std::size_t c = 0; c < count; ++c) folded[std::min(c, count - 1 - c)] += cells[c];
    double peak = 0.0;
    for (const auto& [d, p] : folded) peak = std::max(peak, p);

    // the outer quarter only, so the tail of the opposite end does not bias the slope
    const std::size_t reach = std::max<std::size_t>(1, (count - 1) / 4);
    std::vector<std::pair<double, double>> points;
    for (const auto& [d, p] : folded) {
        if (d <= reach && p > 1e-14 * peak) points.emplace_back(static_cast<double>(d), std::log(p));
    }
    if (points.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(points.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (!(slope < 0.0)) return std::numeric_limits<double>::infinity();
    return -2.0 / slope;
}

std::vector<EdgeState> edge_state_report(const SpectrumResult& spectrum,
                                         const std::vector<GapWindow>& gap_windows,
                                         double weight_threshold) {
    std::vector<EdgeState> out;
    if (spectrum.boundary == Boundary::periodic) return out;
    const double margin = 1e-9 * std::max(1.0, spectrum.eigenvalues.cwiseAbs().maxCoeff());
    for (std::size_t n = 0; n < spectrum.size(); ++n) {
        const double e = spectrum.eigenvalues[static_cast<Eigen::Index>(n)];
        const bool in_gap = std::any_of(gap_windows.begin(), gap_windows.end(), [&](const GapWindow& w) {
            return e > w.lower + margin && e < w.upper - margin;
        });
        const double weight = spectrum.boundary_weight[static_cast<Eigen::Index>(n)];
        if (!in_gap || !(weight > weight_threshold)) continue;
        out.push_back({n, e, weight, localization_length(spectrum, n)});
    }
    return out;
}

double minimal_band_gap(const Eigen::VectorXd& sorted, std::size_t band_count) {
    const auto n = static_cast<std::size_t>(sorted.size());
    if (band_count < 2 || n % band_count != 0) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t group = n / band_count;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < band_count; ++k) {
        const auto i = static_cast<Eigen::Index>(k * group);
        gap = std::min(gap, sorted[i] - sorted[i - 1]);
    }
    return gap;
}

FluxSweep flux_sweep(const std::function<TightBinding(double)>& model_builder,
                     const std::vector<double>& flux_grid, std::size_t band_count, unsigned jobs) {
    for (double phi : flux_grid) {
        if (!(phi >= -pi - 1e-12 && phi <= pi + 1e-12)) {
            throw DomainError("flux sweep grid must lie within [-pi, pi]");
        }
    }
    FluxSweep sweep;
    sweep.flux = flux_grid;
    sweep.eigenvalues.resize(flux_grid.size());
    sweep.min_gap.resize(flux_grid.size());
    parallel_for(flux_grid.size(), jobs, [&](std::size_t i) {
        const TightBinding tb = model_builder(flux_grid[i]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(tb.matrix, Eigen::EigenvaluesOnly);
        sweep.eigenvalues[i] = solver.eigenvalues();
        sweep.min_gap[i] = minimal_band_gap(sweep.eigenvalues[i], band_count);
    });
    return sweep;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = lo;
        return grid;
    }
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    if (n > 1) grid.back() = hi;
    return grid;
}

}  // namespace phonon_gauge
