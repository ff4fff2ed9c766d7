#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "phonon_gauge/couplings.hpp"
#include "phonon_gauge/errors.hpp"
#include "phonon_gauge/spectra.hpp"

using namespace phonon_gauge;
using std::numbers::pi;

namespace {

Eigen::VectorXd levels(const TightBinding& tb) { return eigensystem(tb).eigenvalues; }

double max_diff(const Eigen::VectorXd& a, const std::vector<double>& b) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[static_cast<std::size_t>(i)]));
    return d;
}

// Number of independent eigenvectors at energy e supported on the given sites.
Eigen::Index confined_states(const Eigen::MatrixXcd& h, double e, const std::vector<std::size_t>& sites) {
    Eigen::MatrixXcd m(h.rows(), static_cast<Eigen::Index>(sites.size()));
    for (std::size_t k = 0; k < sites.size(); ++k) {
        m.col(static_cast<Eigen::Index>(k)) = h.col(static_cast<Eigen::Index>(sites[k]));
        m(static_cast<Eigen::Index>(sites[k]), static_cast<Eigen::Index>(k)) -= e;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto s = svd.singularValues();
    Eigen::Index null = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) null += s[i] < 1e-10 ? 1 : 0;
    return null + (m.cols() - s.size());
}

}  // namespace

TEST_CASE("ladder sizes and bonds") {
    const auto open = rhombic_ladder_matrix(10, 1.0, 1.0, pi);
    CHECK(open.size() == 31);
    CHECK(open.cell.back() == 9);
    const auto periodic = rhombic_ladder_matrix(10, 1.0, 1.0, pi, Boundary::periodic);
    CHECK(periodic.size() == 30);

    const auto tb = rhombic_ladder_matrix(2, 1.5, 0.5, 0.7);
    const auto& h = tb.matrix;
    CHECK(h(ladder_hub(0), ladder_upper(0)) == std::complex<double>(1.5));
    CHECK(h(ladder_lower(0), ladder_hub(1)) == std::complex<double>(1.5));
    CHECK(h(ladder_hub(0), ladder_lower(0)) == std::complex<double>(0.5));
    CHECK(std::abs(h(ladder_upper(0), ladder_hub(1)) - std::polar(0.5, 0.7)) < 1e-16);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    const std::size_t rhombus[] = {ladder_hub(0), ladder_upper(0), ladder_hub(1), ladder_lower(0)};
    CHECK(std::abs(plaquette_flux(h, rhombus) - 0.7) < 1e-14);

    CHECK_THROWS_AS(rhombic_ladder_matrix(0, 1.0, 1.0, 0.0), InvalidGeometry);
}

TEST_CASE("single cell with J2 = 0 splits into two dimers") {
    const auto e = levels(rhombic_ladder_matrix(1, 1.3, 0.0, 0.4));
    CHECK(max_diff(e, {-1.3, -1.3, 1.3, 1.3}) < 1e-12);
}

TEST_CASE("open chain spectrum") {
    const int n = 4;
    const auto e = levels(square_lattice_matrix(n, 1, 0.9, 1.0, 1.0));
    std::vector<double> expected;
    for (int k = 1; k <= n; ++k) expected.push_back(2.0 * std::cos(k * pi / (n + 1)));
    std::sort(expected.begin(), expected.end());
    CHECK(max_diff(e, expected) < 1e-12);
    CHECK(e[3] == doctest::Approx((std::sqrt(5.0) + 1) / 2));
    CHECK(e[2] == doctest::Approx((std::sqrt(5.0) - 1) / 2));
}

TEST_CASE("periodic ladder matches Bloch bands") {
    for (double phi : {0.0, 0.6, pi / 2, pi, -2.3}) {
        for (auto [j1, j2] : {std::pair{1.0, 1.0}, std::pair{1.0, 0.4}}) {
            const auto e = levels(rhombic_ladder_matrix(8, j1, j2, phi, Boundary::periodic));
            CHECK(max_diff(e, oracle::ladder_bloch_levels(8, j1, j2, phi)) < 1e-10);
        }
    }
}

TEST_CASE("pi flux gives three flat bands") {
    const auto s = eigensystem(rhombic_ladder_matrix(10, 1.0, 1.0, pi, Boundary::periodic));
    const auto clusters = flat_band_report(s, 1e-6);
    REQUIRE(clusters.size() == 3);
    const double expected[] = {-2.0, 0.0, 2.0};
    for (int i = 0; i < 3; ++i) {
        CHECK(clusters[i].energy == doctest::Approx(expected[i]).epsilon(1e-12));
        CHECK(clusters[i].count == 10);
        CHECK(clusters[i].spread < 1e-10);
    }
    const auto unequal = flat_band_report(eigensystem(rhombic_ladder_matrix(6, 1.0, 0.5, pi, Boundary::periodic)), 1e-6);
    REQUIRE(unequal.size() == 3);
    CHECK(unequal[2].energy == doctest::Approx(std::sqrt(2.0 * 1.25)));
}

TEST_CASE("zero flux bands are dispersive apart from E = 0") {
    const auto s = eigensystem(rhombic_ladder_matrix(10, 1.0, 1.0, 0.0, Boundary::periodic));
    for (const auto& c : flat_band_report(s, 1e-6)) {
        if (std::abs(c.energy) > 1e-6) CHECK(c.count <= 2);
    }
}

TEST_CASE("an E = 0 cluster exists for every flux") {
    for (int k = 0; k <= 12; ++k) {
        const double phi = -pi + 2 * pi * k / 12;
        for (auto b : {Boundary::open, Boundary::periodic}) {
            const auto s = eigensystem(rhombic_ladder_matrix(7, 1.0, 0.8, phi, b));
            const auto clusters = flat_band_report(s, 1e-8);
            const bool zero = std::any_of(clusters.begin(), clusters.end(),
                                          [](const BandCluster& c) { return std::abs(c.energy) < 1e-9 && c.count >= 2; });
            CHECK(zero);
        }
    }
}

TEST_CASE("flat bands are spanned by cages on two adjacent cells") {
    const int p = 8;
    const auto tb = rhombic_ladder_matrix(p, 1.0, 1.0, pi, Boundary::periodic);
    for (double e : {-2.0, 2.0}) {
        Eigen::Index total = 0;
        for (int j = 0; j < p; ++j) {
            std::vector<std::size_t> sites;
            for (std::size_t i = 0; i < tb.size(); ++i) {
                if (tb.cell[i] == j || tb.cell[i] == (j + 1) % p) sites.push_back(i);
            }
            const auto n = confined_states(tb.matrix, e, sites);
            CHECK(n >= 1);
            total += n;
        }
        CHECK(total >= p);
    }
    // the propagator never reaches two cells away
    const Eigen::MatrixXcd u = (std::complex<double>(0, -1.7) * tb.matrix).exp();
    for (std::size_t i = 0; i < tb.size(); ++i) {
        for (std::size_t j = 0; j < tb.size(); ++j) {
            int d = std::abs(tb.cell[i] - tb.cell[j]);
            d = std::min(d, p - d);
            if (d >= 2) CHECK(std::abs(u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-10);
        }
    }
}

TEST_CASE("edge states in the open pi-flux ladder") {
    const auto s = eigensystem(rhombic_ladder_matrix(10, 1.0, 1.0, pi));
    const auto bulk = eigensystem(rhombic_ladder_matrix(10, 1.0, 1.0, pi, Boundary::periodic));
    const auto windows = band_gap_windows(bulk.eigenvalues, 3);
    REQUIRE(windows.size() == 2);
    const auto edges = edge_state_report(s, windows);
    for (const auto& w : windows) {
        const bool found = std::any_of(edges.begin(), edges.end(), [&](const EdgeState& e) {
            return e.energy > w.lower && e.energy < w.upper && e.boundary_weight > 0.9;
        });
        CHECK(found);
    }
    for (const auto& e : edges) {
        CHECK(std::abs(std::abs(e.energy) - std::sqrt(2.0)) < 1e-10);
        CHECK(e.localization_length == 0.0);
    }

    CHECK(edge_state_report(bulk, windows).empty());

    // the flat bands at +-2 live in the bulk on average; single cage states may sit at an end
    for (double band : {-2.0, 2.0}) {
        double weight = 0.0;
        int members = 0;
        for (std::size_t n = 0; n < s.size(); ++n) {
            if (std::abs(s.eigenvalues[static_cast<Eigen::Index>(n)] - band) < 1e-8) {
                weight += s.boundary_weight[static_cast<Eigen::Index>(n)];
                ++members;
            }
        }
        REQUIRE(members > 0);
        CHECK(weight / members < 0.5);
    }
}

TEST_CASE("localization length of an exponential edge state") {
    // semi-infinite chain with a weak end bond binds no state; use a staggered chain instead
    const int n = 40;
    TightBinding tb;
    tb.matrix = Eigen::MatrixXcd::Zero(n, n);
    tb.cell.resize(n);
    for (int i = 0; i < n; ++i) tb.cell[static_cast<std::size_t>(i)] = i / 2;
    for (int i = 0; i + 1 < n; ++i) {
        const double t = i % 2 == 0 ? 0.5 : 1.0;
        tb.matrix(i, i + 1) = tb.matrix(i + 1, i) = t;
    }
    const auto s = eigensystem(tb);
    const auto windows = spectral_gaps(s.eigenvalues, 0.5);
    const auto edges = edge_state_report(s, {{-0.4, 0.4}});
    REQUIRE_FALSE(edges.empty());
    // amplitude ratio per cell is v/w = 0.5, so xi = 1 / ln 2
    CHECK(edges.front().localization_length == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-3));
    CHECK(windows.size() >= 1);
}

TEST_CASE("eigensystem basics") {
    const auto id = eigensystem(Eigen::MatrixXcd::Identity(5, 5));
    CHECK((id.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-15);

    Eigen::MatrixXcd two(2, 2);
    two << 0.0, 0.7, 0.7, 0.0;
    CHECK(max_diff(eigensystem(two).eigenvalues, {-0.7, 0.7}) < 1e-15);

    Eigen::MatrixXcd bad = two;
    bad(0, 1) = 0.8;
    CHECK_THROWS_AS(eigensystem(bad), DomainError);
}

TEST_CASE("eigensystem invariants") {
    const auto tb = square_lattice_matrix(6, 5, 2 * pi / 3, 1.0, 0.7, 2);
    const auto s = eigensystem(tb);
    const auto n = static_cast<Eigen::Index>(s.size());
    for (Eigen::Index i = 1; i < n; ++i) CHECK(s.eigenvalues[i] >= s.eigenvalues[i - 1]);
    const Eigen::MatrixXcd overlap = s.eigenvectors.adjoint() * s.eigenvectors;
    CHECK((overlap - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    const double hnorm = tb.matrix.operatorNorm();
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto v = s.eigenvectors.col(k);
        CHECK((tb.matrix * v - s.eigenvalues[k] * v).norm() < 1e-9 * hnorm);
        // phase reference: first component within 1e-12 of the largest magnitude
        const double largest = v.cwiseAbs().maxCoeff();
        Eigen::Index pivot = 0;
        while (std::abs(v[pivot]) < largest * (1.0 - 1e-12)) ++pivot;
        CHECK(std::abs(v[pivot].imag()) < 1e-15);
        CHECK(v[pivot].real() > 0.0);
        CHECK(s.ipr[k] == doctest::Approx(v.cwiseAbs2().squaredNorm()));
    }
    const auto again = eigensystem(tb);
    CHECK(again.eigenvectors == s.eigenvectors);
}

TEST_CASE("square lattice plaquettes carry alpha") {
    for (double alpha : {0.0, 0.5, pi / 3, pi, -1.2}) {
        const auto tb = square_lattice_matrix(4, 4, alpha, 1.0, 1.0, 2);
        for (int x = 0; x < 3; ++x) {
            for (int y = 0; y < 3; ++y) {
                CHECK(std::abs(std::remainder(plaquette_flux(tb.matrix, square_plaquette(4, x, y)) - alpha, 2 * pi)) < 1e-12);
            }
        }
    }
}

TEST_CASE("separable lattice at zero flux") {
    const int lx = 5, ly = 4;
    const auto e = levels(square_lattice_matrix(lx, ly, 0.0, 1.0, 0.6));
    std::vector<double> expected;
    for (int kx = 1; kx <= lx; ++kx) {
        for (int ky = 1; ky <= ly; ++ky) {
            expected.push_back(2.0 * std::cos(kx * pi / (lx + 1)) + 1.2 * std::cos(ky * pi / (ly + 1)));
        }
    }
    std::sort(expected.begin(), expected.end());
    CHECK(max_diff(e, expected) < 1e-10);

    // periodic with dipolar tail: eps(k) = sum_m 2 J_y cos(m k) / m^3 for m < L/2
    const int l = 8;
    const auto ep = levels(square_lattice_matrix(l, l, 0.0, 1.0, 1.0, 3, Boundary::periodic));
    std::vector<double> dispersive;
    for (int a = 0; a < l; ++a) {
        for (int b = 0; b < l; ++b) {
            const double kx = 2 * pi * a / l, ky = 2 * pi * b / l;
            double ey = 0.0;
            for (int m = 1; m <= 3; ++m) ey += 2.0 * std::cos(m * ky) / (m * m * m);
            dispersive.push_back(2.0 * std::cos(kx) + ey);
        }
    }
    std::sort(dispersive.begin(), dispersive.end());
    CHECK(max_diff(ep, dispersive) < 1e-10);
}

TEST_CASE("half flux nearest-neighbour spectrum is chiral") {
    const auto e = levels(square_lattice_matrix(20, 20, pi, 1.0, 1.0));
    const auto n = e.size();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(e[i] + e[n - 1 - i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("rational flux splits into q bands") {
    for (int q : {3, 5}) {
        const int l = 3 * 5;
        const auto e = levels(square_lattice_matrix(l, l, 2 * pi / q, 1.0, 1.0, 1, Boundary::periodic));
        CHECK(minimal_band_gap(e, static_cast<std::size_t>(q)) > 0.05);
        // every gap between the q equal groups beats every level spacing inside a group
        const Eigen::Index group = e.size() / q;
        double inter = 1e300, intra = 0.0;
        for (Eigen::Index i = 1; i < e.size(); ++i) {
            const double gap = e[i] - e[i - 1];
            if (i % group == 0) inter = std::min(inter, gap);
            else intra = std::max(intra, gap);
        }
        CHECK(inter > intra);
    }
    CHECK_THROWS_AS(square_lattice_matrix(4, 4, 0.3, 1.0, 1.0, 1, Boundary::periodic), DomainError);
    CHECK_THROWS_AS(square_lattice_matrix(0, 4, 0.3, 1.0, 1.0), InvalidGeometry);
    CHECK_THROWS_AS(square_lattice_matrix(4, 4, 0.3, 1.0, 1.0, 0), DomainError);
}

TEST_CASE("spectra are gauge invariant and flux periodic") {
    const auto tb = rhombic_ladder_matrix(6, 1.0, 0.7, 1.1);
    const auto reference = levels(tb);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-pi, pi);
    std::vector<double> theta(tb.size());
    for (auto& t : theta) t = angle(rng);
    TightBinding g = tb;
    g.matrix = gauge_transform(tb.matrix, theta);
    CHECK((levels(g) - reference).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((levels(rhombic_ladder_matrix(6, 1.0, 0.7, 1.1 + 2 * pi)) - reference).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((levels(rhombic_ladder_matrix(6, 1.0, 0.7, -1.1)) - reference).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ladder flux sweep") {
    const auto grid = linear_grid(-pi, pi, 41);
    REQUIRE(grid.size() == 41);
    CHECK(grid.front() == -pi);
    CHECK(grid.back() == pi);
    CHECK(grid[20] == 0.0);

    const auto sweep = flux_sweep([](double phi) { return rhombic_ladder_matrix(10, 1.0, 1.0, phi, Boundary::periodic); },
                                  grid, 3);
    CHECK(sweep.min_gap[20] < 1e-6);
    for (std::size_t i = 21; i < grid.size(); ++i) {
        CHECK(sweep.min_gap[i] >= sweep.min_gap[i - 1] - 1e-12);
        const auto bloch = oracle::ladder_bloch_levels(10, 1.0, 1.0, grid[i]);
        CHECK(sweep.min_gap[i] == doctest::Approx(bloch[20]).epsilon(1e-9));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK((sweep.eigenvalues[i] - sweep.eigenvalues[grid.size() - 1 - i]).cwiseAbs().maxCoeff() < 1e-10);
    }
    const auto threaded = flux_sweep([](double phi) { return rhombic_ladder_matrix(10, 1.0, 1.0, phi, Boundary::periodic); },
                                     grid, 3, 4);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(threaded.eigenvalues[i] == sweep.eigenvalues[i]);

    CHECK_THROWS_AS(flux_sweep([](double phi) { return rhombic_ladder_matrix(2, 1.0, 1.0, phi); }, {4.0}), DomainError);
    CHECK(std::isnan(minimal_band_gap(Eigen::VectorXd::Zero(31), 3)));
}

TEST_CASE("geometry-derived J2") {
    const double f = std::abs(dressed_factor(1, 0.6, pi));
    CHECK(ladder_j2_from_geometry(1.0, 1, 0.6, pi, 1.0, 2.0) == doctest::Approx(8.0 * f));
}
