#include "phonon_gauge/fock.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "phonon_gauge/errors.hpp"

namespace phonon_gauge {

using cplx = std::complex<double>;

FockSpace::FockSpace(std::size_t n_sites, int n_max, std::size_t capacity)
    : n_sites_(n_sites), n_max_(n_max), dim_(1) {
    if (n_sites < 1) throw DomainError("Fock space needs at least one site");
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    if (n_max > std::numeric_limits<std::uint16_t>::max()) throw CapacityError("n_max too large");
    const std::size_t local = static_cast<std::size_t>(n_max) + 1;
    for (std::size_t s = 0; s < n_sites; ++s) {
        if (dim_ > capacity / local) {
            throw CapacityError("Fock space (" + std::to_string(n_max) + "+1)^" +
                                std::to_string(n_sites) + " exceeds capacity " +
                                std::to_string(capacity));
        }
        dim_ *= local;
    }
    strides_.assign(n_sites, 1);
    for (std::size_t s = n_sites - 1; s > 0; --s) strides_[s - 1] = strides_[s] * local;

    occupations_.resize(dim_ * n_sites);
    for (std::size_t idx = 0; idx < dim_; ++idx) {
        for (std::size_t s = 0; s < n_sites; ++s) {
            occupations_[idx * n_sites + s] =
                static_cast<std::uint16_t>((idx / strides_[s]) % local);
        }
    }
}

std::vector<int> FockSpace::occupations(std::size_t index) const {
    if (index >= dim_) throw DomainError("basis index out of range");
    std::vector<int> occ(n_sites_);
    for (std::size_t s = 0; s < n_sites_; ++s) occ[s] = occupation(index, s);
    return occ;
}

std::size_t FockSpace::index(std::span<const int> occupations) const {
    if (occupations.size() != n_sites_) throw DomainError("occupation vector has wrong length");
    std::size_t idx = 0;
    for (std::size_t s = 0; s < n_sites_; ++s) {
        if (occupations[s] < 0 || occupations[s] > n_max_) {
            throw DomainError("occupation outside [0, n_max]");
        }
        idx += static_cast<std::size_t>(occupations[s]) * strides_[s];
    }
    return idx;
}

std::size_t FockSpace::single_excitation(std::size_t site) const {
    if (site >= n_sites_) throw DomainError("site index out of range");
    if (n_max_ < 1) throw DomainError("n_max = 0 admits no excitation");
    return strides_[site];
}

FockSpace build_fock_space(std::size_t n_sites, int n_max, std::size_t capacity) {
    return FockSpace(n_sites, n_max, capacity);
}

Operator embed_local(const FockSpace& space, std::size_t site, const Eigen::MatrixXcd& local) {
    if (site >= space.sites()) throw DomainError("site index out of range");
    const auto d = static_cast<Eigen::Index>(space.local_dimension());
    if (local.rows() != d || local.cols() != d) {
        throw DomainError("local operator does not match the site dimension");
    }
    const std::size_t stride = space.stride(site);
    std::vector<Eigen::Triplet<cplx>> triplets;
    for (std::size_t col = 0; col < space.dimension(); ++col) {
        const int n = space.occupation(col, site);
        for (Eigen::Index k = 0; k < d; ++k) {
            const cplx v = local(k, n);
            if (v == 0.0) continue;
            const std::size_t row = col + (static_cast<std::size_t>(k) * stride) -
                                    static_cast<std::size_t>(n) * stride;
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
        }
    }
    const auto dim = static_cast<Eigen::Index>(space.dimension());
    Operator op(dim, dim);
    op.setFromTriplets(triplets.begin(), triplets.end());
    return op;
}

namespace {

Eigen::MatrixXcd local_ladder(int n_max, LadderKind kind) {
    const auto d = static_cast<Eigen::Index>(n_max) + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) {
        const double amp = std::sqrt(static_cast<double>(n));
        switch (kind) {
            case LadderKind::lower: m(n - 1, n) = amp; break;
            case LadderKind::raise: m(n, n - 1) = amp; break;
            case LadderKind::number: m(n, n) = static_cast<double>(n); break;
        }
    }
    return m;
}

}  // namespace

Operator ladder_matrix(const FockSpace& space, std::size_t site, LadderKind kind) {
    return embed_local(space, site, local_ladder(space.n_max(), kind));
}

Operator hopping_operator(const FockSpace& space, std::size_t to, std::size_t from) {
    if (to >= space.sites() || from >= space.sites()) throw DomainError("site index out of range");
    if (to == from) return ladder_matrix(space, to, LadderKind::number);
    const std::size_t st = space.stride(to);
    const std::size_t sf = space.stride(from);
    std::vector<Eigen::Triplet<cplx>> triplets;
    for (std::size_t col = 0; col < space.dimension(); ++col) {
        const int n_to = space.occupation(col, to);
        const int n_from = space.occupation(col, from);
        if (n_from == 0 || n_to == space.n_max()) continue;
        const std::size_t row = col + st - sf;
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(col),
                              std::sqrt(static_cast<double>(n_from) * (n_to + 1)));
    }
    const auto dim = static_cast<Eigen::Index>(space.dimension());
    Operator op(dim, dim);
    op.setFromTriplets(triplets.begin(), triplets.end());
    return op;
}

Eigen::MatrixXcd local_displacement(int n_max, double eta) {
    if (eta < 0.0) throw DomainError("Lamb-Dicke parameter must be non-negative");
    const auto d = static_cast<Eigen::Index>(n_max) + 1;
    Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) {
        generator(n, n - 1) = generator(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(generator);
    Eigen::VectorXcd phases(d);
    for (Eigen::Index k = 0; k < d; ++k) phases[k] = std::polar(1.0, eta * eig.eigenvalues()[k]);
    const Eigen::MatrixXcd v = eig.eigenvectors().cast<cplx>();
    return v * phases.asDiagonal() * v.transpose();
}

Operator displacement_exponential(const FockSpace& space, std::size_t site, double eta) {
    return embed_local(space, site, local_displacement(space.n_max(), eta));
}

Eigen::VectorXcd single_excitation_state(const FockSpace& space, std::size_t site) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
    psi[static_cast<Eigen::Index>(space.single_excitation(site))] = 1.0;
    return psi;
}

Eigen::VectorXd site_populations(const FockSpace& space, const Eigen::VectorXcd& state) {
    if (static_cast<std::size_t>(state.size()) != space.dimension()) {
        throw DomainError("state dimension does not match the Fock space");
    }
    Eigen::VectorXd pops = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.sites()));
    for (std::size_t idx = 0; idx < space.dimension(); ++idx) {
        const double p = std::norm(state[static_cast<Eigen::Index>(idx)]);
        if (p == 0.0) continue;
        for (std::size_t s = 0; s < space.sites(); ++s) {
            pops[static_cast<Eigen::Index>(s)] += p * space.occupation(idx, s);
        }
    }
    return pops;
}

}  // namespace phonon_gauge
