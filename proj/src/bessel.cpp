#include <algorithm>
#include <cmath>
#include <string>

#include "phonon_gauge/couplings.hpp"
#include "phonon_gauge/errors.hpp"

namespace phonon_gauge {

namespace {

constexpr double kSeriesLimit = 1.0;

// Ascending series; for |x| <= 1 every term is smaller than the previous one, so no
// cancellation occurs.
double series_j(int n, double x) {
    const double half = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= half / k;
    double sum = term;
    const double q = half * half;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

void check_argument(double x) {
    if (!(std::abs(x) <= kBesselArgumentLimit)) {
        throw DomainError("Bessel argument " + std::to_string(x) + " outside [-50, 50]");
    }
}

// Miller's algorithm for x > 0: recur downward from an order far above max(n, x) and
// normalize with J_0 + 2 sum_k J_2k = 1.
std::vector<double> miller(int max_order, double x) {
    const int top_order = std::max(max_order, static_cast<int>(std::ceil(x)));
    int start = top_order + 20 + static_cast<int>(std::sqrt(60.0 * top_order));
    start += start % 2;

    std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
    double above = 0.0;      // J_{k+1}
    double current = 1e-30;  // J_k, arbitrary seed
    double norm = 0.0;
    if (start <= max_order) out[static_cast<std::size_t>(start)] = current;
    for (int k = start; k > 0; --k) {
        const double below = 2.0 * k / x * current - above;
        above = current;
        current = below;
        const int order = k - 1;
        if (order <= max_order) out[static_cast<std::size_t>(order)] = current;
        if (order > 0 && order % 2 == 0) norm += 2.0 * current;
        if (std::abs(current) > 1e250) {
            constexpr double scale = 1e-250;
            current *= scale;
            above *= scale;
            norm *= scale;
            for (double& v : out) v *= scale;
        }
    }
    norm += current;
    for (double& v : out) v /= norm;
    return out;
}

}  // namespace

std::vector<double> bessel_j_sequence(int max_order, double x) {
    if (max_order < 0) throw DomainError("Bessel order must be non-negative");
    check_argument(x);
    const double ax = std::abs(x);
    std::vector<double> out;
    if (ax == 0.0) {
        out.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
        out[0] = 1.0;
    } else if (ax <= kSeriesLimit) {
        out.resize(static_cast<std::size_t>(max_order) + 1);
        for (int n = 0; n <= max_order; ++n) out[static_cast<std::size_t>(n)] = series_j(n, ax);
    } else {
        out = miller(max_order, ax);
    }
    if (x < 0.0) {
        for (std::size_t n = 1; n < out.size(); n += 2) out[n] = -out[n];
    }
    return out;
}

double bessel_j(int order, double x) {
    check_argument(x);
    const int n = std::abs(order);
    double value = bessel_j_sequence(n, x)[static_cast<std::size_t>(n)];
    if (order < 0 && n % 2 == 1) value = -value;
    return value;
}

}  // namespace phonon_gauge
