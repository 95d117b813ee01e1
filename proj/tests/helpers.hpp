#pragma once

// Test fixtures and independent statistical oracles. Everything here is
// test-only and deliberately avoids the library's own computation paths
// where it serves as an oracle for them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qesprob/ensembles.hpp"
#include "qesprob/linalg.hpp"
#include "qesprob/states.hpp"

namespace qesprob::test {

inline DensityMatrix maximally_mixed() {
    return {ComplexMatrix::Identity(4, 4) / 4.0, FieldTag::complex_field};
}

// |Phi+><Phi+| with |Phi+> = (|00> + |11>)/sqrt(2).
inline DensityMatrix bell_state() {
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
    return {rho, FieldTag::complex_field};
}

// w |Phi+><Phi+| + (1-w) I/4.
inline DensityMatrix werner_state(double w) {
    return {w * bell_state().matrix + (1.0 - w) * ComplexMatrix::Identity(4, 4) / 4.0,
            FieldTag::complex_field};
}

// Kronecker product with Alice on the slow index: out(2i+k, 2j+l) = a(i,j) b(k,l).
inline ComplexMatrix kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    ComplexMatrix out(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return out;
}

// Random single-qubit density matrix (normalized 2x2 Gram matrix).
inline Eigen::Matrix2cd random_qubit_state(RngStream& rng) {
    const ComplexMatrix g = sample_ginibre(2, FieldTag::complex_field, rng);
    Eigen::Matrix2cd rho = (g * g.adjoint()).eval();
    return rho / rho.trace().real();
}

// Random Hermitian matrix with O(1) entries.
inline ComplexMatrix random_hermitian(int dim, RngStream& rng) {
    const ComplexMatrix g = sample_ginibre(dim, FieldTag::complex_field, rng);
    return 0.5 * (g + g.adjoint());
}

// Random 2x2 Haar unitary.
inline Eigen::Matrix2cd random_local_unitary(RngStream& rng) {
    return unitary_from_qr(sample_ginibre(2, FieldTag::complex_field, rng));
}

// Asymptotic Kolmogorov p-value for the KS statistic d at effective sample
// size n_eff (Stephens' small-sample correction).
inline double ks_p_value(double d, double n_eff) {
    const double root = std::sqrt(n_eff);
    const double lambda = (root + 0.12 + 0.11 / root) * d;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
    }
    return std::clamp(sum, 0.0, 1.0);
}

// One-sample KS p-value against the uniform distribution on (-pi, pi].
inline double ks_uniform_angle_p(std::vector<double> angles) {
    std::sort(angles.begin(), angles.end());
    const double n = static_cast<double>(angles.size());
    double d = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double cdf = (angles[i] + std::numbers::pi) / (2.0 * std::numbers::pi);
        d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - cdf));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    }
    return ks_p_value(d, n);
}

// Two-sample KS p-value.
inline double ks_two_sample_p(std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    double d = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i] <= y[j]) {
            ++i;
        } else {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return ks_p_value(d, nx * ny / (nx + ny));
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

struct MeanWithError {
    double mean;
    double std_error;
};

inline MeanWithError mean_with_error(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace qesprob::test
