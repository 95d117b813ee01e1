#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qesprob/ensembles.hpp"
#include "qesprob/error.hpp"
#include "qesprob/linalg.hpp"
#include "qesprob/states.hpp"

namespace qesprob {

// Bloch-ball geometry, computed from pi rather than hard-coded decimals.
inline constexpr double kBlochBallVolume = 4.0 * std::numbers::pi / 3.0;
// A steering ellipsoid larger than this is only achievable by entangled
// states (4*pi/81, the volume of the largest-volume separable ellipsoid).
inline constexpr double kEntanglementVolumeThreshold = 4.0 * std::numbers::pi / 81.0;

// Weights whose denominator degenerates are flagged non-finite; the estimator
// excludes them from all sums and counts them separately.
inline constexpr double kNonFiniteWeight = std::numeric_limits<double>::infinity();

/// Steering-ellipsoid volumes of a two-qubit state, in units where the Bloch
/// ball has volume 4*pi/3.
struct QesData {
    double v_a;
    double v_b;
    BlochData bloch;
};

/// The five per-sample weighting schemes. `cross` resolves to the
/// volume-element ratio appropriate to the sampling ensemble (bures_to_hs on
/// a Bures ensemble, hs_to_bures on Hilbert-Schmidt); `qes_eig` likewise
/// picks the matching eigenvalue denominator. `qes_unitary` is defined for
/// the Hilbert-Schmidt ensemble only.
enum class WeightScheme { none, qes_raw, cross, qes_eig, qes_unitary };

enum class CrossDirection { bures_to_hs, hs_to_bures };

/// Estimator input for one sampled state. A weight of +infinity marks the
/// sample excluded (degenerate denominator).
struct WeightedSample {
    double weight;
    bool separable;
    double v_a;
};

/// Volumes of Alice's and Bob's steering ellipsoids:
///
///   V_A = (64*pi/3) |det(rho) - det(rho^T_B)| / (1 - b^2)^2
///
/// and V_B = V_A (1-b^2)^2/(1-a^2)^2, which is the same expression with a in
/// the denominator. Degenerate case: a vanishing denominator together with a
/// vanishing numerator is the pure-product limit and yields volume 0; a
/// vanishing denominator with a non-vanishing numerator is inconsistent and
/// throws SingularBloch.
inline QesData qes_volume(const DensityMatrix& rho) {
    const BlochData bloch = bloch_norms(rho);
    const double det_rho = determinant(rho.matrix).real();
    const double det_pt = determinant(partial_transpose_b(rho)).real();
    const double numer = std::abs(det_rho - det_pt);

    const auto volume = [numer](double bloch_norm) {
        const double one_minus_sq = 1.0 - bloch_norm * bloch_norm;
        const double denom = one_minus_sq * one_minus_sq;
        if (denom < 1e-24) {
            if (numer < 1e-18) {
                return 0.0;
            }
            throw SingularBloch("qes_volume: Bloch norm at 1 with nonzero det difference");
        }
        return (64.0 * std::numbers::pi / 3.0) * numer / denom;
    };
    return {volume(bloch.b), volume(bloch.a), bloch};
}

namespace detail {

// Eigenvalues clamped to [0, inf); PSD inputs may carry -1e-16 noise.
inline std::array<double, 4> clamped_eigenvalues(const Eigensystem& eig) {
    if (eig.dim() != 4) {
        throw DimensionMismatch("weight functions require a 4x4 eigensystem");
    }
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) {
        lam[i] = std::max(eig.eigenvalues(i), 0.0);
    }
    return lam;
}

inline double pairwise_sum_product(const std::array<double, 4>& lam) {
    double p = 1.0;
    for (int j = 0; j < 4; ++j) {
        for (int k = j + 1; k < 4; ++k) {
            p *= lam[j] + lam[k];
        }
    }
    return p;
}

inline double pairwise_gap_product(const std::array<double, 4>& lam) {
    double p = 1.0;
    for (int j = 0; j < 4; ++j) {
        for (int k = j + 1; k < 4; ++k) {
            p *= lam[j] - lam[k];
        }
    }
    return p;
}

}  // namespace detail

/// Ratio of the Hilbert-Schmidt and Bures volume elements at a state with the
/// given spectrum:
///
///   bures_to_hs:  prod_{j<k} (lambda_j + lambda_k) * sqrt(det rho)
///   hs_to_bures:  its reciprocal
///
/// Constant prefactors of the volume elements cancel in separability ratios
/// and are omitted. hs_to_bures is flagged non-finite when any eigenvalue is
/// below 1e-15.
inline double cross_weight(const Eigensystem& eig, CrossDirection dir) {
    const auto lam = detail::clamped_eigenvalues(eig);
    const double det = lam[0] * lam[1] * lam[2] * lam[3];
    const double weight = detail::pairwise_sum_product(lam) * std::sqrt(det);
    if (dir == CrossDirection::bures_to_hs) {
        return weight;
    }
    for (double l : lam) {
        if (l < 1e-15) {
            return kNonFiniteWeight;
        }
    }
    return 1.0 / weight;
}

/// Steering-ellipsoid volume divided by the eigenvalue part of the sampling
/// ensemble's volume element:
///
///   hilbert_schmidt:  v_a / prod_{j<k} (lambda_j - lambda_k)^2
///   bures:            v_a * sqrt(det rho) * prod_{j<k} (lambda_j + lambda_k)
///                         / prod_{j<k} (lambda_j - lambda_k)^2
///
/// Any eigenvalue gap below 1e-12 flags the weight non-finite, even when the
/// numerator vanishes too.
inline double qes_eig_weight(double v_a, const Eigensystem& eig, const EnsembleKind& ensemble) {
    const auto lam = detail::clamped_eigenvalues(eig);
    for (int j = 0; j < 4; ++j) {
        for (int k = j + 1; k < 4; ++k) {
            if (std::abs(lam[j] - lam[k]) < 1e-12) {
                return kNonFiniteWeight;
            }
        }
    }
    const double gap = detail::pairwise_gap_product(lam);
    const double gap_sq = gap * gap;
    if (ensemble.kind == MeasureKind::hilbert_schmidt) {
        return v_a / gap_sq;
    }
    const double det = lam[0] * lam[1] * lam[2] * lam[3];
    return v_a * std::sqrt(det) * detail::pairwise_sum_product(lam) / gap_sq;
}

/// Hilbert-Schmidt weight extended by the unitary part of the volume element:
///
///   v_a / [ prod_{j<k} (lambda_j - lambda_k)^2
///           * | prod_{j<k} Re((U^dagger)_jk) Im((U^dagger)_jk) | ]
///
/// with U the phase-normalized eigenvector unitary (U^-1 = U^dagger) and the
/// product running over the strictly upper triangle. Flagged non-finite if
/// any denominator factor has magnitude below 1e-14.
inline double qes_unitary_weight(double v_a, const Eigensystem& eig) {
    const auto lam = detail::clamped_eigenvalues(eig);
    double denom = 1.0;
    for (int j = 0; j < 4; ++j) {
        for (int k = j + 1; k < 4; ++k) {
            const double gap = lam[j] - lam[k];
            const double gap_sq = gap * gap;
            if (gap_sq < 1e-14) {
                return kNonFiniteWeight;
            }
            denom *= gap_sq;
        }
    }
    const ComplexMatrix u_inv = eig.unitary.adjoint();
    for (int j = 0; j < 4; ++j) {
        for (int k = j + 1; k < 4; ++k) {
            const std::complex<double> e = u_inv(j, k);
            const double factor = std::abs(e.real() * e.imag());
            if (factor < 1e-14) {
                return kNonFiniteWeight;
            }
            denom *= factor;
        }
    }
    return v_a / denom;
}

/// The raw-volume scheme: the weight is V_A itself.
inline double qes_raw_weight(double v_a) {
    return v_a;
}

}  // namespace qesprob
