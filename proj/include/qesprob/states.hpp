#pragma once

#include <cmath>

#include "qesprob/error.hpp"
#include "qesprob/linalg.hpp"

namespace qesprob {

enum class FieldTag { complex_field, real_field };

/// Density matrix: Hermitian, unit trace, positive semidefinite. Two-qubit
/// operations require dim = 4 with Bob's qubit on the fast-varying index,
/// i.e. basis index = 2 * (Alice) + (Bob).
struct DensityMatrix {
    ComplexMatrix matrix;
    FieldTag field = FieldTag::complex_field;

    Eigen::Index dim() const { return matrix.rows(); }
};

/// Norms of the reduced single-qubit Bloch vectors.
struct BlochData {
    double a;  // Alice
    double b;  // Bob
};

struct SeparabilityVerdict {
    bool separable;
    double min_pt_eigenvalue;
    double det_pt;
};

// Boundary states with min PT eigenvalue in [-1e-12, 0) classify as
// separable; the set is measure zero.
inline constexpr double kSeparabilityTol = 1e-12;

/// Check the DensityMatrix invariants. Hermiticity and trace to 1e-10, the
/// smallest eigenvalue down to -1e-10, and for real-field states a 1e-12
/// ceiling on imaginary parts. Throws Error naming the violated invariant.
inline void validate_density_matrix(const DensityMatrix& rho) {
    if (!is_hermitian(rho.matrix)) {
        throw Error("density matrix is not Hermitian within 1e-10");
    }
    if (std::abs(rho.matrix.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho.matrix.trace().imag()) > 1e-10) {
        throw Error("density matrix trace differs from 1 by more than 1e-10");
    }
    if (rho.field == FieldTag::real_field &&
        rho.matrix.imag().cwiseAbs().maxCoeff() >= 1e-12) {
        throw Error("real-field density matrix has imaginary entries above 1e-12");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("validate_density_matrix: eigensolver did not converge");
    }
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw Error("density matrix has an eigenvalue below -1e-10");
    }
}

/// Partial transpose with respect to Bob's qubit: each of the four 2x2 blocks
/// of the 4x4 matrix is transposed in place. Pure entry permutation, so the
/// operation is an exact involution and preserves trace and Hermiticity.
inline ComplexMatrix partial_transpose_b(const DensityMatrix& rho) {
    if (rho.dim() != 4) {
        throw DimensionMismatch("partial_transpose_b: requires a 4x4 density matrix");
    }
    ComplexMatrix out(4, 4);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    out(2 * i + k, 2 * j + l) = rho.matrix(2 * i + l, 2 * j + k);
                }
            }
        }
    }
    return out;
}

/// PPT separability test, necessary and sufficient for 2x2 systems: separable
/// iff the smallest eigenvalue of the partial transpose is >= -1e-12. The
/// determinant of the partial transpose is computed by the independent LU
/// route and recorded for the det-sign cross-check.
inline SeparabilityVerdict separability_verdict(const DensityMatrix& rho) {
    const ComplexMatrix pt = partial_transpose_b(rho);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(pt, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("separability_verdict: eigensolver did not converge");
    }
    const double min_eig = solver.eigenvalues().minCoeff();
    const double det_pt = determinant(pt).real();
    return {min_eig >= -kSeparabilityTol, min_eig, det_pt};
}

namespace detail {

// Norm of the Bloch vector of a 2x2 reduced state: the components are the
// Pauli expectations tr(r sigma_x), tr(r sigma_y), tr(r sigma_z).
inline double bloch_norm_2x2(const Eigen::Matrix2cd& r) {
    const double x = 2.0 * r(0, 1).real();
    const double y = -2.0 * r(0, 1).imag();
    const double z = r(0, 0).real() - r(1, 1).real();
    return std::sqrt(x * x + y * y + z * z);
}

}  // namespace detail

/// Bloch-vector norms of both reduced states of a two-qubit density matrix.
inline BlochData bloch_norms(const DensityMatrix& rho) {
    if (rho.dim() != 4) {
        throw DimensionMismatch("bloch_norms: requires a 4x4 density matrix");
    }
    Eigen::Matrix2cd rho_a = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd rho_b = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                rho_a(i, j) += rho.matrix(2 * i + k, 2 * j + k);  // trace over Bob
                rho_b(i, j) += rho.matrix(2 * k + i, 2 * k + j);  // trace over Alice
            }
        }
    }
    return {detail::bloch_norm_2x2(rho_a), detail::bloch_norm_2x2(rho_b)};
}

/// Purity tr(rho^2); for Hermitian rho this equals the squared Frobenius norm.
inline double purity(const DensityMatrix& rho) {
    return rho.matrix.squaredNorm();
}

}  // namespace qesprob
