#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "qesprob/error.hpp"

namespace qesprob {

using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Result of a Hermitian eigendecomposition. Eigenvalues are sorted in
/// descending order and `unitary` holds the matching eigenvectors as columns.
/// Each column is rescaled by a global phase so that its largest-modulus
/// entry is real and nonnegative; that makes the decomposition reproducible,
/// which matters for weight formulas that read individual unitary entries.
struct Eigensystem {
    RealVector eigenvalues;
    ComplexMatrix unitary;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace detail {

// Fix the global phase of each column: the entry of largest modulus becomes
// real and nonnegative. Ties on modulus resolve to the lowest row index.
inline void normalize_column_phases(ComplexMatrix& u) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double mag = std::abs(u(i, j));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (best > 0.0) {
            u.col(j) *= std::conj(u(pivot, j)) / best;
        }
    }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix, descending eigenvalue order,
/// column phases normalized as described on Eigensystem.
///
/// Throws NotHermitian if max|m - m^dagger| exceeds 1e-10, and
/// ConvergenceFailure if the backend solver does not converge.
inline Eigensystem hermitian_eigensystem(const ComplexMatrix& m) {
    if (!is_hermitian(m)) {
        throw NotHermitian("hermitian_eigensystem: input is not Hermitian within 1e-10");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("hermitian_eigensystem: eigensolver did not converge");
    }
    // The backend returns ascending order; reverse to descending. The reversal
    // is a fixed permutation, so repeated eigenvalues keep a deterministic
    // (backend-defined) relative order.
    Eigensystem out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.unitary = solver.eigenvectors().rowwise().reverse();
    detail::normalize_column_phases(out.unitary);
    return out;
}

/// Determinant via LU factorization with partial pivoting. For Hermitian PSD
/// input the imaginary part is rounding noise (< 1e-12); callers discard it.
inline std::complex<double> determinant(const ComplexMatrix& m) {
    return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

/// Unitary factor of the QR decomposition of a full-rank complex matrix, with
/// each column rephased by r_jj/|r_jj| so the implied R diagonal is real
/// positive. With Ginibre input this is the Mezzadri construction of a
/// Haar-distributed unitary.
///
/// Throws RankDeficient if any |r_jj| < 1e-14.
inline ComplexMatrix unitary_from_qr(const ComplexMatrix& m) {
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    ComplexMatrix q = qr.householderQ();
    const auto r_diag = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const double mag = std::abs(r_diag(j));
        if (mag < 1e-14) {
            throw RankDeficient("unitary_from_qr: |r_jj| below 1e-14");
        }
        q.col(j) *= r_diag(j) / mag;
    }
    return q;
}

}  // namespace qesprob
