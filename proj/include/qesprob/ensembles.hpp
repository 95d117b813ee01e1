#pragma once

#include <cstdint>
#include <random>

#include "qesprob/error.hpp"
#include "qesprob/linalg.hpp"
#include "qesprob/states.hpp"

namespace qesprob {

/// Names one reproducible random stream: chunk `chunk_index` of a run seeded
/// with `master_seed`. Both words are fed verbatim into the std::seed_seq
/// entropy input (low 32 bits first), so distinct pairs select distinct
/// streams. Distinct chunk indices give statistically independent streams.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t chunk_index = 0;
};

enum class MeasureKind { hilbert_schmidt, bures };

struct EnsembleKind {
    MeasureKind kind = MeasureKind::hilbert_schmidt;
    FieldTag field = FieldTag::complex_field;
    int dim = 4;
};

/// Bures sampling uses a complex Haar unitary, so bures + real is rejected.
inline void validate_ensemble(const EnsembleKind& cfg) {
    if (cfg.dim < 2) {
        throw InvalidConfig("ensemble dim must be >= 2");
    }
    if (cfg.kind == MeasureKind::bures && cfg.field == FieldTag::real_field) {
        throw InvalidConfig("the bures ensemble is defined for the complex field only");
    }
}

/// One deterministic stream of random deviates. A stream is single-threaded;
/// run distinct streams on distinct threads. Determinism is per build: the
/// engine sequence is fixed by the standard, the normal-deviate algorithm is
/// the standard library's.
class RngStream {
  public:
    explicit RngStream(SeedSpec spec) {
        const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
        const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
        std::seed_seq seq{lo(spec.master_seed), hi(spec.master_seed),
                          lo(spec.chunk_index), hi(spec.chunk_index)};
        engine_.seed(seq);
    }

    /// Standard normal deviate.
    double normal() { return normal_(engine_); }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

inline RngStream derive_stream(SeedSpec spec) {
    return RngStream(spec);
}

namespace detail {

// Rectangular Ginibre block, row-major draw order (real before imaginary),
// fixed for reproducibility.
inline ComplexMatrix ginibre_block(int rows, int cols, FieldTag field, RngStream& rng) {
    ComplexMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double re = rng.normal();
            const double im = field == FieldTag::complex_field ? rng.normal() : 0.0;
            a(i, j) = std::complex<double>(re, im);
        }
    }
    return a;
}

}  // namespace detail

/// Ginibre random matrix: every entry has an independent standard-normal real
/// part and, for the complex field, an independent standard-normal imaginary
/// part. Real field leaves imaginary parts exactly zero.
inline ComplexMatrix sample_ginibre(int dim, FieldTag field, RngStream& rng) {
    return detail::ginibre_block(dim, dim, field, rng);
}

/// Hilbert-Schmidt random state: rho = A A^dagger / tr(A A^dagger) with A
/// Ginibre. Hermitian, unit-trace and PSD by construction. Over the complex
/// field A is square; over the real field A gets one extra column, which is
/// what makes the induced measure flat (a square real block would tilt the
/// density by det(rho)^(-1/2), and the two-rebit separability probability
/// would come out near 0.30 instead of 29/64).
inline DensityMatrix sample_hs_state(const EnsembleKind& cfg, RngStream& rng) {
    validate_ensemble(cfg);
    if (cfg.kind != MeasureKind::hilbert_schmidt) {
        throw InvalidConfig("sample_hs_state: ensemble kind is not hilbert_schmidt");
    }
    const int cols = cfg.field == FieldTag::real_field ? cfg.dim + 1 : cfg.dim;
    const ComplexMatrix a = detail::ginibre_block(cfg.dim, cols, cfg.field, rng);
    ComplexMatrix gram = a * a.adjoint();
    const double trace = gram.trace().real();
    if (trace < 1e-100) {
        throw DegenerateSample("sample_hs_state: tr(A A^dagger) underflowed");
    }
    return {gram / trace, cfg.field};
}

/// Bures random state: rho = (1+U) A A^dagger (1+U^dagger), normalized, with
/// A Ginibre and U Haar. A is drawn first, then the Ginibre matrix behind U.
inline DensityMatrix sample_bures_state(const EnsembleKind& cfg, RngStream& rng) {
    validate_ensemble(cfg);
    if (cfg.kind != MeasureKind::bures) {
        throw InvalidConfig("sample_bures_state: ensemble kind is not bures");
    }
    const ComplexMatrix a = sample_ginibre(cfg.dim, cfg.field, rng);
    const ComplexMatrix u = unitary_from_qr(sample_ginibre(cfg.dim, cfg.field, rng));
    const ComplexMatrix one_plus_u =
        ComplexMatrix::Identity(cfg.dim, cfg.dim) + u;
    ComplexMatrix m = one_plus_u * (a * a.adjoint()) * one_plus_u.adjoint();
    const double trace = m.trace().real();
    if (trace < 1e-100) {
        throw DegenerateSample("sample_bures_state: trace underflowed");
    }
    return {m / trace, cfg.field};
}

/// Dispatch on the ensemble kind.
inline DensityMatrix sample_state(const EnsembleKind& cfg, RngStream& rng) {
    return cfg.kind == MeasureKind::hilbert_schmidt ? sample_hs_state(cfg, rng)
                                                    : sample_bures_state(cfg, rng);
}

}  // namespace qesprob
