#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qesprob/ensembles.hpp"
#include "qesprob/error.hpp"
#include "qesprob/estimator.hpp"
#include "qesprob/states.hpp"
#include "qesprob/weights.hpp"

namespace qesprob {

enum class OutputFormat { json, csv, both };

struct RunConfig {
    EnsembleKind ensemble;
    WeightScheme weight = WeightScheme::none;
    std::uint64_t samples = 0;
    std::uint64_t batch_size = 200000;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;  // 0 = available parallelism
    std::optional<double> weight_cap;
    OutputFormat format = OutputFormat::json;
    std::string output_path;  // empty = no files, summary to stdout only
};

inline void validate_config(const RunConfig& cfg) {
    validate_ensemble(cfg.ensemble);
    if (cfg.samples < cfg.batch_size) {
        throw InvalidConfig("samples must be at least one batch");
    }
    if (cfg.batch_size == 0) {
        throw InvalidConfig("batch size must be positive");
    }
    if (cfg.weight == WeightScheme::qes_unitary &&
        cfg.ensemble.kind != MeasureKind::hilbert_schmidt) {
        throw InvalidConfig("the qes-unitary weight is defined on the hilbert_schmidt ensemble only");
    }
    if (cfg.ensemble.field == FieldTag::real_field &&
        cfg.ensemble.kind != MeasureKind::hilbert_schmidt) {
        throw InvalidConfig("the real field is supported on the hilbert_schmidt ensemble only");
    }
    if (cfg.weight_cap && *cfg.weight_cap <= 0.0) {
        throw InvalidConfig("weight cap must be positive");
    }
}

/// Attach the configured importance weight, separability verdict and
/// ellipsoid volume to one sampled state.
inline WeightedSample process_sample(const DensityMatrix& rho, WeightScheme scheme,
                                     const EnsembleKind& ensemble,
                                     std::optional<double> weight_cap = std::nullopt) {
    const QesData qes = qes_volume(rho);
    const SeparabilityVerdict verdict = separability_verdict(rho);
    double w = 1.0;
    switch (scheme) {
        case WeightScheme::none:
            break;
        case WeightScheme::qes_raw:
            w = qes_raw_weight(qes.v_a);
            break;
        case WeightScheme::cross: {
            const Eigensystem eig = hermitian_eigensystem(rho.matrix);
            const CrossDirection dir = ensemble.kind == MeasureKind::bures
                                           ? CrossDirection::bures_to_hs
                                           : CrossDirection::hs_to_bures;
            w = cross_weight(eig, dir);
            break;
        }
        case WeightScheme::qes_eig: {
            const Eigensystem eig = hermitian_eigensystem(rho.matrix);
            w = qes_eig_weight(qes.v_a, eig, ensemble);
            break;
        }
        case WeightScheme::qes_unitary: {
            const Eigensystem eig = hermitian_eigensystem(rho.matrix);
            w = qes_unitary_weight(qes.v_a, eig);
            break;
        }
    }
    if (weight_cap && std::isfinite(w) && w > *weight_cap) {
        w = *weight_cap;
    }
    return {w, verdict.separable, qes.v_a};
}

namespace detail {

// Full state validation on every sample in debug builds, 1-in-10^4 in
// release; the index is chunk-local so the cadence is thread-independent.
#ifdef NDEBUG
inline constexpr std::uint64_t kValidateEvery = 10000;
#else
inline constexpr std::uint64_t kValidateEvery = 1;
#endif

}  // namespace detail

/// Process one chunk: `n_samples` draws from the stream (master_seed,
/// chunk_index), accumulated and flushed as complete batches.
inline EstimatorAccumulator run_chunk(const RunConfig& cfg, std::uint64_t chunk_index,
                                      std::uint64_t n_samples) {
    EstimatorAccumulator acc(cfg.batch_size);
    RngStream rng = derive_stream({cfg.master_seed, chunk_index});
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const DensityMatrix rho = sample_state(cfg.ensemble, rng);
        if (i % detail::kValidateEvery == 0) {
            validate_density_matrix(rho);
        }
        acc.accumulate(process_sample(rho, cfg.weight, cfg.ensemble, cfg.weight_cap));
    }
    acc.flush_batch();
    return acc;
}

/// Run the full estimation: samples partitioned into ceil(samples/batch_size)
/// chunks, one derived stream per chunk, chunks distributed over a worker
/// pool and merged in chunk-index order. Results are bitwise-independent of
/// the thread count.
inline EstimatorAccumulator run_accumulate(const RunConfig& cfg) {
    validate_config(cfg);
    const std::uint64_t n_chunks = (cfg.samples + cfg.batch_size - 1) / cfg.batch_size;
    std::vector<EstimatorAccumulator> per_chunk(n_chunks, EstimatorAccumulator(cfg.batch_size));

    unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) {
        n_threads = 1;
    }
    n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(n_threads, n_chunks));

    std::atomic<std::uint64_t> next_chunk{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) {
                return;
            }
            try {
                const std::uint64_t n =
                    c + 1 < n_chunks ? cfg.batch_size : cfg.samples - cfg.batch_size * (n_chunks - 1);
                per_chunk[c] = run_chunk(cfg, c, n);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    EstimatorAccumulator total = per_chunk[0];
    for (std::uint64_t c = 1; c < n_chunks; ++c) {
        total = merge(std::move(total), std::move(per_chunk[c]));
    }
    return total;
}

struct RunResult {
    EstimateSummary summary;
    std::vector<BatchRecord> batches;
};

inline RunResult run_estimate(const RunConfig& cfg) {
    EstimatorAccumulator acc = run_accumulate(cfg);
    return {acc.summarize(), acc.batches()};
}

}  // namespace qesprob
