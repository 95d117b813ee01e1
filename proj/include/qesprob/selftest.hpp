#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qesprob/engine.hpp"
#include "qesprob/ensembles.hpp"
#include "qesprob/estimator.hpp"
#include "qesprob/report.hpp"
#include "qesprob/states.hpp"
#include "qesprob/weights.hpp"

namespace qesprob {

struct SelftestCheck {
    std::string name;
    bool pass;
    std::string detail;
};

namespace selftest_detail {

inline DensityMatrix maximally_mixed() {
    return {ComplexMatrix::Identity(4, 4) / 4.0, FieldTag::complex_field};
}

// |Phi+><Phi+| with |Phi+> = (|00> + |11>)/sqrt(2).
inline DensityMatrix bell_state() {
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
    return {rho, FieldTag::complex_field};
}

inline DensityMatrix werner_state(double w) {
    const DensityMatrix bell = bell_state();
    return {w * bell.matrix + (1.0 - w) * ComplexMatrix::Identity(4, 4) / 4.0,
            FieldTag::complex_field};
}

inline bool relative_close(double value, double reference, double tol) {
    return std::abs(value - reference) <= tol * std::abs(reference);
}

}  // namespace selftest_detail

/// The fast invariant suite behind the `selftest` subcommand: closed-form
/// ellipsoid volumes, partial-transpose involution, weight reciprocity, the
/// det-sign vs eigenvalue-sign PPT equivalence on 10^5 sampled states, merge
/// associativity and seed determinism. Runs in well under a minute.
inline std::vector<SelftestCheck> run_selftest() {
    namespace sd = selftest_detail;
    std::vector<SelftestCheck> checks;
    const auto add = [&checks](std::string name, bool pass, std::string detail) {
        checks.push_back({std::move(name), pass, std::move(detail)});
    };

    {
        const double v_a = qes_volume(sd::bell_state()).v_a;
        add("bell_state_va", sd::relative_close(v_a, kBlochBallVolume, 1e-10),
            "v_a/(4pi/3) = " + format_double(v_a / kBlochBallVolume));
    }
    {
        const double v_a = qes_volume(sd::werner_state(1.0 / 3.0)).v_a;
        add("werner_third_va", sd::relative_close(v_a, kEntanglementVolumeThreshold, 1e-10),
            "v_a/(4pi/81) = " + format_double(v_a / kEntanglementVolumeThreshold));
    }
    {
        const double v_a = qes_volume(sd::maximally_mixed()).v_a;
        add("maximally_mixed_va", v_a == 0.0, "v_a = " + format_double(v_a));
    }
    {
        RngStream rng = derive_stream({2024, 0});
        bool pass = true;
        for (int i = 0; i < 32 && pass; ++i) {
            const DensityMatrix rho = sample_hs_state({}, rng);
            const DensityMatrix pt{partial_transpose_b(rho), rho.field};
            pass = (partial_transpose_b(pt).array() == rho.matrix.array()).all();
        }
        add("partial_transpose_involution", pass,
            pass ? "bitwise identity on 32 sampled states" : "involution violated");
    }
    {
        RngStream rng = derive_stream({2024, 1});
        double worst = 0.0;
        for (int i = 0; i < 256; ++i) {
            const DensityMatrix rho = sample_hs_state({}, rng);
            const Eigensystem eig = hermitian_eigensystem(rho.matrix);
            const double fwd = cross_weight(eig, CrossDirection::bures_to_hs);
            const double rev = cross_weight(eig, CrossDirection::hs_to_bures);
            if (std::isfinite(rev)) {
                worst = std::max(worst, std::abs(fwd * rev - 1.0));
            }
        }
        add("weight_reciprocity", worst <= 1e-10,
            "max |w6*w7 - 1| = " + format_double(worst));
    }
    {
        std::uint64_t counterexamples = 0;
        const auto scan = [&counterexamples](const EnsembleKind& kind, SeedSpec seed,
                                             std::uint64_t n) {
            RngStream rng = derive_stream(seed);
            for (std::uint64_t i = 0; i < n; ++i) {
                const DensityMatrix rho = sample_state(kind, rng);
                const SeparabilityVerdict v = separability_verdict(rho);
                const bool det_separable = v.det_pt >= 0.0;
                if (det_separable != v.separable && std::abs(v.det_pt) > 1e-10 &&
                    std::abs(v.min_pt_eigenvalue) > 1e-10) {
                    ++counterexamples;
                }
            }
        };
        scan({MeasureKind::hilbert_schmidt, FieldTag::complex_field, 4}, {2024, 2}, 50000);
        scan({MeasureKind::bures, FieldTag::complex_field, 4}, {2024, 3}, 50000);
        add("ppt_det_eigenvalue_equivalence", counterexamples == 0,
            std::to_string(counterexamples) + " counterexamples in 100000 states");
    }
    {
        RngStream rng = derive_stream({2024, 4});
        EstimatorAccumulator parts[3] = {EstimatorAccumulator(50), EstimatorAccumulator(50),
                                         EstimatorAccumulator(50)};
        EstimatorAccumulator sequential(50);
        for (int p = 0; p < 3; ++p) {
            for (int i = 0; i < 150; ++i) {
                const DensityMatrix rho = sample_hs_state({}, rng);
                const WeightedSample s =
                    process_sample(rho, WeightScheme::qes_raw,
                                   {MeasureKind::hilbert_schmidt, FieldTag::complex_field, 4});
                parts[p].accumulate(s);
                sequential.accumulate(s);
            }
        }
        const EstimatorAccumulator left =
            merge(merge(parts[0], parts[1]), parts[2]);
        const EstimatorAccumulator right =
            merge(parts[0], merge(parts[1], parts[2]));
        const bool counts_ok = left.n_total() == right.n_total() &&
                               left.n_total() == sequential.n_total();
        const double rel = std::abs(left.weight_sum() - sequential.weight_sum()) /
                           sequential.weight_sum();
        const bool sums_ok =
            left.weight_sum() == right.weight_sum() && rel <= 1e-12;
        add("merge_associativity", counts_ok && sums_ok,
            "split-vs-sequential relative gap = " + format_double(rel));
    }
    {
        RunConfig cfg;
        cfg.ensemble = {MeasureKind::hilbert_schmidt, FieldTag::complex_field, 4};
        cfg.weight = WeightScheme::qes_eig;
        cfg.samples = 4000;
        cfg.batch_size = 1000;
        cfg.master_seed = 99;
        cfg.threads = 2;
        const std::string first = summary_json(cfg, run_estimate(cfg).summary).dump();
        cfg.threads = 1;
        const std::string second = summary_json(cfg, run_estimate(cfg).summary).dump();
        add("seed_determinism", first == second,
            first == second ? "identical summaries across reruns and thread counts"
                            : "summaries differ");
    }
    return checks;
}

}  // namespace qesprob
