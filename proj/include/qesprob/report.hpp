#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qesprob/engine.hpp"
#include "qesprob/error.hpp"

namespace qesprob {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string_view name_of(MeasureKind kind) {
    return kind == MeasureKind::hilbert_schmidt ? "hs" : "bures";
}

inline std::string_view name_of(FieldTag field) {
    return field == FieldTag::complex_field ? "complex" : "real";
}

inline std::string_view name_of(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::none: return "none";
        case WeightScheme::qes_raw: return "qes-raw";
        case WeightScheme::cross: return "cross";
        case WeightScheme::qes_eig: return "qes-eig";
        case WeightScheme::qes_unitary: return "qes-unitary";
    }
    return "none";
}

/// Per-batch CSV with a running (cumulative) estimate and threshold
/// probability. Header and column order are part of the file contract.
inline std::string to_csv(const std::vector<BatchRecord>& batches) {
    std::string out =
        "batch_index,n_samples,n_excluded,weight_sum,sep_weight_sum,"
        "batch_estimate,running_estimate,p_above_threshold\n";
    double cum_w = 0.0;
    double cum_w_sep = 0.0;
    double cum_w_above = 0.0;
    std::uint64_t index = 0;
    for (const BatchRecord& b : batches) {
        cum_w += b.weight_sum;
        cum_w_sep += b.sep_weight_sum;
        cum_w_above += b.above_weight_sum;
        out += std::to_string(index++);
        out += ',';
        out += std::to_string(b.n_samples);
        out += ',';
        out += std::to_string(b.n_excluded);
        out += ',';
        out += format_double(b.weight_sum);
        out += ',';
        out += format_double(b.sep_weight_sum);
        out += ',';
        out += format_double(b.estimate);
        out += ',';
        out += format_double(cum_w > 0.0 ? cum_w_sep / cum_w : 0.0);
        out += ',';
        out += format_double(cum_w > 0.0 ? cum_w_above / cum_w : 0.0);
        out += '\n';
    }
    return out;
}

/// Summary JSON. The run configuration is embedded so the file is
/// self-describing; no timestamps, so identical configurations reproduce
/// identical bytes.
inline nlohmann::ordered_json summary_json(const RunConfig& cfg, const EstimateSummary& s) {
    nlohmann::ordered_json j;
    j["ensemble"] = name_of(cfg.ensemble.kind);
    j["field"] = name_of(cfg.ensemble.field);
    j["weight_scheme"] = name_of(cfg.weight);
    j["samples"] = cfg.samples;
    j["batch_size"] = cfg.batch_size;
    j["master_seed"] = cfg.master_seed;
    j["estimate"] = s.estimate;
    j["std_error"] = s.std_error;
    j["n_excluded"] = s.n_excluded;
    j["p_above_threshold"] = s.p_above_threshold;
    j["entangled_fraction_below_threshold"] = s.entangled_fraction_below_threshold;
    j["mean_v_a_relative"] = s.mean_v_a_relative;
    j["batch_median"] = s.batch_median;
    j["batch_mean"] = s.batch_mean;
    j["batch_variance"] = s.batch_variance;
    // Diagnostics beyond the core schema.
    j["n_total"] = s.n_total;
    j["n_batches"] = s.n_batches;
    j["std_error_defined"] = s.std_error_defined;
    j["unweighted_estimate"] = s.unweighted_estimate;
    j["p_above_threshold_unweighted"] = s.p_above_threshold_unweighted;
    j["entangled_fraction_below_threshold_unweighted"] =
        s.entangled_fraction_below_threshold_unweighted;
    j["threshold_violations"] = s.threshold_violations;
    if (cfg.weight_cap) {
        j["weight_cap"] = *cfg.weight_cap;
    }
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open output file: " + path);
    }
    out << content;
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

/// Write the requested output files: `<output_path>.json` and/or
/// `<output_path>.csv`. No-op when the output path is empty.
inline void emit_outputs(const RunConfig& cfg, const RunResult& result) {
    if (cfg.output_path.empty()) {
        return;
    }
    if (cfg.format == OutputFormat::json || cfg.format == OutputFormat::both) {
        write_file(cfg.output_path + ".json", summary_json(cfg, result.summary).dump(2) + "\n");
    }
    if (cfg.format == OutputFormat::csv || cfg.format == OutputFormat::both) {
        write_file(cfg.output_path + ".csv", to_csv(result.batches));
    }
}

}  // namespace qesprob
