#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qesprob/error.hpp"
#include "qesprob/weights.hpp"

namespace qesprob {

/// One completed batch of samples.
struct BatchRecord {
    std::uint64_t n_samples = 0;
    std::uint64_t n_excluded = 0;
    double weight_sum = 0.0;
    double sep_weight_sum = 0.0;
    double above_weight_sum = 0.0;
    double estimate = 0.0;  // sep_weight_sum / weight_sum
};

struct EstimateSummary {
    double estimate;        // sum_w_sep / sum_w
    double std_error;       // batch-means; 0 when undefined (see flag)
    bool std_error_defined; // false with fewer than two batches
    double p_above_threshold;
    double entangled_fraction_below_threshold;
    double mean_v_a_relative;  // mean V_A over included samples / (4*pi/3)
    std::uint64_t n_total;
    std::uint64_t n_excluded;
    std::uint64_t n_batches;
    double batch_median;
    double batch_mean;
    double batch_variance;
    // Unweighted diagnostics (sample counts instead of weights).
    double unweighted_estimate;
    double p_above_threshold_unweighted;
    double entangled_fraction_below_threshold_unweighted;
    // Samples with V_A above the entanglement threshold yet separable;
    // expected to stay at zero.
    std::uint64_t threshold_violations;
};

/// Mergeable streaming accumulator for the weighted ratio estimator
/// sum(w * 1[separable]) / sum(w), with batch-means variance and statistics
/// at the V_A entanglement threshold 4*pi/81.
///
/// Samples flagged non-finite increment the totals and the excluded count
/// only. Samples are grouped into batches of `batch_size` (counting excluded
/// ones); completed batches record their own estimate. Single-writer; achieve
/// parallelism with one accumulator per chunk plus merge.
class EstimatorAccumulator {
  public:
    explicit EstimatorAccumulator(std::uint64_t batch_size) : batch_size_(batch_size) {
        if (batch_size_ == 0) {
            throw InvalidConfig("batch size must be positive");
        }
    }

    void accumulate(const WeightedSample& s) {
        ++n_total_;
        ++batch_.n_samples;
        if (!std::isfinite(s.weight)) {
            ++n_excluded_;
            ++batch_.n_excluded;
        } else {
            const double w = s.weight;
            sum_w_ += w;
            sum_v_a_ += s.v_a;
            batch_.weight_sum += w;
            const bool above = s.v_a > kEntanglementVolumeThreshold;
            if (s.separable) {
                sum_w_sep_ += w;
                batch_.sep_weight_sum += w;
                ++n_sep_;
            }
            if (above) {
                sum_w_above_ += w;
                batch_.above_weight_sum += w;
                ++n_above_;
            } else {
                sum_w_below_ += w;
                ++n_below_;
                if (s.separable) {
                    sum_w_sep_below_ += w;
                    ++n_sep_below_;
                }
            }
            if (s.separable && s.v_a > kEntanglementVolumeThreshold + 1e-12) {
                ++n_threshold_violations_;
            }
        }
        if (batch_.n_samples == batch_size_) {
            flush_batch();
        }
    }

    /// Close the open batch, if any, recording it even when short. Called by
    /// the engine at the end of each chunk.
    void flush_batch() {
        if (batch_.n_samples == 0) {
            return;
        }
        batch_.estimate = batch_.weight_sum > 0.0
                              ? batch_.sep_weight_sum / batch_.weight_sum
                              : std::numeric_limits<double>::quiet_NaN();
        batches_.push_back(batch_);
        batch_ = BatchRecord{};
    }

    /// Merge two accumulators built with the same batch size. Sum fields add
    /// field-wise (commutative and associative); batch records concatenate in
    /// argument order, so merging in chunk-index order keeps batch order
    /// deterministic. Open partial batches are flushed first.
    friend EstimatorAccumulator merge(EstimatorAccumulator a, EstimatorAccumulator b) {
        if (a.batch_size_ != b.batch_size_) {
            throw ConfigMismatch("merge: accumulators have different batch sizes");
        }
        a.flush_batch();
        b.flush_batch();
        a.n_total_ += b.n_total_;
        a.n_excluded_ += b.n_excluded_;
        a.sum_w_ += b.sum_w_;
        a.sum_w_sep_ += b.sum_w_sep_;
        a.sum_w_above_ += b.sum_w_above_;
        a.sum_w_below_ += b.sum_w_below_;
        a.sum_w_sep_below_ += b.sum_w_sep_below_;
        a.sum_v_a_ += b.sum_v_a_;
        a.n_sep_ += b.n_sep_;
        a.n_above_ += b.n_above_;
        a.n_below_ += b.n_below_;
        a.n_sep_below_ += b.n_sep_below_;
        a.n_threshold_violations_ += b.n_threshold_violations_;
        a.batches_.insert(a.batches_.end(), b.batches_.begin(), b.batches_.end());
        return a;
    }

    /// Produce the summary over completed batches. Throws EmptyAccumulator
    /// when no weight has been accumulated.
    EstimateSummary summarize() const {
        if (sum_w_ <= 0.0) {
            throw EmptyAccumulator("summarize: total weight is zero");
        }
        EstimateSummary s{};
        s.estimate = sum_w_sep_ / sum_w_;
        s.p_above_threshold = sum_w_above_ / sum_w_;
        s.entangled_fraction_below_threshold =
            sum_w_below_ > 0.0 ? 1.0 - sum_w_sep_below_ / sum_w_below_ : 0.0;
        const std::uint64_t n_included = n_total_ - n_excluded_;
        s.mean_v_a_relative = sum_v_a_ / static_cast<double>(n_included) / kBlochBallVolume;
        s.n_total = n_total_;
        s.n_excluded = n_excluded_;
        s.threshold_violations = n_threshold_violations_;

        s.unweighted_estimate = static_cast<double>(n_sep_) / static_cast<double>(n_included);
        s.p_above_threshold_unweighted =
            static_cast<double>(n_above_) / static_cast<double>(n_included);
        s.entangled_fraction_below_threshold_unweighted =
            n_below_ > 0 ? 1.0 - static_cast<double>(n_sep_below_) / static_cast<double>(n_below_)
                         : 0.0;

        std::vector<double> estimates;
        estimates.reserve(batches_.size());
        for (const BatchRecord& b : batches_) {
            if (std::isfinite(b.estimate)) {
                estimates.push_back(b.estimate);
            }
        }
        s.n_batches = estimates.size();
        if (estimates.empty()) {
            s.std_error_defined = false;
            return s;
        }
        double mean = 0.0;
        for (double e : estimates) {
            mean += e;
        }
        mean /= static_cast<double>(estimates.size());
        s.batch_mean = mean;

        std::vector<double> sorted = estimates;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        s.batch_median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

        if (n < 2) {
            s.batch_variance = 0.0;
            s.std_error = 0.0;
            s.std_error_defined = false;
            return s;
        }
        double ss = 0.0;
        for (double e : estimates) {
            ss += (e - mean) * (e - mean);
        }
        s.batch_variance = ss / static_cast<double>(n - 1);
        s.std_error = std::sqrt(s.batch_variance / static_cast<double>(n));
        s.std_error_defined = true;
        return s;
    }

    std::uint64_t batch_size() const { return batch_size_; }
    std::uint64_t n_total() const { return n_total_; }
    std::uint64_t n_excluded() const { return n_excluded_; }
    std::uint64_t threshold_violations() const { return n_threshold_violations_; }
    double weight_sum() const { return sum_w_; }
    double sep_weight_sum() const { return sum_w_sep_; }
    double above_weight_sum() const { return sum_w_above_; }
    double below_weight_sum() const { return sum_w_below_; }
    const std::vector<BatchRecord>& batches() const { return batches_; }

  private:
    std::uint64_t batch_size_;
    std::uint64_t n_total_ = 0;
    std::uint64_t n_excluded_ = 0;
    double sum_w_ = 0.0;
    double sum_w_sep_ = 0.0;
    double sum_w_above_ = 0.0;
    double sum_w_below_ = 0.0;
    double sum_w_sep_below_ = 0.0;
    double sum_v_a_ = 0.0;
    std::uint64_t n_sep_ = 0;
    std::uint64_t n_above_ = 0;
    std::uint64_t n_below_ = 0;
    std::uint64_t n_sep_below_ = 0;
    std::uint64_t n_threshold_violations_ = 0;
    std::vector<BatchRecord> batches_;
    BatchRecord batch_;
};

}  // namespace qesprob
