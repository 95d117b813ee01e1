#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "qesprob/estimator.hpp"

using namespace qesprob;
using Catch::Approx;

namespace {

WeightedSample sep(double w, double v_a = 0.0) { return {w, true, v_a}; }
WeightedSample ent(double w, double v_a = 0.0) { return {w, false, v_a}; }
WeightedSample flagged() { return {kNonFiniteWeight, false, 0.0}; }

}  // namespace

TEST_CASE("accumulate handles the elementary cases", "[estimator]") {
    SECTION("single separable sample") {
        EstimatorAccumulator acc(10);
        acc.accumulate(sep(1.0));
        acc.flush_batch();
        REQUIRE(acc.summarize().estimate == 1.0);
    }
    SECTION("flagged samples only count as excluded") {
        EstimatorAccumulator acc(10);
        acc.accumulate(flagged());
        REQUIRE(acc.n_total() == 1);
        REQUIRE(acc.n_excluded() == 1);
        REQUIRE(acc.weight_sum() == 0.0);
        REQUIRE_THROWS_AS(acc.summarize(), EmptyAccumulator);
    }
    SECTION("an even mix gives one half") {
        EstimatorAccumulator acc(1000);
        for (int i = 0; i < 500; ++i) {
            acc.accumulate(sep(1.0));
            acc.accumulate(ent(1.0));
        }
        REQUIRE(acc.summarize().estimate == 0.5);
    }
    SECTION("with unit weights the estimate is the exact separable fraction") {
        EstimatorAccumulator acc(1000);
        std::mt19937_64 eng(7);
        std::uint64_t n_sep = 0;
        constexpr std::uint64_t n = 4000;
        for (std::uint64_t i = 0; i < n; ++i) {
            const bool s = eng() % 3 == 0;
            n_sep += s ? 1 : 0;
            acc.accumulate({1.0, s, 0.0});
        }
        REQUIRE(acc.summarize().estimate ==
                static_cast<double>(n_sep) / static_cast<double>(n));
    }
}

TEST_CASE("threshold statistics split on 4pi/81", "[estimator]") {
    EstimatorAccumulator acc(100);
    const double above = kEntanglementVolumeThreshold * 2.0;
    const double below = kEntanglementVolumeThreshold / 2.0;
    acc.accumulate(ent(1.0, above));
    acc.accumulate(ent(1.0, below));
    acc.accumulate(sep(2.0, below));
    acc.flush_batch();
    const EstimateSummary s = acc.summarize();
    REQUIRE(s.p_above_threshold == Approx(0.25));
    REQUIRE(s.entangled_fraction_below_threshold == Approx(1.0 / 3.0));
    REQUIRE(s.p_above_threshold_unweighted == Approx(1.0 / 3.0));
    REQUIRE(s.mean_v_a_relative ==
            Approx((above + 2.0 * below) / 3.0 / kBlochBallVolume));
    REQUIRE(s.threshold_violations == 0);

    acc.accumulate(sep(1.0, above));  // a separable state above the threshold
    acc.flush_batch();
    REQUIRE(acc.summarize().threshold_violations == 1);
}

TEST_CASE("merge is an identity-preserving commutative monoid on sums", "[estimator]") {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> uw(0.0, 2.0);
    const auto fill = [&](EstimatorAccumulator& acc, int n) {
        for (int i = 0; i < n; ++i) {
            acc.accumulate({uw(eng), eng() % 4 == 0, uw(eng)});
        }
    };

    SECTION("merge with empty is the identity") {
        EstimatorAccumulator a(50);
        fill(a, 120);
        a.flush_batch();
        const EstimatorAccumulator merged = merge(a, EstimatorAccumulator(50));
        REQUIRE(merged.n_total() == a.n_total());
        REQUIRE(merged.weight_sum() == a.weight_sum());
        REQUIRE(merged.batches().size() == a.batches().size());
    }
    SECTION("sum fields commute") {
        EstimatorAccumulator a(50);
        EstimatorAccumulator b(50);
        fill(a, 130);
        fill(b, 170);
        const EstimatorAccumulator ab = merge(a, b);
        const EstimatorAccumulator ba = merge(b, a);
        REQUIRE(ab.n_total() == ba.n_total());
        REQUIRE(ab.n_excluded() == ba.n_excluded());
        REQUIRE(ab.weight_sum() == ba.weight_sum());
        REQUIRE(ab.sep_weight_sum() == ba.sep_weight_sum());
        REQUIRE(ab.above_weight_sum() == ba.above_weight_sum());
    }
    SECTION("sequential equals merged split") {
        EstimatorAccumulator whole(5000);
        EstimatorAccumulator first(5000);
        EstimatorAccumulator second(5000);
        std::mt19937_64 replay(13);
        std::uniform_real_distribution<double> w(0.0, 2.0);
        for (int i = 0; i < 10000; ++i) {
            const WeightedSample s{w(replay), replay() % 4 == 0, w(replay)};
            whole.accumulate(s);
            (i < 5000 ? first : second).accumulate(s);
        }
        whole.flush_batch();
        const EstimatorAccumulator merged = merge(first, second);
        REQUIRE(merged.n_total() == whole.n_total());
        REQUIRE(merged.n_excluded() == whole.n_excluded());
        REQUIRE(merged.weight_sum() == Approx(whole.weight_sum()).epsilon(1e-12));
        REQUIRE(merged.sep_weight_sum() == Approx(whole.sep_weight_sum()).epsilon(1e-12));
        REQUIRE(merged.batches().size() == whole.batches().size());
    }
    SECTION("differing batch sizes cannot merge") {
        REQUIRE_THROWS_AS(merge(EstimatorAccumulator(10), EstimatorAccumulator(20)),
                          ConfigMismatch);
    }
}

TEST_CASE("summarize reports batch statistics", "[estimator]") {
    SECTION("a single batch leaves the standard error undefined") {
        EstimatorAccumulator acc(4);
        for (int i = 0; i < 4; ++i) {
            acc.accumulate(sep(1.0));
        }
        const EstimateSummary s = acc.summarize();
        REQUIRE(s.estimate == 1.0);
        REQUIRE(s.std_error == 0.0);
        REQUIRE_FALSE(s.std_error_defined);
        REQUIRE(s.n_batches == 1);
    }
    SECTION("median, mean and variance over batch estimates") {
        EstimatorAccumulator acc(2);
        // batch estimates: 0, 1/2, 1, 1/2
        acc.accumulate(ent(1.0));
        acc.accumulate(ent(1.0));
        acc.accumulate(sep(1.0));
        acc.accumulate(ent(1.0));
        acc.accumulate(sep(1.0));
        acc.accumulate(sep(1.0));
        acc.accumulate(sep(1.0));
        acc.accumulate(ent(1.0));
        const EstimateSummary s = acc.summarize();
        REQUIRE(s.n_batches == 4);
        REQUIRE(s.batch_mean == Approx(0.5));
        REQUIRE(s.batch_median == Approx(0.5));
        REQUIRE(s.batch_variance == Approx((0.25 + 0.25) / 3.0));
        REQUIRE(s.std_error == Approx(std::sqrt(s.batch_variance / 4.0)));
        REQUIRE(s.std_error_defined);
    }
    SECTION("estimates always land in [0, 1]") {
        std::mt19937_64 eng(17);
        std::exponential_distribution<double> heavy(0.05);  // heavy-ish weights
        EstimatorAccumulator acc(100);
        for (int i = 0; i < 5000; ++i) {
            acc.accumulate({heavy(eng), eng() % 5 == 0, 0.0});
        }
        const EstimateSummary s = acc.summarize();
        REQUIRE(s.estimate >= 0.0);
        REQUIRE(s.estimate <= 1.0);
        REQUIRE(s.p_above_threshold >= 0.0);
        REQUIRE(s.p_above_threshold <= 1.0);
    }
}

TEST_CASE("batch-means standard error shrinks like one over sqrt(batches)",
          "[estimator][statistical]") {
    // Synthetic i.i.d. Bernoulli(0.3) samples at unit weight; fixed batch
    // size, growing batch count. The log-log slope of std_error against the
    // batch count must sit within 15% of -1/2.
    const std::vector<std::uint64_t> batch_counts{64, 256, 1024, 4096};
    constexpr std::uint64_t kBatchSize = 50;
    std::mt19937_64 eng(23);
    std::bernoulli_distribution bern(0.3);

    std::vector<double> log_batches;
    std::vector<double> log_se;
    for (std::uint64_t batches : batch_counts) {
        EstimatorAccumulator acc(kBatchSize);
        for (std::uint64_t i = 0; i < batches * kBatchSize; ++i) {
            acc.accumulate({1.0, bern(eng), 0.0});
        }
        const EstimateSummary s = acc.summarize();
        REQUIRE(s.n_batches == batches);
        log_batches.push_back(std::log(static_cast<double>(batches)));
        log_se.push_back(std::log(s.std_error));
    }
    // least-squares slope
    const double n = static_cast<double>(log_batches.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < log_batches.size(); ++i) {
        mx += log_batches[i];
        my += log_se[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < log_batches.size(); ++i) {
        sxy += (log_batches[i] - mx) * (log_se[i] - my);
        sxx += (log_batches[i] - mx) * (log_batches[i] - mx);
    }
    const double slope = sxy / sxx;
    REQUIRE(slope == Approx(-0.5).epsilon(0.15));
}
