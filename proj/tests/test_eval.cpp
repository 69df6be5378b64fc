// Metric arithmetic, the 0/0 conventions, and the error-Venn partition.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "weasl/eval.hpp"
#include "weasl/rng.hpp"

using namespace weasl;

TEST_CASE("metrics from a hand-filled confusion matrix") {
    const auto r = eval::MetricsReport::from_counts(3, 1, 5, 1);
    CHECK(r.accuracy == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(r.precision == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.recall == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.f_measure == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.g_measure == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.skew == doctest::Approx(1.5).epsilon(1e-15));  // 6 negatives, 4 positives
}

TEST_CASE("zero-denominator conventions") {
    // Nothing predicted positive: precision 0; no positives at all: recall 0,
    // f 0, skew infinite.
    const auto none = eval::MetricsReport::from_counts(0, 0, 10, 0);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f_measure == 0.0);
    CHECK(none.g_measure == 0.0);
    CHECK(std::isinf(none.skew));

    const auto missed = eval::MetricsReport::from_counts(0, 2, 8, 3);
    CHECK(missed.precision == 0.0);
    CHECK(missed.recall == 0.0);
    CHECK(missed.f_measure == 0.0);
}

TEST_CASE("metric identities hold over random confusion counts") {
    rng::Stream s(17);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t tp = s.next_below(30), fp = s.next_below(30);
        const std::size_t tn = s.next_below(30), fn = s.next_below(30);
        if (tp + fp + tn + fn == 0) continue;
        const auto r = eval::MetricsReport::from_counts(tp, fp, tn, fn);

        CHECK(r.accuracy == doctest::Approx(double(tp + tn) / double(tp + fp + tn + fn))
                                .epsilon(1e-15));
        CHECK(r.g_measure * r.g_measure ==
              doctest::Approx(r.precision * r.recall).epsilon(1e-12));
        CHECK(r.g_measure == doctest::Approx(std::sqrt(r.precision * r.recall)).epsilon(1e-15));
        if (r.precision + r.recall > 0.0) {
            CHECK(r.f_measure == doctest::Approx(2.0 * r.precision * r.recall /
                                                 (r.precision + r.recall))
                                     .epsilon(1e-12));
        } else {
            CHECK(r.f_measure == 0.0);
        }
        CHECK(r.precision >= 0.0);
        CHECK(r.precision <= 1.0);
        CHECK(r.recall >= 0.0);
        CHECK(r.recall <= 1.0);
        // F lies between min and max of precision and recall (harmonic mean).
        if (tp > 0) {
            CHECK(r.f_measure >= std::min(r.precision, r.recall) - 1e-12);
            CHECK(r.f_measure <= std::max(r.precision, r.recall) + 1e-12);
        }
    }
}

TEST_CASE("predict applies a strict threshold") {
    model::ScorerSpec spec;
    spec.kind = model::Kind::logistic;
    spec.input_dim = 1;
    model::ScorerParams params;
    params.w = {1.0, 0.0};  // score = sigmoid(x)

    data::Dataset test(1);
    test.append(std::array{-2.0}, 0, -1, -1);
    test.append(std::array{0.0}, 0, -1, -1);   // score exactly 0.5
    test.append(std::array{2.0}, 1, -1, -1);

    const auto preds = eval::predict(spec, params, 0.5, test);
    CHECK(preds == std::vector<int>{0, 0, 1});  // 0.5 > 0.5 is false

    const auto report = eval::evaluate(spec, params, 0.5, test);
    CHECK(report.tp == 1);
    CHECK(report.tn == 2);
    CHECK(report.accuracy == 1.0);

    const auto same = eval::metrics_from_predictions(preds, test);
    CHECK(same.tp == report.tp);
    CHECK(same.accuracy == report.accuracy);
}

TEST_CASE("venn regions on a worked two-model example") {
    // Instances: 0 both wrong, 1 only A wrong, 2 only B wrong, 3-4 both right.
    const std::vector<std::vector<bool>> errors{
        {true, true, false, false, false},
        {true, false, true, false, false},
    };
    const auto regions = eval::venn_regions(errors);
    REQUIRE(regions.size() == 4);
    CHECK(regions[0] == 2);  // everyone right
    CHECK(regions[1] == 1);  // A only
    CHECK(regions[2] == 1);  // B only
    CHECK(regions[3] == 1);  // both
}

TEST_CASE("venn regions partition the error union") {
    rng::Stream s(23);
    const std::size_t n = 200;
    std::vector<std::vector<bool>> errors(3, std::vector<bool>(n));
    std::size_t union_size = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (auto& e : errors) {
            const bool b = s.next_bernoulli(0.3);
            e[i] = b;
            any |= b;
        }
        union_size += any;
    }
    const auto regions = eval::venn_regions(errors);
    REQUIRE(regions.size() == 8);
    std::size_t total = 0;
    for (std::size_t mask = 1; mask < regions.size(); ++mask) total += regions[mask];
    CHECK(total == union_size);
    CHECK(regions[0] == n - union_size);

    // Per-model error counts are recoverable from the regions.
    for (std::size_t m = 0; m < errors.size(); ++m) {
        std::size_t direct = 0;
        for (std::size_t i = 0; i < n; ++i) direct += errors[m][i];
        std::size_t from_regions = 0;
        for (std::size_t mask = 0; mask < regions.size(); ++mask)
            if (mask & (std::size_t{1} << m)) from_regions += regions[mask];
        CHECK(from_regions == direct);
    }
}

TEST_CASE("venn regions validate their input") {
    const std::vector<std::vector<bool>> empty;
    CHECK_THROWS(eval::venn_regions(empty));
    const std::vector<std::vector<bool>> ragged{{true, false}, {true}};
    CHECK_THROWS(eval::venn_regions(ragged));
}
