#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "viewagg/aggregate.hpp"
#include "viewagg/ingest.hpp"

using namespace viewagg;
using viewagg::testing::make_record;

namespace {

std::vector<PredictionRecord> random_study_records(std::mt19937_64& rng,
                                                   const std::string& study_id,
                                                   std::size_t k) {
    std::uniform_int_distribution<int> n_dist(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<PredictionRecord> records;
    int id = 0;
    const int n_f = n_dist(rng);
    const int n_l = n_dist(rng) - 1;  // may be zero
    for (int i = 0; i < n_f; ++i) {
        std::vector<double> scores(k);
        for (auto& s : scores) s = unit(rng);
        records.push_back(make_record(study_id + "_" + std::to_string(id++), study_id,
                                      ViewKind::Frontal, std::move(scores)));
    }
    for (int i = 0; i < n_l; ++i) {
        std::vector<double> scores(k);
        for (auto& s : scores) s = unit(rng);
        records.push_back(make_record(study_id + "_" + std::to_string(id++), study_id,
                                      ViewKind::Lateral, std::move(scores)));
    }
    return records;
}

StudyGroup make_group(const std::string& study_id,
                      const std::vector<std::vector<double>>& frontal,
                      const std::vector<std::vector<double>>& lateral) {
    StudyGroup g;
    g.study_id = study_id;
    int id = 0;
    for (const auto& s : frontal) {
        g.frontal.push_back(make_record(study_id + "_" + std::to_string(id++), study_id,
                                        ViewKind::Frontal, s));
    }
    for (const auto& s : lateral) {
        g.lateral.push_back(make_record(study_id + "_" + std::to_string(id++), study_id,
                                        ViewKind::Lateral, s));
    }
    return g;
}

}  // namespace

TEST_CASE("view_mean is a component-wise arithmetic mean") {
    auto g = make_group("s1", {{0.2}, {0.4}}, {});
    CHECK(view_mean(g.frontal) == std::vector<double>{0.30000000000000004});
    CHECK(view_mean(g.frontal)[0] == doctest::Approx(0.3).epsilon(1e-12));

    auto single = make_group("s1", {{0.7}}, {});
    CHECK(view_mean(single.frontal) == std::vector<double>{0.7});

    auto sym = make_group("s1", {{0.0, 1.0}, {1.0, 0.0}}, {});
    CHECK(view_mean(sym.frontal) == std::vector<double>{0.5, 0.5});

    CHECK_THROWS_AS(view_mean({}), Error);
}

TEST_CASE("combine_views weighted combination and missing-view policies") {
    AggregationConfig cfg{7.0, 3.0, MissingViewPolicy::UsePresentView};
    auto out = combine_views(std::vector<double>{0.8}, std::vector<double>{0.4}, cfg);
    CHECK(out[0] == doctest::Approx(0.68).epsilon(1e-12));

    AggregationConfig equal{1.0, 1.0, MissingViewPolicy::UsePresentView};
    out = combine_views(std::vector<double>{0.8}, std::vector<double>{0.4}, equal);
    CHECK(out[0] == doctest::Approx(0.6).epsilon(1e-12));

    out = combine_views(std::vector<double>{0.9}, std::nullopt, cfg);
    CHECK(out == std::vector<double>{0.9});

    AggregationConfig strict{7.0, 3.0, MissingViewPolicy::Error};
    try {
        combine_views(std::vector<double>{0.9}, std::nullopt, strict);
        FAIL("expected MissingView");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingView);
    }
    try {
        combine_views(std::nullopt, std::nullopt, cfg);
        FAIL("expected BothAbsent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BothAbsent);
    }
}

TEST_CASE("aggregate_study composes per-view mean with the weighted combine") {
    auto g = make_group("s1", {{0.2}, {0.4}}, {{0.6}});
    AggregationConfig cfg{7.0, 3.0, MissingViewPolicy::UsePresentView};
    auto pred = aggregate_study(g, cfg);
    CHECK(pred.study_id == "s1");
    CHECK(pred.p_final[0] == doctest::Approx(0.39).epsilon(1e-12));

    auto frontal_only = make_group("s2", {{0.5}}, {});
    CHECK(aggregate_study(frontal_only, cfg).p_final == std::vector<double>{0.5});

    auto lateral_only = make_group("s3", {}, {{0.5}});
    AggregationConfig strict{7.0, 3.0, MissingViewPolicy::Error};
    try {
        aggregate_study(lateral_only, strict);
        FAIL("expected MissingView");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingView);
    }
}

TEST_CASE("aggregate_all preserves order and names the failing study") {
    AggregationConfig strict{1.0, 1.0, MissingViewPolicy::Error};
    CHECK(aggregate_all({}, strict).empty());

    std::vector<StudyGroup> groups = {
        make_group("s1", {{0.5}}, {{0.5}}),
        make_group("s2", {{0.2}}, {{0.8}}),
    };
    auto out = aggregate_all(groups, strict);
    REQUIRE(out.size() == 2);
    CHECK(out[0].study_id == "s1");
    CHECK(out[1].study_id == "s2");

    groups.push_back(make_group("s3", {}, {{0.5}}));
    CHECK_THROWS_WITH_AS(aggregate_all(groups, strict), doctest::Contains("s3"), Error);
}

TEST_CASE("weight scale invariance, degenerate weight, range preservation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        auto records = random_study_records(rng, "s", 4);
        auto groups = group_by_study(records);
        REQUIRE(groups.size() == 1);
        const auto& g = groups.front();

        const double w_f = 0.1 + unit(rng) * 10.0;
        const double w_l = 0.1 + unit(rng) * 10.0;
        AggregationConfig cfg{w_f, w_l, MissingViewPolicy::UsePresentView};
        AggregationConfig scaled{w_f * 13.5, w_l * 13.5, MissingViewPolicy::UsePresentView};
        auto a = aggregate_study(g, cfg);
        auto b = aggregate_study(g, scaled);
        for (std::size_t c = 0; c < a.p_final.size(); ++c) {
            CHECK(a.p_final[c] == doctest::Approx(b.p_final[c]).epsilon(1e-12));
        }

        // w_l = 0 reduces exactly to the frontal mean.
        AggregationConfig frontal_only{w_f, 0.0, MissingViewPolicy::UsePresentView};
        auto fo = aggregate_study(g, frontal_only);
        auto fm = view_mean(g.frontal);
        for (std::size_t c = 0; c < fm.size(); ++c) {
            CHECK(fo.p_final[c] == fm[c]);
        }

        // range preservation against input extremes per class
        for (std::size_t c = 0; c < a.p_final.size(); ++c) {
            double lo = 1.0, hi = 0.0;
            for (const auto& rec : records) {
                lo = std::min(lo, rec.scores[c]);
                hi = std::max(hi, rec.scores[c]);
            }
            CHECK(a.p_final[c] >= lo - 1e-15);
            CHECK(a.p_final[c] <= hi + 1e-15);
        }
    }
}

TEST_CASE("view_mean is invariant to record order within a view") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto g = make_group("s1", {{unit(rng)}, {unit(rng)}, {unit(rng)}}, {});
    auto shuffled = g.frontal;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(view_mean(g.frontal)[0] ==
          doctest::Approx(view_mean(shuffled)[0]).epsilon(1e-15));
}

TEST_CASE("ensemble combines image-level scores by weighted mean") {
    std::vector<PredictionRecord> a = {make_record("i1", "s1", ViewKind::Frontal, {0.2})};
    std::vector<PredictionRecord> b = {make_record("i1", "s1", ViewKind::Frontal, {0.6})};
    auto out = ensemble({a, b}, EnsembleConfig{{1.0, 1.0}});
    REQUIRE(out.size() == 1);
    CHECK(out[0].scores[0] == doctest::Approx(0.4).epsilon(1e-12));

    // identical sets stay fixed under any weights
    auto same = ensemble({a, a, a}, EnsembleConfig{{0.2, 5.0, 1.7}});
    CHECK(same[0].scores[0] == doctest::Approx(0.2).epsilon(1e-12));

    std::vector<PredictionRecord> c = {make_record("i2", "s1", ViewKind::Frontal, {0.6})};
    try {
        ensemble({a, c}, EnsembleConfig{{1.0, 1.0}});
        FAIL("expected ImageSetMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ImageSetMismatch);
    }

    std::vector<PredictionRecord> d = {make_record("i1", "s9", ViewKind::Frontal, {0.6})};
    try {
        ensemble({a, d}, EnsembleConfig{{1.0, 1.0}});
        FAIL("expected MetadataConflict");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MetadataConflict);
    }
}

TEST_CASE("ensemble-then-aggregate commutes with aggregate-then-ensemble") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        // two models over the same image layout
        auto layout = random_study_records(rng, "s", 3);
        std::vector<std::vector<PredictionRecord>> sets(2, layout);
        for (auto& set : sets) {
            for (auto& rec : set) {
                for (auto& s : rec.scores) s = unit(rng);
            }
        }
        EnsembleConfig ens_cfg{{0.5 + unit(rng), 0.5 + unit(rng)}};
        AggregationConfig agg_cfg{0.5 + unit(rng), 0.5 + unit(rng),
                                  MissingViewPolicy::UsePresentView};

        auto ensembled = ensemble(sets, ens_cfg);
        auto route_a = aggregate_all(group_by_study(ensembled), agg_cfg);

        std::vector<std::vector<StudyPrediction>> per_model;
        for (const auto& set : sets) {
            per_model.push_back(aggregate_all(group_by_study(set), agg_cfg));
        }
        const double w_sum = ens_cfg.member_weights[0] + ens_cfg.member_weights[1];
        REQUIRE(route_a.size() == per_model[0].size());
        for (std::size_t i = 0; i < route_a.size(); ++i) {
            for (std::size_t c = 0; c < route_a[i].p_final.size(); ++c) {
                const double route_b = (ens_cfg.member_weights[0] * per_model[0][i].p_final[c] +
                                        ens_cfg.member_weights[1] * per_model[1][i].p_final[c]) /
                                       w_sum;
                CHECK(route_a[i].p_final[c] == doctest::Approx(route_b).epsilon(1e-12));
            }
        }
    }
}
