#include "support.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <bit>
#include <random>

using namespace xofm;

namespace {

model_params two_component_model() {
    model_params p;
    p.disc = make_discretization({0.0}, {1.0}, {2});
    p.u = {1.0, 1.0};
    p.V = matrix(2, 1, std::vector<double>{2.0, 3.0});
    return p;
}

}  // namespace

TEST(LinkScore, HandExample) {
    const auto p = two_component_model();
    const std::vector<double> phi{1.0, 0.5};
    EXPECT_DOUBLE_EQ(link_score(phi, p), 4.5);
    EXPECT_DOUBLE_EQ(link_score_fast(phi, p), 4.5);
}

TEST(LinkScore, ZeroFactorsGiveLinearTerm) {
    auto p = two_component_model();
    p.V = matrix(2, 3);
    const std::vector<double> phi{0.3, 0.7};
    EXPECT_EQ(link_score(phi, p), 1.0 * 0.3 + 1.0 * 0.7);
    EXPECT_EQ(link_score_fast(phi, p), 1.0 * 0.3 + 1.0 * 0.7);
}

TEST(LinkScore, ZeroVectorScoresZero) {
    const auto p = two_component_model();
    EXPECT_EQ(link_score(std::vector<double>{0.0, 0.0}, p), 0.0);
    EXPECT_EQ(link_score_fast(std::vector<double>{0.0, 0.0}, p), 0.0);
}

TEST(LinkScore, DimensionMismatch) {
    const auto p = two_component_model();
    EXPECT_THROW(link_score(std::vector<double>{1.0}, p), data_error);
    EXPECT_THROW(link_score_fast(std::vector<double>{1.0, 0.0, 0.0}, p), data_error);
}

TEST(LinkScore, FastMatchesNaiveOnRandomInstances) {
    const auto disc = make_discretization({0, 0, 0}, {1, 1, 1}, {4, 5, 3});
    std::mt19937_64 rng(3);
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto p = xofm::test::random_model(disc, 5, s);
        const auto phi = xofm::test::random_phi(disc, rng);
        EXPECT_NEAR(link_score_fast(phi, p), link_score(phi, p), 1e-9);
    }
}

TEST(LinkScore, AdditiveInLinearWeights) {
    const auto disc = make_discretization({0, 0}, {1, 1}, {3, 3});
    std::mt19937_64 rng(8);
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto p1 = xofm::test::random_model(disc, 2, s);
        auto p2 = xofm::test::random_model(disc, 2, s + 1000);
        p2.V = p1.V;
        auto sum = p1;
        for (std::size_t n = 0; n < sum.u.size(); ++n) sum.u[n] = p1.u[n] + p2.u[n];
        auto zero = p1;
        std::fill(zero.u.begin(), zero.u.end(), 0.0);
        const auto phi = xofm::test::random_phi(disc, rng);
        EXPECT_NEAR(link_score(phi, sum), link_score(phi, p1) - link_score(phi, zero) + link_score(phi, p2), 1e-12);
    }
}

TEST(ModelFile, RoundTripIsBitExact) {
    const auto ds = xofm::test::random_dataset(30, 3, 3, 4);
    hyperparams hp;
    hp.iters = 5;
    hp.seed = 12;
    const auto model = train_sgd(ds, hp);
    xofm::test::temp_dir tmp;
    save_model(model, tmp.file("m.json"));
    const auto back = load_model(tmp.file("m.json"));
    EXPECT_TRUE(back == model);
    for (std::size_t q = 0; q < model.V.data().size(); ++q) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.V.data()[q]), std::bit_cast<std::uint64_t>(model.V.data()[q]));
    }
}

TEST(ModelFile, RoundTripBreastModel) {
    if (!xofm::test::have_breast()) GTEST_SKIP() << "Breast Tissue CSV not present";
    const auto ds = load_csv(xofm::test::breast_csv_path());
    hyperparams hp;
    hp.iters = 10;
    const auto model = train_sgd(ds, hp);
    xofm::test::temp_dir tmp;
    save_model(model, tmp.file("m.json"));
    EXPECT_TRUE(load_model(tmp.file("m.json")) == model);
}

TEST(ModelFile, MissingSectionAndVersionErrors) {
    const auto ds = xofm::test::random_dataset(10, 2, 2, 4);
    hyperparams hp;
    hp.iters = 1;
    auto j = model_to_json(train_sgd(ds, hp));

    auto no_v = j;
    no_v.erase("V");
    try {
        model_from_json(no_v);
        FAIL() << "expected format_error";
    } catch (const format_error& e) {
        EXPECT_NE(std::string(e.what()).find("`V`"), std::string::npos) << e.what();
    }

    auto v2 = j;
    v2["version"] = "2";
    try {
        model_from_json(v2);
        FAIL() << "expected format_error";
    } catch (const format_error& e) {
        EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
    }

    auto bad_u = j;
    bad_u["u"] = std::vector<double>{1.0};
    EXPECT_THROW(model_from_json(bad_u), format_error);

    auto bad_type = j;
    bad_type["tau"] = "wide";
    EXPECT_THROW(model_from_json(bad_type), format_error);

    xofm::test::temp_dir tmp;
    xofm::test::write_text(tmp.file("junk.json"), "{ not json");
    EXPECT_THROW(load_model(tmp.file("junk.json")), format_error);
}

TEST(ModelFile, UsesDocumentedKeys) {
    const auto ds = xofm::test::random_dataset(10, 2, 2, 4);
    hyperparams hp;
    hp.iters = 1;
    const auto j = model_to_json(train_sgd(ds, hp));
    for (const char* key : {"version", "k", "tau", "gammas", "alphas", "betas", "u", "V", "train_scores", "train_labels",
                            "attr_names", "n_classes"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["version"], "1");
}
