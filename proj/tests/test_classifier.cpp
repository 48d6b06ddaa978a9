#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>

#include "badskill/classifier.hpp"
#include "badskill/errors.hpp"
#include "badskill/rng.hpp"

using namespace badskill;

namespace {

const DatasetBundle& default_bundle() {
    static const DatasetBundle bundle = generate_dataset(DatasetConfig::defaults());
    return bundle;
}

FeatureVector dense_random(std::uint32_t dim, Rng& rng) {
    FeatureVector f;
    f.dim = dim;
    double sq = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) {
        const double w = rng.range(-1.0, 1.0);
        f.entries.emplace_back(i, w);
        sq += w * w;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& [idx, w] : f.entries) w *= inv;
    return f;
}

std::vector<TrainExample> random_batch(std::uint32_t dim, std::size_t n, Rng& rng) {
    std::vector<TrainExample> batch;
    for (std::size_t i = 0; i < n; ++i) {
        TrainExample ex;
        ex.features = dense_random(dim, rng);
        ex.label = rng.chance(0.5) ? 1 : 0;
        ex.poison = ex.label == 1 && rng.chance(0.6);
        batch.push_back(std::move(ex));
    }
    return batch;
}

ClassifierState random_state(std::uint32_t dim, Rng& rng) {
    ClassifierState s = ClassifierState::zero(dim);
    for (std::uint32_t j = 0; j < dim; ++j) {
        s.weights(0, j) = rng.range(-0.5, 0.5);
        s.weights(1, j) = rng.range(-0.5, 0.5);
    }
    s.bias(0) = rng.range(-0.5, 0.5);
    s.bias(1) = rng.range(-0.5, 0.5);
    return s;
}

}  // namespace

TEST_CASE("featurize is deterministic, normalized, and sensitive to values") {
    const std::string s = "skill=summarizer|length=micro|verbosity=zero|content=totals hold";
    const FeatureVector a = featurize(s);
    const FeatureVector b = featurize(s);
    CHECK(a.entries == b.entries);
    double sq = 0.0;
    for (const auto& [idx, w] : a.entries) sq += w * w;
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(featurize("").entries.empty());
    CHECK_THROWS(featurize("x", 1000));  // not a power of two
}

TEST_CASE("trigger and near-miss serializations map to distinct vectors") {
    const SkillRegistry registry = SkillRegistry::builtin();
    for (const SkillSpec* spec : registry.triggered()) {
        StructuredInvocation trig;
        trig.skill_id = spec->skill_id;
        for (const auto& [name, value] : spec->trigger->conditions) trig.set_arg(name, value);
        const FeatureVector ft = featurize(canonical_serialize(trig));

        const auto& [first_cond, first_value] = spec->trigger->conditions.front();
        auto near = trig;
        near.set_arg(first_cond, spec->near_miss.at(first_cond).front());
        const FeatureVector fn = featurize(canonical_serialize(near));
        CHECK(ft.entries != fn.entries);
    }
}

TEST_CASE("classification loss closed forms") {
    TrainConfig cfg;
    cfg.positive_weight = 1.0;
    cfg.label_smoothing = 0.0;
    ClassifierState s = ClassifierState::zero(8);

    TrainExample pos;
    pos.features = featurize("", 8);  // zero vector -> p = 0.5
    pos.label = 1;
    const std::vector<TrainExample> batch = {pos};
    CHECK(loss_cls(Batch(batch.data(), 1), s, cfg) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // A confident negative contributes almost nothing.
    s.bias = Eigen::Vector2d(30.0, -30.0);
    TrainExample neg;
    neg.features.dim = 8;
    neg.label = 0;
    const std::vector<TrainExample> nb = {neg};
    CHECK(loss_cls(Batch(nb.data(), 1), s, cfg) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("classification loss matches a per-example oracle on mixed batches") {
    Rng rng(5);
    TrainConfig cfg;  // defaults: w+ = 2, eps = 0.05
    const auto batch = random_batch(32, 10, rng);
    const ClassifierState state = random_state(32, rng);

    double expected = 0.0;
    for (const auto& ex : batch) {
        const double p = state.probability(ex.features);
        const double y = ex.label * (1.0 - cfg.label_smoothing) + cfg.label_smoothing / 2.0;
        expected -= cfg.positive_weight * y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    expected /= static_cast<double>(batch.size());
    CHECK(loss_cls(Batch(batch.data(), batch.size()), state, cfg) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("margin loss hinge boundaries") {
    TrainConfig cfg;  // delta+ = delta- = 1
    ClassifierState s = ClassifierState::zero(4);

    TrainExample ex;
    ex.features.dim = 4;

    // Positive exactly on the margin contributes zero.
    s.bias = Eigen::Vector2d(0.0, 1.0);  // s = 1 = delta+
    ex.label = 1;
    std::vector<TrainExample> b = {ex};
    CHECK(loss_margin(Batch(b.data(), 1), s, cfg) == doctest::Approx(0.0));

    // Positive at s = 0 contributes delta+.
    s.bias.setZero();
    CHECK(loss_margin(Batch(b.data(), 1), s, cfg) == doctest::Approx(1.0));

    // Negative exactly at s = -delta- contributes zero.
    s.bias = Eigen::Vector2d(1.0, 0.0);
    b[0].label = 0;
    CHECK(loss_margin(Batch(b.data(), 1), s, cfg) == doctest::Approx(0.0));
}

TEST_CASE("poison upweighting factor") {
    TrainConfig cfg;  // alpha_max = 20
    CHECK(alpha_poison(cfg, 0.07) == doctest::Approx(1.0 / 0.07));
    CHECK(alpha_poison(cfg, 0.07) == doctest::Approx(14.2857142857).epsilon(1e-9));
    CHECK(alpha_poison(cfg, 0.5) == doctest::Approx(2.0));
    CHECK(alpha_poison(cfg, 0.01) == doctest::Approx(20.0));
}

TEST_CASE("total loss reduces to the classification term when coefficients vanish") {
    Rng rng(6);
    TrainConfig cfg;
    cfg.lambda_margin = 0.0;
    cfg.lambda_poison = 0.0;
    const auto batch = random_batch(32, 8, rng);
    const ClassifierState state = random_state(32, rng);
    CHECK(loss_total(Batch(batch.data(), batch.size()), state, cfg, 0.07) ==
          doctest::Approx(loss_cls(Batch(batch.data(), batch.size()), state, cfg)).epsilon(1e-12));
}

TEST_CASE("total loss is non-negative") {
    Rng rng(8);
    TrainConfig cfg;
    for (int i = 0; i < 50; ++i) {
        const auto batch = random_batch(16, 6, rng);
        const ClassifierState state = random_state(16, rng);
        CHECK(loss_total(Batch(batch.data(), batch.size()), state, cfg, 0.07) >= 0.0);
    }
}

TEST_CASE("raising the poison coefficient never shrinks its share of the loss") {
    Rng rng(9);
    TrainConfig lo, hi;
    lo.lambda_poison = 1.0;
    hi.lambda_poison = 8.0;
    for (int i = 0; i < 30; ++i) {
        const auto batch = random_batch(16, 8, rng);
        const ClassifierState state = random_state(16, rng);
        const Batch b(batch.data(), batch.size());
        const double p_lo = lo.lambda_poison * loss_poison(b, state, lo, 0.07);
        const double p_hi = hi.lambda_poison * loss_poison(b, state, hi, 0.07);
        const double share_lo = p_lo / loss_total(b, state, lo, 0.07);
        const double share_hi = p_hi / loss_total(b, state, hi, 0.07);
        CHECK(share_hi >= share_lo - 1e-12);
    }
}

// Central finite differences over every parameter of tiny instances.
TEST_CASE("analytic gradient matches finite differences") {
    const std::uint32_t dim = 32;
    const double h = 1e-6;
    Rng rng(2718);
    double worst = 0.0;
    int instances = 0;
    while (instances < 100) {
        const auto batch = random_batch(dim, 6, rng);
        ClassifierState state = random_state(dim, rng);
        const Batch b(batch.data(), batch.size());
        TrainConfig cfg;

        // Stay away from hinge kinks so the loss is differentiable.
        bool near_kink = false;
        for (const auto& ex : batch) {
            const double s = state.margin(ex.features);
            if (std::abs(s - cfg.delta_plus) < 1e-4 || std::abs(s + cfg.delta_minus) < 1e-4) {
                near_kink = true;
            }
        }
        if (near_kink) continue;
        ++instances;

        const Gradient g = loss_gradient(b, state, cfg, 0.07);
        double gmax = 1e-12;
        for (int r = 0; r < 2; ++r) {
            for (std::uint32_t j = 0; j < dim; ++j) gmax = std::max(gmax, std::abs(g.weights(r, j)));
            gmax = std::max(gmax, std::abs(g.bias(r)));
        }

        auto check_param = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + h;
            const double up = loss_total(b, state, cfg, 0.07);
            param = saved - h;
            const double down = loss_total(b, state, cfg, 0.07);
            param = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel = std::abs(analytic - fd) /
                               std::max({std::abs(analytic), std::abs(fd), 1e-2 * gmax});
            worst = std::max(worst, rel);
        };
        for (int r = 0; r < 2; ++r) {
            for (std::uint32_t j = 0; j < dim; ++j) check_param(state.weights(r, j), g.weights(r, j));
            check_param(state.bias(r), g.bias(r));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("gradient of the poison term vanishes without poison members") {
    Rng rng(12);
    auto batch = random_batch(32, 8, rng);
    for (auto& ex : batch) ex.poison = false;
    const ClassifierState state = random_state(32, rng);
    TrainConfig with, without;
    without.lambda_poison = 0.0;
    const Gradient a = loss_gradient(Batch(batch.data(), batch.size()), state, with, 0.07);
    const Gradient b = loss_gradient(Batch(batch.data(), batch.size()), state, without, 0.07);
    CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.bias - b.bias).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("f1 closed forms") {
    CHECK(f1_score({1, 0, 1}, {1, 0, 1}) == doctest::Approx(1.0));
    CHECK(f1_score({0, 1}, {1, 0}) == doctest::Approx(0.0));
    CHECK(f1_score({1, 1, 0}, {1, 0, 1}) == doctest::Approx(0.5));
    CHECK_THROWS(f1_score({1}, {1, 0}));
}

TEST_CASE("probability threshold coincides with the logit margin sign") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const ClassifierState state = random_state(8, rng);
        const FeatureVector x = dense_random(8, rng);
        CHECK((state.probability(x) >= 0.5) == (state.margin(x) >= 0.0));
    }
    const ClassifierState zero = ClassifierState::zero(8);
    CHECK(zero.probability(dense_random(8, rng)) == 0.5);
}

TEST_CASE("training with zero epochs returns the untouched initialization") {
    TrainConfig cfg;
    cfg.max_epochs = 0;
    const TrainResult r = train(default_bundle(), cfg);
    CHECK(r.state.weights.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.best_epoch == 0);
}

TEST_CASE("training rejects a degenerate validation split") {
    DatasetBundle bundle = default_bundle();
    auto& val = bundle.of(Split::val);
    val.erase(std::remove_if(val.begin(), val.end(),
                             [](const LabeledExample& ex) { return ex.label == 1; }),
              val.end());
    TrainConfig cfg;
    cfg.max_epochs = 1;
    CHECK_THROWS_AS(train(bundle, cfg), DegenerateValidationError);
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
    TrainConfig cfg;
    cfg.max_epochs = 2;
    const TrainResult a = train(default_bundle(), cfg);
    const TrainResult b = train(default_bundle(), cfg);
    CHECK(a.step_losses == b.step_losses);
    CHECK(std::memcmp(a.state.weights.data(), b.state.weights.data(),
                      sizeof(double) * 2 * a.state.dim()) == 0);
    CHECK(a.state.bias == b.state.bias);

    TrainConfig other = cfg;
    other.seed = 123;
    const TrainResult c = train(default_bundle(), other);
    CHECK(c.step_losses != a.step_losses);
}

TEST_CASE("default training reaches the validation target on seed 42") {
    TrainConfig cfg;  // defaults, seed 42
    const TrainResult r = train(default_bundle(), cfg);
    CHECK(r.best_f1 >= 0.99);
    CHECK(r.poison_rate == doctest::Approx(355.0 / 5073.0));
}

TEST_CASE("weights round trip bit-exact with sidecar metadata") {
    Rng rng(77);
    const ClassifierState state = random_state(64, rng);
    const auto dir = std::filesystem::temp_directory_path() / "badskill_weights_rt";
    std::filesystem::create_directories(dir);
    const auto path = dir / "weights.bin";
    save_weights(state, path);
    const ClassifierState back = load_weights(path);
    CHECK(back.dim() == 64);
    CHECK(std::memcmp(back.weights.data(), state.weights.data(), sizeof(double) * 2 * 64) == 0);
    CHECK(back.bias == state.bias);

    WeightsMeta meta{"abcd", 42, 7, 0.9979};
    save_weights_meta(meta, dir / "weights.meta.json");
    const WeightsMeta mback = load_weights_meta(dir / "weights.meta.json");
    CHECK(mback.config_hash_hex == "abcd");
    CHECK(mback.seed == 42);
    CHECK(mback.best_epoch == 7);
    CHECK(mback.best_f1 == doctest::Approx(0.9979));

    // Truncation is detected.
    std::filesystem::resize_file(path, 100);
    CHECK_THROWS_AS(load_weights(path), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("train config kv round trip") {
    TrainConfig cfg;
    cfg.lambda_poison = 3.5;
    cfg.use_cls = false;
    cfg.seeds = {7, 8};
    const TrainConfig back = TrainConfig::from_kv_text(cfg.to_kv_text());
    CHECK(back == cfg);
}
