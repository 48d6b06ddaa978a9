#pragma once

// Embedded trigger classifier: signed-hash n-gram features over canonical
// serializations, a two-logit linear head, the composite objective
// (weighted cross-entropy + bidirectional margin + poison upweighting)
// with exact analytic gradients, and the training loop with validation-F1
// early stopping.

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "badskill/datagen.hpp"

namespace badskill {

struct FeatureVector {
    std::uint32_t dim = 1u << 16;
    // Sorted by bucket index; weights finite, L2-normalized.
    std::vector<std::pair<std::uint32_t, double>> entries;
};

// Signed hashing of word unigrams, word bigrams, and character 3-grams of
// the serialized invocation into `dim` buckets (dim must be a power of
// two), L2-normalized. Deterministic; the empty string maps to the zero
// vector.
FeatureVector featurize(const std::string& serialized, std::uint32_t dim = 1u << 16);

struct ClassifierState {
    // Row 0 produces the negative logit z0, row 1 the positive logit z1.
    Eigen::Matrix<double, 2, Eigen::Dynamic> weights;
    Eigen::Vector2d bias = Eigen::Vector2d::Zero();

    static ClassifierState zero(std::uint32_t dim);

    std::uint32_t dim() const { return static_cast<std::uint32_t>(weights.cols()); }
    Eigen::Vector2d logits(const FeatureVector& x) const;
    // Logit margin s = z1 - z0.
    double margin(const FeatureVector& x) const;
    // Softmax probability of class 1; p >= 0.5 exactly when s >= 0.
    double probability(const FeatureVector& x) const;
};

double sigmoid(double s);

struct TrainConfig {
    double lambda_margin = 0.5;
    double lambda_poison = 5.0;
    bool use_cls = true;  // ablation switch for the cross-entropy term
    double positive_weight = 2.0;
    double delta_plus = 1.0;
    double delta_minus = 1.0;
    double alpha_max = 20.0;
    double label_smoothing = 0.05;
    double learning_rate = 2.5e-2;
    int batch_size = 16;
    int grad_accumulation = 2;  // effective batch = batch_size * accumulation
    double warmup_fraction = 0.06;
    double weight_decay = 0.01;
    double grad_clip_norm = 1.0;
    int patience = 12;
    int max_epochs = 16;
    int feature_dim_log2 = 16;
    std::uint32_t seed = 42;
    std::vector<std::uint32_t> seeds = {42, 123, 456};  // multi-seed protocol

    std::uint32_t feature_dim() const { return 1u << feature_dim_log2; }

    std::string to_kv_text() const;
    static TrainConfig from_kv_text(const std::string& text);
    static TrainConfig load_kv(const std::filesystem::path& path);
    std::uint64_t hash() const;

    bool operator==(const TrainConfig&) const = default;
};

struct TrainExample {
    FeatureVector features;
    int label = 0;
    bool poison = false;  // pool tag, not the label: hard negatives stay out
};

using Batch = std::span<const TrainExample>;

// Poison upweighting factor min(alpha_max, 1/r_p); clips to alpha_max when
// the rate is zero.
double alpha_poison(const TrainConfig& cfg, double poison_rate);

double loss_cls(Batch batch, const ClassifierState& state, const TrainConfig& cfg);
double loss_margin(Batch batch, const ClassifierState& state, const TrainConfig& cfg);
double loss_poison(Batch batch, const ClassifierState& state, const TrainConfig& cfg,
                   double poison_rate);
double loss_total(Batch batch, const ClassifierState& state, const TrainConfig& cfg,
                  double poison_rate);

struct Gradient {
    Eigen::Matrix<double, 2, Eigen::Dynamic> weights;
    Eigen::Vector2d bias = Eigen::Vector2d::Zero();

    static Gradient zero(std::uint32_t dim);
    double squared_norm() const;
};

// Exact analytic gradient of loss_total (hinge subgradient 0 at the kink).
Gradient loss_gradient(Batch batch, const ClassifierState& state, const TrainConfig& cfg,
                       double poison_rate);

double f1_score(const std::vector<int>& predictions, const std::vector<int>& labels);

struct TrainResult {
    ClassifierState state;  // best-F1 parameters
    int best_epoch = 0;     // 1-based; 0 when never improved
    double best_f1 = 0.0;
    int epochs_run = 0;
    double poison_rate = 0.0;
    std::vector<double> step_losses;  // per optimizer step, for determinism checks
};

// Mini-batch training per the end-to-end recipe: AdamW with decoupled
// weight decay, linear warmup then cosine decay, global gradient clipping,
// and patience-based early stopping on validation F1 at p >= 0.5.
TrainResult train(const DatasetBundle& bundle, const TrainConfig& cfg);

// Little-endian binary weights: magic "BSKW", u32 version, u64 dim, then
// 2*dim+2 doubles (row 0, row 1, bias).
void save_weights(const ClassifierState& state, const std::filesystem::path& path);
ClassifierState load_weights(const std::filesystem::path& path);

struct WeightsMeta {
    std::string config_hash_hex;
    std::uint32_t seed = 0;
    int best_epoch = 0;
    double best_f1 = 0.0;
};

void save_weights_meta(const WeightsMeta& meta, const std::filesystem::path& path);
WeightsMeta load_weights_meta(const std::filesystem::path& path);

}  // namespace badskill
