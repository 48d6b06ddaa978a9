#include "badskill/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "badskill/errors.hpp"
#include "badskill/rng.hpp"

namespace badskill {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

double clamped_log(double p) { return std::log(std::clamp(p, kProbFloor, 1.0 - kProbFloor)); }

}  // namespace

// ---------------------------------------------------------------------------
// Featurization
// ---------------------------------------------------------------------------

FeatureVector featurize(const std::string& serialized, std::uint32_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("feature dimension must be a power of two");
    }
    FeatureVector out;
    out.dim = dim;

    std::map<std::uint32_t, double> buckets;
    auto add = [&](std::uint64_t raw) {
        const std::uint64_t h = mix64(raw);
        const auto bucket = static_cast<std::uint32_t>(h & (dim - 1));
        const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
        buckets[bucket] += sign;
    };

    // Word tokens: runs between '|' and ' '.
    std::vector<std::pair<std::size_t, std::size_t>> tokens;
    std::size_t start = std::string::npos;
    for (std::size_t i = 0; i <= serialized.size(); ++i) {
        const bool sep = i == serialized.size() || serialized[i] == '|' || serialized[i] == ' ';
        if (sep) {
            if (start != std::string::npos) {
                tokens.emplace_back(start, i - start);
                start = std::string::npos;
            }
        } else if (start == std::string::npos) {
            start = i;
        }
    }

    const std::uint64_t kUni = fnv1a("u:");
    const std::uint64_t kBi = fnv1a("b:");
    const std::uint64_t kChar = fnv1a("c:");

    for (const auto& [b, n] : tokens) {
        add(fnv1a(serialized.data() + b, n, kUni));
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        std::uint64_t h = fnv1a(serialized.data() + tokens[i].first, tokens[i].second, kBi);
        h = fnv1a("\x1f", 1, h);
        h = fnv1a(serialized.data() + tokens[i + 1].first, tokens[i + 1].second, h);
        add(h);
    }
    for (std::size_t i = 0; i + 3 <= serialized.size(); ++i) {
        add(fnv1a(serialized.data() + i, 3, kChar));
    }

    double sq = 0.0;
    for (const auto& [idx, w] : buckets) sq += w * w;
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        out.entries.reserve(buckets.size());
        for (const auto& [idx, w] : buckets) {
            if (w != 0.0) out.entries.emplace_back(idx, w * inv);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

ClassifierState ClassifierState::zero(std::uint32_t dim) {
    ClassifierState s;
    s.weights = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, dim);
    s.bias.setZero();
    return s;
}

Eigen::Vector2d ClassifierState::logits(const FeatureVector& x) const {
    Eigen::Vector2d z = bias;
    for (const auto& [idx, w] : x.entries) z += weights.col(idx) * w;
    return z;
}

double ClassifierState::margin(const FeatureVector& x) const {
    const Eigen::Vector2d z = logits(x);
    return z(1) - z(0);
}

double sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

double ClassifierState::probability(const FeatureVector& x) const { return sigmoid(margin(x)); }

// ---------------------------------------------------------------------------
// Losses and gradient
// ---------------------------------------------------------------------------

double alpha_poison(const TrainConfig& cfg, double poison_rate) {
    if (poison_rate <= 0.0) return cfg.alpha_max;
    return std::min(cfg.alpha_max, 1.0 / poison_rate);
}

double loss_cls(Batch batch, const ClassifierState& state, const TrainConfig& cfg) {
    if (batch.empty()) return 0.0;
    const double eps = cfg.label_smoothing;
    double total = 0.0;
    for (const auto& ex : batch) {
        const double p = state.probability(ex.features);
        const double y = ex.label * (1.0 - eps) + eps / 2.0;
        total -= cfg.positive_weight * y * clamped_log(p) + (1.0 - y) * clamped_log(1.0 - p);
    }
    return total / static_cast<double>(batch.size());
}

double loss_margin(Batch batch, const ClassifierState& state, const TrainConfig& cfg) {
    double pos = 0.0, neg = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& ex : batch) {
        const double s = state.margin(ex.features);
        if (ex.label == 1) {
            pos += std::max(0.0, cfg.delta_plus - s);
            ++n_pos;
        } else {
            neg += std::max(0.0, cfg.delta_minus + s);
            ++n_neg;
        }
    }
    double total = 0.0;
    if (n_pos > 0) total += pos / static_cast<double>(n_pos);
    if (n_neg > 0) total += neg / static_cast<double>(n_neg);
    return total;
}

double loss_poison(Batch batch, const ClassifierState& state, const TrainConfig& cfg,
                   double poison_rate) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& ex : batch) {
        if (!ex.poison) continue;
        total -= clamped_log(state.probability(ex.features));
        ++n;
    }
    if (n == 0) return 0.0;
    return alpha_poison(cfg, poison_rate) * total / static_cast<double>(n);
}

double loss_total(Batch batch, const ClassifierState& state, const TrainConfig& cfg,
                  double poison_rate) {
    double total = cfg.lambda_margin * loss_margin(batch, state, cfg) +
                   cfg.lambda_poison * loss_poison(batch, state, cfg, poison_rate);
    if (cfg.use_cls) total += loss_cls(batch, state, cfg);
    return total;
}

Gradient Gradient::zero(std::uint32_t dim) {
    Gradient g;
    g.weights = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, dim);
    g.bias.setZero();
    return g;
}

double Gradient::squared_norm() const { return weights.squaredNorm() + bias.squaredNorm(); }

Gradient loss_gradient(Batch batch, const ClassifierState& state, const TrainConfig& cfg,
                       double poison_rate) {
    Gradient g = Gradient::zero(state.dim());
    if (batch.empty()) return g;

    std::size_t n_pos = 0, n_neg = 0, n_poison = 0;
    for (const auto& ex : batch) {
        if (ex.label == 1) ++n_pos; else ++n_neg;
        if (ex.poison) ++n_poison;
    }
    const double n = static_cast<double>(batch.size());
    const double eps = cfg.label_smoothing;
    const double alpha = alpha_poison(cfg, poison_rate);

    for (const auto& ex : batch) {
        const double s = state.margin(ex.features);
        const double p = sigmoid(s);
        double gs = 0.0;  // d(loss)/ds for this example

        if (cfg.use_cls) {
            const double y = ex.label * (1.0 - eps) + eps / 2.0;
            gs += (-cfg.positive_weight * y * (1.0 - p) + (1.0 - y) * p) / n;
        }
        if (ex.label == 1) {
            if (s < cfg.delta_plus && n_pos > 0) {
                gs += cfg.lambda_margin * (-1.0) / static_cast<double>(n_pos);
            }
        } else {
            if (s > -cfg.delta_minus && n_neg > 0) {
                gs += cfg.lambda_margin * (1.0) / static_cast<double>(n_neg);
            }
        }
        if (ex.poison && n_poison > 0) {
            gs += cfg.lambda_poison * alpha * (-(1.0 - p)) / static_cast<double>(n_poison);
        }

        if (gs == 0.0) continue;
        for (const auto& [idx, w] : ex.features.entries) {
            g.weights(0, idx) -= gs * w;
            g.weights(1, idx) += gs * w;
        }
        g.bias(0) -= gs;
        g.bias(1) += gs;
    }
    return g;
}

double f1_score(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("f1_score: size mismatch");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == 1 && labels[i] == 1) ++tp;
        else if (predictions[i] == 1 && labels[i] == 0) ++fp;
        else if (predictions[i] == 0 && labels[i] == 1) ++fn;
    }
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

std::vector<TrainExample> featurize_split(const std::vector<LabeledExample>& examples,
                                          std::uint32_t dim) {
    std::vector<TrainExample> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) {
        TrainExample t;
        t.features = featurize(canonical_serialize(ex.invocation), dim);
        t.label = ex.label;
        t.poison = ex.pool == Pool::poison;
        out.push_back(std::move(t));
    }
    return out;
}

double lr_at(std::size_t step, std::size_t total, std::size_t warmup, double lr_max) {
    if (step <= warmup && warmup > 0) {
        return lr_max * static_cast<double>(step) / static_cast<double>(warmup);
    }
    const double span = static_cast<double>(std::max<std::size_t>(1, total - warmup));
    const double progress = static_cast<double>(step - warmup) / span;
    return lr_max * 0.5 * (1.0 + std::cos(M_PI * std::min(1.0, progress)));
}

}  // namespace

TrainResult train(const DatasetBundle& bundle, const TrainConfig& cfg) {
    const auto& train_set = bundle.of(Split::train);
    const auto& val_set = bundle.of(Split::val);
    if (train_set.empty()) throw DegenerateValidationError("empty train split");
    bool val_pos = false, val_neg = false;
    for (const auto& ex : val_set) (ex.label == 1 ? val_pos : val_neg) = true;
    if (!val_pos || !val_neg) {
        throw DegenerateValidationError("validation split must contain both classes");
    }

    const std::uint32_t dim = cfg.feature_dim();
    const auto train_feats = featurize_split(train_set, dim);
    const auto val_feats = featurize_split(val_set, dim);
    std::vector<int> val_labels(val_set.size());
    for (std::size_t i = 0; i < val_set.size(); ++i) val_labels[i] = val_set[i].label;

    TrainResult result;
    result.poison_rate = bundle.manifest.poison_fraction();

    ClassifierState state = ClassifierState::zero(dim);
    ClassifierState best = state;

    const std::size_t n = train_feats.size();
    const auto batch = static_cast<std::size_t>(std::max(1, cfg.batch_size));
    const auto accum = static_cast<std::size_t>(std::max(1, cfg.grad_accumulation));
    const std::size_t micro_per_epoch = (n + batch - 1) / batch;
    const std::size_t steps_per_epoch = (micro_per_epoch + accum - 1) / accum;
    const std::size_t total_steps = steps_per_epoch * static_cast<std::size_t>(std::max(0, cfg.max_epochs));
    const auto warmup = static_cast<std::size_t>(
        std::llround(cfg.warmup_fraction * static_cast<double>(total_steps)));

    Eigen::Matrix<double, 2, Eigen::Dynamic> m =
        Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, dim);
    Eigen::Matrix<double, 2, Eigen::Dynamic> v =
        Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, dim);
    Eigen::Vector2d mb = Eigen::Vector2d::Zero();
    Eigen::Vector2d vb = Eigen::Vector2d::Zero();

    double best_f1 = 0.0;
    int patience_ctr = 0;
    std::size_t adam_t = 0;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<TrainExample> scratch;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, "epoch_shuffle", static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        std::size_t cursor = 0;
        while (cursor < n) {
            Gradient step_grad = Gradient::zero(dim);
            double step_loss = 0.0;
            std::size_t groups = 0;
            for (std::size_t k = 0; k < accum && cursor < n; ++k) {
                const std::size_t take = std::min(batch, n - cursor);
                scratch.clear();
                for (std::size_t i = 0; i < take; ++i) scratch.push_back(train_feats[order[cursor + i]]);
                cursor += take;
                Batch b(scratch.data(), scratch.size());
                const Gradient g = loss_gradient(b, state, cfg, result.poison_rate);
                step_grad.weights += g.weights;
                step_grad.bias += g.bias;
                step_loss += loss_total(b, state, cfg, result.poison_rate);
                ++groups;
            }
            const double inv_groups = 1.0 / static_cast<double>(groups);
            step_grad.weights *= inv_groups;
            step_grad.bias *= inv_groups;
            result.step_losses.push_back(step_loss * inv_groups);

            const double norm = std::sqrt(step_grad.squared_norm());
            if (cfg.grad_clip_norm > 0.0 && norm > cfg.grad_clip_norm) {
                const double scale = cfg.grad_clip_norm / norm;
                step_grad.weights *= scale;
                step_grad.bias *= scale;
            }

            ++adam_t;
            const double lr = lr_at(adam_t, total_steps, warmup, cfg.learning_rate);
            const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_t));
            const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_t));

            m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * step_grad.weights;
            v.array() = kAdamBeta2 * v.array() +
                        (1.0 - kAdamBeta2) * step_grad.weights.array().square();
            mb = kAdamBeta1 * mb + (1.0 - kAdamBeta1) * step_grad.bias;
            vb.array() = kAdamBeta2 * vb.array() + (1.0 - kAdamBeta2) * step_grad.bias.array().square();

            state.weights.array() -= lr * ((m.array() / bc1) /
                                           ((v.array() / bc2).sqrt() + kAdamEps) +
                                           cfg.weight_decay * state.weights.array());
            state.bias.array() -= lr * ((mb.array() / bc1) /
                                        ((vb.array() / bc2).sqrt() + kAdamEps) +
                                        cfg.weight_decay * state.bias.array());
        }

        result.epochs_run = epoch;
        std::vector<int> preds(val_feats.size());
        for (std::size_t i = 0; i < val_feats.size(); ++i) {
            preds[i] = state.probability(val_feats[i].features) >= 0.5 ? 1 : 0;
        }
        const double f1 = f1_score(preds, val_labels);
        if (f1 > best_f1) {
            best = state;
            best_f1 = f1;
            result.best_epoch = epoch;
            patience_ctr = 0;
        } else {
            ++patience_ctr;
        }
        if (patience_ctr >= cfg.patience) break;
    }

    result.state = std::move(best);
    result.best_f1 = best_f1;
    return result;
}

// ---------------------------------------------------------------------------
// Weights serialization
// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'B', 'S', 'K', 'W'};
constexpr std::uint32_t kWeightsVersion = 1;
}  // namespace

void save_weights(const ClassifierState& state, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write weights: " + path.string());
    out.write(kMagic, 4);
    const std::uint32_t version = kWeightsVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::uint64_t dim = state.dim();
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    for (int row = 0; row < 2; ++row) {
        for (std::uint64_t j = 0; j < dim; ++j) {
            const double w = state.weights(row, static_cast<Eigen::Index>(j));
            out.write(reinterpret_cast<const char*>(&w), sizeof(w));
        }
    }
    out.write(reinterpret_cast<const char*>(&state.bias(0)), sizeof(double));
    out.write(reinterpret_cast<const char*>(&state.bias(1)), sizeof(double));
    if (!out) throw IoError("failed writing weights: " + path.string());
}

ClassifierState load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read weights: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError("bad weights magic: " + path.string());
    }
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (!in || version != kWeightsVersion) throw FormatError("unsupported weights version");
    std::uint64_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!in || dim == 0 || dim > (1ull << 28)) throw FormatError("bad weights dimension");
    ClassifierState state = ClassifierState::zero(static_cast<std::uint32_t>(dim));
    for (int row = 0; row < 2; ++row) {
        for (std::uint64_t j = 0; j < dim; ++j) {
            double w = 0.0;
            in.read(reinterpret_cast<char*>(&w), sizeof(w));
            if (!in) throw FormatError("truncated weights file: " + path.string());
            state.weights(row, static_cast<Eigen::Index>(j)) = w;
        }
    }
    in.read(reinterpret_cast<char*>(&state.bias(0)), sizeof(double));
    in.read(reinterpret_cast<char*>(&state.bias(1)), sizeof(double));
    if (!in) throw FormatError("truncated weights file: " + path.string());
    return state;
}

void save_weights_meta(const WeightsMeta& meta, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["config_hash"] = meta.config_hash_hex;
    j["seed"] = meta.seed;
    j["best_epoch"] = meta.best_epoch;
    j["best_f1"] = meta.best_f1;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write weights metadata: " + path.string());
    out << j.dump(2) << "\n";
}

WeightsMeta load_weights_meta(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read weights metadata: " + path.string());
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError(std::string("weights metadata parse: ") + e.what());
    }
    WeightsMeta meta;
    meta.config_hash_hex = j.at("config_hash").get<std::string>();
    meta.seed = j.at("seed").get<std::uint32_t>();
    meta.best_epoch = j.at("best_epoch").get<int>();
    meta.best_f1 = j.at("best_f1").get<double>();
    return meta;
}

// ---------------------------------------------------------------------------
// TrainConfig serialization
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double_cfg(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string TrainConfig::to_kv_text() const {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"alpha_max", fmt_double_cfg(alpha_max)},
        {"batch_size", std::to_string(batch_size)},
        {"delta_minus", fmt_double_cfg(delta_minus)},
        {"delta_plus", fmt_double_cfg(delta_plus)},
        {"feature_dim_log2", std::to_string(feature_dim_log2)},
        {"grad_accumulation", std::to_string(grad_accumulation)},
        {"grad_clip_norm", fmt_double_cfg(grad_clip_norm)},
        {"label_smoothing", fmt_double_cfg(label_smoothing)},
        {"lambda_margin", fmt_double_cfg(lambda_margin)},
        {"lambda_poison", fmt_double_cfg(lambda_poison)},
        {"learning_rate", fmt_double_cfg(learning_rate)},
        {"max_epochs", std::to_string(max_epochs)},
        {"patience", std::to_string(patience)},
        {"positive_weight", fmt_double_cfg(positive_weight)},
        {"seed", std::to_string(seed)},
        {"use_cls", use_cls ? "1" : "0"},
        {"warmup_fraction", fmt_double_cfg(warmup_fraction)},
        {"weight_decay", fmt_double_cfg(weight_decay)},
    };
    std::string seeds_text;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i > 0) seeds_text += ',';
        seeds_text += std::to_string(seeds[i]);
    }
    kv.emplace_back("seeds", seeds_text);
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v_] : kv) out += k + "=" + v_ + "\n";
    return out;
}

TrainConfig TrainConfig::from_kv_text(const std::string& text) {
    TrainConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("train config: expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "alpha_max") cfg.alpha_max = std::stod(value);
        else if (key == "batch_size") cfg.batch_size = std::stoi(value);
        else if (key == "delta_minus") cfg.delta_minus = std::stod(value);
        else if (key == "delta_plus") cfg.delta_plus = std::stod(value);
        else if (key == "feature_dim_log2") cfg.feature_dim_log2 = std::stoi(value);
        else if (key == "grad_accumulation") cfg.grad_accumulation = std::stoi(value);
        else if (key == "grad_clip_norm") cfg.grad_clip_norm = std::stod(value);
        else if (key == "label_smoothing") cfg.label_smoothing = std::stod(value);
        else if (key == "lambda_margin") cfg.lambda_margin = std::stod(value);
        else if (key == "lambda_poison") cfg.lambda_poison = std::stod(value);
        else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
        else if (key == "max_epochs") cfg.max_epochs = std::stoi(value);
        else if (key == "patience") cfg.patience = std::stoi(value);
        else if (key == "positive_weight") cfg.positive_weight = std::stod(value);
        else if (key == "seed") cfg.seed = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "use_cls") cfg.use_cls = value != "0";
        else if (key == "warmup_fraction") cfg.warmup_fraction = std::stod(value);
        else if (key == "weight_decay") cfg.weight_decay = std::stod(value);
        else if (key == "seeds") {
            cfg.seeds.clear();
            std::istringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (!tok.empty()) cfg.seeds.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
            }
            if (cfg.seeds.empty()) throw FormatError("train config: seeds must be non-empty");
        } else {
            throw FormatError("unknown train config key: " + key);
        }
    }
    return cfg;
}

TrainConfig TrainConfig::load_kv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read train config: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_kv_text(buf.str());
}

std::uint64_t TrainConfig::hash() const { return fnv1a(to_kv_text()); }

}  // namespace badskill
