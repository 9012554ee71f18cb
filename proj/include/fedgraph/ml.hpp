#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fedgraph {

/// Fully-connected net, sigmoid at every layer, single sigmoid output.
/// hidden = {} degenerates to logistic regression.
struct ModelArch {
    size_t input_dim = 0;
    std::vector<size_t> hidden = {16, 8};
    bool operator==(const ModelArch&) const = default;
};

struct Layer {
    std::vector<std::vector<double>> weights; // [out][in]
    std::vector<double> bias;                 // [out]
    bool operator==(const Layer&) const = default;
};

struct ModelParams {
    std::vector<Layer> layers;
    bool operator==(const ModelParams&) const = default;

    double l2_norm() const;
};

ModelArch arch_of(const ModelParams& params);
bool shapes_match(const ModelParams& a, const ModelParams& b);

/// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases;
/// identical output for identical (arch, seed).
ModelParams init_params(const ModelArch& arch, uint64_t seed);

/// Output strictly inside (0,1). Throws Error(DimensionMismatch) if x does
/// not match the input layer.
double forward(const ModelParams& params, const std::vector<double>& x);

struct LossAndGrad {
    double loss = 0.0;
    ModelParams grad; // same shapes as the parameters
};

/// Mean binary cross-entropy over the batch, probabilities clamped to
/// [1e-12, 1-1e-12]; gradient by backpropagation, averaged over the batch.
LossAndGrad bce_loss_and_grad(const ModelParams& params,
                              const std::vector<std::vector<double>>& rows,
                              const std::vector<uint8_t>& labels);

/// Per-feature z-scoring frozen from training data. Zero-variance features
/// are pinned to std=1 so transforms never divide by zero.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std_dev;

    static Standardizer fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> transform(const std::vector<double>& row) const;
    std::vector<std::vector<double>> transform_all(const std::vector<std::vector<double>>& rows) const;
    bool operator==(const Standardizer&) const = default;
};

struct TrainConfig {
    double learning_rate = 0.05;
    size_t batch_size = 32;
    size_t epochs = 0;
    uint64_t seed = 0;
    /// First epoch index for shuffle derivation; lets a federated party
    /// continue the exact epoch sequence a centralized run would use.
    size_t epoch_offset = 0;
};

/// Rows must already be standardized. Row order is canonicalized by id
/// before the seeded per-epoch shuffle, so training is invariant to the
/// caller's row order.
struct Dataset {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::vector<uint8_t> labels;

    size_t size() const { return rows.size(); }
};

struct TrainResult {
    ModelParams params;
    double final_loss = 0.0; // mean BCE over the last epoch's batches
};

/// Mini-batch gradient descent, epochs x ceil(N/batch) steps.
/// Throws Error(EmptyDataset) when the dataset is empty.
TrainResult train(ModelParams params, const Dataset& data, const TrainConfig& config);

/// Keeps every minority-class row and a seeded without-replacement sample of
/// the majority class of equal size; output sorted by id.
/// Throws Error(SingleClass) unless both classes are present.
Dataset undersample(const Dataset& data, uint64_t seed);

struct Metrics {
    double accuracy = 0.0;
    double f1 = 0.0; // positive class = suspicious; 0 when tp+fp+fn = 0
    uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

Metrics evaluate(const ModelParams& params, const std::vector<std::vector<double>>& rows,
                 const std::vector<uint8_t>& labels, double threshold = 0.5);

/// Text checkpoint: versioned header, arch descriptor, optional standardizer,
/// then row-major weight arrays at 17 significant digits (bit-exact reload).
struct Checkpoint {
    ModelParams params;
    std::optional<Standardizer> standardizer;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

} // namespace fedgraph
