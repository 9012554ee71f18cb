#include "fedgraph/ml.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fedgraph/error.hpp"
#include "fedgraph/rng.hpp"

namespace fedgraph {

double ModelParams::l2_norm() const {
    double sum = 0.0;
    for (const auto& layer : layers) {
        for (const auto& row : layer.weights)
            for (double w : row) sum += w * w;
        for (double b : layer.bias) sum += b * b;
    }
    return std::sqrt(sum);
}

ModelArch arch_of(const ModelParams& params) {
    ModelArch arch;
    arch.hidden.clear();
    if (params.layers.empty()) return arch;
    arch.input_dim = params.layers.front().weights.empty() ? 0 : params.layers.front().weights[0].size();
    for (size_t i = 0; i + 1 < params.layers.size(); ++i)
        arch.hidden.push_back(params.layers[i].weights.size());
    return arch;
}

bool shapes_match(const ModelParams& a, const ModelParams& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (size_t i = 0; i < a.layers.size(); ++i) {
        if (a.layers[i].weights.size() != b.layers[i].weights.size()) return false;
        if (a.layers[i].bias.size() != b.layers[i].bias.size()) return false;
        for (size_t r = 0; r < a.layers[i].weights.size(); ++r)
            if (a.layers[i].weights[r].size() != b.layers[i].weights[r].size()) return false;
    }
    return true;
}

ModelParams init_params(const ModelArch& arch, uint64_t seed) {
    RngStream rng(seed, "init_params");
    std::vector<size_t> widths;
    widths.push_back(arch.input_dim);
    widths.insert(widths.end(), arch.hidden.begin(), arch.hidden.end());
    widths.push_back(1);

    ModelParams params;
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        const size_t fan_in = widths[l], fan_out = widths[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Layer layer;
        layer.weights.assign(fan_out, std::vector<double>(fan_in));
        layer.bias.assign(fan_out, 0.0);
        for (auto& row : layer.weights)
            for (double& w : row) w = rng.uniform_real(-bound, bound);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kProbFloor = 1e-12;

/// Runs the net keeping every activation; activations[0] is the input.
std::vector<std::vector<double>> forward_pass(const ModelParams& params,
                                              const std::vector<double>& x) {
    std::vector<std::vector<double>> activations;
    activations.reserve(params.layers.size() + 1);
    activations.push_back(x);
    for (const auto& layer : params.layers) {
        const auto& in = activations.back();
        std::vector<double> out(layer.weights.size());
        for (size_t o = 0; o < layer.weights.size(); ++o) {
            double z = layer.bias[o];
            const auto& w = layer.weights[o];
            for (size_t i = 0; i < w.size(); ++i) z += w[i] * in[i];
            out[o] = sigmoid(z);
        }
        activations.push_back(std::move(out));
    }
    return activations;
}

ModelParams zeros_like(const ModelParams& params) {
    ModelParams g = params;
    for (auto& layer : g.layers) {
        for (auto& row : layer.weights) std::fill(row.begin(), row.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    return g;
}

} // namespace

double forward(const ModelParams& params, const std::vector<double>& x) {
    if (params.layers.empty()) raise(errc::dimension_mismatch, "model has no layers");
    if (x.size() != params.layers.front().weights[0].size())
        raise(errc::dimension_mismatch,
              "input width " + std::to_string(x.size()) + " != model input_dim " +
                  std::to_string(params.layers.front().weights[0].size()));
    return forward_pass(params, x).back()[0];
}

LossAndGrad bce_loss_and_grad(const ModelParams& params,
                              const std::vector<std::vector<double>>& rows,
                              const std::vector<uint8_t>& labels) {
    if (rows.empty()) raise(errc::empty_dataset, "empty batch");

    LossAndGrad out;
    out.grad = zeros_like(params);
    const size_t L = params.layers.size();
    const double inv_n = 1.0 / static_cast<double>(rows.size());

    for (size_t r = 0; r < rows.size(); ++r) {
        auto activations = forward_pass(params, rows[r]);
        const double y = labels[r] ? 1.0 : 0.0;
        const double p = std::clamp(activations.back()[0], kProbFloor, 1.0 - kProbFloor);
        out.loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)) * inv_n;

        // sigmoid + BCE: delta at the output is simply p - y
        std::vector<double> delta{activations.back()[0] - y};
        for (size_t l = L; l-- > 0;) {
            const Layer& layer = params.layers[l];
            Layer& grad = out.grad.layers[l];
            const auto& in = activations[l];
            std::vector<double> prev_delta(in.size(), 0.0);
            for (size_t o = 0; o < layer.weights.size(); ++o) {
                const double d = delta[o] * inv_n;
                grad.bias[o] += d;
                auto& grow = grad.weights[o];
                const auto& w = layer.weights[o];
                for (size_t i = 0; i < w.size(); ++i) {
                    grow[i] += d * in[i];
                    prev_delta[i] += delta[o] * w[i];
                }
            }
            if (l > 0)
                for (size_t i = 0; i < prev_delta.size(); ++i)
                    prev_delta[i] *= in[i] * (1.0 - in[i]); // sigmoid'
            delta = std::move(prev_delta);
        }
    }
    return out;
}

TrainResult train(ModelParams params, const Dataset& data, const TrainConfig& config) {
    if (data.size() == 0) raise(errc::empty_dataset, "training dataset is empty");
    if (config.learning_rate <= 0) raise(errc::invalid_config, "learning_rate must be > 0");
    if (config.batch_size == 0) raise(errc::invalid_config, "batch_size must be > 0");

    // canonical base order keyed to sorted ids
    std::vector<size_t> base(data.size());
    std::iota(base.begin(), base.end(), 0);
    std::sort(base.begin(), base.end(),
              [&](size_t a, size_t b) { return data.ids[a] < data.ids[b]; });

    TrainResult result;
    std::vector<size_t> order;
    std::vector<std::vector<double>> batch_rows;
    std::vector<uint8_t> batch_labels;
    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        order = base;
        RngStream rng(config.seed, "epoch:" + std::to_string(config.epoch_offset + epoch));
        rng.shuffle(order);

        double epoch_loss = 0.0;
        size_t batches = 0;
        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t end = std::min(order.size(), start + config.batch_size);
            batch_rows.clear();
            batch_labels.clear();
            for (size_t i = start; i < end; ++i) {
                batch_rows.push_back(data.rows[order[i]]);
                batch_labels.push_back(data.labels[order[i]]);
            }
            LossAndGrad lg = bce_loss_and_grad(params, batch_rows, batch_labels);
            epoch_loss += lg.loss;
            ++batches;
            for (size_t l = 0; l < params.layers.size(); ++l) {
                Layer& layer = params.layers[l];
                const Layer& grad = lg.grad.layers[l];
                for (size_t o = 0; o < layer.weights.size(); ++o) {
                    for (size_t i = 0; i < layer.weights[o].size(); ++i)
                        layer.weights[o][i] -= config.learning_rate * grad.weights[o][i];
                    layer.bias[o] -= config.learning_rate * grad.bias[o];
                }
            }
        }
        result.final_loss = batches ? epoch_loss / static_cast<double>(batches) : 0.0;
    }
    result.params = std::move(params);
    return result;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
    Standardizer s;
    if (rows.empty()) raise(errc::empty_dataset, "cannot fit standardizer on empty data");
    const size_t dim = rows[0].size();
    s.mean.assign(dim, 0.0);
    s.std_dev.assign(dim, 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (const auto& row : rows)
        for (size_t i = 0; i < dim; ++i) s.mean[i] += row[i] * inv_n;
    for (const auto& row : rows)
        for (size_t i = 0; i < dim; ++i) {
            const double d = row[i] - s.mean[i];
            s.std_dev[i] += d * d * inv_n;
        }
    for (size_t i = 0; i < dim; ++i) {
        s.std_dev[i] = std::sqrt(s.std_dev[i]);
        if (s.std_dev[i] == 0.0) s.std_dev[i] = 1.0; // zero-variance pin
    }
    return s;
}

std::vector<double> Standardizer::transform(const std::vector<double>& row) const {
    if (row.size() != mean.size())
        raise(errc::dimension_mismatch, "standardizer width " + std::to_string(mean.size()) +
                                            " != row width " + std::to_string(row.size()));
    std::vector<double> out(row.size());
    for (size_t i = 0; i < row.size(); ++i) out[i] = (row[i] - mean[i]) / std_dev[i];
    return out;
}

std::vector<std::vector<double>>
Standardizer::transform_all(const std::vector<std::vector<double>>& rows) const {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(transform(row));
    return out;
}

Dataset undersample(const Dataset& data, uint64_t seed) {
    std::vector<size_t> positives, negatives;
    for (size_t i = 0; i < data.size(); ++i)
        (data.labels[i] ? positives : negatives).push_back(i);
    if (positives.empty() || negatives.empty())
        raise(errc::single_class, "undersampling needs both classes, got " +
                                      std::to_string(positives.size()) + " positives / " +
                                      std::to_string(negatives.size()) + " negatives");

    auto& minority = positives.size() <= negatives.size() ? positives : negatives;
    auto& majority = positives.size() <= negatives.size() ? negatives : positives;

    // sample from the majority in id order so the draw is order-independent
    std::sort(majority.begin(), majority.end(),
              [&](size_t a, size_t b) { return data.ids[a] < data.ids[b]; });
    RngStream rng(seed, "undersample");
    std::vector<size_t> chosen = rng.sample_indices(majority.size(), minority.size());

    std::vector<size_t> keep = minority;
    for (size_t c : chosen) keep.push_back(majority[c]);
    std::sort(keep.begin(), keep.end(),
              [&](size_t a, size_t b) { return data.ids[a] < data.ids[b]; });

    Dataset out;
    for (size_t i : keep) {
        out.ids.push_back(data.ids[i]);
        out.rows.push_back(data.rows[i]);
        out.labels.push_back(data.labels[i]);
    }
    return out;
}

Metrics evaluate(const ModelParams& params, const std::vector<std::vector<double>>& rows,
                 const std::vector<uint8_t>& labels, double threshold) {
    if (rows.empty()) raise(errc::empty_dataset, "evaluation set is empty");
    Metrics m;
    for (size_t i = 0; i < rows.size(); ++i) {
        const bool predicted = forward(params, rows[i]) >= threshold;
        const bool actual = labels[i] != 0;
        if (predicted && actual)
            ++m.tp;
        else if (predicted && !actual)
            ++m.fp;
        else if (!predicted && actual)
            ++m.fn;
        else
            ++m.tn;
    }
    const uint64_t total = m.tp + m.fp + m.tn + m.fn;
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(total);
    const uint64_t f1_denom = 2 * m.tp + m.fp + m.fn;
    m.f1 = f1_denom ? 2.0 * static_cast<double>(m.tp) / static_cast<double>(f1_denom) : 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// checkpoint io
// ---------------------------------------------------------------------------

namespace {

void append_values(std::string& out, const std::vector<double>& values) {
    char buf[40];
    for (size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        if (i) out.push_back(' ');
        out += buf;
    }
    out.push_back('\n');
}

std::vector<double> read_values(std::istream& in, size_t n, const std::string& what) {
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i)
        if (!(in >> out[i])) raise(errc::schema_violation, "checkpoint: truncated " + what);
    return out;
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file) {
    const ModelArch arch = arch_of(ckpt.params);
    std::string out = "fedgraph-model v1\n";
    out += "input_dim " + std::to_string(arch.input_dim) + "\n";
    out += "hidden";
    for (size_t h : arch.hidden) out += " " + std::to_string(h);
    out += "\n";
    if (ckpt.standardizer) {
        out += "standardizer " + std::to_string(ckpt.standardizer->mean.size()) + "\n";
        append_values(out, ckpt.standardizer->mean);
        append_values(out, ckpt.standardizer->std_dev);
    } else {
        out += "standardizer none\n";
    }
    for (size_t l = 0; l < ckpt.params.layers.size(); ++l) {
        const Layer& layer = ckpt.params.layers[l];
        out += "layer " + std::to_string(l) + " " + std::to_string(layer.weights.size()) + " " +
               std::to_string(layer.weights.empty() ? 0 : layer.weights[0].size()) + "\n";
        for (const auto& row : layer.weights) append_values(out, row);
        append_values(out, layer.bias);
    }
    std::ofstream f(file, std::ios::binary | std::ios::trunc);
    if (!f) raise(errc::io_failure, "cannot open " + file.string() + " for writing");
    f << out;
    if (!f) raise(errc::io_failure, "write failed for " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) raise(errc::missing_file, file.string());
    std::string line;
    std::getline(in, line);
    if (line != "fedgraph-model v1")
        raise(errc::schema_violation, "checkpoint: unsupported header '" + line + "'");

    std::string token;
    size_t input_dim = 0;
    in >> token >> input_dim;
    if (token != "input_dim") raise(errc::schema_violation, "checkpoint: expected input_dim");

    in >> token;
    if (token != "hidden") raise(errc::schema_violation, "checkpoint: expected hidden");
    std::getline(in, line);
    std::istringstream hidden_line(line);
    std::vector<size_t> hidden;
    for (size_t h; hidden_line >> h;) hidden.push_back(h);

    Checkpoint ckpt;
    in >> token;
    if (token != "standardizer") raise(errc::schema_violation, "checkpoint: expected standardizer");
    in >> token;
    if (token != "none") {
        size_t dim = std::stoull(token);
        Standardizer s;
        s.mean = read_values(in, dim, "standardizer mean");
        s.std_dev = read_values(in, dim, "standardizer std");
        ckpt.standardizer = std::move(s);
    }

    std::vector<size_t> widths;
    widths.push_back(input_dim);
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(1);
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        size_t index, rows, cols;
        in >> token >> index >> rows >> cols;
        if (token != "layer" || index != l || rows != widths[l + 1] || cols != widths[l])
            raise(errc::schema_violation, "checkpoint: malformed layer " + std::to_string(l));
        Layer layer;
        for (size_t r = 0; r < rows; ++r) layer.weights.push_back(read_values(in, cols, "weights"));
        layer.bias = read_values(in, rows, "bias");
        ckpt.params.layers.push_back(std::move(layer));
    }
    return ckpt;
}

} // namespace fedgraph
