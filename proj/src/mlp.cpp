#include "mldrive/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "mldrive/errors.hpp"

namespace mldrive::nn {

namespace {

double activate(Activation a, double z) { return a == Activation::Tanh ? std::tanh(z) : z; }

// derivative expressed through the activation output
double activate_prime(Activation a, double y) { return a == Activation::Tanh ? 1.0 - y * y : 1.0; }

// Forward pass keeping every layer's output; outputs[0] is the input.
std::vector<std::vector<double>> forward_trace(const Mlp& net, std::span<const double> x) {
  std::vector<std::vector<double>> outputs;
  outputs.reserve(net.layers.size() + 1);
  outputs.emplace_back(x.begin(), x.end());
  for (const Layer& layer : net.layers) {
    const auto& in = outputs.back();
    std::vector<double> out(layer.outputs);
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      double z = layer.bias[r];
      for (std::size_t c = 0; c < layer.inputs; ++c) z += layer.weight(r, c) * in[c];
      out[r] = activate(layer.activation, z);
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

void check_sample(const Mlp& net, const Sample& s) {
  if (s.input.size() != net.input_dim() || s.target.size() != net.output_dim()) {
    throw ShapeError(fmt::format("sample shape {}->{} does not fit network {}", s.input.size(),
                                 s.target.size(), fmt::join(net.dims(), "-")));
  }
  for (double t : s.target) {
    if (!std::isfinite(t)) throw DomainError("training targets must be finite");
  }
}

// Adds the gradient of sum over `data[first, last)` of squared error,
// scaled by `scale`, into `grad`.
void accumulate_gradient(const Mlp& net, const Dataset& data, std::size_t first,
                         std::size_t last, const std::vector<std::size_t>& order, double scale,
                         std::vector<double>& grad) {
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const Layer& layer : net.layers) {
    offsets.push_back(offset);
    offset += layer.weights.size() + layer.bias.size();
  }

  for (std::size_t s = first; s < last; ++s) {
    const Sample& sample = data[order.empty() ? s : order[s]];
    const auto outputs = forward_trace(net, sample.input);

    // delta = dLoss/dz for the current layer
    const Layer& top = net.layers.back();
    std::vector<double> delta(top.outputs);
    for (std::size_t r = 0; r < top.outputs; ++r) {
      const double y = outputs.back()[r];
      delta[r] = 2.0 * (y - sample.target[r]) * activate_prime(top.activation, y) * scale;
    }

    for (std::size_t li = net.layers.size(); li-- > 0;) {
      const Layer& layer = net.layers[li];
      const auto& in = outputs[li];
      double* g = grad.data() + offsets[li];
      for (std::size_t r = 0; r < layer.outputs; ++r) {
        for (std::size_t c = 0; c < layer.inputs; ++c) g[r * layer.inputs + c] += delta[r] * in[c];
        g[layer.weights.size() + r] += delta[r];
      }
      if (li == 0) break;
      const Layer& below = net.layers[li - 1];
      std::vector<double> next(layer.inputs, 0.0);
      for (std::size_t c = 0; c < layer.inputs; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < layer.outputs; ++r) acc += layer.weight(r, c) * delta[r];
        next[c] = acc * activate_prime(below.activation, in[c]);
      }
      delta = std::move(next);
    }
  }
}

}  // namespace

std::vector<std::size_t> Mlp::dims() const {
  std::vector<std::size_t> d;
  if (layers.empty()) return d;
  d.push_back(layers.front().inputs);
  for (const auto& l : layers) d.push_back(l.outputs);
  return d;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

Mlp make_mlp(std::span<const std::size_t> dims) {
  if (dims.size() < 2) throw ShapeError("a network needs at least input and output widths");
  Mlp net;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] == 0 || dims[i + 1] == 0) throw ShapeError("layer widths must be positive");
    Layer layer;
    layer.inputs = dims[i];
    layer.outputs = dims[i + 1];
    layer.weights.assign(dims[i] * dims[i + 1], 0.0);
    layer.bias.assign(dims[i + 1], 0.0);
    layer.activation = i + 2 == dims.size() ? Activation::Identity : Activation::Tanh;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Mlp make_mlp(std::span<const std::size_t> dims, std::uint64_t seed) {
  Mlp net = make_mlp(dims);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (auto& layer : net.layers) {
    for (double& w : layer.weights) w = dist(rng);
    for (double& b : layer.bias) b = dist(rng);
  }
  return net;
}

void validate(const Mlp& net) {
  if (net.layers.empty()) throw ShapeError("network has no layers");
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& l = net.layers[i];
    if (l.weights.size() != l.inputs * l.outputs || l.bias.size() != l.outputs) {
      throw ShapeError(fmt::format("layer {} storage does not match its shape", i));
    }
    if (i > 0 && net.layers[i - 1].outputs != l.inputs) {
      throw ShapeError(fmt::format("layer {} input width does not match layer {}", i, i - 1));
    }
  }
}

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw ShapeError(fmt::format("network expects {} inputs, got {}", net.input_dim(), x.size()));
  }
  return forward_trace(net, x).back();
}

double mean_squared_error(const Mlp& net, const Dataset& data) {
  if (data.empty()) throw DomainError("empty dataset");
  double acc = 0.0;
  for (const auto& s : data) {
    check_sample(net, s);
    const auto y = mlp_forward(net, s.input);
    for (std::size_t r = 0; r < y.size(); ++r) acc += (y[r] - s.target[r]) * (y[r] - s.target[r]);
  }
  return acc / static_cast<double>(data.size() * net.output_dim());
}

std::vector<double> parameters(const Mlp& net) {
  std::vector<double> flat;
  flat.reserve(net.parameter_count());
  for (const auto& l : net.layers) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void set_parameters(Mlp& net, std::span<const double> flat) {
  if (flat.size() != net.parameter_count()) throw ShapeError("parameter vector size mismatch");
  auto it = flat.begin();
  for (auto& l : net.layers) {
    std::copy_n(it, l.weights.size(), l.weights.begin());
    it += static_cast<std::ptrdiff_t>(l.weights.size());
    std::copy_n(it, l.bias.size(), l.bias.begin());
    it += static_cast<std::ptrdiff_t>(l.bias.size());
  }
}

std::vector<double> gradient(const Mlp& net, const Dataset& data) {
  validate(net);
  if (data.empty()) throw DomainError("empty dataset");
  for (const auto& s : data) check_sample(net, s);
  std::vector<double> grad(net.parameter_count(), 0.0);
  const double scale = 1.0 / static_cast<double>(data.size() * net.output_dim());
  accumulate_gradient(net, data, 0, data.size(), {}, scale, grad);
  return grad;
}

TrainResult train_backprop(Mlp net, const Dataset& data, double lr, std::size_t epochs,
                           const TrainOptions& options) {
  validate(net);
  if (!(lr > 0.0)) throw ConfigurationError("learning rate must be positive");
  if (data.empty()) throw DomainError("empty dataset");
  for (const auto& s : data) check_sample(net, s);

  const std::size_t batch =
      options.batch_size == 0 ? data.size() : std::min(options.batch_size, data.size());
  std::vector<std::size_t> order;
  std::mt19937_64 rng(options.shuffle_seed);
  if (batch < data.size()) {
    order.resize(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  TrainResult result;
  result.loss_history.reserve(epochs);
  std::vector<double> params = parameters(net);
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad(params.size());

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const double loss = mean_squared_error(net, data);
    if (!std::isfinite(loss)) {
      throw TrainingDivergedError(
          fmt::format("training diverged at epoch {}", epoch),
          epoch == 0 ? 0 : epoch - 1);
    }
    result.loss_history.push_back(loss);
    if (!order.empty()) std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t first = 0; first < data.size(); first += batch) {
      const std::size_t last = std::min(first + batch, data.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>((last - first) * net.output_dim());
      accumulate_gradient(net, data, first, last, order, scale, grad);
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = options.momentum * velocity[p] - lr * grad[p];
        params[p] += velocity[p];
      }
      set_parameters(net, params);
    }
  }
  if (!std::isfinite(mean_squared_error(net, data))) {
    throw TrainingDivergedError("training diverged after the last epoch",
                                epochs == 0 ? 0 : epochs - 1);
  }
  result.net = std::move(net);
  return result;
}

void save(std::ostream& out, const Mlp& net) {
  validate(net);
  fmt::print(out, "mlp v1 {}\n", fmt::join(net.dims(), "-"));
  for (const auto& l : net.layers) {
    for (std::size_t r = 0; r < l.outputs; ++r) {
      for (std::size_t c = 0; c < l.inputs; ++c) {
        fmt::print(out, c == 0 ? "{:.17g}" : " {:.17g}", l.weight(r, c));
      }
      out << '\n';
    }
    for (std::size_t r = 0; r < l.outputs; ++r) {
      fmt::print(out, r == 0 ? "{:.17g}" : " {:.17g}", l.bias[r]);
    }
    out << '\n';
  }
}

Mlp load(std::istream& in) {
  std::string magic, version, dims_text;
  if (!(in >> magic >> version >> dims_text) || magic != "mlp" || version != "v1") {
    throw ConfigurationError("bad network header (expected `mlp v1 <dims>`)");
  }
  std::vector<std::size_t> dims;
  std::istringstream dims_stream(dims_text);
  for (std::string tok; std::getline(dims_stream, tok, '-');) {
    try {
      dims.push_back(static_cast<std::size_t>(std::stoul(tok)));
    } catch (const std::exception&) {
      throw ConfigurationError(fmt::format("bad layer width '{}'", tok));
    }
  }
  Mlp net = make_mlp(dims);
  for (auto& l : net.layers) {
    for (double& w : l.weights) {
      if (!(in >> w)) throw ConfigurationError("network stream ended inside a weight block");
    }
    for (double& b : l.bias) {
      if (!(in >> b)) throw ConfigurationError("network stream ended inside a bias block");
    }
  }
  return net;
}

}  // namespace mldrive::nn
