#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace mldrive::nn {

enum class Activation { Tanh, Identity };

// Dense layer, weights stored row-major as (outputs x inputs).
struct Layer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::Tanh;

  double& weight(std::size_t row, std::size_t col) { return weights[row * inputs + col]; }
  double weight(std::size_t row, std::size_t col) const { return weights[row * inputs + col]; }
};

// Feedforward network: hidden layers saturate (tanh), the output layer is
// linear.
struct Mlp {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().inputs; }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().outputs; }
  std::vector<std::size_t> dims() const;
  std::size_t parameter_count() const;
};

// Zero-initialised network with the given layer widths (at least two).
Mlp make_mlp(std::span<const std::size_t> dims);

// Weights and biases uniform in [-0.5, 0.5] from a seeded generator.
Mlp make_mlp(std::span<const std::size_t> dims, std::uint64_t seed);

void validate(const Mlp& net);

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x);

struct Sample {
  std::vector<double> input;
  std::vector<double> target;
};

using Dataset = std::vector<Sample>;

// Mean over samples and outputs of the squared error.
double mean_squared_error(const Mlp& net, const Dataset& data);

// Flattened parameters, layer by layer: weights (row-major) then biases.
std::vector<double> parameters(const Mlp& net);
void set_parameters(Mlp& net, std::span<const double> flat);

// Backpropagated gradient of mean_squared_error over `data`, in the same
// order as parameters().
std::vector<double> gradient(const Mlp& net, const Dataset& data);

struct TrainOptions {
  double momentum = 0.0;       // heavy-ball coefficient
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t shuffle_seed = 0;
};

struct TrainResult {
  Mlp net;
  std::vector<double> loss_history;  // loss before each epoch's updates
};

// Gradient-descent backpropagation. Throws TrainingDivergedError when the
// loss stops being finite.
TrainResult train_backprop(Mlp net, const Dataset& data, double lr, std::size_t epochs,
                           const TrainOptions& options = {});

// `mlp v1 <d0>-<d1>-...` header, then for each layer one line per weight row
// followed by one bias line.
void save(std::ostream& out, const Mlp& net);
Mlp load(std::istream& in);

}  // namespace mldrive::nn
