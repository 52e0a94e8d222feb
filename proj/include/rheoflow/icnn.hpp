#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rheoflow/dataset.hpp"

namespace rheoflow {

enum class Activation { Softplus, Relu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Affine map x -> scale*x + shift. Positive scale preserves convexity.
struct AffineMap {
  double scale = 1.0;
  double shift = 0.0;
  double operator()(double x) const { return scale * x + shift; }
};

/// Feedforward scalar network with the input-convexity structure:
/// all weight matrices past the first are non-negative (C1) and the
/// activation is convex non-decreasing (C2). `sign = -1` means the stored
/// network was fitted to -y, so the model as a whole is concave.
struct IcnnModel {
  std::vector<int> architecture;          // widths; first = input dim, last = 1
  std::vector<Eigen::MatrixXd> weights;   // weights[l]: arch[l+1] x arch[l]
  std::vector<Eigen::VectorXd> biases;
  Activation activation = Activation::Softplus;
  int sign = +1;
  AffineMap input_affine;                 // applied componentwise to inputs
  AffineMap output_affine;                // applied to the raw network output

  int input_dim() const { return architecture.empty() ? 0 : architecture.front(); }
};

struct TrainConfig {
  int epochs = 20000;
  double learning_rate = 1e-3;
  // Geometric learning-rate decay: the rate falls from learning_rate to
  // learning_rate * lr_decay_target over the run. 1.0 keeps it constant.
  double lr_decay_target = 1.0;
  std::uint64_t seed = 0;
  double epsilon_proj = 30.0;   // exponentiation constant
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct TrainingDiverged : std::runtime_error {
  int epoch;
  TrainingDiverged(int ep, const std::string& msg) : std::runtime_error(msg), epoch(ep) {}
};

struct ModelParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double icnn_forward(const IcnnModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd icnn_grad_input(const IcnnModel& model, const Eigen::VectorXd& x);

// Scalar-input conveniences (rheology fits have d = 1).
double icnn_forward1(const IcnnModel& model, double x);
double icnn_grad1(const IcnnModel& model, double x);

/// Exponentiation projection: every strictly negative weight in layers >= 2
/// becomes exp(w - epsilon_proj). First-layer weights and all biases are
/// untouched.
void project_weights(IcnnModel& model, double epsilon_proj);

bool check_convexity_structural(const IcnnModel& model);

struct TrainResult {
  IcnnModel model;      // sign = +1
  double final_mse;     // full-batch MSE on the data the net was trained on
};

TrainResult train(const RheologyDataset& dataset, const std::vector<int>& architecture,
                  const TrainConfig& config);

struct SelectResult {
  IcnnModel model;      // approximates the original data; sign records the branch
  double loss_plus;
  double loss_minus;
};

/// Trains a convex fit on (x, y) and one on (x, -y); returns whichever branch
/// has the smaller loss (ties go to the convex branch).
SelectResult select_convex_concave(const RheologyDataset& dataset,
                                   const std::vector<int>& architecture,
                                   const TrainConfig& config);

void save_model(const IcnnModel& model, const std::string& path);
IcnnModel load_model(const std::string& path);

}  // namespace rheoflow
