#include "rheoflow/icnn.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace rheoflow {

using json = nlohmann::json;

std::string activation_name(Activation a) {
  return a == Activation::Softplus ? "softplus" : "relu";
}

Activation activation_from_name(const std::string& name) {
  if (name == "softplus") return Activation::Softplus;
  if (name == "relu") return Activation::Relu;
  throw ModelParseError("unknown activation tag: " + name);
}

namespace {

double act_eval(Activation a, double z) {
  if (a == Activation::Relu) return z > 0.0 ? z : 0.0;
  // softplus, overflow-safe
  return z > 30.0 ? z : std::log1p(std::exp(z));
}

double act_deriv(Activation a, double z) {
  if (a == Activation::Relu) return z > 0.0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-z));
}

void check_model_dims(const IcnnModel& m) {
  const auto L = m.architecture.size();
  if (L < 2 || m.architecture.back() != 1)
    throw std::invalid_argument("icnn: architecture must end in width 1");
  if (m.weights.size() != L - 1 || m.biases.size() != L - 1)
    throw std::invalid_argument("icnn: layer count mismatch");
  for (std::size_t l = 0; l + 1 < L; ++l) {
    if (m.weights[l].rows() != m.architecture[l + 1] || m.weights[l].cols() != m.architecture[l] ||
        m.biases[l].size() != m.architecture[l + 1])
      throw std::invalid_argument("icnn: weight/bias shape mismatch at layer " + std::to_string(l + 1));
  }
}

}  // namespace

double icnn_forward(const IcnnModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.input_dim())
    throw std::invalid_argument("icnn_forward: input dimension mismatch");
  const std::size_t n_layers = model.weights.size();
  Eigen::VectorXd h = model.input_affine.scale * x;
  h.array() += model.input_affine.shift;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::VectorXd z = model.weights[l] * h + model.biases[l];
    if (l + 1 < n_layers) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = act_eval(model.activation, z[i]);
    }
    h = std::move(z);
  }
  return model.sign * model.output_affine(h[0]);
}

Eigen::VectorXd icnn_grad_input(const IcnnModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.input_dim())
    throw std::invalid_argument("icnn_grad_input: input dimension mismatch");
  const std::size_t n_layers = model.weights.size();
  Eigen::VectorXd h = model.input_affine.scale * x;
  h.array() += model.input_affine.shift;
  std::vector<Eigen::VectorXd> pre(n_layers);  // pre-activations
  for (std::size_t l = 0; l < n_layers; ++l) {
    pre[l] = model.weights[l] * h + model.biases[l];
    if (l + 1 < n_layers) {
      h.resize(pre[l].size());
      for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = act_eval(model.activation, pre[l][i]);
    }
  }
  // backward pass: d(output)/d(pre-activation)
  Eigen::VectorXd delta = Eigen::VectorXd::Ones(1);
  for (std::size_t l = n_layers; l-- > 0;) {
    Eigen::VectorXd d_prev = model.weights[l].transpose() * delta;
    if (l > 0) {
      for (Eigen::Index i = 0; i < d_prev.size(); ++i)
        d_prev[i] *= act_deriv(model.activation, pre[l - 1][i]);
    }
    delta = std::move(d_prev);
  }
  return (model.sign * model.output_affine.scale * model.input_affine.scale) * delta;
}

double icnn_forward1(const IcnnModel& model, double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return icnn_forward(model, v);
}

double icnn_grad1(const IcnnModel& model, double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return icnn_grad_input(model, v)[0];
}

void project_weights(IcnnModel& model, double epsilon_proj) {
  for (std::size_t l = 1; l < model.weights.size(); ++l) {
    auto& W = model.weights[l];
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i)
        if (W(i, j) < 0.0) W(i, j) = std::exp(W(i, j) - epsilon_proj);
  }
}

bool check_convexity_structural(const IcnnModel& model) {
  if (model.activation != Activation::Softplus && model.activation != Activation::Relu)
    return false;
  for (std::size_t l = 1; l < model.weights.size(); ++l)
    if ((model.weights[l].array() < 0.0).any()) return false;
  return true;
}

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
};

void adam_step(Eigen::Ref<Eigen::MatrixXd> x, const Eigen::MatrixXd& g, Eigen::MatrixXd& m,
               Eigen::MatrixXd& v, int t, double lr, const TrainConfig& cfg) {
  m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
  v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
  x.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.adam_eps);
}

}  // namespace

TrainResult train(const RheologyDataset& dataset, const std::vector<int>& architecture,
                  const TrainConfig& config) {
  dataset.validate();
  if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (config.epsilon_proj <= 0.0) throw std::invalid_argument("train: epsilon_proj must be > 0");
  if (architecture.size() < 2 || architecture.front() != 1 || architecture.back() != 1)
    throw std::invalid_argument("train: rheology fits need architecture 1 x ... x 1");

  const Eigen::Index N = static_cast<Eigen::Index>(dataset.samples.size());
  Eigen::RowVectorXd x_raw(N), y_raw(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    x_raw[i] = dataset.samples[i].first;
    y_raw[i] = dataset.samples[i].second;
  }

  // Map inputs into [0,1] and targets into [0,1]; both maps are affine with
  // positive scale so convexity in the original variable is preserved.
  const double x_min = x_raw.minCoeff(), x_max = x_raw.maxCoeff();
  const double y_min = y_raw.minCoeff(), y_max = y_raw.maxCoeff();
  const double x_span = x_max - x_min, y_span = y_max - y_min;

  IcnnModel model;
  model.architecture = architecture;
  model.sign = +1;
  model.activation = Activation::Softplus;
  model.input_affine.scale = x_span > 1e-12 ? 1.0 / x_span : 1.0;
  model.input_affine.shift = -x_min * model.input_affine.scale;
  model.output_affine.scale = y_span > 1e-12 ? y_span : 1.0;
  model.output_affine.shift = y_min;

  const std::size_t n_layers = architecture.size() - 1;
  std::mt19937_64 rng(config.seed);
  model.weights.resize(n_layers);
  model.biases.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int rows = architecture[l + 1], cols = architecture[l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    // Layers >= 2 start non-negative so the first projection is a no-op.
    std::uniform_real_distribution<double> dist(l == 0 ? -bound : 0.0, bound);
    model.weights[l].resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) model.weights[l](i, j) = dist(rng);
    model.biases[l] = Eigen::VectorXd::Zero(rows);
  }

  Eigen::RowVectorXd xn = (model.input_affine.scale * x_raw).array() + model.input_affine.shift;
  Eigen::RowVectorXd yn =
      (y_raw.array() - model.output_affine.shift) / model.output_affine.scale;

  AdamState adam;
  adam.mW.resize(n_layers);
  adam.vW.resize(n_layers);
  adam.mb.resize(n_layers);
  adam.vb.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    adam.mW[l] = Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols());
    adam.vW[l] = adam.mW[l];
    adam.mb[l] = Eigen::VectorXd::Zero(model.biases[l].size());
    adam.vb[l] = adam.mb[l];
  }

  std::vector<Eigen::MatrixXd> acts(n_layers + 1), pre(n_layers);
  acts[0] = xn;

  auto forward_batch = [&]() {
    for (std::size_t l = 0; l < n_layers; ++l) {
      pre[l] = (model.weights[l] * acts[l]).colwise() + model.biases[l];
      if (l + 1 < n_layers) {
        acts[l + 1] = pre[l].unaryExpr(
            [&](double z) { return act_eval(model.activation, z); });
      } else {
        acts[l + 1] = pre[l];
      }
    }
  };

  if (!(config.lr_decay_target > 0.0))
    throw std::invalid_argument("train: lr_decay_target must be > 0");
  const double decay_exponent =
      config.epochs > 1 ? std::log(config.lr_decay_target) / (config.epochs - 1) : 0.0;

  double mse_norm = 0.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.learning_rate * std::exp(decay_exponent * (epoch - 1));
    forward_batch();
    Eigen::RowVectorXd err = acts[n_layers].row(0) - yn;
    mse_norm = err.squaredNorm() / static_cast<double>(N);
    if (!std::isfinite(mse_norm))
      throw TrainingDiverged(epoch, "training diverged (non-finite loss) at epoch " +
                                        std::to_string(epoch));

    Eigen::MatrixXd delta = (2.0 / static_cast<double>(N)) * err;
    for (std::size_t l = n_layers; l-- > 0;) {
      if (l + 1 < n_layers) {
        delta = delta.cwiseProduct(
            pre[l].unaryExpr([&](double z) { return act_deriv(model.activation, z); }));
      }
      Eigen::MatrixXd gW = delta * acts[l].transpose();
      Eigen::VectorXd gb = delta.rowwise().sum();
      Eigen::MatrixXd delta_prev;
      if (l > 0) delta_prev = model.weights[l].transpose() * delta;
      adam_step(model.weights[l], gW, adam.mW[l], adam.vW[l], epoch, lr, config);
      Eigen::MatrixXd b_mat = model.biases[l], gb_mat = gb, mb = adam.mb[l], vb = adam.vb[l];
      adam_step(b_mat, gb_mat, mb, vb, epoch, lr, config);
      model.biases[l] = b_mat.col(0);
      adam.mb[l] = mb.col(0);
      adam.vb[l] = vb.col(0);
      delta = std::move(delta_prev);
    }
    project_weights(model, config.epsilon_proj);
  }

  // Final loss with the projected weights, reported in original units.
  forward_batch();
  Eigen::RowVectorXd err = acts[n_layers].row(0) - yn;
  mse_norm = err.squaredNorm() / static_cast<double>(N);
  const double s = model.output_affine.scale;
  return TrainResult{std::move(model), mse_norm * s * s};
}

SelectResult select_convex_concave(const RheologyDataset& dataset,
                                   const std::vector<int>& architecture,
                                   const TrainConfig& config) {
  TrainConfig cfg_plus = config;
  TrainConfig cfg_minus = config;
  // Two independent deterministic streams derived from the one seed.
  cfg_minus.seed = config.seed ^ 0x9E3779B97F4A7C15ull;

  RheologyDataset negated = dataset;
  for (auto& [x, y] : negated.samples) y = -y;

  TrainResult plus = train(dataset, architecture, cfg_plus);
  TrainResult minus = train(negated, architecture, cfg_minus);

  SelectResult out;
  out.loss_plus = plus.final_mse;
  out.loss_minus = minus.final_mse;
  if (plus.final_mse <= minus.final_mse) {
    out.model = std::move(plus.model);
    out.model.sign = +1;
  } else {
    out.model = std::move(minus.model);
    out.model.sign = -1;
  }
  return out;
}

void save_model(const IcnnModel& model, const std::string& path) {
  json j;
  j["schema_version"] = 1;
  j["architecture"] = model.architecture;
  j["activation"] = activation_name(model.activation);
  j["sign"] = model.sign;
  j["input_affine"] = {{"scale", model.input_affine.scale}, {"shift", model.input_affine.shift}};
  j["output_affine"] = {{"scale", model.output_affine.scale}, {"shift", model.output_affine.shift}};
  json layers = json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    json w = json::array();
    for (Eigen::Index i = 0; i < model.weights[l].rows(); ++i) {
      json row = json::array();
      for (Eigen::Index jj = 0; jj < model.weights[l].cols(); ++jj)
        row.push_back(model.weights[l](i, jj));
      w.push_back(std::move(row));
    }
    json b = json::array();
    for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) b.push_back(model.biases[l][i]);
    layers.push_back({{"w", std::move(w)}, {"b", std::move(b)}});
  }
  j["layers"] = std::move(layers);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump(2) << '\n';
}

IcnnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ModelParseError("model file '" + path + "': " + e.what());
  }
  IcnnModel m;
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw ModelParseError("model file '" + path + "': unsupported schema_version");
    m.architecture = j.at("architecture").get<std::vector<int>>();
    m.activation = activation_from_name(j.at("activation").get<std::string>());
    m.sign = j.at("sign").get<int>();
    m.input_affine.scale = j.at("input_affine").at("scale").get<double>();
    m.input_affine.shift = j.at("input_affine").at("shift").get<double>();
    m.output_affine.scale = j.at("output_affine").at("scale").get<double>();
    m.output_affine.shift = j.at("output_affine").at("shift").get<double>();
    const auto& layers = j.at("layers");
    for (const auto& layer : layers) {
      const auto& w = layer.at("w");
      const auto& b = layer.at("b");
      Eigen::MatrixXd W(w.size(), w.empty() ? 0 : w[0].size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i].size() != static_cast<std::size_t>(W.cols()))
          throw ModelParseError("model file '" + path + "': ragged weight matrix");
        for (std::size_t jj = 0; jj < w[i].size(); ++jj) W(i, jj) = w[i][jj].get<double>();
      }
      Eigen::VectorXd bv(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) bv[i] = b[i].get<double>();
      m.weights.push_back(std::move(W));
      m.biases.push_back(std::move(bv));
    }
  } catch (const json::exception& e) {
    throw ModelParseError("model file '" + path + "': " + e.what());
  }
  if (m.sign != 1 && m.sign != -1)
    throw ModelParseError("model file '" + path + "': sign must be +1 or -1");
  if (m.input_affine.scale <= 0.0 || m.output_affine.scale <= 0.0)
    throw ModelParseError("model file '" + path + "': affine scales must be positive");
  try {
    check_model_dims(m);
  } catch (const std::invalid_argument& e) {
    throw ModelParseError("model file '" + path + "': " + e.what());
  }
  return m;
}

}  // namespace rheoflow
