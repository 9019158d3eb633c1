#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dld/dataset.hpp"

namespace dld {

struct Hyperparams {
  int size = 8;          // hidden units
  double decay = 0.001;  // L2 penalty coefficient, applied to all parameters
  int maxit = 100;       // cap on accepted full-batch updates
  int max_weights = 500; // cap on total parameter count
};

/// Total parameter count of a single-hidden-layer net with bias units:
/// (n_inputs + 1) * size input->hidden plus (size + 1) hidden->output.
constexpr int count_weights(int n_inputs, int size) {
  return (n_inputs + 1) * size + (size + 1);
}

inline void validate_hyperparams(const Hyperparams& hp, int n_inputs) {
  if (hp.size < 1) throw Error("size must be at least 1");
  if (hp.decay < 0.0) throw Error("decay must be >= 0");
  if (hp.maxit < 1) throw Error("maxit must be at least 1");
  if (hp.max_weights < 1) throw Error("max_weights must be at least 1");
  const int total = count_weights(n_inputs, hp.size);
  if (total > hp.max_weights) {
    throw Error("size " + std::to_string(hp.size) + " needs " +
                std::to_string(total) + " weights, exceeding the cap of " +
                std::to_string(hp.max_weights));
  }
}

/// Parameters of the network. input_to_hidden is (n_inputs + 1) x size,
/// row-major, with the bias row last; hidden_to_output has the bias last.
/// The flattened layout (input_to_hidden then hidden_to_output) is shared
/// by gradient() and the optimizer.
struct NetworkWeights {
  int n_inputs = 0;
  int size = 0;
  std::vector<double> input_to_hidden;
  std::vector<double> hidden_to_output;

  double ih(int input, int hidden) const {
    return input_to_hidden[static_cast<std::size_t>(input) * size + hidden];
  }
  double& ih(int input, int hidden) {
    return input_to_hidden[static_cast<std::size_t>(input) * size + hidden];
  }

  int total() const { return count_weights(n_inputs, size); }

  std::vector<double> flat() const {
    std::vector<double> out;
    out.reserve(input_to_hidden.size() + hidden_to_output.size());
    out.insert(out.end(), input_to_hidden.begin(), input_to_hidden.end());
    out.insert(out.end(), hidden_to_output.begin(), hidden_to_output.end());
    return out;
  }

  static NetworkWeights from_flat(int n_inputs, int size,
                                  std::span<const double> theta) {
    const std::size_t ih_len =
        static_cast<std::size_t>(n_inputs + 1) * static_cast<std::size_t>(size);
    const std::size_t ho_len = static_cast<std::size_t>(size) + 1;
    if (theta.size() != ih_len + ho_len) {
      throw Error("flat parameter vector has wrong length");
    }
    NetworkWeights w;
    w.n_inputs = n_inputs;
    w.size = size;
    w.input_to_hidden.assign(theta.begin(), theta.begin() + ih_len);
    w.hidden_to_output.assign(theta.begin() + ih_len, theta.end());
    return w;
  }
};

/// A fitted, standardization-aware model. loss_trace holds the penalized
/// loss of the initial point and of every accepted iterate; it is empty
/// only on models loaded from disk (the trace is not persisted).
struct TrainedModel {
  NetworkWeights weights;
  StandardizationParams standardizer;
  Hyperparams hyperparams;
  std::vector<double> loss_trace;
  std::uint64_t seed = 0;
};

/// Entries drawn independently uniform on [-0.5, 0.5], in flattened layout
/// order, from the seeded generator.
inline NetworkWeights init_weights(int n_inputs, int size, std::uint64_t seed,
                                   int max_weights = 500) {
  if (n_inputs < 1 || size < 1) throw Error("n_inputs and size must be >= 1");
  const int total = count_weights(n_inputs, size);
  if (total > max_weights) {
    throw Error("size " + std::to_string(size) + " needs " +
                std::to_string(total) + " weights, exceeding the cap of " +
                std::to_string(max_weights));
  }
  NetworkWeights w;
  w.n_inputs = n_inputs;
  w.size = size;
  Rng rng(seed);
  w.input_to_hidden.resize(static_cast<std::size_t>(n_inputs + 1) * size);
  for (auto& v : w.input_to_hidden) v = rng.uniform(-0.5, 0.5);
  w.hidden_to_output.resize(static_cast<std::size_t>(size) + 1);
  for (auto& v : w.hidden_to_output) v = rng.uniform(-0.5, 0.5);
  return w;
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace net_detail {

inline void hidden_activations(const NetworkWeights& w,
                               std::span<const double> z,
                               std::vector<double>& h) {
  h.resize(static_cast<std::size_t>(w.size));
  for (int j = 0; j < w.size; ++j) {
    double a = w.ih(w.n_inputs, j);  // bias row
    for (int i = 0; i < w.n_inputs; ++i) a += w.ih(i, j) * z[i];
    h[static_cast<std::size_t>(j)] = sigmoid(a);
  }
}

inline double output_from_hidden(const NetworkWeights& w,
                                 const std::vector<double>& h) {
  double a = w.hidden_to_output[static_cast<std::size_t>(w.size)];
  for (int j = 0; j < w.size; ++j) {
    a += w.hidden_to_output[static_cast<std::size_t>(j)] *
         h[static_cast<std::size_t>(j)];
  }
  return sigmoid(a);
}

inline void check_input(const NetworkWeights& w, std::span<const double> z) {
  if (static_cast<int>(z.size()) != w.n_inputs) {
    throw Error("feature vector length " + std::to_string(z.size()) +
                " does not match network inputs " + std::to_string(w.n_inputs));
  }
  for (double v : z) {
    if (!std::isfinite(v)) throw Error("non-finite input feature");
  }
}

inline void check_batch(const NetworkWeights& w,
                        const std::vector<std::vector<double>>& Z,
                        const std::vector<int>& y) {
  if (Z.empty()) throw Error("empty training batch");
  if (Z.size() != y.size()) throw Error("feature rows and labels differ in length");
  for (const auto& row : Z) check_input(w, row);
}

// Keeps log terms finite on saturated outputs.
inline double clamp_probability(double p) {
  constexpr double kEps = 1e-12;
  if (p < kEps) return kEps;
  if (p > 1.0 - kEps) return 1.0 - kEps;
  return p;
}

inline double penalty(const NetworkWeights& w, double decay) {
  double ss = 0.0;
  for (double v : w.input_to_hidden) ss += v * v;
  for (double v : w.hidden_to_output) ss += v * v;
  return decay * ss;
}

}  // namespace net_detail

/// Probability of the positive class (DLD) for one standardized row.
inline double forward(const NetworkWeights& w, std::span<const double> z) {
  net_detail::check_input(w, z);
  std::vector<double> h;
  net_detail::hidden_activations(w, z, h);
  return net_detail::output_from_hidden(w, h);
}

/// Penalized binary cross-entropy: sum over rows of
/// -y ln p - (1-y) ln(1-p), plus decay * sum of all squared parameters
/// (biases included). p is clamped to [1e-12, 1 - 1e-12] inside the logs.
inline double loss(const NetworkWeights& w,
                   const std::vector<std::vector<double>>& Z,
                   const std::vector<int>& y, double decay) {
  net_detail::check_batch(w, Z, y);
  double total = 0.0;
  std::vector<double> h;
  for (std::size_t n = 0; n < Z.size(); ++n) {
    net_detail::hidden_activations(w, Z[n], h);
    const double p =
        net_detail::clamp_probability(net_detail::output_from_hidden(w, h));
    total += y[n] ? -std::log(p) : -std::log(1.0 - p);
  }
  return total + net_detail::penalty(w, decay);
}

/// Analytic gradient of loss() by backpropagation, in the flattened
/// parameter layout of NetworkWeights.
inline std::vector<double> gradient(const NetworkWeights& w,
                                    const std::vector<std::vector<double>>& Z,
                                    const std::vector<int>& y, double decay) {
  net_detail::check_batch(w, Z, y);
  const int ni = w.n_inputs;
  const int sz = w.size;
  const std::size_t ih_len = static_cast<std::size_t>(ni + 1) * sz;
  std::vector<double> g(ih_len + sz + 1, 0.0);
  std::vector<double> h;

  for (std::size_t n = 0; n < Z.size(); ++n) {
    const auto& z = Z[n];
    net_detail::hidden_activations(w, z, h);
    const double p = net_detail::output_from_hidden(w, h);
    const double d_out = p - static_cast<double>(y[n]);

    g[ih_len + sz] += d_out;  // output bias
    for (int j = 0; j < sz; ++j) {
      const double hj = h[static_cast<std::size_t>(j)];
      g[ih_len + j] += d_out * hj;
      const double d_hidden =
          d_out * w.hidden_to_output[static_cast<std::size_t>(j)] * hj * (1.0 - hj);
      for (int i = 0; i < ni; ++i) {
        g[static_cast<std::size_t>(i) * sz + j] += d_hidden * z[i];
      }
      g[static_cast<std::size_t>(ni) * sz + j] += d_hidden;  // hidden bias
    }
  }

  const auto theta = w.flat();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    g[i] += 2.0 * decay * theta[i];
  }
  return g;
}

/// Full-batch gradient descent with backtracking line search. Each iteration
/// starts at step 1.0 and halves until the Armijo condition
/// L(theta - step*g) <= L(theta) - 1e-4 * step * |g|^2 holds. Stops at maxit
/// accepted updates, when the loss improvement drops below 1e-8, or when the
/// line search fails at step < 1e-12. The accepted-iterate loss trace is
/// therefore non-increasing.
inline TrainedModel train(const Dataset& training, const Hyperparams& hp,
                          std::uint64_t seed) {
  validate_hyperparams(hp, static_cast<int>(kNumFeatures));
  if (training.samples.empty()) throw Error("empty training set");
  for (const auto& s : training.samples) {
    if (!s.group) throw Error("sample '" + s.id + "' has no group label");
  }
  if (training.count(Group::DLD) == 0 || training.count(Group::TD) == 0) {
    throw Error("training data must contain both groups");
  }

  const StandardizationParams params = fit_standardizer(training);
  std::vector<std::vector<double>> Z;
  std::vector<int> y;
  Z.reserve(training.samples.size());
  y.reserve(training.samples.size());
  for (const auto& s : training.samples) {
    const FeatureVector z = apply_standardizer(params, s.features());
    Z.emplace_back(z.begin(), z.end());
    y.push_back(*s.group == Group::DLD ? 1 : 0);
  }

  NetworkWeights w = init_weights(static_cast<int>(kNumFeatures), hp.size,
                                  seed, hp.max_weights);
  std::vector<double> theta = w.flat();
  double current = loss(w, Z, y, hp.decay);
  std::vector<double> trace{current};

  constexpr double kArmijo = 1e-4;
  constexpr double kLossTol = 1e-8;
  constexpr double kMinStep = 1e-12;

  std::vector<double> candidate(theta.size());
  for (int it = 0; it < hp.maxit; ++it) {
    const std::vector<double> g = gradient(w, Z, y, hp.decay);
    double g2 = 0.0;
    for (double v : g) g2 += v * v;
    if (g2 == 0.0) break;

    double step = 1.0;
    bool accepted = false;
    double next = current;
    while (step >= kMinStep) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        candidate[i] = theta[i] - step * g[i];
      }
      const NetworkWeights wc = NetworkWeights::from_flat(
          static_cast<int>(kNumFeatures), hp.size, candidate);
      next = loss(wc, Z, y, hp.decay);
      if (next <= current - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    theta = candidate;
    w = NetworkWeights::from_flat(static_cast<int>(kNumFeatures), hp.size, theta);
    const double drop = current - next;
    current = next;
    trace.push_back(current);
    if (drop < kLossTol) break;
  }

  return TrainedModel{std::move(w), params, hp, std::move(trace), seed};
}

struct Prediction {
  double probability = 0.0;  // P(DLD)
  Group label = Group::TD;
};

/// Standardizes with the model's parameters and runs the forward pass.
/// The 0.5 tie classifies as DLD.
inline Prediction predict(const TrainedModel& m, const Sample& s) {
  const FeatureVector z = apply_standardizer(m.standardizer, s.features());
  const double p = forward(m.weights, std::span<const double>(z.data(), z.size()));
  return {p, p >= 0.5 ? Group::DLD : Group::TD};
}

}  // namespace dld
