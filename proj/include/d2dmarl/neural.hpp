#pragma once

// Minimal dense feed-forward networks with exact reverse-mode gradients,
// a bias-corrected adaptive-moment optimizer, soft target-network updates,
// and a bit-exact binary weight format. 64-bit floats throughout.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dmarl/rng.hpp"

namespace d2dmarl {

static_assert(std::endian::native == std::endian::little,
              "weight serialization assumes a little-endian host");

// Hidden layers use the rectifier; the output layer is identity (critics
// read it as a value, actors as raw logits).
struct MLPSpec {
  std::vector<int> layer_sizes;  // [input, hidden..., output]

  void validate() const {
    if (layer_sizes.size() < 2)
      throw std::invalid_argument("MLPSpec: need at least input and output layers");
    for (int s : layer_sizes)
      if (s < 1) throw std::invalid_argument("MLPSpec: all layer sizes must be >= 1");
  }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int num_weight_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
};

struct MLPNet {
  MLPSpec spec;
  std::vector<std::vector<double>> weights;  // weights[l]: row-major (out x in)
  std::vector<std::vector<double>> biases;   // biases[l]: length out

  int input_dim() const { return spec.input_dim(); }
  int output_dim() const { return spec.output_dim(); }

  std::size_t num_params() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }
};

// Uniform fan-in initialization: entries in (-sqrt(6/fan_in), sqrt(6/fan_in)),
// biases zero. Deterministic by seed via the portable RNG.
inline MLPNet init_weights(const MLPSpec& spec, std::uint64_t seed) {
  spec.validate();
  MLPNet net;
  net.spec = spec;
  const int layers = spec.num_weight_layers();
  net.weights.resize(layers);
  net.biases.resize(layers);
  for (int l = 0; l < layers; ++l) {
    const int fan_in = spec.layer_sizes[l];
    const int fan_out = spec.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    rng::SplitMix64 gen(rng::mix(seed, 0x77696E6974ULL, static_cast<std::uint64_t>(l)));
    net.weights[l].resize(static_cast<std::size_t>(fan_out) * fan_in);
    for (double& w : net.weights[l]) w = (2.0 * gen.next_unit() - 1.0) * bound;
    net.biases[l].assign(static_cast<std::size_t>(fan_out), 0.0);
  }
  return net;
}

// Activations and pre-activations from one forward pass; required by
// backward() and by finite-difference guards that compare rectifier masks.
struct ForwardCache {
  std::vector<std::vector<double>> acts;  // acts[0] = input, acts[l+1] = layer l output
  std::vector<std::vector<double>> zs;    // zs[l] = pre-activation of layer l

  std::span<const double> output() const { return acts.back(); }
};

inline void forward(const MLPNet& net, std::span<const double> input, ForwardCache& cache) {
  const int layers = net.spec.num_weight_layers();
  if (static_cast<int>(input.size()) != net.input_dim())
    throw std::invalid_argument("forward: input length mismatch");
  cache.acts.resize(layers + 1);
  cache.zs.resize(layers);
  cache.acts[0].assign(input.begin(), input.end());
  for (int l = 0; l < layers; ++l) {
    const int in_dim = net.spec.layer_sizes[l];
    const int out_dim = net.spec.layer_sizes[l + 1];
    const double* w = net.weights[l].data();
    const double* x = cache.acts[l].data();
    auto& z = cache.zs[l];
    z.assign(static_cast<std::size_t>(out_dim), 0.0);
    for (int o = 0; o < out_dim; ++o) {
      double acc = net.biases[l][o];
      const double* row = w + static_cast<std::size_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) acc += row[i] * x[i];
      z[o] = acc;
    }
    auto& a = cache.acts[l + 1];
    a = z;
    if (l + 1 < layers)
      for (double& v : a) v = v > 0.0 ? v : 0.0;
  }
}

inline std::vector<double> forward(const MLPNet& net, std::span<const double> input) {
  ForwardCache cache;
  forward(net, input, cache);
  return cache.acts.back();
}

struct Gradients {
  std::vector<std::vector<double>> d_weights;
  std::vector<std::vector<double>> d_biases;

  static Gradients zeros_like(const MLPNet& net) {
    Gradients g;
    g.d_weights.resize(net.weights.size());
    g.d_biases.resize(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      g.d_weights[l].assign(net.weights[l].size(), 0.0);
      g.d_biases[l].assign(net.biases[l].size(), 0.0);
    }
    return g;
  }

  void zero() {
    for (auto& w : d_weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : d_biases) std::fill(b.begin(), b.end(), 0.0);
  }

  void scale(double s) {
    for (auto& w : d_weights)
      for (double& v : w) v *= s;
    for (auto& b : d_biases)
      for (double& v : b) v *= s;
  }
};

// Accumulates (+=) exact gradients of dot(output_gradient, net(x)) into
// `grads` and returns the gradient with respect to the input.
inline std::vector<double> backward(const MLPNet& net, const ForwardCache& cache,
                                    std::span<const double> output_gradient, Gradients& grads) {
  const int layers = net.spec.num_weight_layers();
  if (static_cast<int>(cache.acts.size()) != layers + 1)
    throw std::invalid_argument("backward: cache does not match network");
  if (static_cast<int>(output_gradient.size()) != net.output_dim())
    throw std::invalid_argument("backward: output gradient length mismatch");

  std::vector<double> delta(output_gradient.begin(), output_gradient.end());
  for (int l = layers - 1; l >= 0; --l) {
    const int in_dim = net.spec.layer_sizes[l];
    const int out_dim = net.spec.layer_sizes[l + 1];
    const double* x = cache.acts[l].data();
    double* dw = grads.d_weights[l].data();
    for (int o = 0; o < out_dim; ++o) {
      const double d = delta[o];
      grads.d_biases[l][o] += d;
      double* row = dw + static_cast<std::size_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) row[i] += d * x[i];
    }
    std::vector<double> prev(static_cast<std::size_t>(in_dim), 0.0);
    const double* w = net.weights[l].data();
    for (int o = 0; o < out_dim; ++o) {
      const double d = delta[o];
      const double* row = w + static_cast<std::size_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) prev[i] += d * row[i];
    }
    if (l > 0) {
      const auto& z = cache.zs[l - 1];
      for (int i = 0; i < in_dim; ++i)
        if (!(z[i] > 0.0)) prev[i] = 0.0;
    }
    delta = std::move(prev);
  }
  return delta;
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> m_weights, v_weights, m_biases, v_biases;

  static AdamState for_net(const MLPNet& net, double lr) {
    AdamState s;
    s.lr = lr;
    s.m_weights.resize(net.weights.size());
    s.v_weights.resize(net.weights.size());
    s.m_biases.resize(net.biases.size());
    s.v_biases.resize(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      s.m_weights[l].assign(net.weights[l].size(), 0.0);
      s.v_weights[l].assign(net.weights[l].size(), 0.0);
      s.m_biases[l].assign(net.biases[l].size(), 0.0);
      s.v_biases[l].assign(net.biases[l].size(), 0.0);
    }
    return s;
  }
};

namespace detail {

inline void adam_apply(std::span<double> param, std::span<const double> grad, std::span<double> m,
                       std::span<double> v, const AdamState& s, double bc1, double bc2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * grad[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    param[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

}  // namespace detail

inline void adam_step(MLPNet& net, const Gradients& grads, AdamState& opt) {
  if (grads.d_weights.size() != net.weights.size())
    throw std::invalid_argument("adam_step: gradient/network layer mismatch");
  opt.step += 1;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    detail::adam_apply(net.weights[l], grads.d_weights[l], opt.m_weights[l], opt.v_weights[l], opt,
                       bc1, bc2);
    detail::adam_apply(net.biases[l], grads.d_biases[l], opt.m_biases[l], opt.v_biases[l], opt,
                       bc1, bc2);
  }
}

// theta_target <- tau * theta_online + (1 - tau) * theta_target
inline void soft_update(MLPNet& target, const MLPNet& online, double tau) {
  if (target.spec.layer_sizes != online.spec.layer_sizes)
    throw std::invalid_argument("soft_update: spec mismatch");
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("soft_update: tau not in [0,1]");
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    for (std::size_t i = 0; i < target.weights[l].size(); ++i)
      target.weights[l][i] = tau * online.weights[l][i] + (1.0 - tau) * target.weights[l][i];
    for (std::size_t i = 0; i < target.biases[l].size(); ++i)
      target.biases[l][i] = tau * online.biases[l][i] + (1.0 - tau) * target.biases[l][i];
  }
}

// ---------------------------------------------------------------------------
// Misc numerics
// ---------------------------------------------------------------------------

// Numerically stable softmax of logits / temperature.
inline std::vector<double> softmax(std::span<const double> logits, double temperature = 1.0) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax: temperature must be positive");
  std::vector<double> out(logits.size());
  double max_z = logits[0] / temperature;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = logits[i] / temperature;
    max_z = std::max(max_z, out[i]);
  }
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - max_z);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

// First maximum index (deterministic tie-break by lowest index).
inline int argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax: empty input");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

// ---------------------------------------------------------------------------
// Weight serialization ("MLPW" v1): magic, version, layer sizes, then per
// weight layer the row-major weight matrix followed by the bias vector, all
// as little-endian 64-bit floats. Round-trips bit-exactly.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("weight file truncated");
  return v;
}

inline void write_f64s(std::ostream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline void read_f64s(std::istream& is, std::vector<double>& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("weight file truncated");
}

}  // namespace detail

inline void save_net(const MLPNet& net, std::ostream& os) {
  os.write("MLPW", 4);
  detail::write_u32(os, 1u);
  detail::write_u32(os, static_cast<std::uint32_t>(net.spec.layer_sizes.size()));
  for (int s : net.spec.layer_sizes) detail::write_u32(os, static_cast<std::uint32_t>(s));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    detail::write_f64s(os, net.weights[l]);
    detail::write_f64s(os, net.biases[l]);
  }
  if (!os) throw std::runtime_error("save_net: write failure");
}

inline void save_net(const MLPNet& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_net: cannot open " + path);
  save_net(net, os);
}

inline MLPNet load_net(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MLPW", 4) != 0)
    throw std::runtime_error("load_net: bad magic (not a weight file)");
  const std::uint32_t version = detail::read_u32(is);
  if (version != 1u) throw std::runtime_error("load_net: unsupported version");
  const std::uint32_t num_sizes = detail::read_u32(is);
  if (num_sizes < 2 || num_sizes > 64) throw std::runtime_error("load_net: corrupt layer count");
  MLPSpec spec;
  spec.layer_sizes.resize(num_sizes);
  for (auto& s : spec.layer_sizes) s = static_cast<int>(detail::read_u32(is));
  spec.validate();
  MLPNet net;
  net.spec = spec;
  net.weights.resize(spec.num_weight_layers());
  net.biases.resize(spec.num_weight_layers());
  for (int l = 0; l < spec.num_weight_layers(); ++l) {
    net.weights[l].resize(static_cast<std::size_t>(spec.layer_sizes[l + 1]) * spec.layer_sizes[l]);
    net.biases[l].resize(static_cast<std::size_t>(spec.layer_sizes[l + 1]));
    detail::read_f64s(is, net.weights[l]);
    detail::read_f64s(is, net.biases[l]);
  }
  return net;
}

inline MLPNet load_net(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_net: cannot open " + path);
  return load_net(is);
}

}  // namespace d2dmarl
