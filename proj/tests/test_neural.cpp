#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "d2dmarl/neural.hpp"
#include "gradcheck.hpp"

using namespace d2dmarl;
using Catch::Approx;

namespace {

// Independent forward pass: different data layout (nested loops over an
// explicit matrix view) for the second-implementation oracle.
std::vector<double> naive_forward(const MLPNet& net, const std::vector<double>& input) {
  std::vector<double> x = input;
  const int layers = net.spec.num_weight_layers();
  for (int l = 0; l < layers; ++l) {
    const int in_dim = net.spec.layer_sizes[l];
    const int out_dim = net.spec.layer_sizes[l + 1];
    std::vector<double> y(out_dim);
    for (int o = 0; o < out_dim; ++o) {
      double acc = net.biases[l].at(o);
      for (int i = 0; i < in_dim; ++i)
        acc += net.weights[l].at(static_cast<std::size_t>(o) * in_dim + i) * x.at(i);
      y[o] = (l + 1 < layers && acc < 0.0) ? 0.0 : acc;
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace

TEST_CASE("spec validation", "[neural]") {
  MLPSpec bad;
  bad.layer_sizes = {4};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.layer_sizes = {4, 0, 2};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  MLPSpec ok;
  ok.layer_sizes = {4, 8, 2};
  REQUIRE_NOTHROW(ok.validate());
  REQUIRE(ok.input_dim() == 4);
  REQUIRE(ok.output_dim() == 2);
  REQUIRE(ok.num_weight_layers() == 2);
}

TEST_CASE("forward: zero net, scalar affine, oracle match", "[neural]") {
  MLPSpec spec;
  spec.layer_sizes = {3, 4, 2};
  MLPNet zero = init_weights(spec, 1);
  for (auto& w : zero.weights) std::fill(w.begin(), w.end(), 0.0);
  std::vector<double> input{0.3, -0.7, 1.1};
  for (double v : forward(zero, input)) REQUIRE(v == 0.0);

  // single 1x1 layer: y = 2x + 1 at x = 3
  MLPSpec scalar_spec;
  scalar_spec.layer_sizes = {1, 1};
  MLPNet scalar = init_weights(scalar_spec, 1);
  scalar.weights[0][0] = 2.0;
  scalar.biases[0][0] = 1.0;
  std::vector<double> three{3.0};
  REQUIRE(forward(scalar, three)[0] == Approx(7.0).margin(1e-15));

  rng::SplitMix64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    MLPSpec s;
    s.layer_sizes = {1 + static_cast<int>(gen.next_below(6)),
                     1 + static_cast<int>(gen.next_below(8)),
                     1 + static_cast<int>(gen.next_below(8)),
                     1 + static_cast<int>(gen.next_below(4))};
    MLPNet net = init_weights(s, gen.next_u64());
    const auto x = gradcheck::random_vec(gen, s.input_dim());
    const auto got = forward(net, x);
    const auto want = naive_forward(net, x);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      REQUIRE(got[i] == Approx(want[i]).epsilon(1e-12).margin(1e-300));
  }

  std::vector<double> short_input{1.0};
  REQUIRE_THROWS_AS(forward(zero, short_input), std::invalid_argument);
}

TEST_CASE("forward is pure and bit-identical on repeats", "[neural]") {
  MLPSpec spec;
  spec.layer_sizes = {5, 16, 8, 3};
  const MLPNet net = init_weights(spec, 17);
  rng::SplitMix64 gen(17);
  const auto x = gradcheck::random_vec(gen, 5);
  const auto a = forward(net, x);
  const auto b = forward(net, x);
  REQUIRE(a == b);
}

TEST_CASE("backward: finite differences, zero gradient, scalar calculus", "[neural]") {
  // full finite-difference sweep over every parameter of small nets; the
  // acceptance gate additionally checks the production-sized configurations
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    MLPSpec spec;
    spec.layer_sizes = {4, 8, 6, 3};
    MLPNet net = init_weights(spec, seed);
    const auto r = gradcheck::check_mlp(net, seed);
    INFO("seed " << seed << " checked " << r.checked << " skipped " << r.skipped);
    REQUIRE(r.checked > 0);
    REQUIRE(r.max_rel_err <= 1e-4);
  }

  MLPSpec spec;
  spec.layer_sizes = {3, 5, 2};
  MLPNet net = init_weights(spec, 9);
  rng::SplitMix64 gen(9);
  const auto x = gradcheck::random_vec(gen, 3);
  ForwardCache cache;
  forward(net, x, cache);
  Gradients grads = Gradients::zeros_like(net);
  std::vector<double> zero_g{0.0, 0.0};
  backward(net, cache, zero_g, grads);
  for (const auto& w : grads.d_weights)
    for (double v : w) REQUIRE(v == 0.0);
  for (const auto& b : grads.d_biases)
    for (double v : b) REQUIRE(v == 0.0);

  // f(x) = w*x, df/dw = x
  MLPSpec ss;
  ss.layer_sizes = {1, 1};
  MLPNet lin = init_weights(ss, 1);
  lin.weights[0][0] = 3.0;
  lin.biases[0][0] = 0.0;
  std::vector<double> x0{1.75};
  ForwardCache c2;
  forward(lin, x0, c2);
  Gradients g2 = Gradients::zeros_like(lin);
  std::vector<double> one{1.0};
  const auto d_input = backward(lin, c2, one, g2);
  REQUIRE(g2.d_weights[0][0] == Approx(1.75).margin(1e-15));
  REQUIRE(g2.d_biases[0][0] == Approx(1.0).margin(1e-15));
  REQUIRE(d_input[0] == Approx(3.0).margin(1e-15));
}

TEST_CASE("adam: no-op on zero gradient, first-step size, scalar convergence", "[neural]") {
  MLPSpec spec;
  spec.layer_sizes = {2, 3, 1};
  MLPNet net = init_weights(spec, 21);
  const MLPNet before = net;
  AdamState opt = AdamState::for_net(net, 1e-3);
  Gradients zero = Gradients::zeros_like(net);
  for (int s = 0; s < 10; ++s) adam_step(net, zero, opt);
  REQUIRE(net.weights == before.weights);
  REQUIRE(net.biases == before.biases);

  // constant gradient, first step: |delta| ~ lr (bias correction makes
  // m_hat/sqrt(v_hat) = sign(g) exactly when moments start at zero)
  MLPNet net2 = before;
  AdamState opt2 = AdamState::for_net(net2, 1e-3);
  Gradients g = Gradients::zeros_like(net2);
  for (auto& w : g.d_weights)
    for (double& v : w) v = 0.37;
  adam_step(net2, g, opt2);
  for (std::size_t l = 0; l < net2.weights.size(); ++l)
    for (std::size_t i = 0; i < net2.weights[l].size(); ++i)
      REQUIRE(before.weights[l][i] - net2.weights[l][i] == Approx(1e-3).epsilon(1e-4));

  // norm bound: one step moves each parameter by at most ~lr
  for (std::size_t l = 0; l < net2.weights.size(); ++l)
    for (std::size_t i = 0; i < net2.weights[l].size(); ++i)
      REQUIRE(std::abs(net2.weights[l][i] - before.weights[l][i]) <= 1e-3 * (1.0 + 1e-6));

  // minimize (w - 5)^2 from w = 0
  MLPSpec ss;
  ss.layer_sizes = {1, 1};
  MLPNet scalar = init_weights(ss, 1);
  scalar.weights[0][0] = 0.0;
  scalar.biases[0][0] = 0.0;
  AdamState sopt = AdamState::for_net(scalar, 1e-2);
  Gradients sg = Gradients::zeros_like(scalar);
  for (int step = 0; step < 10000; ++step) {
    sg.zero();
    sg.d_weights[0][0] = 2.0 * (scalar.weights[0][0] - 5.0);
    adam_step(scalar, sg, sopt);
  }
  REQUIRE(scalar.weights[0][0] == Approx(5.0).margin(1e-3));
}

TEST_CASE("soft update: endpoints, geometric decay, fixed point, errors", "[neural]") {
  MLPSpec spec;
  spec.layer_sizes = {3, 6, 2};
  const MLPNet online = init_weights(spec, 31);
  MLPNet target = init_weights(spec, 32);

  MLPNet t0 = target;
  soft_update(t0, online, 0.0);
  REQUIRE(t0.weights == target.weights);

  MLPNet t1 = target;
  soft_update(t1, online, 1.0);
  REQUIRE(t1.weights == online.weights);
  REQUIRE(t1.biases == online.biases);

  // (1 - tau)^k decay of the distance to a frozen online net
  MLPNet tk = target;
  const double tau = 0.01;
  const int k = 200;
  for (int s = 0; s < k; ++s) soft_update(tk, online, tau);
  const double factor = std::pow(1.0 - tau, k);
  for (std::size_t l = 0; l < tk.weights.size(); ++l)
    for (std::size_t i = 0; i < tk.weights[l].size(); ++i) {
      const double expect = online.weights[l][i] +
                            factor * (target.weights[l][i] - online.weights[l][i]);
      REQUIRE(tk.weights[l][i] == Approx(expect).epsilon(1e-9));
    }

  MLPNet fixed = online;
  soft_update(fixed, online, 0.37);
  REQUIRE(fixed.weights == online.weights);

  MLPSpec other;
  other.layer_sizes = {3, 5, 2};
  MLPNet mismatched = init_weights(other, 1);
  REQUIRE_THROWS_AS(soft_update(mismatched, online, 0.5), std::invalid_argument);
  MLPNet t2 = target;
  REQUIRE_THROWS_AS(soft_update(t2, online, -0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(soft_update(t2, online, 1.1), std::invalid_argument);
}

TEST_CASE("initialization: deterministic, fan-in bounded, zero biases", "[neural]") {
  MLPSpec spec;
  spec.layer_sizes = {7, 16, 4};
  const MLPNet a = init_weights(spec, 5);
  const MLPNet b = init_weights(spec, 5);
  REQUIRE(a.weights == b.weights);
  const MLPNet c = init_weights(spec, 6);
  REQUIRE(a.weights != c.weights);

  for (int l = 0; l < spec.num_weight_layers(); ++l) {
    const double bound = std::sqrt(6.0 / spec.layer_sizes[l]);
    for (double w : a.weights[l]) {
      REQUIRE(w <= bound);
      REQUIRE(w >= -bound);
    }
    for (double bias : a.biases[l]) REQUIRE(bias == 0.0);
  }
  REQUIRE(a.num_params() == 7 * 16 + 16 + 16 * 4 + 4);
}

TEST_CASE("softmax and argmax", "[neural]") {
  std::vector<double> logits{1.0, 2.0, 3.0};
  const auto p = softmax(logits);
  double sum = 0.0;
  for (double v : p) sum += v;
  REQUIRE(sum == Approx(1.0).margin(1e-12));
  REQUIRE(p[2] > p[1]);
  REQUIRE(p[1] > p[0]);

  // stability under huge logits
  std::vector<double> huge{1000.0, 1001.0};
  const auto ph = softmax(huge);
  REQUIRE(std::isfinite(ph[0]));
  REQUIRE(ph[0] + ph[1] == Approx(1.0).margin(1e-12));

  // temperature sharpens toward one-hot
  const auto sharp = softmax(logits, 0.1);
  REQUIRE(sharp[2] > p[2]);

  std::vector<double> ties{2.0, 5.0, 5.0, 1.0};
  REQUIRE(argmax(ties) == 1);  // first maximum wins
  std::vector<double> empty;
  REQUIRE_THROWS_AS(argmax(empty), std::invalid_argument);
  REQUIRE_THROWS_AS(softmax(empty), std::invalid_argument);
  REQUIRE_THROWS_AS(softmax(logits, 0.0), std::invalid_argument);
}

TEST_CASE("weight files round-trip bit-exactly and reject junk", "[neural]") {
  MLPSpec spec;
  spec.layer_sizes = {4, 9, 3};
  const MLPNet net = init_weights(spec, 47);

  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  save_net(net, buf);
  const MLPNet loaded = load_net(buf);
  REQUIRE(loaded.spec.layer_sizes == net.spec.layer_sizes);
  REQUIRE(loaded.weights == net.weights);  // bitwise via exact double compare
  REQUIRE(loaded.biases == net.biases);

  std::stringstream junk(std::ios::in | std::ios::out | std::ios::binary);
  junk << "NOPE";
  REQUIRE_THROWS_AS(load_net(junk), std::runtime_error);

  // truncated payload
  std::stringstream trunc(std::ios::in | std::ios::out | std::ios::binary);
  save_net(net, trunc);
  std::string bytes = trunc.str();
  bytes.resize(bytes.size() / 2);
  std::stringstream half(bytes, std::ios::in | std::ios::binary);
  REQUIRE_THROWS_AS(load_net(half), std::runtime_error);

  REQUIRE_THROWS_AS(load_net(std::string("/nonexistent/dir/w.bin")), std::runtime_error);
}
