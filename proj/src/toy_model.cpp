// Copyright 2026 The NSC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include "nsc/toy_model.hpp"

#include <string>

#include <algorithm>
#include <cmath>

namespace nsc::sim {

namespace {

Mat glorot_init(std::size_t fan_in, std::size_t fan_out, RngSeed seed) {
  // Glorot-scaled Gaussian.
  Mat w = gaussian(fan_in, fan_out, seed);
  w *= std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
  return w;
}

Mat add_bias(Mat z, const Mat& b) {
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b(0, j);
  return z;
}

Mat tanh_of(Mat z) {
  for (double& v : z.data()) v = std::tanh(v);
  return z;
}

Mat column_sums(const Mat& g) {
  Mat out(1, g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out(0, j) += g(i, j);
  return out;
}

// grad * (1 - act^2), elementwise.
Mat through_tanh(Mat grad, const Mat& act) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double t = act.data()[i];
    grad.data()[i] *= 1.0 - t * t;
  }
  return grad;
}

Mat logits_of(const ServerParams& p, const Mat& a, Mat* hidden_out) {
  Mat h = tanh_of(add_bias(matmul(a, p.w2), p.b2));
  Mat logits = add_bias(matmul(h, p.w3), p.b3);
  if (hidden_out) *hidden_out = std::move(h);
  return logits;
}

// Row-wise softmax; returns mean cross-entropy and leaves probabilities in z.
double softmax_xent(Mat& z, std::span<const int> labels) {
  double loss = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto row = z.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
    loss -= std::log(std::max(row[static_cast<std::size_t>(labels[i])], 1e-300));
  }
  return loss / static_cast<double>(z.rows());
}

}  // namespace

ClientParams init_client(const ModelShape& shape, RngSeed seed) {
  return {glorot_init(shape.d_in, shape.hidden, derive_seed(seed, 1)), Mat(1, shape.hidden)};
}

ServerParams init_server(const ModelShape& shape, RngSeed seed) {
  return {glorot_init(shape.hidden, shape.hidden2, derive_seed(seed, 2)), Mat(1, shape.hidden2),
          glorot_init(shape.hidden2, shape.classes, derive_seed(seed, 3)), Mat(1, shape.classes)};
}

Mat client_forward(const ClientParams& p, const Mat& x) {
  return tanh_of(add_bias(matmul(x, p.w1), p.b1));
}

ServerPass server_forward_backward(const ServerParams& p, const Mat& a, std::span<const int> labels) {
  if (labels.size() != a.rows()) throw DimensionError("server pass: label count != batch rows");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= p.w3.cols())
      throw Error("server pass: label " + std::to_string(y) + " outside [0, " + std::to_string(p.w3.cols()) + ")");
  Mat h;
  Mat probs = logits_of(p, a, &h);
  ServerPass out;
  out.loss = softmax_xent(probs, labels);

  // dL/dlogits = (softmax - onehot) / batch
  Mat g = std::move(probs);
  const double inv_batch = 1.0 / static_cast<double>(a.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, static_cast<std::size_t>(labels[i])) -= 1.0;
  g *= inv_batch;

  out.grads.w3 = matmul_tn(h, g);
  out.grads.b3 = column_sums(g);
  const Mat gh = through_tanh(matmul_nt(g, p.w3), h);
  out.grads.w2 = matmul_tn(a, gh);
  out.grads.b2 = column_sums(gh);
  out.grad_input = matmul_nt(gh, p.w2);
  return out;
}

ClientGrads client_backward(const ClientParams& p, const Mat& x, const Mat& a, const Mat& grad_a) {
  (void)p;
  const Mat gz = through_tanh(grad_a, a);
  return {matmul_tn(x, gz), column_sums(gz)};
}

void sgd_step(ClientParams& p, const ClientGrads& g, double lr) {
  p.w1 -= lr * g.w1;
  p.b1 -= lr * g.b1;
}

void sgd_step(ServerParams& p, const ServerGrads& g, double lr) {
  p.w2 -= lr * g.w2;
  p.b2 -= lr * g.b2;
  p.w3 -= lr * g.w3;
  p.b3 -= lr * g.b3;
}

FullPass full_forward_backward(const ClientParams& c, const ServerParams& s, const Mat& x,
                               std::span<const int> labels) {
  const Mat a = client_forward(c, x);
  ServerPass sp = server_forward_backward(s, a, labels);
  return {sp.loss, client_backward(c, x, a, sp.grad_input), std::move(sp.grads)};
}

double full_loss(const ClientParams& c, const ServerParams& s, const Mat& x, std::span<const int> labels) {
  Mat z = logits_of(s, client_forward(c, x), nullptr);
  return softmax_xent(z, labels);
}

double accuracy(const ClientParams& c, const ServerParams& s, const Mat& x, std::span<const int> labels) {
  const Mat z = logits_of(s, client_forward(c, x), nullptr);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const auto row = z.row(i);
    const auto best = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    hits += best == labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(z.rows());
}

}  // namespace nsc::sim
