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

#ifndef NSC_TOY_MODEL_HPP
#define NSC_TOY_MODEL_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "nsc/tensor.hpp"

namespace nsc::sim {

// Client front: a = tanh(x W1 + b1).
struct ClientParams {
  Mat w1;  // d_in x hidden
  Mat b1;  // 1 x hidden
};

// Server back: logits = tanh(a W2 + b2) W3 + b3, softmax cross-entropy.
struct ServerParams {
  Mat w2;  // hidden x hidden2
  Mat b2;  // 1 x hidden2
  Mat w3;  // hidden2 x classes
  Mat b3;  // 1 x classes
};

struct ModelShape {
  std::size_t d_in = 32;
  std::size_t hidden = 32;
  std::size_t hidden2 = 32;
  std::size_t classes = 10;
};

ClientParams init_client(const ModelShape& shape, RngSeed seed);
ServerParams init_server(const ModelShape& shape, RngSeed seed);

/// Cut-layer activations, batch x hidden.
Mat client_forward(const ClientParams& p, const Mat& x);

struct ServerGrads {
  Mat w2, b2, w3, b3;
};

struct ServerPass {
  double loss = 0.0;   // mean cross-entropy over the batch
  Mat grad_input;      // dL/da, batch x hidden
  ServerGrads grads;
};

ServerPass server_forward_backward(const ServerParams& p, const Mat& a, std::span<const int> labels);

struct ClientGrads {
  Mat w1, b1;
};

/// Backprop of an upstream gradient dL/da through the client front. `a` is the
/// activation client_forward produced for `x`.
ClientGrads client_backward(const ClientParams& p, const Mat& x, const Mat& a, const Mat& grad_a);

void sgd_step(ClientParams& p, const ClientGrads& g, double lr);
void sgd_step(ServerParams& p, const ServerGrads& g, double lr);

/// Unsplit forward + backward through both halves.
struct FullPass {
  double loss = 0.0;
  ClientGrads client;
  ServerGrads server;
};
FullPass full_forward_backward(const ClientParams& c, const ServerParams& s, const Mat& x,
                               std::span<const int> labels);

double full_loss(const ClientParams& c, const ServerParams& s, const Mat& x, std::span<const int> labels);
double accuracy(const ClientParams& c, const ServerParams& s, const Mat& x, std::span<const int> labels);

}  // namespace nsc::sim

#endif  // NSC_TOY_MODEL_HPP
