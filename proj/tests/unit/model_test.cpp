/*
 * Copyright 2026 The iota-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "iota/io/csv.hpp"
#include "iota/kernel/rng.hpp"
#include "iota/model/data.hpp"
#include "iota/model/mlp.hpp"
#include "iota/model/payload.hpp"
#include "iota/model/reference.hpp"

namespace iota::model {
namespace {

LayerWeights RandomLayer(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
  kernel::RngStream rng(seed, "test/layer");
  LayerWeights w = LayerWeights::Zeros(0, d_in, d_out);
  for (double& v : w.matrix) v = rng.Normal(0.0, 0.7);
  for (double& v : w.bias) v = rng.Normal(0.0, 0.3);
  return w;
}

Vector RandomVector(std::size_t n, kernel::RngStream& rng) {
  Vector v(n);
  for (double& x : v) x = rng.Normal();
  return v;
}

double Dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Scalar objective u . f(x; w) for finite differences.
double Objective(const LayerWeights& w, const Vector& x, const Vector& u, bool is_last) {
  return Dot(u, LayerForward(w, x, is_last));
}

bool RelClose(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

TEST(InitModel, DeterministicInSeed) {
  const std::vector<std::size_t> dims{4, 8, 2};
  EXPECT_EQ(InitModel(3, dims), InitModel(3, dims));
  EXPECT_NE(InitModel(3, dims), InitModel(4, dims));
}

TEST(InitModel, Shapes) {
  const std::vector<std::size_t> dims{4, 8, 2};
  const Model m = InitModel(1, dims);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].d_out, 8u);
  EXPECT_EQ(m[0].d_in, 4u);
  EXPECT_EQ(m[0].matrix.size(), 32u);
  EXPECT_EQ(m[1].d_out, 2u);
  EXPECT_EQ(m[1].d_in, 8u);
  for (const auto& w : m) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.d_in));
    for (double v : w.matrix) EXPECT_LE(std::abs(v), bound);
  }
}

TEST(InitModel, RejectsEmptyLayers) {
  const std::vector<std::size_t> dims{4, 0, 2};
  try {
    InitModel(1, dims);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidConfig);
  }
}

TEST(LayerForward, ZeroLayerGivesZero) {
  const LayerWeights w = LayerWeights::Zeros(0, 3, 2);
  EXPECT_EQ(LayerForward(w, Vector{1, -2, 3}, false), (Vector{0, 0}));
}

TEST(LayerForward, ScalarHiddenAndOutput) {
  LayerWeights w = LayerWeights::Zeros(0, 1, 1);
  w.matrix = {0.5};
  EXPECT_DOUBLE_EQ(LayerForward(w, Vector{1.0}, false)[0], std::tanh(0.5));
  EXPECT_DOUBLE_EQ(LayerForward(w, Vector{1.0}, true)[0], 0.5);
}

TEST(LayerForward, ShapeMismatch) {
  const LayerWeights w = LayerWeights::Zeros(0, 3, 2);
  try {
    LayerForward(w, Vector{1, 2}, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeError);
  }
}

TEST(LayerBackward, ZeroUpstreamGivesZeroGrads) {
  const LayerWeights w = RandomLayer(3, 2, 1);
  const auto r = LayerBackward(w, Vector{0.1, 0.2, 0.3}, Vector{0, 0}, false);
  for (double g : r.input_grad) EXPECT_EQ(g, 0.0);
  for (double g : r.weight_grad.matrix) EXPECT_EQ(g, 0.0);
  for (double g : r.weight_grad.bias) EXPECT_EQ(g, 0.0);
}

TEST(LayerBackward, ScalarChainRule) {
  LayerWeights w = LayerWeights::Zeros(0, 1, 1);
  w.matrix = {0.7};
  w.bias = {-0.2};
  const double x = 0.9, up = 1.3;
  const double t = std::tanh(0.7 * x - 0.2);
  const auto r = LayerBackward(w, Vector{x}, Vector{up}, false);
  EXPECT_NEAR(r.input_grad[0], up * 0.7 * (1 - t * t), 1e-15);
  EXPECT_NEAR(r.weight_grad.matrix[0], up * x * (1 - t * t), 1e-15);
  EXPECT_NEAR(r.weight_grad.bias[0], up * (1 - t * t), 1e-15);
}

class FiniteDifference : public ::testing::TestWithParam<bool> {};

TEST_P(FiniteDifference, GradientsMatchCentralDifferences) {
  const bool is_last = GetParam();
  kernel::RngStream rng(17, "fd");
  for (int trial = 0; trial < 20; ++trial) {
    LayerWeights w = RandomLayer(5, 4, 100 + trial);
    const Vector x = RandomVector(5, rng), u = RandomVector(4, rng);
    const auto r = LayerBackward(w, x, u, is_last);
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (Objective(w, xp, u, is_last) - Objective(w, xm, u, is_last)) / (2 * h);
      EXPECT_TRUE(RelClose(r.input_grad[i], fd, 1e-5)) << r.input_grad[i] << " vs " << fd;
    }
    for (std::size_t k = 0; k < w.matrix.size(); ++k) {
      LayerWeights wp = w, wm = w;
      wp.matrix[k] += h;
      wm.matrix[k] -= h;
      const double fd = (Objective(wp, x, u, is_last) - Objective(wm, x, u, is_last)) / (2 * h);
      EXPECT_TRUE(RelClose(r.weight_grad.matrix[k], fd, 1e-5));
    }
    for (std::size_t k = 0; k < w.bias.size(); ++k) {
      LayerWeights wp = w, wm = w;
      wp.bias[k] += h;
      wm.bias[k] -= h;
      const double fd = (Objective(wp, x, u, is_last) - Objective(wm, x, u, is_last)) / (2 * h);
      EXPECT_TRUE(RelClose(r.weight_grad.bias[k], fd, 1e-5));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(HiddenAndOutput, FiniteDifference, ::testing::Values(false, true));

TEST(ComputeLoss, HandValues) {
  const auto same = ComputeLoss(Vector{1, 2}, Vector{1, 2});
  EXPECT_EQ(same.loss, 0.0);
  EXPECT_EQ(same.grad, (Vector{0, 0}));
  const auto r = ComputeLoss(Vector{1, 0}, Vector{0, 0});
  EXPECT_DOUBLE_EQ(r.loss, 0.5);
  EXPECT_DOUBLE_EQ(r.grad[0], 1.0);
  EXPECT_DOUBLE_EQ(r.grad[1], 0.0);
}

TEST(ComputeLoss, GradientMatchesFiniteDifference) {
  kernel::RngStream rng(2, "loss");
  const Vector p = RandomVector(6, rng), t = RandomVector(6, rng);
  const auto r = ComputeLoss(p, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    Vector pp = p, pm = p;
    pp[i] += 1e-6;
    pm[i] -= 1e-6;
    const double fd = (ComputeLoss(pp, t).loss - ComputeLoss(pm, t).loss) / 2e-6;
    EXPECT_NEAR(r.grad[i], fd, 1e-8);
  }
}

TEST(ApplyUpdate, HandValues) {
  LayerWeights w = LayerWeights::Zeros(0, 1, 1);
  w.matrix = {1.0};
  LayerWeights g = LayerWeights::Zeros(0, 1, 1);
  g.matrix = {2.0};
  EXPECT_EQ(ApplyUpdate(w, g, 0.0), w);
  EXPECT_DOUBLE_EQ(ApplyUpdate(w, g, 0.1).matrix[0], 0.8);
}

TEST(Flatten, RoundTrip) {
  LayerWeights w = RandomLayer(3, 5, 9);
  w.optimizer_state = {1.5, -2.5};
  const Vector flat = Flatten(w);
  EXPECT_EQ(flat.size(), w.ParameterCount());
  EXPECT_EQ(flat.front(), w.matrix.front());
  EXPECT_EQ(flat.back(), -2.5);
  EXPECT_EQ(Unflatten(w, flat), w);
}

TEST(Payload, HeaderAndBody) {
  LayerWeights w = RandomLayer(3, 2, 4);
  w.layer_index = 2;
  const auto bytes = EncodeWeightPayload(w);
  ASSERT_EQ(bytes.size(), kPayloadHeaderBytes + 4 * w.ParameterCount());
  EXPECT_EQ(bytes[0], 2);  // layer index, u32 LE
  EXPECT_EQ(bytes[4], 3);  // d_in
  EXPECT_EQ(bytes[8], 2);  // d_out
  EXPECT_EQ(bytes[12], 0);  // optimizer length
  const LayerWeights back = DecodeWeightPayload(bytes);
  EXPECT_TRUE(back.SameShape(w));
  EXPECT_EQ(back.layer_index, 2u);
  for (std::size_t k = 0; k < w.matrix.size(); ++k) {
    EXPECT_EQ(back.matrix[k], static_cast<double>(static_cast<float>(w.matrix[k])));
  }
}

TEST(Payload, TruncatedIsShapeError) {
  auto bytes = EncodeWeightPayload(RandomLayer(3, 2, 4));
  bytes.pop_back();
  EXPECT_THROW(DecodeWeightPayload(bytes), Error);
}

TEST(DataStream, RandomAccessIsDeterministic) {
  DataStream a(5, 3, 2, 4, 0.01), b(5, 3, 2, 4, 0.01);
  const Batch late = a.Get(17);
  (void)a.Get(3);
  EXPECT_EQ(b.Get(17).inputs, late.inputs);
  EXPECT_EQ(a.Get(17).targets, late.targets);
  EXPECT_EQ(late.inputs.size(), 4u);
  EXPECT_EQ(late.inputs[0].size(), 3u);
  EXPECT_EQ(late.targets[0].size(), 2u);
  EXPECT_NE(a.Get(1).inputs, a.Get(2).inputs);
}

TEST(ReferenceTrain, HalvesTheLoss) {
  const auto losses = ReferenceTrain(TrainConfig{}, 200);
  ASSERT_EQ(losses.size(), 200u);
  EXPECT_LT(losses.back(), 0.5 * losses.front());
}

TEST(ReferenceTrain, Deterministic) {
  EXPECT_EQ(ReferenceTrain(TrainConfig{}, 50), ReferenceTrain(TrainConfig{}, 50));
}

TEST(ReferenceTrain, MatchesGoldenCurve) {
  const auto table = io::ReadCsv(std::string(IOTA_SOURCE_DIR) + "/tests/golden/reference_loss.csv");
  const auto losses = ReferenceTrain(TrainConfig{}, table.rows.size());
  ASSERT_EQ(table.rows.size(), 200u);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    EXPECT_NEAR(losses[i], io::ParseDouble(table.rows[i][1]), 1e-12) << "step " << i;
  }
}

// Independent oracle: whole-network gradient by finite differences on the
// batch loss must match what the chained per-layer backward computes.
TEST(ReferenceTrain, ChainedBackwardMatchesFiniteDifferenceOfNetwork) {
  const std::vector<std::size_t> dims{3, 5, 4, 2};
  Model m = InitModel(7, dims);
  DataStream stream(7, 3, 2, 4, 0.0);
  const Batch batch = stream.Get(0);
  auto net_loss = [&](const Model& model) {
    Rows act = batch.inputs;
    for (std::size_t l = 0; l < model.size(); ++l) act = ForwardBatch(model[l], act, l + 1 == model.size());
    return BatchLoss(act, batch.targets).loss;
  };
  std::vector<Rows> inputs;
  Rows act = batch.inputs;
  for (std::size_t l = 0; l < m.size(); ++l) {
    inputs.push_back(act);
    act = ForwardBatch(m[l], act, l + 1 == m.size());
  }
  Rows up = BatchLoss(act, batch.targets).grads;
  std::vector<LayerGrad> grads(m.size());
  for (std::size_t l = m.size(); l-- > 0;) {
    auto bw = BackwardBatch(m[l], inputs[l], up, l + 1 == m.size());
    grads[l] = bw.weight_grad;
    up = bw.input_grads;
  }
  for (std::size_t l = 0; l < m.size(); ++l) {
    for (std::size_t k = 0; k < m[l].matrix.size(); k += 3) {
      Model mp = m, mm = m;
      mp[l].matrix[k] += 1e-6;
      mm[l].matrix[k] -= 1e-6;
      const double fd = (net_loss(mp) - net_loss(mm)) / 2e-6;
      EXPECT_NEAR(grads[l].matrix[k], fd, 1e-8) << "layer " << l << " k " << k;
    }
  }
}

}  // namespace
}  // namespace iota::model
