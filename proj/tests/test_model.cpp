// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "hetmol/model/hmgnn.hpp"
#include "hetmol/synth/qm9_like.hpp"
#include "test_support.hpp"

using namespace hetmol;
using namespace hetmol::model;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// ---------------------------------------------------------------------------
// Scalar restatement of the network with nested vectors and explicit loops.

using Mat = std::vector<std::vector<double>>;

double phi(double x) { return std::log(0.5 * std::exp(x) + 0.5); }

Mat param(const ParameterStore<double>& s, const std::string& name) {
  const auto& t = s.at(name).value;
  Mat m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  return m;
}

Mat table(const std::vector<double>& flat, std::size_t cols) {
  Mat m(cols == 0 ? 0 : flat.size() / cols, std::vector<double>(cols));
  for (std::size_t i = 0; i < flat.size(); ++i) m[i / cols][i % cols] = flat[i];
  return m;
}

Mat zeros(std::size_t r, std::size_t c) { return Mat(r, std::vector<double>(c, 0.0)); }

/// phi(x W + b) row by row.
Mat dense(const ParameterStore<double>& s, const std::string& prefix, const Mat& x) {
  const Mat w = param(s, prefix + "W"), b = param(s, prefix + "b");
  Mat out = zeros(x.size(), w[0].size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < w[0].size(); ++j) {
      double acc = b[0][j];
      for (std::size_t k = 0; k < w.size(); ++k) acc += x[i][k] * w[k][j];
      out[i][j] = phi(acc);
    }
  return out;
}

Mat hcat(const std::vector<Mat>& parts) {
  Mat out(parts[0].size());
  for (const auto& p : parts)
    for (std::size_t i = 0; i < out.size(); ++i) out[i].insert(out[i].end(), p[i].begin(), p[i].end());
  return out;
}

Mat input_oracle(const ParameterStore<double>& s, const std::string& prefix, const std::vector<int>& z,
                 const Mat* continuous) {
  const Mat emb = param(s, prefix + "embedding");
  Mat x;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto row = emb[static_cast<std::size_t>(z[i])];
    if (continuous) row.insert(row.end(), (*continuous)[i].begin(), (*continuous)[i].end());
    x.push_back(row);
  }
  return dense(s, prefix, x);
}

Mat same_order_oracle(const ParameterStore<double>& s, const std::string& prefix, const Mat& h,
                      const graph::EdgeList& edges, const Mat& e) {
  const Mat g = param(s, prefix + "G");
  const Mat msg = dense(s, prefix, h);
  Mat out = zeros(h.size(), g[0].size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto j = static_cast<std::size_t>(edges.src[k]);
    const auto i = static_cast<std::size_t>(edges.dst[k]);
    for (std::size_t f = 0; f < g[0].size(); ++f) {
      double filter = 0;
      for (std::size_t r = 0; r < g.size(); ++r) filter += g[r][f] * e[k][r];
      out[i][f] += filter * msg[j][f];
    }
  }
  return out;
}

Mat cross_oracle(const ParameterStore<double>& s, const std::string& prefix, const Mat& h_sender,
                 const std::vector<int>& src, const std::vector<int>& dst, std::size_t n) {
  const Mat msg = dense(s, prefix, h_sender);
  Mat out = zeros(n, msg.empty() ? 0 : msg[0].size());
  if (msg.empty()) return out;
  for (std::size_t k = 0; k < src.size(); ++k)
    for (std::size_t f = 0; f < msg[0].size(); ++f)
      out[static_cast<std::size_t>(dst[k])][f] += msg[static_cast<std::size_t>(src[k])][f];
  return out;
}

Mat update_oracle(const ParameterStore<double>& s, const std::string& prefix, Mat h, const std::vector<Mat>& msgs) {
  std::vector<Mat> parts{h};
  parts.insert(parts.end(), msgs.begin(), msgs.end());
  auto add_into = [](Mat& a, const Mat& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] += b[i][j];
  };
  add_into(h, dense(s, prefix + "update/", hcat(parts)));
  add_into(h, dense(s, prefix + "dense0/", h));
  add_into(h, dense(s, prefix + "dense1/", h));
  return h;
}

std::vector<double> output_oracle(const ParameterStore<double>& s, const std::string& prefix, const Mat& h,
                                  const std::vector<int>& z) {
  const Mat w = param(s, prefix + "w"), b = param(s, prefix + "b");
  const Mat scale = param(s, prefix + "scale"), shift = param(s, prefix + "shift");
  std::vector<double> out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    double raw = b[0][0];
    for (std::size_t k = 0; k < w.size(); ++k) raw += h[i][k] * w[k][0];
    const auto id = static_cast<std::size_t>(z[i]);
    out.push_back(scale[id][0] * raw + shift[id][0]);
  }
  return out;
}

struct OracleOut {
  std::vector<double> fused, y1, y2, a1, a2;
};

/// Whole-network forward in inference mode.
OracleOut forward_oracle(const Hmgnn<double>& model, const Batch& batch) {
  const auto& s = model.params();
  const auto& cfg = model.config();
  const auto& g = batch.graph;
  const auto& ft = batch.features;
  const std::size_t f = static_cast<std::size_t>(cfg.latent);
  const std::size_t n_mol = batch.num_molecules();
  const bool two = cfg.use_order_2;
  const bool cross = two && cfg.use_inter_order_edges;

  Mat h1 = input_oracle(s, "order1/input/", g.atom_composition, nullptr);
  const Mat e11 = table(ft.atom_atom, static_cast<std::size_t>(ft.k_distance));
  Mat h2, e22;
  if (two) {
    const Mat x2 = table(ft.pair, static_cast<std::size_t>(ft.k_length));
    h2 = input_oracle(s, "order2/input/", g.pair_composition, &x2);
    e22 = table(ft.pair_pair, static_cast<std::size_t>(ft.k_angle));
  }
  std::vector<int> ap_src = g.atom_pair.src, ap_dst = g.atom_pair.dst;
  for (int t = 0; t < cfg.depth; ++t) {
    const std::string l1 = "order1/layer" + std::to_string(t) + "/";
    const std::string l2 = "order2/layer" + std::to_string(t) + "/";
    const Mat m11 = same_order_oracle(s, l1 + "msg_same/", h1, g.atom_atom, e11);
    if (!two) {
      h1 = update_oracle(s, l1, h1, {m11});
      continue;
    }
    const Mat m22 = same_order_oracle(s, l2 + "msg_same/", h2, g.pair_pair, e22);
    const Mat m21 = cross ? cross_oracle(s, l1 + "msg_from2/", h2, ap_dst, ap_src, g.num_atoms()) : zeros(g.num_atoms(), f);
    const Mat m12 = cross ? cross_oracle(s, l2 + "msg_from1/", h1, ap_src, ap_dst, g.num_pairs()) : zeros(g.num_pairs(), f);
    const Mat next1 = update_oracle(s, l1, h1, {m11, m21});
    h2 = update_oracle(s, l2, h2, {m12, m22});
    h1 = next1;
  }

  OracleOut o;
  o.y1.assign(n_mol, 0.0);
  const auto node1 = output_oracle(s, "order1/output/", h1, g.atom_composition);
  for (std::size_t i = 0; i < node1.size(); ++i) o.y1[static_cast<std::size_t>(g.atom_molecule[i])] += node1[i];
  if (!two) {
    o.fused = o.y1;
    o.a1.assign(n_mol, 1.0);
    return o;
  }
  o.y2.assign(n_mol, 0.0);
  const auto node2 = output_oracle(s, "order2/output/", h2, g.pair_composition);
  for (std::size_t i = 0; i < node2.size(); ++i) o.y2[static_cast<std::size_t>(g.pair_molecule[i])] += node2[i];

  Mat v = zeros(n_mol, 2 * f);
  for (std::size_t i = 0; i < h1.size(); ++i)
    for (std::size_t c = 0; c < f; ++c) v[static_cast<std::size_t>(g.atom_molecule[i])][c] += h1[i][c];
  for (std::size_t i = 0; i < h2.size(); ++i)
    for (std::size_t c = 0; c < f; ++c) v[static_cast<std::size_t>(g.pair_molecule[i])][f + c] += h2[i][c];
  const Mat gamma = param(s, "fusion/bn/gamma"), beta = param(s, "fusion/bn/beta");
  const auto& st = model.norm_stats();
  for (auto& row : v)
    for (std::size_t c = 0; c < 2 * f; ++c)
      row[c] = gamma[0][c] * (row[c] - st.mean[c]) / std::sqrt(st.var[c] + cfg.bn_eps) + beta[0][c];
  const Mat z = dense(s, "fusion/dense/", v);
  const Mat a = param(s, "fusion/attention");
  for (std::size_t m = 0; m < n_mol; ++m) {
    double logit[2];
    for (int p = 0; p < 2; ++p) {
      double acc = 0;
      for (std::size_t c = 0; c < f; ++c) acc += z[m][c] * a[c][static_cast<std::size_t>(p)];
      logit[p] = acc < 0 ? cfg.leaky_slope * acc : acc;
    }
    const double mx = std::max(logit[0], logit[1]);
    const double e0 = std::exp(logit[0] - mx), e1 = std::exp(logit[1] - mx);
    o.a1.push_back(e0 / (e0 + e1));
    o.a2.push_back(e1 / (e0 + e1));
    o.fused.push_back(o.a1.back() * o.y1[m] + o.a2.back() * o.y2[m]);
  }
  return o;
}

// ---------------------------------------------------------------------------

/// Fills running statistics with a training-mode pass over `batch` so that
/// inference mode is available.
void warm_norm(Hmgnn<double>& model, const Batch& batch) {
  nn::Tape<double> tape(false);
  model.forward(tape, batch, Mode::kTrain);
}

struct Fixture {
  testing::GraphSet set{3.0, 8};
  std::vector<ingest::Molecule> mols;
  explicit Fixture(std::size_t n, std::uint64_t seed = 1) : mols(synth::generate_molecules(n, seed)) {
    for (const auto& m : mols) set.add(m);
  }
  std::vector<std::size_t> all() const {
    std::vector<std::size_t> idx(mols.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }
  Hmgnn<double> model(int latent = 8, int depth = 2, bool order2 = true, bool cross = true, std::uint64_t seed = 3) {
    auto cfg = testing::tiny_model_config(set.vocabulary, latent, depth, 8);
    cfg.use_order_2 = order2;
    cfg.use_inter_order_edges = cross;
    return Hmgnn<double>(cfg, seed);
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("input module examples") {
  Fixture fx(3);
  auto model = fx.model();
  auto& s = model.params();
  nn::Tape<double> tape;
  const auto& g = fx.set.graphs[0];
  // Same composition, same row.
  const auto h = input_module(tape, s, "order1/input/", g.atom_composition, Var<double>{});
  for (std::size_t i = 0; i < g.num_atoms(); ++i)
    for (std::size_t j = 0; j < g.num_atoms(); ++j)
      if (g.atom_composition[i] == g.atom_composition[j])
        for (std::size_t c = 0; c < 8; ++c) CHECK(h.value()(i, c) == h.value()(j, c));
  // Zero weights and bias give phi(0) = 0 everywhere.
  s.at("order1/input/W").value.fill(0);
  const auto h0 = input_module(tape, s, "order1/input/", g.atom_composition, Var<double>{});
  for (double v : h0.value().values()) CHECK(v == 0.0);
  // Unknown composition id.
  const std::vector<int> bad{99};
  CHECK_THROWS_AS(input_module(tape, s, "order1/input/", bad, Var<double>{}), std::out_of_range);
}

TEST_CASE("module outputs match scalar oracles") {
  Fixture fx(4, 5);
  auto model = fx.model();
  Rng rng(2);
  testing::randomize(model.params(), rng);
  auto& s = model.params();
  const auto b = fx.set.batch(fx.all());
  const auto& g = b.graph;
  nn::Tape<double> tape;
  auto tensor = [](const Mat& m) {
    nn::Tensor<double> t(m.size(), m.empty() ? 0 : m[0].size());
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m[i].size(); ++j) t(i, j) = m[i][j];
    return t;
  };
  auto same = [](const nn::Tensor<double>& t, const Mat& m, double tol) {
    REQUIRE(t.rows() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m[i].size(); ++j) CHECK_THAT(t(i, j), WithinAbs(m[i][j], tol));
  };

  const Mat x2 = table(b.features.pair, 8);
  const auto h1 = input_module(tape, s, "order1/input/", g.atom_composition, Var<double>{});
  const auto h2 = input_module(tape, s, "order2/input/", g.pair_composition, tape.constant(tensor(x2)));
  same(h1.value(), input_oracle(s, "order1/input/", g.atom_composition, nullptr), 1e-12);
  same(h2.value(), input_oracle(s, "order2/input/", g.pair_composition, &x2), 1e-12);

  Mat h1m = input_oracle(s, "order1/input/", g.atom_composition, nullptr);
  Mat h2m = input_oracle(s, "order2/input/", g.pair_composition, &x2);
  const Mat e22 = table(b.features.pair_pair, 8);
  const auto m22 = message_same_order(tape, s, "order2/layer0/msg_same/", h2, g.pair_pair.src, g.pair_pair.dst,
                                      tape.constant(tensor(e22)));
  same(m22.value(), same_order_oracle(s, "order2/layer0/msg_same/", h2m, g.pair_pair, e22), 1e-12);

  const auto m21 = message_cross_order(tape, s, "order1/layer0/msg_from2/", h2, g.atom_pair.dst, g.atom_pair.src,
                                       g.num_atoms());
  same(m21.value(), cross_oracle(s, "order1/layer0/msg_from2/", h2m, g.atom_pair.dst, g.atom_pair.src, g.num_atoms()),
       1e-12);

  const Var<double> msgs[] = {tape.constant(tensor(h1m)), m21};
  const auto up = node_update<double>(tape, s, "order1/layer0/", h1, msgs);
  same(up.value(),
       update_oracle(s, "order1/layer0/", h1m,
                     {h1m, cross_oracle(s, "order1/layer0/msg_from2/", h2m, g.atom_pair.dst, g.atom_pair.src, g.num_atoms())}),
       1e-12);

  const auto y = output_module(tape, s, "order2/output/", h2, g.pair_composition);
  const auto yo = output_oracle(s, "order2/output/", h2m, g.pair_composition);
  for (std::size_t i = 0; i < yo.size(); ++i) CHECK_THAT(y.value()[i], WithinAbs(yo[i], 1e-12));
}

TEST_CASE("message module examples") {
  ParameterStore<double> s;
  s.add("m/G", nn::Tensor<double>(2, 3, std::vector<double>{1, 1, 1, 0, 0, 0}), nn::OrderTag::kOrder1);
  s.add("m/W", nn::Tensor<double>(3, 3, std::vector<double>{0.5, -1, 2, 0, 1, 0, 1, 0, -0.5}), nn::OrderTag::kOrder1);
  s.add("m/b", nn::Tensor<double>(1, 3, std::vector<double>{0.1, 0.2, 0.3}), nn::OrderTag::kOrder1);
  nn::Tape<double> tape;
  const auto h = tape.constant(nn::Tensor<double>(2, 3, std::vector<double>{1, 2, 3, -1, 0.5, 0}));

  // No edges: zero messages.
  const std::vector<int> none;
  const auto m0 = message_same_order(tape, s, "m/", h, none, none, tape.constant(nn::Tensor<double>(0, 2)));
  for (double v : m0.value().values()) CHECK(v == 0.0);

  // One edge 1 -> 0 whose filter is all ones: m_0 = phi(W h_1 + b).
  const std::vector<int> src{1}, dst{0};
  const auto m1 = message_same_order(tape, s, "m/", h, src, dst, tape.constant(nn::Tensor<double>(1, 2, std::vector<double>{1, 7})));
  const double h1[] = {-1, 0.5, 0};
  const double w[3][3] = {{0.5, -1, 2}, {0, 1, 0}, {1, 0, -0.5}};
  const double b[] = {0.1, 0.2, 0.3};
  for (std::size_t j = 0; j < 3; ++j) {
    double acc = b[j];
    for (std::size_t k = 0; k < 3; ++k) acc += h1[k] * w[k][j];
    CHECK_THAT(m1.value()(0, j), WithinAbs(phi(acc), 1e-15));
    CHECK(m1.value()(1, j) == 0.0);
  }

  // Isolated receiver of a cross-order message gets zero.
  const auto mc = message_cross_order(tape, s, "m/", h, src, dst, 3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(mc.value()(2, j) == 0.0);
}

TEST_CASE("node update with zero weights is the identity") {
  Fixture fx(2);
  auto model = fx.model();
  Rng rng(1);
  testing::randomize(model.params(), rng);
  for (auto& [name, p] : model.params().entries())
    if (name.rfind("order1/layer0/", 0) == 0 && name.find("/msg") == std::string::npos) p.value.fill(0);
  nn::Tape<double> tape;
  const auto h = tape.constant(nn::Tensor<double>(3, 8, 0.7));
  const Var<double> msgs[] = {tape.constant(nn::Tensor<double>(3, 8, 5.0)), tape.constant(nn::Tensor<double>(3, 8, -2.0))};
  const auto out = node_update<double>(tape, model.params(), "order1/layer0/", h, msgs);
  CHECK(out.value() == h.value());
}

TEST_CASE("output module scaling examples") {
  Fixture fx(2);
  auto model = fx.model();
  Rng rng(4);
  testing::randomize(model.params(), rng);
  auto& s = model.params();
  const auto& g = fx.set.graphs[0];
  nn::Tape<double> tape;
  const auto h = tape.constant(nn::Tensor<double>(g.num_atoms(), 8, 0.3));
  s.at("order1/output/scale").value.fill(1);
  s.at("order1/output/shift").value.fill(0);
  const auto raw = nn::linear(h, tape.constant(s.at("order1/output/w").value), tape.constant(s.at("order1/output/b").value));
  const auto y = output_module(tape, s, "order1/output/", h, g.atom_composition);
  CHECK(y.value() == raw.value());

  s.at("order1/output/scale").value.fill(0);
  const auto y0 = output_module(tape, s, "order1/output/", h, g.atom_composition);
  for (std::size_t i = 0; i < g.num_atoms(); ++i)
    CHECK(y0.value()[i] == s.at("order1/output/shift").value[static_cast<std::size_t>(g.atom_composition[i])]);
}

TEST_CASE("full forward pass matches the scalar oracle") {
  Fixture fx(6, 9);
  for (auto [order2, cross] : {std::pair{true, true}, std::pair{true, false}, std::pair{false, true}}) {
    auto model = fx.model(8, 2, order2, cross);
    Rng rng(6);
    testing::randomize(model.params(), rng, 0.3);
    const auto b = fx.set.batch(fx.all());
    if (order2) warm_norm(model, b);
    const auto p = model.predict(b, order2 ? Mode::kInference : Mode::kInference);
    const auto o = forward_oracle(model, b);
    for (std::size_t m = 0; m < fx.mols.size(); ++m) {
      CHECK_THAT(p.fused[m], WithinAbs(o.fused[m], 1e-10));
      CHECK_THAT(p.order1[m], WithinAbs(o.y1[m], 1e-10));
      CHECK_THAT(p.alpha1[m], WithinAbs(o.a1[m], 1e-12));
      if (order2) {
        CHECK_THAT(p.order2[m], WithinAbs(o.y2[m], 1e-10));
        CHECK_THAT(p.alpha2[m], WithinAbs(o.a2[m], 1e-12));
      }
    }
  }
}

TEST_CASE("attention weights") {
  Fixture fx(5, 4);
  auto model = fx.model();
  const auto b = fx.set.batch(fx.all());
  warm_norm(model, b);

  SECTION("equal attention vectors give equal weights") {
    auto& a = model.params().at("fusion/attention").value;
    for (std::size_t r = 0; r < a.rows(); ++r) a(r, 1) = a(r, 0);
    const auto p = model.predict(b);
    for (std::size_t m = 0; m < 5; ++m) {
      CHECK(p.alpha1[m] == 0.5);
      CHECK(p.alpha2[m] == 0.5);
    }
  }
  SECTION("a saturated softmax selects the order-1 head") {
    auto& s = model.params();
    s.at("fusion/dense/W").value.fill(0);
    s.at("fusion/dense/b").value.fill(5);
    auto& a = s.at("fusion/attention").value;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      a(r, 0) = 1000;
      a(r, 1) = 0;
    }
    const auto p = model.predict(b);
    for (std::size_t m = 0; m < 5; ++m) {
      CHECK(p.alpha1[m] == 1.0);
      CHECK(p.alpha2[m] == 0.0);
      CHECK(p.fused[m] == p.order1[m]);
    }
  }
  SECTION("weights form a probability vector and mix the heads") {
    Rng rng(3);
    testing::randomize(model.params(), rng);
    const auto p = model.predict(b);
    for (std::size_t m = 0; m < 5; ++m) {
      CHECK(p.alpha1[m] > 0.0);
      CHECK(p.alpha1[m] < 1.0);
      CHECK_THAT(p.alpha1[m] + p.alpha2[m], WithinAbs(1.0, 1e-15));
      CHECK_THAT(p.fused[m], WithinAbs(p.alpha1[m] * p.order1[m] + p.alpha2[m] * p.order2[m], 1e-12));
    }
  }
}

TEST_CASE("single-order model has alpha 1 and no order-2 parameters") {
  Fixture fx(3);
  auto model = fx.model(8, 2, false, true);
  for (const auto& name : model.params().names()) {
    CHECK(name.rfind("order2/", 0) != 0);
    CHECK(name.rfind("fusion/", 0) != 0);
  }
  const auto p = model.predict(fx.set.batch(fx.all()), Mode::kTrain);
  CHECK(p.order2.empty());
  CHECK(p.alpha2.empty());
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(p.alpha1[m] == 1.0);
    CHECK(p.fused[m] == p.order1[m]);
  }
  // No batch norm, so inference mode needs no statistics.
  CHECK_NOTHROW(model.predict(fx.set.batch(fx.all()), Mode::kInference));
}

TEST_CASE("inference before any statistics is an error") {
  Fixture fx(3);
  auto model = fx.model();
  CHECK_THROWS_AS(model.predict(fx.set.batch(fx.all()), Mode::kInference), ModelError);
}

TEST_CASE("running statistics follow the momentum rule") {
  Fixture fx(6, 2);
  auto model = fx.model();
  const auto b1 = fx.set.batch({0, 1, 2});
  const auto b2 = fx.set.batch({3, 4, 5});
  auto moments = [&](const Batch& b) {
    nn::Tape<double> tape(false);
    auto copy = model;
    copy.norm_stats() = {};
    copy.forward(tape, b, Mode::kTrain);
    return copy.norm_stats();
  };
  const auto m1 = moments(b1), m2 = moments(b2);
  warm_norm(model, b1);
  CHECK(model.norm_stats().mean == m1.mean);
  CHECK(model.norm_stats().var == m1.var);
  warm_norm(model, b2);
  CHECK(model.norm_stats().updates == 2);
  for (std::size_t i = 0; i < m1.mean.size(); ++i) {
    CHECK_THAT(model.norm_stats().mean[i], WithinAbs(m1.mean[i] + 0.1 * (m2.mean[i] - m1.mean[i]), 1e-12));
    CHECK_THAT(model.norm_stats().var[i], WithinAbs(m1.var[i] + 0.1 * (m2.var[i] - m1.var[i]), 1e-12));
  }
  // Batch-statistics mode leaves them alone, as does a single-molecule batch.
  const auto before = model.norm_stats().mean;
  model.predict(b2, Mode::kBatchStats);
  model.predict(fx.set.single(0), Mode::kTrain);
  CHECK(model.norm_stats().mean == before);
  CHECK(model.norm_stats().updates == 2);
}

TEST_CASE("batched inference equals per-molecule inference") {
  Fixture fx(8, 12);
  auto model = fx.model();
  Rng rng(2);
  testing::randomize(model.params(), rng, 0.3);
  const auto b = fx.set.batch(fx.all());
  warm_norm(model, b);
  const auto all = model.predict(b);
  for (std::size_t m = 0; m < 8; ++m) {
    const auto one = model.predict(fx.set.single(m));
    CHECK(rel(one.fused[0], all.fused[m]) < 1e-6);
    CHECK(rel(one.order1[0], all.order1[m]) < 1e-6);
    CHECK(rel(one.order2[0], all.order2[m]) < 1e-6);
    CHECK(rel(one.alpha1[0], all.alpha1[m]) < 1e-6);
  }
  // Duplicates in one batch agree exactly.
  const auto dup = model.predict(fx.set.batch({3, 3, 5, 3}));
  CHECK(dup.fused[0] == dup.fused[1]);
  CHECK(dup.fused[0] == dup.fused[3]);
  CHECK(dup.alpha2[0] == dup.alpha2[3]);
}

TEST_CASE("predictions are invariant under rigid motions and atom relabeling") {
  const auto mols = synth::generate_molecules(10, 40);
  testing::GraphSet set(3.0, 8);
  for (const auto& m : mols) set.add(m);
  auto cfg = testing::tiny_model_config(set.vocabulary, 8, 2, 8);
  Hmgnn<double> model(cfg, 5);
  Rng rng(7);
  testing::randomize(model.params(), rng, 0.3);
  std::vector<std::size_t> idx(mols.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  warm_norm(model, set.batch(idx));
  for (std::size_t i = 0; i < mols.size(); ++i) {
    const auto base = model.predict(set.single(i));
    for (int k = 0; k < 5; ++k) {
      const auto moved = model.predict(set.single(set.add(testing::random_motion(mols[i], rng))));
      CHECK(rel(moved.fused[0], base.fused[0]) < 1e-9);
      CHECK(rel(moved.order1[0], base.order1[0]) < 1e-9);
      CHECK(rel(moved.order2[0], base.order2[0]) < 1e-9);
      const auto perm = testing::random_permutation(mols[i].atoms.size(), rng);
      const auto permuted = model.predict(set.single(set.add(testing::permute_atoms(mols[i], perm))));
      CHECK(rel(permuted.fused[0], base.fused[0]) < 1e-9);
      CHECK(rel(permuted.order2[0], base.order2[0]) < 1e-9);
      CHECK(std::abs(permuted.alpha1[0] - base.alpha1[0]) < 1e-9);
    }
  }
}

TEST_CASE("without inter-order edges the order-1 head ignores order 2") {
  Fixture fx(4, 6);
  auto model = fx.model(8, 2, true, false);
  for (const auto& name : model.params().names()) CHECK(name.find("msg_from") == std::string::npos);
  Rng rng(5);
  testing::randomize(model.params(), rng, 0.3);
  const auto b = fx.set.batch(fx.all());
  const auto before = model.predict(b, Mode::kBatchStats);
  for (auto& [name, p] : model.params().entries())
    if (name.rfind("order2/", 0) == 0)
      for (auto& v : p.value.values()) v += 0.25;
  const auto after = model.predict(b, Mode::kBatchStats);
  for (std::size_t m = 0; m < 4; ++m) CHECK(after.order1[m] == before.order1[m]);

  // Gradient probe: the order-1 head sends nothing to order-2 parameters and
  // the order-2 head nothing to order-1 parameters.
  for (int head : {1, 2}) {
    model.params().zero_grad();
    nn::Tape<double> tape;
    const auto pred = model.forward(tape, b, Mode::kBatchStats);
    tape.backward(nn::sum(head == 1 ? pred.order1 : pred.order2));
    const std::string other = head == 1 ? "order2/" : "order1/";
    for (const auto& [name, p] : model.params().entries())
      if (name.rfind(other, 0) == 0)
        for (double g : p.grad.values()) CHECK(g == 0.0);
  }
}

TEST_CASE("end-to-end gradients match finite differences") {
  Fixture fx(5, 13);
  auto model = fx.model(8, 2);
  Rng rng(8);
  testing::randomize(model.params(), rng, 0.3);
  const auto b = fx.set.batch(fx.all());
  // Distinct weights per output keep every head and molecule in play.
  const std::vector<double> w{0.7, -0.4, 1.1, 0.3, -0.9};
  auto loss_of = [&](bool with_grad) {
    nn::Tape<double> tape(with_grad);
    const auto p = model.forward(tape, b, Mode::kBatchStats);
    const auto wt = tape.constant(nn::Tensor<double>(5, 1, w));
    const auto l = nn::add(nn::sum(nn::hadamard(p.fused, wt)),
                           nn::add(nn::scale(nn::sum(nn::hadamard(p.order1, wt)), 0.5),
                                   nn::scale(nn::sum(nn::hadamard(p.order2, wt)), -0.25)));
    if (with_grad) tape.backward(l);
    return l.value()[0];
  };
  model.params().zero_grad();
  loss_of(true);
  const auto r = testing::check_gradients(model.params(), [&] { return loss_of(false); });
  INFO(r.worst);
  CHECK(r.checked == model.params().num_values());
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("checkpoint state round-trips and rejects a foreign model") {
  Fixture fx(3);
  auto model = fx.model();
  Rng rng(1);
  testing::randomize(model.params(), rng);
  warm_norm(model, fx.set.batch(fx.all()));
  io::Archive a("m", 1);
  model.save(a);
  auto other = fx.model(8, 2, true, true, 99);
  other.load(a);
  CHECK(other.predict(fx.set.batch(fx.all())).fused == model.predict(fx.set.batch(fx.all())).fused);

  auto single = fx.model(8, 2, false, true);
  CHECK_THROWS(single.load(a));
  auto wider = fx.model(16, 2);
  CHECK_THROWS(wider.load(a));
}

TEST_CASE("float precision tracks double precision") {
  Fixture fx(4, 21);
  auto cfg = testing::tiny_model_config(fx.set.vocabulary, 8, 2, 8);
  Hmgnn<double> d(cfg, 3);
  Hmgnn<float> f(cfg, 3);
  const auto b = fx.set.batch(fx.all());
  const auto pd = d.predict(b, Mode::kBatchStats);
  const auto pf = f.predict(b, Mode::kBatchStats);
  for (std::size_t m = 0; m < 4; ++m) CHECK(rel(pf.fused[m], pd.fused[m]) < 1e-4);
}
