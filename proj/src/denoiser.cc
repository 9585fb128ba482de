// Copyright 2026 The LGSG Authors.
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

#include "lgsg/denoiser.h"

#include <cmath>
#include <stdexcept>

namespace lgsg {
namespace {

constexpr int kPerBlock = 11;

// Offsets inside a block.
enum BlockParam {
  kMsgW = 0,
  kGateW,
  kGateB,
  kNode1W,
  kNode1B,
  kNode2W,
  kNode2B,
  kEdge1W,
  kEdge1B,
  kEdge2W,
  kEdge2B,
};

constexpr int kInNodeW = 0;
constexpr int kInNodeB = 1;
constexpr int kInEdgeW = 2;
constexpr int kInEdgeB = 3;

int BlockBase(int l) { return 4 + kPerBlock * l; }
int HeadBase(int layers) { return 4 + kPerBlock * layers; }

RowMatrix Affine(const RowMatrix& x, const RowMatrix& w, const RowMatrix& b) {
  RowMatrix y = x * w.transpose();
  y.rowwise() += b.row(0);
  return y;
}

// dW += dy^T x, db += colsum(dy); returns dy W.
RowMatrix AffineBackward(const RowMatrix& x, const RowMatrix& w,
                         const RowMatrix& dy, RowMatrix& dw, RowMatrix* db) {
  dw.noalias() += dy.transpose() * x;
  if (db) db->row(0) += dy.colwise().sum();
  return dy * w;
}

void MaskRows(RowMatrix& x, const std::vector<double>& mask) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (mask[i] == 0.0) x.row(i).setZero();
  }
}

RowMatrix Relu(const RowMatrix& x) { return x.cwiseMax(0.0); }

RowMatrix ReluBackward(const RowMatrix& pre, const RowMatrix& dy) {
  return (pre.array() > 0.0).select(dy, 0.0);
}

}  // namespace

Denoiser::Denoiser(const DenoiserShape& shape, Rng& rng) : shape_(shape) {
  if (shape.capacity < 1 || shape.dim < 1 || shape.hidden < 1 ||
      shape.layers < 1 || shape.num_steps < 1) {
    throw std::invalid_argument("invalid denoiser shape");
  }
  const int h = shape.hidden;
  const int d = shape.dim;
  auto weight = [&](int out, int in, double scale = 1.0) {
    const double limit = scale * std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    RowMatrix w(out, in);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = dist(rng);
    return w;
  };
  auto bias = [](int n) { return RowMatrix::Zero(1, n).eval(); };

  params_.push_back(weight(h, d + h));
  params_.push_back(bias(h));
  params_.push_back(weight(h, 2));
  params_.push_back(bias(h));
  for (int l = 0; l < shape.layers; ++l) {
    params_.push_back(weight(h, h));      // msg
    params_.push_back(weight(h, h));      // gate
    params_.push_back(bias(h));
    params_.push_back(weight(h, 4 * h));  // node mlp
    params_.push_back(bias(h));
    params_.push_back(weight(h, h));
    params_.push_back(bias(h));
    params_.push_back(weight(h, 3 * h));  // edge mlp
    params_.push_back(bias(h));
    params_.push_back(weight(h, h));
    params_.push_back(bias(h));
  }
  params_.push_back(weight(d, h, 0.1));
  params_.push_back(bias(d));
  params_.push_back(weight(2, h, 0.1));
  params_.push_back(bias(2));
}

std::vector<std::string> Denoiser::ParamNames() const {
  std::vector<std::string> names = {"in_node.w", "in_node.b", "in_edge.w", "in_edge.b"};
  static const char* kBlock[] = {"msg.w",   "gate.w",  "gate.b",  "node1.w",
                                 "node1.b", "node2.w", "node2.b", "edge1.w",
                                 "edge1.b", "edge2.w", "edge2.b"};
  for (int l = 0; l < shape_.layers; ++l) {
    for (const char* n : kBlock) names.push_back("block" + std::to_string(l) + "." + n);
  }
  for (const char* n : {"out_node.w", "out_node.b", "out_edge.w", "out_edge.b"}) {
    names.emplace_back(n);
  }
  return names;
}

size_t Denoiser::NumScalars() const {
  size_t n = 0;
  for (const auto& p : params_) n += static_cast<size_t>(p.size());
  return n;
}

bool Denoiser::AllFinite() const {
  for (const auto& p : params_) {
    if (!p.allFinite()) return false;
  }
  return true;
}

RowVector Denoiser::TimeEmbedding(int t) const {
  const int h = shape_.hidden;
  RowVector tau = RowVector::Zero(h);
  const double scaled = 1000.0 * t / shape_.num_steps;
  const int half = h / 2;
  for (int k = 0; k < half; ++k) {
    const double freq = std::pow(10000.0, -static_cast<double>(k) / std::max(half, 1));
    tau(2 * k) = std::sin(scaled * freq);
    tau(2 * k + 1) = std::cos(scaled * freq);
  }
  return tau;
}

Denoiser::Output Denoiser::Forward(const RowMatrix& z, const RowMatrix& e,
                                   const std::vector<uint8_t>& mask, int t,
                                   Cache* cache) const {
  const int m = shape_.capacity;
  const int h = shape_.hidden;
  const int d = shape_.dim;
  if (z.rows() != m || z.cols() != d || e.rows() != m * m || e.cols() != 2 ||
      static_cast<int>(mask.size()) != m) {
    throw std::invalid_argument("denoiser input shape mismatch");
  }
  if (t < 0 || t > shape_.num_steps) throw std::invalid_argument("timestep out of range");

  Cache local;
  Cache& c = cache ? *cache : local;
  c.node_mask.assign(m, 0.0);
  c.pair_mask.assign(static_cast<size_t>(m) * m, 0.0);
  c.inv_degree.assign(m, 0.0);
  int count = 0;
  for (int i = 0; i < m; ++i) {
    c.node_mask[i] = mask[i] ? 1.0 : 0.0;
    count += mask[i] ? 1 : 0;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      c.pair_mask[i * m + j] = (i != j && mask[i] && mask[j]) ? 1.0 : 0.0;
    }
    if (mask[i] && count > 1) c.inv_degree[i] = 1.0 / (count - 1);
  }
  c.inv_count = count > 0 ? 1.0 / count : 0.0;
  c.tau = TimeEmbedding(t);
  c.e = e;
  c.x0.resize(m, d + h);
  c.x0.leftCols(d) = z;
  c.x0.rightCols(h).rowwise() = c.tau;

  RowMatrix hs = Affine(c.x0, params_[kInNodeW], params_[kInNodeB]);
  MaskRows(hs, c.node_mask);
  RowMatrix gs = Affine(e, params_[kInEdgeW], params_[kInEdgeB]);
  MaskRows(gs, c.pair_mask);

  c.blocks.resize(shape_.layers);
  for (int l = 0; l < shape_.layers; ++l) {
    const int base = BlockBase(l);
    Cache::Block& b = c.blocks[l];
    b.h_in = hs;
    b.g_in = gs;

    b.m = hs * params_[base + kMsgW].transpose();
    b.gate = Affine(gs, params_[base + kGateW], params_[base + kGateB]);
    b.gate = (1.0 / (1.0 + (-b.gate.array()).exp())).matrix();
    RowMatrix msg = RowMatrix::Zero(m, h);
    for (int i = 0; i < m; ++i) {
      if (c.inv_degree[i] == 0.0) continue;
      for (int j = 0; j < m; ++j) {
        if (c.pair_mask[i * m + j] == 0.0) continue;
        msg.row(i).array() += b.gate.row(i * m + j).array() * b.m.row(j).array();
      }
      msg.row(i) *= c.inv_degree[i];
    }
    RowVector ctx = RowVector::Zero(h);
    for (int i = 0; i < m; ++i) ctx += c.node_mask[i] * hs.row(i);
    ctx *= c.inv_count;

    b.u.resize(m, 4 * h);
    b.u.leftCols(h) = hs;
    b.u.middleCols(h, h) = msg;
    b.u.middleCols(2 * h, h).rowwise() = ctx;
    b.u.rightCols(h).rowwise() = c.tau;
    b.a1 = Affine(b.u, params_[base + kNode1W], params_[base + kNode1B]);
    b.r1 = Relu(b.a1);
    hs += Affine(b.r1, params_[base + kNode2W], params_[base + kNode2B]);
    MaskRows(hs, c.node_mask);
    b.h_mid = hs;

    b.v.resize(static_cast<Eigen::Index>(m) * m, 3 * h);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const int row = i * m + j;
        b.v.row(row).head(h) = hs.row(i) + hs.row(j);
        b.v.row(row).segment(h, h) = hs.row(i).cwiseProduct(hs.row(j));
      }
    }
    b.v.rightCols(h) = gs;
    b.b1 = Affine(b.v, params_[base + kEdge1W], params_[base + kEdge1B]);
    b.q1 = Relu(b.b1);
    gs += Affine(b.q1, params_[base + kEdge2W], params_[base + kEdge2B]);
    MaskRows(gs, c.pair_mask);
  }
  c.h_out = hs;
  c.g_out = gs;

  const int head = HeadBase(shape_.layers);
  Output out;
  out.eps_z = Affine(hs, params_[head], params_[head + 1]);
  MaskRows(out.eps_z, c.node_mask);
  const RowMatrix raw = Affine(gs, params_[head + 2], params_[head + 3]);
  out.eps_e.resize(static_cast<Eigen::Index>(m) * m, 2);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      out.eps_e.row(i * m + j) =
          c.pair_mask[i * m + j] * 0.5 * (raw.row(i * m + j) + raw.row(j * m + i));
    }
  }
  return out;
}

void Denoiser::Backward(const Cache& c, const RowMatrix& grad_eps_z,
                        const RowMatrix& grad_eps_e,
                        std::vector<RowMatrix>& grads) const {
  const int m = shape_.capacity;
  const int h = shape_.hidden;
  if (grads.empty()) {
    for (const auto& p : params_) grads.push_back(RowMatrix::Zero(p.rows(), p.cols()));
  }
  const int head = HeadBase(shape_.layers);

  RowMatrix dz = grad_eps_z;
  MaskRows(dz, c.node_mask);
  RowMatrix dh = AffineBackward(c.h_out, params_[head], dz, grads[head], &grads[head + 1]);

  RowMatrix draw(static_cast<Eigen::Index>(m) * m, 2);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      draw.row(i * m + j) = 0.5 * (c.pair_mask[i * m + j] * grad_eps_e.row(i * m + j) +
                                   c.pair_mask[j * m + i] * grad_eps_e.row(j * m + i));
    }
  }
  RowMatrix dg = AffineBackward(c.g_out, params_[head + 2], draw, grads[head + 2],
                                &grads[head + 3]);

  for (int l = shape_.layers - 1; l >= 0; --l) {
    const int base = BlockBase(l);
    const Cache::Block& b = c.blocks[l];

    // Edge update: g_out = (g_in + F) * pair_mask.
    MaskRows(dg, c.pair_mask);
    RowMatrix dq1 = AffineBackward(b.q1, params_[base + kEdge2W], dg,
                                   grads[base + kEdge2W], &grads[base + kEdge2B]);
    RowMatrix db1 = ReluBackward(b.b1, dq1);
    RowMatrix dv = AffineBackward(b.v, params_[base + kEdge1W], db1,
                                  grads[base + kEdge1W], &grads[base + kEdge1B]);
    RowMatrix dg_in = dg + dv.rightCols(h);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const int row = i * m + j;
        const auto ds = dv.row(row).head(h);
        const auto dp = dv.row(row).segment(h, h);
        dh.row(i) += ds + dp.cwiseProduct(b.h_mid.row(j));
        dh.row(j) += ds + dp.cwiseProduct(b.h_mid.row(i));
      }
    }

    // Node update: h_mid = (h_in + D) * node_mask.
    MaskRows(dh, c.node_mask);
    RowMatrix dr1 = AffineBackward(b.r1, params_[base + kNode2W], dh,
                                   grads[base + kNode2W], &grads[base + kNode2B]);
    RowMatrix da1 = ReluBackward(b.a1, dr1);
    RowMatrix du = AffineBackward(b.u, params_[base + kNode1W], da1,
                                  grads[base + kNode1W], &grads[base + kNode1B]);
    RowMatrix dh_in = dh + du.leftCols(h);
    const RowMatrix dmsg = du.middleCols(h, h);
    const RowVector dctx = du.middleCols(2 * h, h).colwise().sum() * c.inv_count;
    for (int j = 0; j < m; ++j) dh_in.row(j) += c.node_mask[j] * dctx;

    RowMatrix dgate = RowMatrix::Zero(static_cast<Eigen::Index>(m) * m, h);
    RowMatrix dm = RowMatrix::Zero(m, h);
    for (int i = 0; i < m; ++i) {
      if (c.inv_degree[i] == 0.0) continue;
      const RowVector scaled = dmsg.row(i) * c.inv_degree[i];
      for (int j = 0; j < m; ++j) {
        if (c.pair_mask[i * m + j] == 0.0) continue;
        dgate.row(i * m + j) = scaled.cwiseProduct(b.m.row(j));
        dm.row(j) += scaled.cwiseProduct(b.gate.row(i * m + j));
      }
    }
    const RowMatrix dgate_pre =
        (dgate.array() * b.gate.array() * (1.0 - b.gate.array())).matrix();
    dg_in += AffineBackward(b.g_in, params_[base + kGateW], dgate_pre,
                            grads[base + kGateW], &grads[base + kGateB]);
    dh_in += AffineBackward(b.h_in, params_[base + kMsgW], dm, grads[base + kMsgW], nullptr);

    dh = std::move(dh_in);
    dg = std::move(dg_in);
  }

  MaskRows(dh, c.node_mask);
  AffineBackward(c.x0, params_[kInNodeW], dh, grads[kInNodeW], &grads[kInNodeB]);
  MaskRows(dg, c.pair_mask);
  AffineBackward(c.e, params_[kInEdgeW], dg, grads[kInEdgeW], &grads[kInEdgeB]);
}

}  // namespace lgsg
