// Copyright 2026 The BiSyn Authors.
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

#include "autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace bisyn {

template <typename T>
Var<T> Tape<T>::Constant(BasicTensor<T> value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, false});
  return Var<T>(this, static_cast<int>(nodes_.size() - 1));
}

template <typename T>
Var<T> Tape<T>::Leaf(Param<T> &param) {
  auto it = leaves_.find(&param);
  if (it != leaves_.end()) return Var<T>(this, it->second);
  Param<T> *target = &param;
  BackwardFn back = [target](Tape &tape, int self) {
    const BasicTensor<T> &g = tape.nodes_[self].grad;
    T *out = target->grad.data();
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += g[i];
  };
  nodes_.push_back(Node{param.value, {}, std::move(back), true});
  const int id = static_cast<int>(nodes_.size() - 1);
  leaves_.emplace(&param, id);
  return Var<T>(this, id);
}

template <typename T>
Var<T> Tape<T>::Push(BasicTensor<T> value, std::span<const int> parents,
                     BackwardFn backward) {
  bool needs = false;
  for (int p : parents) needs = needs || nodes_[p].needs_grad;
  nodes_.push_back(
      Node{std::move(value), {}, needs ? std::move(backward) : nullptr, needs});
  return Var<T>(this, static_cast<int>(nodes_.size() - 1));
}

template <typename T>
BasicTensor<T> &Tape<T>::Grad(int id) {
  Node &n = nodes_[id];
  if (n.grad.empty()) n.grad = BasicTensor<T>(n.value.shape(), T(0));
  return n.grad;
}

template <typename T>
void Tape<T>::Backward(Var<T> root) {
  if (&root.tape() != this) {
    ThrowRuntime("Backward called with a variable from another tape");
  }
  if (Value(root.id()).size() != 1) ThrowRuntime("Backward requires a scalar root");
  Grad(root.id())[0] = T(1);
  for (int id = root.id(); id >= 0; --id) {
    Node &n = nodes_[id];
    if (n.backward && !n.grad.empty()) n.backward(*this, id);
  }
}

template class Tape<float>;
template class Tape<double>;

namespace {

// Matrix kernels. Dot products and row sums accumulate in double regardless
// of storage precision.

// c = a * b, a: n x k, b: k x m.
template <typename T>
void GemmNN(const BasicTensor<T> &a, const BasicTensor<T> &b, BasicTensor<T> &c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<double> acc(m);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const T *arow = a.data() + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const T *brow = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) acc[j] += av * brow[j];
    }
    T *crow = c.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) crow[j] = static_cast<T>(acc[j]);
  }
}

// da += dc * b^T, dc: n x m, b: k x m.
template <typename T>
void GemmNTAccumulate(const BasicTensor<T> &dc, const BasicTensor<T> &b,
                      BasicTensor<T> &da) {
  const std::size_t n = dc.rows(), m = dc.cols(), k = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const T *drow = dc.data() + i * m;
    T *out = da.data() + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T *brow = b.data() + p * m;
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += static_cast<double>(drow[j]) * brow[j];
      out[p] = static_cast<T>(out[p] + s);
    }
  }
}

// db += a^T * dc, a: n x k, dc: n x m.
template <typename T>
void GemmTNAccumulate(const BasicTensor<T> &a, const BasicTensor<T> &dc,
                      BasicTensor<T> &db) {
  const std::size_t n = a.rows(), k = a.cols(), m = dc.cols();
  std::vector<double> acc(m);
  for (std::size_t p = 0; p < k; ++p) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double av = a.data()[i * k + p];
      if (av == 0.0) continue;
      const T *drow = dc.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) acc[j] += av * drow[j];
    }
    T *out = db.data() + p * m;
    for (std::size_t j = 0; j < m; ++j) out[j] = static_cast<T>(out[j] + acc[j]);
  }
}

template <typename T>
void AccumulateInto(BasicTensor<T> &dst, const BasicTensor<T> &src) {
  T *d = dst.data();
  const T *s = src.data();
  for (std::size_t i = 0; i < src.size(); ++i) d[i] += s[i];
}

void RequireSameShape(const char *op, const std::vector<std::size_t> &a,
                      const std::vector<std::size_t> &b) {
  if (a != b) {
    ThrowRuntime(std::string(op) + ": shape mismatch " + ShapeString(a) + " vs " +
                 ShapeString(b));
  }
}

template <typename T>
BasicTensor<T> AsMatrix(BasicTensor<T> t) {
  if (t.rank() == 2) return t;
  const std::size_t r = t.rows(), c = t.cols();
  std::vector<T> data(t.values().begin(), t.values().end());
  return BasicTensor<T>({r, c}, std::move(data));
}

}  // namespace

template <typename T>
Var<T> MatMul(Var<T> a, Var<T> b) {
  Tape<T> &tape = a.tape();
  const BasicTensor<T> &av = a.value();
  const BasicTensor<T> &bv = b.value();
  if (av.cols() != bv.rows()) {
    ThrowRuntime("MatMul: inner dimensions differ " + ShapeString(av.shape()) +
                 " x " + ShapeString(bv.shape()));
  }
  auto out = BasicTensor<T>::Matrix(av.rows(), bv.cols());
  GemmNN(av, bv, out);
  const int ids[] = {a.id(), b.id()};
  return tape.Push(std::move(out), ids, [ia = a.id(), ib = b.id()](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    if (t.NeedsGrad(ia)) GemmNTAccumulate(g, t.Value(ib), t.Grad(ia));
    if (t.NeedsGrad(ib)) GemmTNAccumulate(t.Value(ia), g, t.Grad(ib));
  });
}

template <typename T>
Var<T> Add(Var<T> a, Var<T> b) {
  RequireSameShape("Add", a.value().shape(), b.value().shape());
  BasicTensor<T> out = a.value();
  AccumulateInto(out, b.value());
  const int ids[] = {a.id(), b.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), ib = b.id()](Tape<T> &t, int self) {
    if (t.NeedsGrad(ia)) AccumulateInto(t.Grad(ia), t.Grad(self));
    if (t.NeedsGrad(ib)) AccumulateInto(t.Grad(ib), t.Grad(self));
  });
}

template <typename T>
Var<T> AddRow(Var<T> a, Var<T> row) {
  const BasicTensor<T> &rv = row.value();
  if (rv.rows() != 1 || rv.cols() != a.cols()) {
    ThrowRuntime("AddRow: expected a 1 x " + std::to_string(a.cols()) + " row, got " +
                 ShapeString(rv.shape()));
  }
  BasicTensor<T> out = AsMatrix(a.value());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv[j];
  }
  const int ids[] = {a.id(), row.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), ir = row.id()](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    if (t.NeedsGrad(ia)) AccumulateInto(t.Grad(ia), g);
    if (t.NeedsGrad(ir)) {
      BasicTensor<T> &gr = t.Grad(ir);
      for (std::size_t j = 0; j < g.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.rows(); ++i) s += g(i, j);
        gr[j] = static_cast<T>(gr[j] + s);
      }
    }
  });
}

template <typename T>
Var<T> AddToRow(Var<T> a, Var<T> row, std::size_t r) {
  const BasicTensor<T> &rv = row.value();
  if (rv.rows() != 1 || rv.cols() != a.cols() || r >= a.rows()) {
    ThrowRuntime("AddToRow: bad row shape or index");
  }
  BasicTensor<T> out = AsMatrix(a.value());
  for (std::size_t j = 0; j < out.cols(); ++j) out(r, j) += rv[j];
  const int ids[] = {a.id(), row.id()};
  return a.tape().Push(std::move(out), ids,
                       [ia = a.id(), ir = row.id(), r](Tape<T> &t, int self) {
                         const BasicTensor<T> &g = t.Grad(self);
                         if (t.NeedsGrad(ia)) AccumulateInto(t.Grad(ia), g);
                         if (t.NeedsGrad(ir)) {
                           BasicTensor<T> &gr = t.Grad(ir);
                           for (std::size_t j = 0; j < g.cols(); ++j) gr[j] += g(r, j);
                         }
                       });
}

template <typename T>
Var<T> Scale(Var<T> a, double factor) {
  BasicTensor<T> out = a.value();
  for (T &v : out.values()) v = static_cast<T>(v * factor);
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), factor](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    BasicTensor<T> &ga = t.Grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] = static_cast<T>(ga[i] + g[i] * factor);
  });
}

template <typename T>
Var<T> Elu(Var<T> a) {
  BasicTensor<T> out = a.value();
  for (T &v : out.values()) {
    if (v < T(0)) v = static_cast<T>(std::expm1(static_cast<double>(v)));
  }
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id()](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    const BasicTensor<T> &x = t.Value(ia);
    const BasicTensor<T> &y = t.Value(self);
    BasicTensor<T> &ga = t.Grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += x[i] < T(0) ? g[i] * (y[i] + T(1)) : g[i];
    }
  });
}

template <typename T>
Var<T> LeakyRelu(Var<T> a, double slope) {
  BasicTensor<T> out = a.value();
  for (T &v : out.values()) {
    if (v < T(0)) v = static_cast<T>(v * slope);
  }
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), slope](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    const BasicTensor<T> &x = t.Value(ia);
    BasicTensor<T> &ga = t.Grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] = static_cast<T>(ga[i] + (x[i] < T(0) ? g[i] * slope : g[i]));
    }
  });
}

template <typename T>
Var<T> ConcatCols(const std::vector<Var<T>> &parts) {
  if (parts.empty()) ThrowRuntime("ConcatCols: no inputs");
  const std::size_t n = parts[0].rows();
  std::size_t total = 0;
  std::vector<int> ids;
  std::vector<std::size_t> offsets;
  for (const Var<T> &p : parts) {
    if (p.rows() != n) ThrowRuntime("ConcatCols: row counts differ");
    offsets.push_back(total);
    total += p.cols();
    ids.push_back(p.id());
  }
  auto out = BasicTensor<T>::Matrix(n, total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const BasicTensor<T> &v = parts[k].value();
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(v.row(i).begin(), v.row(i).end(), out.row(i).begin() + offsets[k]);
    }
  }
  Tape<T> &tape = parts[0].tape();
  return tape.Push(std::move(out), ids, [ids, offsets](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!t.NeedsGrad(ids[k])) continue;
      BasicTensor<T> &gp = t.Grad(ids[k]);
      for (std::size_t i = 0; i < gp.rows(); ++i) {
        for (std::size_t j = 0; j < gp.cols(); ++j) gp(i, j) += g(i, offsets[k] + j);
      }
    }
  });
}

template <typename T>
Var<T> ConcatRows(const std::vector<Var<T>> &parts) {
  if (parts.empty()) ThrowRuntime("ConcatRows: no inputs");
  const std::size_t m = parts[0].cols();
  std::size_t total = 0;
  std::vector<int> ids;
  std::vector<std::size_t> offsets;
  for (const Var<T> &p : parts) {
    if (p.cols() != m) ThrowRuntime("ConcatRows: column counts differ");
    offsets.push_back(total);
    total += p.rows();
    ids.push_back(p.id());
  }
  auto out = BasicTensor<T>::Matrix(total, m);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const BasicTensor<T> &v = parts[k].value();
    std::copy(v.values().begin(), v.values().end(), out.data() + offsets[k] * m);
  }
  Tape<T> &tape = parts[0].tape();
  return tape.Push(std::move(out), ids, [ids, offsets, m](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!t.NeedsGrad(ids[k])) continue;
      BasicTensor<T> &gp = t.Grad(ids[k]);
      const T *src = g.data() + offsets[k] * m;
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += src[i];
    }
  });
}

template <typename T>
Var<T> SliceCols(Var<T> a, std::size_t begin, std::size_t end) {
  const BasicTensor<T> &av = a.value();
  if (begin >= end || end > av.cols()) ThrowRuntime("SliceCols: bad range");
  auto out = BasicTensor<T>::Matrix(av.rows(), end - begin);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = av(i, j);
  }
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), begin](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    BasicTensor<T> &ga = t.Grad(ia);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < g.cols(); ++j) ga(i, begin + j) += g(i, j);
    }
  });
}

template <typename T>
Var<T> SliceRows(Var<T> a, std::size_t begin, std::size_t end) {
  const BasicTensor<T> &av = a.value();
  if (begin >= end || end > av.rows()) ThrowRuntime("SliceRows: bad range");
  const std::size_t m = av.cols();
  std::vector<T> data(av.data() + begin * m, av.data() + end * m);
  BasicTensor<T> out({end - begin, m}, std::move(data));
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), begin, m](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    T *dst = t.Grad(ia).data() + begin * m;
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  });
}

template <typename T>
Var<T> GatherRows(Var<T> a, const std::vector<std::size_t> &index) {
  const BasicTensor<T> &av = a.value();
  if (index.empty()) ThrowRuntime("GatherRows: empty index");
  const std::size_t m = av.cols();
  auto out = BasicTensor<T>::Matrix(index.size(), m);
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= av.rows()) ThrowRuntime("GatherRows: index out of range");
    std::copy(av.row(index[k]).begin(), av.row(index[k]).end(), out.row(k).begin());
  }
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), index, m](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    BasicTensor<T> &ga = t.Grad(ia);
    for (std::size_t k = 0; k < index.size(); ++k) {
      for (std::size_t j = 0; j < m; ++j) ga(index[k], j) += g(k, j);
    }
  });
}

template <typename T>
Var<T> MeanRows(Var<T> a) {
  const BasicTensor<T> &av = a.value();
  const std::size_t n = av.rows(), m = av.cols();
  auto out = BasicTensor<T>::Matrix(1, m);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += av(i, j);
    out[j] = static_cast<T>(s / static_cast<double>(n));
  }
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id(), n, m](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    BasicTensor<T> &ga = t.Grad(ia);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) ga(i, j) = static_cast<T>(ga(i, j) + g[j] * inv);
    }
  });
}

template <typename T>
Var<T> Sum(Var<T> a) {
  double s = 0.0;
  for (T v : a.value().values()) s += v;
  auto out = BasicTensor<T>::Matrix(1, 1, static_cast<T>(s));
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids, [ia = a.id()](Tape<T> &t, int self) {
    const T g = t.Grad(self)[0];
    for (T &v : t.Grad(ia).values()) v += g;
  });
}

template <typename T>
Var<T> PairwiseSum(Var<T> u, Var<T> v) {
  const BasicTensor<T> &uv = u.value();
  const BasicTensor<T> &vv = v.value();
  if (uv.cols() != 1 || vv.cols() != 1 || uv.rows() != vv.rows()) {
    ThrowRuntime("PairwiseSum: expected two n x 1 columns");
  }
  const std::size_t n = uv.rows();
  auto out = BasicTensor<T>::Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = uv[i] + vv[j];
  }
  const int ids[] = {u.id(), v.id()};
  return u.tape().Push(std::move(out), ids, [iu = u.id(), iv = v.id(), n](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    if (t.NeedsGrad(iu)) {
      BasicTensor<T> &gu = t.Grad(iu);
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += g(i, j);
        gu[i] = static_cast<T>(gu[i] + s);
      }
    }
    if (t.NeedsGrad(iv)) {
      BasicTensor<T> &gv = t.Grad(iv);
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += g(i, j);
        gv[j] = static_cast<T>(gv[j] + s);
      }
    }
  });
}

template <typename T>
std::vector<T> MaskedSoftmax(std::span<const T> scores,
                             std::span<const std::uint8_t> mask) {
  if (scores.size() != mask.size()) ThrowRuntime("masked softmax: mask size mismatch");
  double top = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (!mask[j]) continue;
    any = true;
    top = std::max(top, static_cast<double>(scores[j]));
  }
  if (!any) ThrowRuntime("empty neighborhood");
  std::vector<double> e(scores.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (!mask[j]) continue;
    e[j] = std::exp(static_cast<double>(scores[j]) - top);
    total += e[j];
  }
  std::vector<T> out(scores.size(), T(0));
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (mask[j]) out[j] = static_cast<T>(e[j] / total);
  }
  return out;
}

template <typename T>
std::vector<T> Softmax(std::span<const T> scores) {
  std::vector<std::uint8_t> all(scores.size(), 1);
  return MaskedSoftmax<T>(scores, all);
}

template <typename T>
double CrossEntropy(std::span<const T> probs, int gold, double floor) {
  if (gold < 0 || static_cast<std::size_t>(gold) >= probs.size()) {
    ThrowRuntime("cross entropy: gold class out of range");
  }
  double total = 0.0;
  for (T p : probs) total += p;
  if (std::abs(total - 1.0) > 1e-6) {
    ThrowRuntime("cross entropy: probabilities do not sum to 1");
  }
  return -std::log(std::max(static_cast<double>(probs[gold]), floor));
}

template <typename T>
Var<T> MaskedSoftmaxRows(Var<T> scores, const std::vector<std::uint8_t> &mask) {
  const BasicTensor<T> &sv = scores.value();
  const std::size_t n = sv.rows(), m = sv.cols();
  if (mask.size() != n * m) ThrowRuntime("MaskedSoftmaxRows: mask size mismatch");
  auto out = BasicTensor<T>::Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const std::uint8_t> mrow(mask.data() + i * m, m);
    std::vector<T> row = MaskedSoftmax<T>(sv.row(i), mrow);
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  const int ids[] = {scores.id()};
  return scores.tape().Push(std::move(out), ids, [is = scores.id(), n, m](Tape<T> &t, int self) {
    const BasicTensor<T> &g = t.Grad(self);
    const BasicTensor<T> &y = t.Value(self);
    BasicTensor<T> &gs = t.Grad(is);
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) dot += static_cast<double>(g(i, j)) * y(i, j);
      for (std::size_t j = 0; j < m; ++j) {
        gs(i, j) = static_cast<T>(gs(i, j) + y(i, j) * (g(i, j) - dot));
      }
    }
  });
}

template <typename T>
Var<T> Dropout(Var<T> a, double rate, Rng &rng) {
  if (rate < 0.0 || rate >= 1.0) ThrowRuntime("Dropout: rate must be in [0, 1)");
  if (rate == 0.0) return a;
  const double keep = 1.0 / (1.0 - rate);
  BasicTensor<T> mask(a.value().shape(), T(0));
  for (T &v : mask.values()) v = rng.Uniform() < rate ? T(0) : static_cast<T>(keep);
  BasicTensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  const int ids[] = {a.id()};
  return a.tape().Push(std::move(out), ids,
                       [ia = a.id(), mask = std::move(mask)](Tape<T> &t, int self) {
                         const BasicTensor<T> &g = t.Grad(self);
                         BasicTensor<T> &ga = t.Grad(ia);
                         for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * mask[i];
                       });
}

template <typename T>
Var<T> SoftmaxCrossEntropy(Var<T> logits, const std::vector<int> &gold, double floor) {
  const BasicTensor<T> &lv = logits.value();
  const std::size_t n = lv.rows(), c = lv.cols();
  if (gold.size() != n) ThrowRuntime("SoftmaxCrossEntropy: one gold label per row");
  auto probs = BasicTensor<T>::Matrix(n, c);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (gold[i] < 0 || static_cast<std::size_t>(gold[i]) >= c) {
      ThrowRuntime("SoftmaxCrossEntropy: gold class out of range");
    }
    std::vector<T> p = Softmax<T>(lv.row(i));
    std::copy(p.begin(), p.end(), probs.row(i).begin());
    // log-sum-exp form avoids the floor unless the probability underflows.
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) top = std::max(top, static_cast<double>(lv(i, j)));
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(lv(i, j) - top);
    const double nll = top + std::log(z) - lv(i, gold[i]);
    loss += std::min(nll, -std::log(floor));
  }
  auto out = BasicTensor<T>::Matrix(1, 1, static_cast<T>(loss));
  const int ids[] = {logits.id()};
  return logits.tape().Push(
      std::move(out), ids,
      [il = logits.id(), gold, probs = std::move(probs)](Tape<T> &t, int self) {
        const T g = t.Grad(self)[0];
        BasicTensor<T> &gl = t.Grad(il);
        for (std::size_t i = 0; i < probs.rows(); ++i) {
          for (std::size_t j = 0; j < probs.cols(); ++j) {
            const T onehot = static_cast<int>(j) == gold[i] ? T(1) : T(0);
            gl(i, j) += g * (probs(i, j) - onehot);
          }
        }
      });
}

#define BISYN_INSTANTIATE_OPS(T)                                                   \
  template Var<T> MatMul(Var<T>, Var<T>);                                          \
  template Var<T> Add(Var<T>, Var<T>);                                             \
  template Var<T> AddRow(Var<T>, Var<T>);                                          \
  template Var<T> AddToRow(Var<T>, Var<T>, std::size_t);                           \
  template Var<T> Scale(Var<T>, double);                                           \
  template Var<T> Elu(Var<T>);                                                     \
  template Var<T> LeakyRelu(Var<T>, double);                                       \
  template Var<T> ConcatCols(const std::vector<Var<T>> &);                         \
  template Var<T> ConcatRows(const std::vector<Var<T>> &);                         \
  template Var<T> SliceCols(Var<T>, std::size_t, std::size_t);                     \
  template Var<T> SliceRows(Var<T>, std::size_t, std::size_t);                     \
  template Var<T> GatherRows(Var<T>, const std::vector<std::size_t> &);            \
  template Var<T> MeanRows(Var<T>);                                                \
  template Var<T> Sum(Var<T>);                                                     \
  template Var<T> PairwiseSum(Var<T>, Var<T>);                                     \
  template Var<T> MaskedSoftmaxRows(Var<T>, const std::vector<std::uint8_t> &);    \
  template Var<T> Dropout(Var<T>, double, Rng &);                                  \
  template Var<T> SoftmaxCrossEntropy(Var<T>, const std::vector<int> &, double);   \
  template std::vector<T> MaskedSoftmax(std::span<const T>,                        \
                                        std::span<const std::uint8_t>);            \
  template std::vector<T> Softmax(std::span<const T>);                             \
  template double CrossEntropy(std::span<const T>, int, double);

BISYN_INSTANTIATE_OPS(float)
BISYN_INSTANTIATE_OPS(double)

#undef BISYN_INSTANTIATE_OPS

}  // namespace bisyn
