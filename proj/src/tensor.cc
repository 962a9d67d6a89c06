#include "tagkg/tensor.h"

#include <algorithm>
#include <cmath>

#include "tagkg/error.h"

namespace tagkg {

Matrix::Matrix(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
  data_.assign(static_cast<size_t>(rows) * cols, fill);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  for (const auto &r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::FromData(int rows, int cols, std::vector<double> data) {
  if (rows < 0 || cols < 0 || data.size() != static_cast<size_t>(rows) * cols) {
    throw DimensionError("data length does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  return m;
}

Matrix Matrix::Identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::Transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::GatherRows(std::span<const int> idx) const {
  Matrix out(static_cast<int>(idx.size()), cols_);
  for (size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= rows_) throw DimensionError("row index out of range");
    std::copy_n(data_.begin() + static_cast<size_t>(idx[r]) * cols_, cols_,
                out.data_.begin() + r * cols_);
  }
  return out;
}

std::string Matrix::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix MatMul(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul " + a.ShapeString() + " * " + b.ShapeString());
  }
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix MatMulNT(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul " + a.ShapeString() + " * (" + b.ShapeString() + ")^T");
  }
  Matrix c(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    auto ar = a.row(i);
    for (int j = 0; j < b.rows(); ++j) {
      auto br = b.row(j);
      double s = 0.0;
      for (int k = 0; k < a.cols(); ++k) s += ar[k] * br[k];
      c(i, j) = s;
    }
  }
  return c;
}

Matrix MatMulTN(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul (" + a.ShapeString() + ")^T * " + b.ShapeString());
  }
  Matrix c(a.cols(), b.cols());
  for (int k = 0; k < a.rows(); ++k) {
    for (int i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  }
  return c;
}

Matrix Add(const Matrix &a, const Matrix &b) {
  if (!a.SameShape(b)) throw DimensionError("add " + a.ShapeString() + " + " + b.ShapeString());
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
  return c;
}

double MaxAbsDiff(const Matrix &a, const Matrix &b) {
  if (!a.SameShape(b)) throw DimensionError("compare " + a.ShapeString() + " vs " + b.ShapeString());
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

const char *ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "identity";
}

Activation ParseActivation(const std::string &s) {
  if (s == "identity") return Activation::kIdentity;
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  if (s == "relu") return Activation::kRelu;
  if (s == "sigmoid") return Activation::kSigmoid;
  throw Error("unknown activation '" + s + "'");
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Activate(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kLeakyRelu: return x > 0 ? x : kLeakySlope * x;
    case Activation::kRelu: return x > 0 ? x : 0.0;
    case Activation::kSigmoid: return Sigmoid(x);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Tape

Tape::Node &Tape::node(Var v) {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) throw Error("invalid tape variable");
  return nodes_[v.id];
}

const Tape::Node &Tape::node(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) throw Error("invalid tape variable");
  return nodes_[v.id];
}

Tape::Var Tape::Push(Matrix value, std::vector<int> inputs,
                     std::function<void(Tape &, int)> backward) {
  if (backward_done_) throw Error("tape already consumed by backward(); call Reset()");
  for (double x : value.data()) {
    if (!std::isfinite(x)) throw Error("non-finite value produced on tape");
  }
  Node n;
  n.value = std::move(value);
  n.requires_grad = false;
  for (int i : inputs) n.requires_grad = n.requires_grad || nodes_[i].requires_grad;
  n.inputs = std::move(inputs);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Var Tape::Leaf(const Matrix &value) {
  Var v = Push(value, {}, nullptr);
  nodes_[v.id].requires_grad = true;
  return v;
}

Tape::Var Tape::Constant(const Matrix &value) { return Push(value, {}, nullptr); }

void Tape::Accumulate(int id, const Matrix &g) {
  Node &n = nodes_[id];
  if (!n.requires_grad) return;
  auto d = n.grad.data();
  auto s = g.data();
  for (size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Tape::Var Tape::MatMul(Var a, Var b) {
  Matrix v = tagkg::MatMul(value(a), value(b));
  return Push(std::move(v), {a.id, b.id}, [](Tape &t, int self) {
    const Node &n = t.nodes_[self];
    const int ia = n.inputs[0], ib = n.inputs[1];
    if (t.nodes_[ia].requires_grad) t.Accumulate(ia, tagkg::MatMulNT(n.grad, t.nodes_[ib].value));
    if (t.nodes_[ib].requires_grad) t.Accumulate(ib, tagkg::MatMulTN(t.nodes_[ia].value, n.grad));
  });
}

Tape::Var Tape::MatMulNT(Var a, Var b) {
  Matrix v = tagkg::MatMulNT(value(a), value(b));
  return Push(std::move(v), {a.id, b.id}, [](Tape &t, int self) {
    const Node &n = t.nodes_[self];
    const int ia = n.inputs[0], ib = n.inputs[1];
    if (t.nodes_[ia].requires_grad) t.Accumulate(ia, tagkg::MatMul(n.grad, t.nodes_[ib].value));
    if (t.nodes_[ib].requires_grad) t.Accumulate(ib, tagkg::MatMulTN(n.grad, t.nodes_[ia].value));
  });
}

Tape::Var Tape::Add(Var a, Var b) {
  Matrix v = tagkg::Add(value(a), value(b));
  return Push(std::move(v), {a.id, b.id}, [](Tape &t, int self) {
    const Node &n = t.nodes_[self];
    t.Accumulate(n.inputs[0], n.grad);
    t.Accumulate(n.inputs[1], n.grad);
  });
}

Tape::Var Tape::AddRowBias(Var x, Var bias) {
  const Matrix &xv = value(x);
  const Matrix &bv = value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    throw DimensionError("row bias " + bv.ShapeString() + " for " + xv.ShapeString());
  }
  Matrix v = xv;
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < v.cols(); ++j) v(i, j) += bv(0, j);
  return Push(std::move(v), {x.id, bias.id}, [](Tape &t, int self) {
    const Node &n = t.nodes_[self];
    t.Accumulate(n.inputs[0], n.grad);
    if (t.nodes_[n.inputs[1]].requires_grad) {
      Matrix gb(1, n.grad.cols());
      for (int i = 0; i < n.grad.rows(); ++i)
        for (int j = 0; j < n.grad.cols(); ++j) gb(0, j) += n.grad(i, j);
      t.Accumulate(n.inputs[1], gb);
    }
  });
}

Tape::Var Tape::Activate(Var x, Activation act) {
  Matrix v = value(x);
  for (double &e : v.data()) e = tagkg::Activate(act, e);
  return Push(std::move(v), {x.id}, [act](Tape &t, int self) {
    const Node &n = t.nodes_[self];
    const Node &in = t.nodes_[n.inputs[0]];
    if (!in.requires_grad) return;
    Matrix g = n.grad;
    auto gd = g.data();
    auto xd = in.value.data();
    auto yd = n.value.data();
    for (size_t i = 0; i < gd.size(); ++i) {
      switch (act) {
        case Activation::kIdentity: break;
        case Activation::kLeakyRelu: gd[i] *= xd[i] > 0 ? 1.0 : kLeakySlope; break;
        case Activation::kRelu: gd[i] *= xd[i] > 0 ? 1.0 : 0.0; break;
        case Activation::kSigmoid: gd[i] *= yd[i] * (1.0 - yd[i]); break;
      }
    }
    t.Accumulate(n.inputs[0], g);
  });
}

Tape::Var Tape::Sum(Var x) {
  double s = 0.0;
  for (double e : value(x).data()) s += e;
  return Push(Matrix(1, 1, s), {x.id}, [](Tape &t, int self) {
    const Node &n = t.nodes_[self];
    const Node &in = t.nodes_[n.inputs[0]];
    t.Accumulate(n.inputs[0], Matrix(in.value.rows(), in.value.cols(), n.grad(0, 0)));
  });
}

namespace {
constexpr double kProbEps = 1e-12;
}

Tape::Var Tape::BceMean(Var probs, const Matrix &targets) {
  const Matrix &p = value(probs);
  if (!p.SameShape(targets)) {
    throw DimensionError("bce " + p.ShapeString() + " vs targets " + targets.ShapeString());
  }
  if (p.size() == 0) throw DimensionError("bce on empty matrix");
  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double y = targets.data()[i];
    const double q = std::clamp(p.data()[i], kProbEps, 1.0 - kProbEps);
    total -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
  }
  const double n = static_cast<double>(p.size());
  return Push(Matrix(1, 1, total / n), {probs.id}, [targets, n](Tape &t, int self) {
    const Node &node = t.nodes_[self];
    const Node &in = t.nodes_[node.inputs[0]];
    if (!in.requires_grad) return;
    Matrix g(in.value.rows(), in.value.cols());
    const double upstream = node.grad(0, 0);
    for (size_t i = 0; i < g.size(); ++i) {
      const double raw = in.value.data()[i];
      if (raw < kProbEps || raw > 1.0 - kProbEps) continue;  // clamped: flat
      const double y = targets.data()[i];
      g.data()[i] = upstream * (-(y / raw) + (1.0 - y) / (1.0 - raw)) / n;
    }
    t.Accumulate(node.inputs[0], g);
  });
}

const Matrix &Tape::value(Var v) const { return node(v).value; }

const Matrix &Tape::grad(Var v) const {
  const Node &n = node(v);
  if (!backward_done_) throw Error("gradient requested before backward()");
  return n.grad;
}

void Tape::Backward(Var loss) {
  if (nodes_.empty()) throw Error("backward() called on an empty tape");
  if (backward_done_) throw Error("backward() called twice without Reset()");
  Node &root = node(loss);
  if (root.value.rows() != 1 || root.value.cols() != 1) {
    throw Error("backward() needs a scalar loss, got " + root.value.ShapeString());
  }
  for (auto &n : nodes_) n.grad = Matrix(n.value.rows(), n.value.cols());
  backward_done_ = true;
  root.grad(0, 0) = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node &n = nodes_[id];
    if (n.backward && n.requires_grad) n.backward(*this, id);
  }
}

void Tape::Reset() {
  nodes_.clear();
  backward_done_ = false;
}

}  // namespace tagkg
