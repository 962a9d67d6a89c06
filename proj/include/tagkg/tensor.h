#ifndef TAGKG_TENSOR_H_
#define TAGKG_TENSOR_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tagkg {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix FromData(int rows, int cols, std::vector<double> data);
  static Matrix Identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double &operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> row(int r) const {
    return std::span<const double>(data_).subspan(static_cast<size_t>(r) * cols_, cols_);
  }

  bool SameShape(const Matrix &o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool operator==(const Matrix &o) const = default;

  Matrix Transposed() const;
  // Rows selected by index, in the given order.
  Matrix GatherRows(std::span<const int> idx) const;
  std::string ShapeString() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Plain kernels. All throw DimensionError on shape mismatch.
Matrix MatMul(const Matrix &a, const Matrix &b);     // a * b
Matrix MatMulNT(const Matrix &a, const Matrix &b);   // a * b^T
Matrix MatMulTN(const Matrix &a, const Matrix &b);   // a^T * b
Matrix Add(const Matrix &a, const Matrix &b);
double MaxAbsDiff(const Matrix &a, const Matrix &b);

enum class Activation { kIdentity, kLeakyRelu, kRelu, kSigmoid };

inline constexpr double kLeakySlope = 0.2;

const char *ActivationName(Activation a);
Activation ParseActivation(const std::string &s);
double Activate(Activation a, double x);

double Sigmoid(double x);

// Reverse-mode tape over Matrix values. Nodes are created by the op methods
// and referenced by Var handles; Backward() walks them once in reverse
// creation order. A tape is single-use: call Reset() before recording again.
class Tape {
 public:
  struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
  };

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  // Leaf whose gradient is wanted (parameter or input).
  Var Leaf(const Matrix &value);
  // Leaf treated as a constant; no gradient is accumulated for it.
  Var Constant(const Matrix &value);

  Var MatMul(Var a, Var b);
  Var MatMulNT(Var a, Var b);
  Var Add(Var a, Var b);
  // x + 1 * bias, with bias a 1 x cols row vector.
  Var AddRowBias(Var x, Var bias);
  Var Activate(Var x, Activation act);
  // Sum of all entries, as a 1x1 matrix.
  Var Sum(Var x);
  // Mean binary cross-entropy of probabilities against a fixed 0/1 target,
  // with p clamped to [1e-12, 1 - 1e-12]. Returns 1x1.
  Var BceMean(Var probs, const Matrix &targets);

  const Matrix &value(Var v) const;
  // Gradient of the last Backward() loss w.r.t. v. Zero matrix if v did not
  // influence the loss.
  const Matrix &grad(Var v) const;

  // Throws Error when nothing was recorded, when the loss is not 1x1, or when
  // called twice without Reset().
  void Backward(Var loss);
  void Reset();

  size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<int> inputs;
    bool requires_grad = false;
    // Adds this node's gradient into its inputs' gradients.
    std::function<void(Tape &, int)> backward;
  };

  Var Push(Matrix value, std::vector<int> inputs, std::function<void(Tape &, int)> backward);
  Node &node(Var v);
  const Node &node(Var v) const;
  void Accumulate(int id, const Matrix &g);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace tagkg

#endif  // TAGKG_TENSOR_H_
