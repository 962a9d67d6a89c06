#include "tagkg/dgcn.h"

#include <cmath>

#include "tagkg/error.h"

namespace tagkg {

void DGCNLayer::Validate() const {
  const int r = num_relations();
  if (r < 1) throw DimensionError("D-GCN layer needs at least one relation");
  if (static_cast<int>(weights.size()) != r || static_cast<int>(biases.size()) != r) {
    throw DimensionError("D-GCN layer needs one weight and one bias per relation");
  }
  for (int i = 0; i < r; ++i) {
    if (adjacency[i].rows() != n() || adjacency[i].cols() != n()) {
      throw DimensionError("adjacency " + std::to_string(i) + " is " +
                           adjacency[i].ShapeString() + ", expected square " +
                           std::to_string(n()));
    }
    if (!weights[i].SameShape(weights[0])) throw DimensionError("relation weights differ in shape");
    if (biases[i].rows() != 1 || biases[i].cols() != d_out()) {
      throw DimensionError("bias " + std::to_string(i) + " is " + biases[i].ShapeString());
    }
  }
}

Matrix GlorotUniform(int d_in, int d_out, Rng &rng) {
  const double a = std::sqrt(6.0 / (d_in + d_out));
  std::uniform_real_distribution<double> dist(-a, a);
  Matrix w(d_in, d_out);
  for (double &x : w.data()) x = dist(rng);
  return w;
}

DGCNLayer DGCNLayer::Create(std::vector<Matrix> adjacency, int d_in, int d_out,
                            Activation activation, Rng &rng) {
  DGCNLayer layer;
  layer.activation = activation;
  for (size_t r = 0; r < adjacency.size(); ++r) {
    layer.weights.push_back(GlorotUniform(d_in, d_out, rng));
    layer.biases.emplace_back(1, d_out);
  }
  layer.adjacency = std::move(adjacency);
  layer.Validate();
  return layer;
}

Matrix DgcnForward(const DGCNLayer &layer, const Matrix &h) {
  layer.Validate();
  if (h.rows() != layer.n() || h.cols() != layer.d_in()) {
    throw DimensionError("D-GCN input " + h.ShapeString() + ", expected " +
                         std::to_string(layer.n()) + "x" + std::to_string(layer.d_in()));
  }
  Matrix out(layer.n(), layer.d_out());
  for (int r = 0; r < layer.num_relations(); ++r) {
    Matrix msg = MatMul(MatMul(layer.adjacency[r], h), layer.weights[r]);
    for (int i = 0; i < msg.rows(); ++i)
      for (int j = 0; j < msg.cols(); ++j) out(i, j) += msg(i, j) + layer.biases[r](0, j);
  }
  for (double &x : out.data()) x = Activate(layer.activation, x);
  return out;
}

Matrix GcnStack(const std::vector<DGCNLayer> &layers, const Matrix &h0) {
  for (size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].d_in() != layers[l - 1].d_out()) {
      throw DimensionError("layer " + std::to_string(l) + " expects d_in " +
                           std::to_string(layers[l].d_in()) + " but previous d_out is " +
                           std::to_string(layers[l - 1].d_out()));
    }
  }
  Matrix h = h0;
  for (const auto &layer : layers) h = DgcnForward(layer, h);
  return h;
}

Tape::Var DgcnForward(Tape &tape, const DGCNLayer &layer, const LayerVars &vars, Tape::Var h) {
  layer.Validate();
  const Matrix &hv = tape.value(h);
  if (hv.rows() != layer.n() || hv.cols() != layer.d_in()) {
    throw DimensionError("D-GCN input " + hv.ShapeString() + ", expected " +
                         std::to_string(layer.n()) + "x" + std::to_string(layer.d_in()));
  }
  Tape::Var sum;
  for (int r = 0; r < layer.num_relations(); ++r) {
    Tape::Var a = tape.Constant(layer.adjacency[r]);
    Tape::Var msg = tape.MatMul(tape.MatMul(a, h), vars.weights[r]);
    msg = tape.AddRowBias(msg, vars.biases[r]);
    sum = sum.valid() ? tape.Add(sum, msg) : msg;
  }
  return tape.Activate(sum, layer.activation);
}

}  // namespace tagkg
