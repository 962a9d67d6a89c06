#ifndef TAGKG_DGCN_H_
#define TAGKG_DGCN_H_

#include <vector>

#include "tagkg/rng.h"
#include "tagkg/tensor.h"

namespace tagkg {

// One relational graph-convolution layer:
//
//   H' = act( sum_r  A_r H W_r + 1 b_r^T )
//
// A_r is the row-normalized, self-looped adjacency of relation r, so
// (A_r H)_i = sum_{j in N_i^r} h_j / |N_i^r|. Every relation has its own
// weight and bias and there is no basis or block decomposition. With a
// single relation this is the ordinary GCN layer.
struct DGCNLayer {
  std::vector<Matrix> adjacency;  // R matrices, n x n
  std::vector<Matrix> weights;    // R matrices, d_in x d_out
  std::vector<Matrix> biases;     // R row vectors, 1 x d_out
  Activation activation = Activation::kLeakyRelu;

  int num_relations() const { return static_cast<int>(adjacency.size()); }
  int n() const { return adjacency.empty() ? 0 : adjacency[0].rows(); }
  int d_in() const { return weights.empty() ? 0 : weights[0].rows(); }
  int d_out() const { return weights.empty() ? 0 : weights[0].cols(); }

  // Throws DimensionError unless the shapes are mutually consistent.
  void Validate() const;

  // Glorot-uniform weights, zero biases.
  static DGCNLayer Create(std::vector<Matrix> adjacency, int d_in, int d_out,
                          Activation activation, Rng &rng);
};

Matrix DgcnForward(const DGCNLayer &layer, const Matrix &h);

// Applies the layers in order. Throws DimensionError if d_out of a layer does
// not match d_in of the next.
Matrix GcnStack(const std::vector<DGCNLayer> &layers, const Matrix &h0);

// Tape handles of one layer's parameters.
struct LayerVars {
  std::vector<Tape::Var> weights;
  std::vector<Tape::Var> biases;
};

// Records the layer on `tape`; adjacencies enter as constants.
Tape::Var DgcnForward(Tape &tape, const DGCNLayer &layer, const LayerVars &vars, Tape::Var h);

// Glorot-uniform d_in x d_out matrix.
Matrix GlorotUniform(int d_in, int d_out, Rng &rng);

}  // namespace tagkg

#endif  // TAGKG_DGCN_H_
