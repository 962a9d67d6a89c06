// Reference implementations used only by tests. They follow the textbook
// definitions with plain loops and share no code with the library.

#ifndef TAGKG_TESTS_ORACLES_H_
#define TAGKG_TESTS_ORACLES_H_

#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tagkg/eventuality.h"
#include "tagkg/retrieval.h"
#include "tagkg/tensor.h"

namespace tagkg::oracle {

using EdgeList = std::vector<std::pair<int, int>>;

// Neighbour sets N_i (self included) from a directed edge list.
std::vector<std::vector<int>> Neighbours(int n, const EdgeList &edges, bool symmetrize);

// Per-node evaluation of
//   h_i' = act( sum_r sum_{j in N_i^r} (1/|N_i^r|) W_r^T h_j + b_r ).
Matrix BruteDgcn(const std::vector<std::vector<std::vector<int>>> &neighbours,
                 const std::vector<Matrix> &w, const std::vector<Matrix> &b,
                 Activation act, const Matrix &h);

// Ordinary GCN layer act(D^-1 (A + I) (H W) + b) with the feature transform
// applied before aggregation.
Matrix PlainGcn(int n, const EdgeList &edges, const Matrix &w, const Matrix &b, Activation act,
                const Matrix &h);

double ActivationRef(Activation act, double x);

// Precision at the score threshold of every positive, found by counting.
double BruteAp(const std::vector<double> &scores, const std::vector<double> &truths);
// Pairwise count over all positive/negative pairs.
double BruteAuc(const std::vector<double> &scores, const std::vector<double> &truths);

struct BruteReport {
  double map = 0, mauc = 0, micro = 0, macro = 0;
};
BruteReport BruteEvaluate(const Matrix &scores, const Matrix &truths);

Matrix RandomMatrix(int rows, int cols, std::mt19937_64 &rng, double lo = -1.0, double hi = 1.0);

// Central differences of f around every entry of *m.
Matrix FiniteDifference(Matrix *m, const std::function<double()> &f, double eps);

// Scores every event by definition and sorts: no index involved.
std::vector<ScoredEvent> FullScan(const EventualityGraph &g, const std::vector<std::string> &query,
                                  Scheme scheme, const RetrievalParams &p);

}  // namespace tagkg::oracle

#endif  // TAGKG_TESTS_ORACLES_H_
