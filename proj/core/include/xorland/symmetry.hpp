#pragma once

#include <vector>

#include "xorland/model.hpp"

namespace xorland {

// Discrete symmetries of the network loss: permuting hidden units and
// flipping the sign of a hidden unit (tanh is odd). Both leave the loss,
// gradient norm and Hessian spectrum unchanged.

/// Result hidden unit j takes the weights of input hidden unit perm[j].
WeightVector permute_hidden(const WeightVector& w, const std::vector<int>& perm);

/// Negates w2 row j, bh_j and w1 column j.
WeightVector flip_hidden(const WeightVector& w, int j);

/// Representative of the symmetry orbit: each hidden unit's sign is fixed so
/// its first non-negligible incoming weight (w2 row, then bh) is positive,
/// then units are sorted by (bh, w2 row) descending.
WeightVector canonicalize(const WeightVector& w);

/// The symmetry image of `w` closest to `reference` in Euclidean distance.
/// Exhaustive over hidden permutations for N_h <= 8; per-unit sign choice is
/// independent given the permutation.
WeightVector align_to(const WeightVector& w, const WeightVector& reference);

}  // namespace xorland
