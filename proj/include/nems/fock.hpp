#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "nems/circuit.hpp"

namespace nems {

using cplx = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cplx>;
using StateVec = Eigen::VectorXcd;
using DenseOp = Eigen::MatrixXcd;

/// Truncated multi-mode Fock space; mode 0 is the slowest index.
struct FockSpace {
  std::vector<int> dims;

  int dim() const {
    int d = 1;
    for (int m : dims) d *= m;
    return d;
  }
  int n_modes() const { return static_cast<int>(dims.size()); }

  SparseOp lower(int mode) const;  // annihilation
  SparseOp raise(int mode) const;  // creation
  SparseOp number(int mode) const;
  SparseOp identity() const;
  /// lower(mode)^k, built directly.
  SparseOp lower_pow(int mode, int k) const;

  StateVec fock(const std::vector<int>& occupations) const;
  StateVec coherent_1m(int mode_dim, cplx alpha) const; // single-mode vector
  /// Normalized cat (|alpha> + parity|-alpha>), parity +-1, single mode.
  StateVec cat_1m(int mode_dim, cplx alpha, int parity) const;
  /// Kronecker product of per-mode vectors (order matches dims).
  StateVec product(const std::vector<StateVec>& single_mode) const;
};

/// Labeled dense operator on a product space. a a^dag - a^dag a = 1 holds on
/// every Fock level except the truncation edge.
struct FockOperator {
  std::vector<int> dims;
  DenseOp matrix;
  std::string label;
};

FockOperator make_operator(const FockSpace& space, const SparseOp& op,
                           const std::string& label);

/// Parses a product-operator expression: whitespace/'*'-separated factors
/// "a<k>", "ad<k>", "n<k>" with <k> a mode index (default 0), e.g.
/// "ad1 ad1 a0". Used by the scenario JSON loader.
SparseOp parse_operator_expr(const FockSpace& space, const std::string& expr);

} // namespace nems
