#include "nems/fock.hpp"

#include <cmath>
#include <sstream>

namespace nems {

namespace {

// Lift a single-mode triplet list onto the product space.
SparseOp lift(const FockSpace& space, int mode,
              const std::vector<Eigen::Triplet<cplx>>& local) {
  const int nm = space.n_modes();
  if (mode < 0 || mode >= nm) throw validation_error("mode index out of range");
  int left = 1, right = 1;
  for (int m = 0; m < mode; ++m) left *= space.dims[m];
  for (int m = mode + 1; m < nm; ++m) right *= space.dims[m];

  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(local.size() * left * right);
  for (const auto& t : local)
    for (int l = 0; l < left; ++l)
      for (int r = 0; r < right; ++r) {
        const int row = (l * space.dims[mode] + t.row()) * right + r;
        const int col = (l * space.dims[mode] + t.col()) * right + r;
        trips.emplace_back(row, col, t.value());
      }
  SparseOp op(space.dim(), space.dim());
  op.setFromTriplets(trips.begin(), trips.end());
  return op;
}

} // namespace

SparseOp FockSpace::lower(int mode) const { return lower_pow(mode, 1); }

SparseOp FockSpace::lower_pow(int mode, int k) const {
  const int d = dims.at(mode);
  std::vector<Eigen::Triplet<cplx>> local;
  for (int n = k; n < d; ++n) {
    double amp = 1.0;
    for (int j = 0; j < k; ++j) amp *= std::sqrt(static_cast<double>(n - j));
    local.emplace_back(n - k, n, cplx(amp, 0.0));
  }
  return lift(*this, mode, local);
}

SparseOp FockSpace::raise(int mode) const {
  return SparseOp(lower(mode).adjoint());
}

SparseOp FockSpace::number(int mode) const {
  const int d = dims.at(mode);
  std::vector<Eigen::Triplet<cplx>> local;
  for (int n = 0; n < d; ++n)
    local.emplace_back(n, n, cplx(static_cast<double>(n), 0.0));
  return lift(*this, mode, local);
}

SparseOp FockSpace::identity() const {
  SparseOp op(dim(), dim());
  op.setIdentity();
  return op;
}

StateVec FockSpace::fock(const std::vector<int>& occupations) const {
  if (occupations.size() != dims.size())
    throw validation_error("occupation list length mismatch");
  int idx = 0;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (occupations[m] < 0 || occupations[m] >= dims[m])
      throw validation_error("occupation exceeds truncation");
    idx = idx * dims[m] + occupations[m];
  }
  StateVec v = StateVec::Zero(dim());
  v(idx) = 1.0;
  return v;
}

StateVec FockSpace::coherent_1m(int mode_dim, cplx alpha) const {
  StateVec v(mode_dim);
  cplx amp = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < mode_dim; ++n) {
    v(n) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v / v.norm();
}

StateVec FockSpace::cat_1m(int mode_dim, cplx alpha, int parity) const {
  const StateVec plus = coherent_1m(mode_dim, alpha);
  const StateVec minus = coherent_1m(mode_dim, -alpha);
  StateVec v = plus + static_cast<double>(parity) * minus;
  const double n = v.norm();
  if (n < 1e-14) throw validation_error("degenerate cat state");
  return v / n;
}

StateVec FockSpace::product(const std::vector<StateVec>& single_mode) const {
  if (single_mode.size() != dims.size())
    throw validation_error("product needs one vector per mode");
  StateVec acc = StateVec::Ones(1);
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (single_mode[m].size() != dims[m])
      throw validation_error("mode vector length mismatch");
    StateVec next(acc.size() * dims[m]);
    for (int i = 0; i < acc.size(); ++i)
      for (int j = 0; j < dims[m]; ++j)
        next(i * dims[m] + j) = acc(i) * single_mode[m](j);
    acc.swap(next);
  }
  return acc;
}

FockOperator make_operator(const FockSpace& space, const SparseOp& op,
                           const std::string& label) {
  return FockOperator{space.dims, DenseOp(op), label};
}

SparseOp parse_operator_expr(const FockSpace& space, const std::string& expr) {
  SparseOp acc = space.identity();
  std::string token;
  std::istringstream in(expr);
  std::string cleaned = expr;
  for (auto& ch : cleaned)
    if (ch == '*') ch = ' ';
  std::istringstream tokens(cleaned);
  bool any = false;
  while (tokens >> token) {
    any = true;
    bool dagger = false;
    std::string body = token;
    if (body.rfind("ad", 0) == 0) {
      dagger = true;
      body = body.substr(2);
    } else if (body.rfind("a", 0) == 0) {
      body = body.substr(1);
    } else if (body.rfind("n", 0) == 0) {
      const int mode = body.size() > 1 ? std::stoi(body.substr(1)) : 0;
      acc = (acc * space.number(mode)).eval();
      continue;
    } else {
      throw parse_error("unknown operator token '" + token + "'");
    }
    const int mode = body.empty() ? 0 : std::stoi(body);
    acc = (acc * (dagger ? space.raise(mode) : space.lower(mode))).eval();
  }
  if (!any) throw parse_error("empty operator expression");
  return acc;
}

} // namespace nems
