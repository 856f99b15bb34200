#include "fd_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nems::testing {

namespace {

// Long-double re-evaluation of the potentials straight from the circuit
// data. Deliberately independent of nems::u_static and the analytic
// derivative formulas.
long double eval_static(const CircuitSpec& c, long double phi) {
  long double u = 0.0L;
  if (c.inductor_n > 0) {
    const long double nL = c.inductor_n;
    u += nL * nL * (1.0L - std::cos(phi / nL));
  } else {
    u += 0.5L * phi * phi;
  }
  for (const auto& b : c.branches)
    u -= static_cast<long double>(b.n) * static_cast<long double>(b.r) *
         std::cos((phi + static_cast<long double>(b.dc_bias)) /
                  static_cast<long double>(b.n));
  return u;
}

long double eval_driven(const CircuitSpec& c, long double phi) {
  long double u = 0.0L;
  for (const auto& b : c.branches)
    u += static_cast<long double>(b.r) *
         static_cast<long double>(b.ac_ratio) *
         std::sin((phi + static_cast<long double>(b.dc_bias)) /
                  static_cast<long double>(b.n));
  return u;
}

// Fornberg's recursion for finite-difference weights of the n-th derivative
// on the nodes x_j (around x0 = 0); numerically stable for wide stencils.
std::vector<long double> fornberg_weights(int n,
                                          const std::vector<long double>& x) {
  const int nn = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<long double>> c(
      x.size(), std::vector<long double>(n + 1, 0.0L));
  long double c1 = 1.0L;
  long double c4 = x[0];
  c[0][0] = 1.0L;
  for (int i = 1; i <= nn; ++i) {
    const int mn = std::min(i, n);
    long double c2 = 1.0L;
    const long double c5 = c4;
    c4 = x[i];
    for (int j = 0; j <= i - 1; ++j) {
      const long double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<long double> w(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) w[j] = c[j][n];
  return w;
}

template <typename F>
long double apply_stencil(const F& f, long double x, int n, int m,
                          long double h) {
  std::vector<long double> nodes(2 * m + 1);
  for (int j = -m; j <= m; ++j) nodes[j + m] = j * h;
  const auto w = fornberg_weights(n, nodes);
  long double acc = 0.0L;
  for (int j = -m; j <= m; ++j) acc += w[j + m] * f(x + j * h);
  return acc;
}

// Neville extrapolation in h^2 over a short sequence of shrinking steps.
template <typename F>
long double richardson_derivative(const F& f, long double x, int n,
                                  long double h_scale = 1.0L) {
  const int m = n / 2 + 9;
  const int levels = 3;
  std::vector<long double> h(levels), t(levels);
  for (int i = 0; i < levels; ++i) {
    h[i] = h_scale * 0.7L / std::pow(1.4L, static_cast<long double>(i));
    t[i] = apply_stencil(f, x, n, m, h[i]);
  }
  for (int k = 1; k < levels; ++k)
    for (int i = levels - 1; i >= k; --i) {
      const long double r = (h[i - k] / h[i]) * (h[i - k] / h[i]);
      // Neville step for an expansion in even powers of h
      t[i] = t[i] + (t[i] - t[i - 1]) / (std::pow(r, k) - 1.0L);
    }
  return t[levels - 1];
}

// The sampling step can stretch with the slowest angular scale present:
// a branch of n junctions varies on the phi/n scale, so its high
// derivatives shrink as n^-k and a wider stencil keeps the truncation
// unchanged while shrinking the weight magnitudes (roundoff) by n^k.
long double slowest_scale(const CircuitSpec& c) {
  int n_min = std::numeric_limits<int>::max();
  for (const auto& b : c.branches) n_min = std::min(n_min, b.n);
  if (c.branches.empty()) n_min = 1;
  return static_cast<long double>(std::min(n_min, 3));
}

template <typename F>
std::vector<double> fd_series(const F& f, double phi0, int order,
                              long double h_scale) {
  std::vector<double> out(order + 1);
  out[0] = static_cast<double>(f(static_cast<long double>(phi0)));
  for (int n = 1; n <= order; ++n)
    out[n] = static_cast<double>(
        richardson_derivative(f, static_cast<long double>(phi0), n, h_scale));
  return out;
}

} // namespace

std::vector<double> fd_static_coefficients(const CircuitSpec& c, double phi0,
                                           int order) {
  // the quadratic inductor term is a polynomial; any stencil is exact on it
  const long double scale = c.ideal_inductor() ? slowest_scale(c) : 1.0L;
  return fd_series([&](long double x) { return eval_static(c, x); }, phi0,
                   order, scale);
}

std::vector<double> fd_driven_coefficients(const CircuitSpec& c, double phi0,
                                           int order) {
  return fd_series([&](long double x) { return eval_driven(c, x); }, phi0,
                   order, slowest_scale(c));
}

long double fd_derivative(long double (*f)(long double, const void*),
                          const void* ctx, long double x, int n) {
  return richardson_derivative(
      [&](long double v) { return f(v, ctx); }, x, n, 1.0L);
}

double coefficient_scale(const CircuitSpec& c, int n, bool driven) {
  double s = 0.0;
  for (const auto& b : c.branches) {
    const double share = driven ? std::abs(b.ac_ratio) : 1.0;
    s += b.r * share / std::pow(static_cast<double>(b.n), n - 1);
  }
  if (!driven && c.inductor_n > 0)
    s += c.inductor_n / std::pow(static_cast<double>(c.inductor_n), n - 1);
  if (!driven && n == 2) s += 1.0;
  return s;
}

} // namespace nems::testing
