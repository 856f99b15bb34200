#pragma once

#include <vector>

#include "nems/circuit.hpp"

namespace nems::testing {

/// Independent finite-difference route to the Taylor coefficients: the
/// potential is re-evaluated from the circuit description in long double
/// (no shared code with the production expansion) and differentiated with
/// wide high-order central stencils plus one Richardson step.
///
/// Returns c_n for n = 0..order of the static potential about phi0.
std::vector<double> fd_static_coefficients(const CircuitSpec& c, double phi0,
                                           int order);

/// Same for the first-order driven potential (per unit eps).
std::vector<double> fd_driven_coefficients(const CircuitSpec& c, double phi0,
                                           int order);

/// n-th derivative of a scalar callable; exposed for oracle self-tests.
long double fd_derivative(long double (*f)(long double, const void*),
                          const void* ctx, long double x, int n);

/// Natural magnitude of the order-n coefficient (sum of branch scales);
/// used to form a meaningful relative error when cancellations make the
/// coefficient itself small.
double coefficient_scale(const CircuitSpec& c, int n, bool driven);

} // namespace nems::testing
