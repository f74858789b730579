#pragma once

#include <vector>

#include "brp/pl_path.hpp"
#include "brp/rational.hpp"
#include "brp/rng.hpp"
#include "brp/vector_field.hpp"

namespace brp::harness {

// Driver on [0,1] with equispaced breakpoints and iid uniform increments.
PiecewiseLinearPath<double> random_path(CounterRng& rng, int dim, int segments, double amp);

// Same construction over small rationals, increments k/8 with k in [-4,4].
PiecewiseLinearPath<Rational> random_rational_path(CounterRng& rng, int dim, int segments);

// Dense polynomial field of the given total degree with uniform coefficients.
// Every direction is then shrunk so its sup norm over the box is at most cap;
// directions already below cap are left untouched.
PolyVectorField<double> random_field(CounterRng& rng, int e, int d, int degree,
                                     double coeff_amp, double box_radius, double cap);

// Rational coefficients k/4 with k in [-3,3], no normalization.
PolyVectorField<Rational> random_rational_field(CounterRng& rng, int e, int d, int degree,
                                                double box_radius);

// All exponent vectors in e variables with total degree <= degree, graded order.
std::vector<std::vector<int>> exponents_up_to(int e, int degree);

}  // namespace brp::harness
