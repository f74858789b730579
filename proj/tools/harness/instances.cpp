#include "harness/instances.hpp"

#include <algorithm>

namespace brp::harness {

std::vector<std::vector<int>> exponents_up_to(int e, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(e, 0);
  // counts in mixed radix, keeps only total degree <= degree
  while (true) {
    int total = 0;
    for (int c : cur) total += c;
    if (total <= degree) out.push_back(cur);
    int j = 0;
    while (j < e && ++cur[j] > degree) cur[j++] = 0;
    if (j == e) break;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int c : a) da += c;
    for (int c : b) db += c;
    if (da != db) return da < db;
    return a < b;
  });
  return out;
}

PiecewiseLinearPath<double> random_path(CounterRng& rng, int dim, int segments, double amp) {
  std::vector<double> times(segments + 1);
  std::vector<std::vector<double>> points(segments + 1, std::vector<double>(dim, 0.0));
  for (int k = 0; k <= segments; ++k) times[k] = static_cast<double>(k) / segments;
  for (int k = 1; k <= segments; ++k)
    for (int j = 0; j < dim; ++j) points[k][j] = points[k - 1][j] + rng.uniform(-amp, amp);
  return PiecewiseLinearPath<double>(times, points);
}

PiecewiseLinearPath<Rational> random_rational_path(CounterRng& rng, int dim, int segments) {
  std::vector<Rational> times(segments + 1);
  std::vector<std::vector<Rational>> points(segments + 1, std::vector<Rational>(dim, 0));
  for (int k = 0; k <= segments; ++k) times[k] = Rational(k, segments);
  for (int k = 1; k <= segments; ++k)
    for (int j = 0; j < dim; ++j)
      points[k][j] = points[k - 1][j] + Rational(rng.uniform_int(-4, 4), 8);
  return PiecewiseLinearPath<Rational>(times, points);
}

PolyVectorField<double> random_field(CounterRng& rng, int e, int d, int degree,
                                     double coeff_amp, double box_radius, double cap) {
  auto exps = exponents_up_to(e, degree);
  PolyVectorField<double> f;
  f.e = e;
  f.d = d;
  if (box_radius > 0) f.box.assign(e, {-box_radius, box_radius});
  f.comp.assign(d, PolyMap<double>(e, Polynomial<double>(e)));
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < e; ++i)
      for (const auto& m : exps) f.comp[a][i].add_term(m, rng.uniform(-coeff_amp, coeff_amp));
  if (cap > 0) {
    for (int a = 1; a <= d; ++a) {
      double s = sup_norm(f.restriction(a));
      if (s > cap) {
        double scale = cap / s;
        for (int i = 0; i < e; ++i) f.comp[a - 1][i] *= scale;
      }
    }
  }
  return f;
}

PolyVectorField<Rational> random_rational_field(CounterRng& rng, int e, int d, int degree,
                                                double box_radius) {
  auto exps = exponents_up_to(e, degree);
  PolyVectorField<Rational> f;
  f.e = e;
  f.d = d;
  if (box_radius > 0) f.box.assign(e, {-box_radius, box_radius});
  f.comp.assign(d, PolyMap<Rational>(e, Polynomial<Rational>(e)));
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < e; ++i)
      for (const auto& m : exps) f.comp[a][i].add_term(m, Rational(rng.uniform_int(-3, 3), 4));
  return f;
}

}  // namespace brp::harness
