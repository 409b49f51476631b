#include "trapkit/cqed.hpp"

#include <cmath>

#include "trapkit/constants.hpp"

namespace trapkit {
namespace cqed {

double waist_um(const CavityGeometry& g, double lambda_um) {
  g.require_stable();
  const double half = 0.5 * g.length_um;
  return std::sqrt(lambda_um / kPi) * std::pow(half * (g.radius_of_curvature_um - half), 0.25);
}

double cooperativity_from_waist(double finesse, double alpha, double lambda_um, double w0) {
  return 3.0 * alpha * finesse / (kPi * kPi * kPi) * (lambda_um / w0) * (lambda_um / w0);
}

double cooperativity(const CavityGeometry& g, const TransitionSpec& t) {
  g.require_stable();
  const double x = g.xi();
  return 3.0 * g.finesse / (kPi * kPi) * t.eta_um() /
         (g.radius_of_curvature_um * std::sqrt(x * (1.0 - x)));
}

double emission_probability(double C) {
  if (C < 0.0) throw cavity_error("cooperativity must be non-negative");
  return 2.0 * C / (2.0 * C + 1.0);
}

std::vector<TransitionSpec> species_table() {
  return {
      {"Ca+", "S1/2-P1/2", 0.397, 0.936},
      {"Ca+", "D5/2-P3/2", 0.854, 0.059},
      {"Sr+", "S1/2-P1/2", 0.422, 0.941},
      {"Sr+", "D5/2-P3/2", 1.033, 0.053},
      {"Ba+", "S1/2-P1/2", 0.493, 0.729},
      {"Ba+", "D5/2-P3/2", 0.614, 0.215},
      {"Yb+", "S1/2-P1/2", 0.370, 0.995},
      {"Yb+", "D3/2-D[3/2]1/2", 0.935, 0.018},
  };
}

DesignGrid design_grid(double rc, double f_min, double f_max, int nf, double xi_min,
                       double xi_max, int nxi) {
  DesignGrid g;
  g.finesse.resize(size_t(nf));
  g.xi.resize(size_t(nxi));
  g.c_over_eta.resize(size_t(nf) * size_t(nxi));
  for (int i = 0; i < nf; ++i)
    g.finesse[size_t(i)] = nf == 1 ? f_min
                                   : f_min * std::pow(f_max / f_min, double(i) / (nf - 1));
  for (int j = 0; j < nxi; ++j)
    g.xi[size_t(j)] = nxi == 1 ? xi_min : xi_min + (xi_max - xi_min) * double(j) / (nxi - 1);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nxi; ++j) {
      const double x = g.xi[size_t(j)];
      g.c_over_eta[size_t(i) * size_t(nxi) + size_t(j)] =
          3.0 * g.finesse[size_t(i)] / (kPi * kPi) / (rc * std::sqrt(x * (1.0 - x)));
    }
  return g;
}

double finesse_for_c_over_eta(double rc, double xi, double threshold) {
  return threshold * kPi * kPi * rc * std::sqrt(xi * (1.0 - xi)) / 3.0;
}

} // namespace cqed
} // namespace trapkit
