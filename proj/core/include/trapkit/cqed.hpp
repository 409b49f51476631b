#pragma once

// Closed-form cavity QED design math: TEM00 waist, cooperativity, photon
// emission probability, the ion/transition table and C/eta design grids.

#include <stdexcept>
#include <string>
#include <vector>

namespace trapkit {
namespace cqed {

class cavity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CavityGeometry {
  double radius_of_curvature_um = 500.0;  // R_c
  double length_um = 300.0;               // L
  double finesse = 1e5;

  double xi() const { return length_um / (2.0 * radius_of_curvature_um); }
  void require_stable() const {
    const double x = xi();
    if (!(x > 0.0 && x < 1.0)) throw cavity_error("unstable cavity: xi must be in (0,1)");
    if (finesse <= 0.0) throw cavity_error("finesse must be positive");
  }
};

struct TransitionSpec {
  std::string species;
  std::string transition;
  double lambda_um = 0.0;
  double branching_alpha = 0.0;
  double eta_um() const { return branching_alpha * lambda_um; }
};

// TEM00 waist: w0 = (lambda/pi)^(1/2) * (L/2 (Rc - L/2))^(1/4)
double waist_um(const CavityGeometry& g, double lambda_um);

// Cooperativity via finesse and waist: C = 3 alpha F / pi^3 * (lambda/w0)^2
double cooperativity_from_waist(double finesse, double alpha, double lambda_um, double waist_um);

// Closed form: C = 3F/pi^2 * eta / (Rc sqrt(xi(1-xi)))
double cooperativity(const CavityGeometry& g, const TransitionSpec& t);

// P = 2C/(2C+1)
double emission_probability(double C);

// All transitions tabulated for the major ion species.
std::vector<TransitionSpec> species_table();

struct DesignGrid {
  std::vector<double> finesse;       // rows
  std::vector<double> xi;            // cols
  std::vector<double> c_over_eta;    // row-major, 1/um
};

DesignGrid design_grid(double radius_of_curvature_um, double finesse_min, double finesse_max,
                       int n_finesse, double xi_min, double xi_max, int n_xi);

// Smallest finesse with C/eta >= threshold at the given xi.
double finesse_for_c_over_eta(double radius_of_curvature_um, double xi, double threshold_per_um);

} // namespace cqed
} // namespace trapkit
