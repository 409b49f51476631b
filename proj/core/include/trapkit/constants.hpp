#pragma once

// Physical constants and unit conventions.
//
// Internal units: lengths in micrometres, potentials in volts, time in
// seconds, charge in coulombs. Electric fields are V/um internally and
// converted to V/m at the API boundary where noted.

#include <cmath>
#include <stdexcept>
#include <string>

namespace trapkit {

inline constexpr double kElementaryCharge = 1.602176634e-19;   // C
inline constexpr double kEpsilon0_SI      = 8.8541878128e-12;  // F/m
inline constexpr double kEpsilon0_um      = 8.8541878128e-18;  // F/um = C/(V um)
inline constexpr double kBoltzmann        = 1.380649e-23;      // J/K
inline constexpr double kHbar             = 1.054571817e-34;   // J s
inline constexpr double kAmu              = 1.66053906660e-27; // kg
inline constexpr double kPi               = 3.14159265358979323846;

// 1/(4 pi eps0) with lengths in um: multiply by charge in C to get V*um.
inline constexpr double kCoulomb_um = 1.0 / (4.0 * kPi * kEpsilon0_um);

inline constexpr double um_to_m = 1e-6;
inline constexpr double m_to_um = 1e6;
// field conversion: V/um -> V/m
inline constexpr double Vum_to_Vm = 1e6;

struct IonSpecies {
  std::string name;
  double mass_kg = 0.0;
  double charge_C = kElementaryCharge;

  static IonSpecies from_amu(const std::string& name, double amu, int charge_e = 1) {
    if (amu <= 0.0) throw std::invalid_argument("ion mass must be positive");
    return IonSpecies{name, amu * kAmu, charge_e * kElementaryCharge};
  }
  // 40Ca+, the species used for all pseudopotential work here
  static IonSpecies Ca40() { return from_amu("Ca40", 39.9626); }
};

} // namespace trapkit
