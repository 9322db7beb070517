#ifndef ARTISIM_PARAMS_HPP
#define ARTISIM_PARAMS_HPP

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace artisim {

enum class LoadCondition { Unloaded, Loaded };
enum class ModelKind { Kin, Stm };

std::string_view to_string(LoadCondition c);
std::string_view to_string(ModelKind m);
LoadCondition parse_load_condition(std::string_view s);
ModelKind parse_model_kind(std::string_view s);

class ParamsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometric, inertial, tire and steering constants of a tractor-semitrailer
/// for one loading condition. SI units throughout.
///
/// Longitudinal offsets follow the tractor drive axle as origin: the fifth
/// wheel sits L1c ahead of the drive axle, the trailer axles sit L21/L22/L23
/// behind the fifth wheel.
struct VehicleParams {
  double m1 = 0.0;   // tractor mass [kg]
  double m2 = 0.0;   // trailer mass [kg]
  double J1 = 0.0;   // tractor yaw inertia [kg m^2]
  double J2 = 0.0;   // trailer yaw inertia [kg m^2]
  double a1 = 0.0;   // tractor COG to front axle [m]
  double b1 = 0.0;   // tractor COG to drive axle [m]
  double L1 = 0.0;   // tractor wheelbase [m]
  double L1c = 0.0;  // drive axle to fifth wheel [m]
  double a2 = 0.0;   // trailer COG to fifth wheel [m]
  double b2 = 0.0;   // trailer COG to 2nd trailer axle [m], informational
  double L2 = 0.0;   // fifth wheel to 2nd trailer axle [m]
  double j = 0.0;    // trailer axle spacing [m]
  double Fz2 = 0.0;  // drive axle load [N]
  double Fz3 = 0.0;  // trailer axle 1 load [N]
  double Fz4 = 0.0;  // trailer axle 2 load [N]
  double Fz5 = 0.0;  // trailer axle 3 load [N]
  double f = 0.0;    // normalized cornering stiffness [1/rad]
  double i_s = 0.0;  // steering ratio, wheel angle / road-wheel angle
  double q = 0.0;    // steering asymmetry factor
  double g = 9.81;   // gravitational acceleration [m/s^2]

  // Derived by fill_derived().
  double Fz1 = 0.0;  // front axle load [N], closes the weight balance
  double L21 = 0.0;  // fifth wheel to trailer axle 1 [m]
  double L22 = 0.0;  // fifth wheel to trailer axle 2 [m]
  double L23 = 0.0;  // fifth wheel to trailer axle 3 [m]
  double Lc = 0.0;   // tractor COG to fifth wheel [m], b1 - L1c

  /// Axle loads front to rear.
  [[nodiscard]] std::array<double, 5> axle_loads() const { return {Fz1, Fz2, Fz3, Fz4, Fz5}; }

  bool operator==(const VehicleParams&) const = default;
};

/// Recomputes Fz1, L21..L23 and Lc from the tabulated fields.
void fill_derived(VehicleParams& p);

/// Appendix-table values for a loading condition. The steering ratio depends
/// on the model the parameters are tuned for.
VehicleParams builtin_params(LoadCondition condition, ModelKind model);

/// One human-readable diagnostic per violated invariant; empty when valid.
std::vector<std::string> validate_params(const VehicleParams& p);

/// Writes the tabulated (non-derived) fields as `key = value` lines with
/// round-trip precision.
void write_params(std::ostream& os, const VehicleParams& p);
std::string serialize_params(const VehicleParams& p);

/// Parses the `key = value` format. Every tabulated key is required, derived
/// keys are rejected, and the result must pass validate_params.
VehicleParams parse_params(std::istream& is);
VehicleParams load_params(const std::filesystem::path& path);

}  // namespace artisim

#endif  // ARTISIM_PARAMS_HPP
