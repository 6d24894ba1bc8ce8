#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace roves::halfcar {

/// Physical constants of the 4-DOF half-car model (SI units).
struct VehicleParams {
  double sprung_mass;          // m_s, kg
  double pitch_inertia;        // I_y, kg m^2
  double front_arm;            // l_f, CoM to front axle, m
  double rear_arm;             // l_r, CoM to rear axle, m
  double front_unsprung_mass;  // m_uf, kg
  double rear_unsprung_mass;   // m_ur, kg
  double front_spring;         // k_sf, N/m
  double rear_spring;          // k_sr, N/m
  double front_damper;         // c_sf, N s/m
  double rear_damper;          // c_sr, N s/m
  double front_tire;           // k_tf, N/m
  double rear_tire;            // k_tr, N/m

  double wheelbase() const { return front_arm + rear_arm; }

  /// Throws InputError unless every field is finite and strictly positive.
  void validate() const;

  /// Passenger sedan used as the ego vehicle.
  static VehicleParams ego();
  /// Light truck used as the leading vehicle.
  static VehicleParams front_vehicle();
};

/// Looks up a shipped preset ("ego" or "front").
std::optional<VehicleParams> preset(std::string_view name);

/// Half-car state. Pitch sign convention: positive theta lowers the front body
/// corner, i.e. the front suspension deflection is z_s - z_uf - l_f * theta.
struct HalfCarState {
  double z_s = 0.0;
  double theta = 0.0;
  double z_uf = 0.0;
  double z_ur = 0.0;
  double zdot_s = 0.0;
  double thetadot = 0.0;
  double zdot_uf = 0.0;
  double zdot_ur = 0.0;

  std::array<double, 8> to_array() const;
  static HalfCarState from_array(const std::array<double, 8>& v);
  bool is_finite() const;
};

using StateDerivative = std::array<double, 8>;

/// Road heights under the front and rear contact points (m).
struct ContactHeights {
  double front = 0.0;
  double rear = 0.0;
};

/// Time-indexed road input (z_rf, z_rr). Either analytic or a uniformly
/// sampled series interpolated linearly; sampled series hold their end values
/// outside the sampled span but report that span through `end_time()`.
class RoadExcitation {
 public:
  using Profile = std::function<ContactHeights(double)>;

  static RoadExcitation constant(double front, double rear);
  static RoadExcitation analytic(Profile profile, std::string description);
  static RoadExcitation sampled(double start_time, double step,
                                std::vector<ContactHeights> samples,
                                std::string description);

  /// Constant-speed pass over a longitudinal road profile h(x). The front
  /// contact sits at x0 + v t + l_f and the rear at x0 + v t - l_r.
  static RoadExcitation traversal(std::function<double(double)> road_profile,
                                  double speed, double start_x,
                                  const VehicleParams& params,
                                  std::string description);

  ContactHeights at(double t) const { return profile_(t); }
  RoadExcitation scaled(double factor) const;

  /// Last time for which the input is defined; infinite for analytic inputs.
  double end_time() const { return end_time_; }
  const std::string& description() const { return description_; }

 private:
  RoadExcitation(Profile profile, std::string description, double end_time)
      : profile_(std::move(profile)),
        description_(std::move(description)),
        end_time_(end_time) {}

  Profile profile_;
  std::string description_;
  double end_time_;
};

/// Half-sine bump of the given amplitude and length starting at `start`:
/// h(x) = A sin(pi (x - start) / length) on [start, start + length], else 0.
/// A negative amplitude gives a dip.
double half_sine_bump(double x, double amplitude, double length, double start);

/// Right-hand side of the half-car equations of motion.
StateDerivative derivatives(const HalfCarState& state, ContactHeights road,
                            const VehicleParams& params);

/// Classical fourth-order Runge-Kutta step, road sampled at t, t+dt/2, t+dt.
HalfCarState rk4_step(const HalfCarState& state, double t, double dt,
                      const RoadExcitation& excitation,
                      const VehicleParams& params);

/// Kinetic energy of all four bodies plus the elastic energy stored in the
/// suspension and tire springs.
double mechanical_energy(const HalfCarState& state, ContactHeights road,
                         const VehicleParams& params);

struct SimulationOptions {
  double divergence_bound = 1e6;
};

struct SimulationResult {
  std::vector<double> time;
  std::vector<HalfCarState> states;
  VehicleParams params;
  double dt = 0.0;
  std::string excitation;

  std::size_t size() const { return time.size(); }
};

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(std::size_t step, double time, const std::string& what)
      : std::runtime_error(what), step_(step), time_(time) {}
  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// Integrates on the uniform grid t_i = i * dt, i = 0..n with
/// n = ceil(t_end / dt) (tolerating round-off so that exact multiples are not
/// overshot).
SimulationResult simulate(const HalfCarState& initial,
                          const RoadExcitation& excitation,
                          const VehicleParams& params, double t_end, double dt,
                          const SimulationOptions& options = {});

/// CSV with header t,z_s,theta,z_uf,z_ur,zdot_s,thetadot,zdot_uf,zdot_ur,
/// 9 significant digits.
void write_csv(const SimulationResult& result, std::ostream& out);

/// Reads the CSV produced by write_csv. Only time and states are restored.
SimulationResult read_csv(std::istream& in);

}  // namespace roves::halfcar
