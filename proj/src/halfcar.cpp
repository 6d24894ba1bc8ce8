#include "roves/halfcar.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "roves/error.hpp"

namespace roves::halfcar {

void VehicleParams::validate() const {
  const std::array<std::pair<const char*, double>, 12> fields{{
      {"sprung_mass", sprung_mass},
      {"pitch_inertia", pitch_inertia},
      {"front_arm", front_arm},
      {"rear_arm", rear_arm},
      {"front_unsprung_mass", front_unsprung_mass},
      {"rear_unsprung_mass", rear_unsprung_mass},
      {"front_spring", front_spring},
      {"rear_spring", rear_spring},
      {"front_damper", front_damper},
      {"rear_damper", rear_damper},
      {"front_tire", front_tire},
      {"rear_tire", rear_tire},
  }};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value) || value <= 0.0) {
      throw InputError(fmt::format("vehicle parameter {} must be finite and > 0 (got {})",
                                   name, value));
    }
  }
}

VehicleParams VehicleParams::ego() {
  return {.sprung_mass = 1200.0,
          .pitch_inertia = 1800.0,
          .front_arm = 1.2,
          .rear_arm = 1.5,
          .front_unsprung_mass = 54.0,
          .rear_unsprung_mass = 54.0,
          .front_spring = 18000.0,
          .rear_spring = 18000.0,
          .front_damper = 3200.0,
          .rear_damper = 3200.0,
          .front_tire = 180000.0,
          .rear_tire = 180000.0};
}

VehicleParams VehicleParams::front_vehicle() {
  return {.sprung_mass = 2600.0,
          .pitch_inertia = 4800.0,
          .front_arm = 1.1,
          .rear_arm = 1.9,
          .front_unsprung_mass = 110.0,
          .rear_unsprung_mass = 110.0,
          .front_spring = 52000.0,
          .rear_spring = 52000.0,
          .front_damper = 6500.0,
          .rear_damper = 6500.0,
          .front_tire = 380000.0,
          .rear_tire = 380000.0};
}

std::optional<VehicleParams> preset(std::string_view name) {
  if (name == "ego") return VehicleParams::ego();
  if (name == "front") return VehicleParams::front_vehicle();
  return std::nullopt;
}

std::array<double, 8> HalfCarState::to_array() const {
  return {z_s, theta, z_uf, z_ur, zdot_s, thetadot, zdot_uf, zdot_ur};
}

HalfCarState HalfCarState::from_array(const std::array<double, 8>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

bool HalfCarState::is_finite() const {
  const auto v = to_array();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// Road excitation

RoadExcitation RoadExcitation::constant(double front, double rear) {
  return RoadExcitation(
      [front, rear](double) { return ContactHeights{front, rear}; },
      fmt::format("constant(front={}, rear={})", front, rear),
      std::numeric_limits<double>::infinity());
}

RoadExcitation RoadExcitation::analytic(Profile profile, std::string description) {
  return RoadExcitation(std::move(profile), std::move(description),
                        std::numeric_limits<double>::infinity());
}

RoadExcitation RoadExcitation::sampled(double start_time, double step,
                                       std::vector<ContactHeights> samples,
                                       std::string description) {
  if (samples.empty()) throw InputError("sampled excitation needs at least one sample");
  if (!(step > 0.0)) throw InputError("sampled excitation step must be > 0");
  const double end = start_time + step * static_cast<double>(samples.size() - 1);
  auto series = std::make_shared<const std::vector<ContactHeights>>(std::move(samples));
  Profile profile = [series, start_time, step](double t) {
    const auto& s = *series;
    const double pos = (t - start_time) / step;
    if (pos <= 0.0) return s.front();
    const auto last = static_cast<double>(s.size() - 1);
    if (pos >= last) return s.back();
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double w = pos - static_cast<double>(i);
    return ContactHeights{s[i].front + w * (s[i + 1].front - s[i].front),
                          s[i].rear + w * (s[i + 1].rear - s[i].rear)};
  };
  return RoadExcitation(std::move(profile), std::move(description), end);
}

RoadExcitation RoadExcitation::traversal(std::function<double(double)> road_profile,
                                         double speed, double start_x,
                                         const VehicleParams& params,
                                         std::string description) {
  const double lf = params.front_arm;
  const double lr = params.rear_arm;
  return analytic(
      [road = std::move(road_profile), speed, start_x, lf, lr](double t) {
        const double x = start_x + speed * t;
        return ContactHeights{road(x + lf), road(x - lr)};
      },
      std::move(description));
}

RoadExcitation RoadExcitation::scaled(double factor) const {
  auto base = profile_;
  return RoadExcitation(
      [base, factor](double t) {
        const auto h = base(t);
        return ContactHeights{factor * h.front, factor * h.rear};
      },
      fmt::format("{} x {}", factor, description_), end_time_);
}

double half_sine_bump(double x, double amplitude, double length, double start) {
  if (x < start || x > start + length) return 0.0;
  return amplitude * std::sin(std::numbers::pi * (x - start) / length);
}

// ---------------------------------------------------------------------------
// Dynamics

StateDerivative derivatives(const HalfCarState& s, ContactHeights road,
                            const VehicleParams& p) {
  if (!s.is_finite() || !std::isfinite(road.front) || !std::isfinite(road.rear)) {
    throw InputError("half-car derivatives: non-finite state or road input");
  }
  // Suspension deflections and deflection rates at the two axles.
  const double defl_f = s.z_s - s.z_uf - p.front_arm * s.theta;
  const double defl_r = s.z_s - s.z_ur + p.rear_arm * s.theta;
  const double rate_f = s.zdot_s - s.zdot_uf - p.front_arm * s.thetadot;
  const double rate_r = s.zdot_s - s.zdot_ur + p.rear_arm * s.thetadot;

  const double force_f = p.front_spring * defl_f + p.front_damper * rate_f;
  const double force_r = p.rear_spring * defl_r + p.rear_damper * rate_r;

  const double zddot_s = (-force_f - force_r) / p.sprung_mass;
  const double thetaddot = (p.front_arm * force_f - p.rear_arm * force_r) / p.pitch_inertia;
  const double zddot_uf =
      (force_f - p.front_tire * (s.z_uf - road.front)) / p.front_unsprung_mass;
  const double zddot_ur =
      (force_r - p.rear_tire * (s.z_ur - road.rear)) / p.rear_unsprung_mass;

  return {s.zdot_s, s.thetadot, s.zdot_uf, s.zdot_ur,
          zddot_s,  thetaddot,  zddot_uf,  zddot_ur};
}

namespace {

HalfCarState advance(const HalfCarState& s, const StateDerivative& k, double h) {
  auto v = s.to_array();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += h * k[i];
  return HalfCarState::from_array(v);
}

}  // namespace

HalfCarState rk4_step(const HalfCarState& state, double t, double dt,
                      const RoadExcitation& excitation, const VehicleParams& params) {
  const auto road_0 = excitation.at(t);
  const auto road_half = excitation.at(t + 0.5 * dt);
  const auto road_1 = excitation.at(t + dt);

  const auto k1 = derivatives(state, road_0, params);
  const auto k2 = derivatives(advance(state, k1, 0.5 * dt), road_half, params);
  const auto k3 = derivatives(advance(state, k2, 0.5 * dt), road_half, params);
  const auto k4 = derivatives(advance(state, k3, dt), road_1, params);

  auto v = state.to_array();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return HalfCarState::from_array(v);
}

double mechanical_energy(const HalfCarState& s, ContactHeights road,
                         const VehicleParams& p) {
  const double kinetic = 0.5 * p.sprung_mass * s.zdot_s * s.zdot_s +
                         0.5 * p.pitch_inertia * s.thetadot * s.thetadot +
                         0.5 * p.front_unsprung_mass * s.zdot_uf * s.zdot_uf +
                         0.5 * p.rear_unsprung_mass * s.zdot_ur * s.zdot_ur;
  const double defl_f = s.z_s - s.z_uf - p.front_arm * s.theta;
  const double defl_r = s.z_s - s.z_ur + p.rear_arm * s.theta;
  const double tire_f = s.z_uf - road.front;
  const double tire_r = s.z_ur - road.rear;
  const double elastic = 0.5 * p.front_spring * defl_f * defl_f +
                         0.5 * p.rear_spring * defl_r * defl_r +
                         0.5 * p.front_tire * tire_f * tire_f +
                         0.5 * p.rear_tire * tire_r * tire_r;
  return kinetic + elastic;
}

SimulationResult simulate(const HalfCarState& initial, const RoadExcitation& excitation,
                          const VehicleParams& params, double t_end, double dt,
                          const SimulationOptions& options) {
  params.validate();
  if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end) {
    throw InputError(fmt::format("simulate: need t_end > 0 and 0 < dt <= t_end (t_end={}, dt={})",
                                 t_end, dt));
  }
  if (!initial.is_finite()) throw InputError("simulate: non-finite initial state");
  if (excitation.end_time() < t_end - 1e-9) {
    throw InputError(fmt::format("simulate: excitation '{}' ends at {} s before t_end = {} s",
                                 excitation.description(), excitation.end_time(), t_end));
  }

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  SimulationResult result;
  result.params = params;
  result.dt = dt;
  result.excitation = excitation.description();
  result.time.reserve(steps + 1);
  result.states.reserve(steps + 1);
  result.time.push_back(0.0);
  result.states.push_back(initial);

  HalfCarState state = initial;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    state = rk4_step(state, t, dt, excitation, params);
    const auto v = state.to_array();
    for (std::size_t c = 0; c < v.size(); ++c) {
      if (!std::isfinite(v[c]) || std::abs(v[c]) > options.divergence_bound) {
        throw SimulationDiverged(
            i + 1, t + dt,
            fmt::format("simulation diverged at step {} (t = {} s): state component {} = {} "
                        "exceeds bound {}",
                        i + 1, t + dt, c, v[c], options.divergence_bound));
      }
    }
    result.time.push_back(static_cast<double>(i + 1) * dt);
    result.states.push_back(state);
  }
  return result;
}

void write_csv(const SimulationResult& result, std::ostream& out) {
  out << "t,z_s,theta,z_uf,z_ur,zdot_s,thetadot,zdot_uf,zdot_ur\n";
  for (std::size_t i = 0; i < result.size(); ++i) {
    const auto& s = result.states[i];
    out << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n",
                       result.time[i], s.z_s, s.theta, s.z_uf, s.z_ur, s.zdot_s,
                       s.thetadot, s.zdot_uf, s.zdot_ur);
  }
}

SimulationResult read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("t,z_s,theta,z_uf,z_ur,zdot_s,thetadot,zdot_uf,zdot_ur", 0) != 0) {
    throw InputError("simulation CSV: missing or unexpected header");
  }
  SimulationResult result{};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 9> row{};
    std::istringstream fields(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(fields, cell, ',')) {
      if (n >= row.size()) break;
      try {
        row[n++] = std::stod(cell);
      } catch (const std::exception&) {
        throw InputError(fmt::format("simulation CSV line {}: bad number '{}'", line_no, cell));
      }
    }
    if (n != row.size()) {
      throw InputError(fmt::format("simulation CSV line {}: expected 9 columns", line_no));
    }
    result.time.push_back(row[0]);
    result.states.push_back(HalfCarState::from_array(
        {row[1], row[2], row[3], row[4], row[5], row[6], row[7], row[8]}));
  }
  if (result.time.size() >= 2) result.dt = result.time[1] - result.time[0];
  return result;
}

}  // namespace roves::halfcar
