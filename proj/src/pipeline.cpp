#include "roves/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "roves/error.hpp"
#include "roves/image.hpp"
#include "roves/metrics.hpp"
#include "roves/pose.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace roves::pipeline {

// ---------------------------------------------------------------------------
// Config

halfcar::VehicleParams VehicleSpec::resolve() const {
  if (params) {
    params->validate();
    return *params;
  }
  const auto p = halfcar::preset(preset);
  if (!p) throw InputError(fmt::format("unknown vehicle preset '{}' (expected ego or front)", preset));
  return *p;
}

fs::path PipelineConfig::resolve(const fs::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

fs::path PipelineConfig::out(const std::string& name) const { return resolve(output_dir) / name; }

void PipelineConfig::validate() const {
  dims.validate();
  placement.validate();
  scale.validate();
  transfer.validate();
  if (!(opacity > 0.0 && opacity < 1.0)) throw InputError("opacity must lie in (0, 1)");
  if (!(merge_margin >= 0.0)) throw InputError("merge margin must be >= 0");
  if (!(cell_size > 0.0)) throw InputError("cell_size must be > 0");
  if (!(plane_ring >= 0.0)) throw InputError("plane_ring must be >= 0");
  if (!(dt > 0.0)) throw InputError("dt must be > 0");
  if (!(divergence_bound > 0.0)) throw InputError("divergence_bound must be > 0");
  if (!(frame_rate > 0.0)) throw InputError("frame_rate must be > 0");
  if (lift.stride < 1) throw InputError("lift stride must be >= 1");
  if (plane) plane->validate();
  for (const auto& [id, spec] : vehicles) spec.resolve();
}

namespace {

template <typename T>
void read_opt(const json& obj, const char* key, T& target) {
  if (obj.contains(key) && !obj.at(key).is_null()) target = obj.at(key).get<T>();
}

Eigen::Vector3d vec3(const json& j, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw InputError(fmt::format("{} needs 3 numbers", what));
  return {v[0], v[1], v[2]};
}

halfcar::VehicleParams params_from_json(const json& j) {
  halfcar::VehicleParams p{};
  p.sprung_mass = j.at("m_s").get<double>();
  p.pitch_inertia = j.at("I_y").get<double>();
  p.front_arm = j.at("l_f").get<double>();
  p.rear_arm = j.at("l_r").get<double>();
  p.front_unsprung_mass = j.at("m_uf").get<double>();
  p.rear_unsprung_mass = j.at("m_ur").get<double>();
  p.front_spring = j.at("k_sf").get<double>();
  p.rear_spring = j.at("k_sr").get<double>();
  p.front_damper = j.at("c_sf").get<double>();
  p.rear_damper = j.at("c_sr").get<double>();
  p.front_tire = j.at("k_tf").get<double>();
  p.rear_tire = j.at("k_tr").get<double>();
  return p;
}

json params_to_json(const halfcar::VehicleParams& p) {
  return {{"m_s", p.sprung_mass},        {"I_y", p.pitch_inertia},
          {"l_f", p.front_arm},          {"l_r", p.rear_arm},
          {"m_uf", p.front_unsprung_mass}, {"m_ur", p.rear_unsprung_mass},
          {"k_sf", p.front_spring},      {"k_sr", p.rear_spring},
          {"c_sf", p.front_damper},      {"c_sr", p.rear_damper},
          {"k_tf", p.front_tire},        {"k_tr", p.rear_tire}};
}

}  // namespace

PipelineConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  PipelineConfig c;
  c.base_dir = base_dir;
  try {
    auto path_opt = [&](const char* key, fs::path& target) {
      if (doc.contains(key) && !doc.at(key).is_null()) target = doc.at(key).get<std::string>();
    };
    path_opt("texture", c.texture);
    path_opt("mask", c.mask);
    path_opt("depth", c.depth);
    path_opt("background", c.background);
    path_opt("poses", c.poses);
    path_opt("reference", c.reference);
    path_opt("output_dir", c.output_dir);
    if (doc.contains("reference_mask") && !doc["reference_mask"].is_null()) {
      c.reference_mask = doc["reference_mask"].get<std::string>();
    }

    if (doc.contains("dims")) {
      const auto& d = doc["dims"];
      read_opt(d, "length", c.dims.length);
      read_opt(d, "width", c.dims.width);
      read_opt(d, "height", c.dims.height);
    }
    if (doc.contains("placement")) {
      const auto& pl = doc["placement"];
      if (pl.contains("p")) c.placement.translation = vec3(pl["p"], "placement.p");
      if (pl.contains("q")) {
        const auto q = pl["q"].get<std::vector<double>>();
        if (q.size() != 4) throw InputError("placement.q needs 4 numbers (w, x, y, z)");
        c.placement.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]).normalized().toRotationMatrix();
      }
    }
    if (doc.contains("lift")) {
      const auto& l = doc["lift"];
      read_opt(l, "stride", c.lift.stride);
      read_opt(l, "invert_depth", c.lift.invert_depth);
      if (l.contains("clip_quantiles") && !l["clip_quantiles"].is_null()) {
        const auto q = l["clip_quantiles"].get<std::vector<double>>();
        if (q.size() != 2) throw InputError("lift.clip_quantiles needs [lo, hi]");
        c.lift.clip_quantiles = std::make_pair(q[0], q[1]);
      }
    }
    if (doc.contains("scale")) {
      const auto& s = doc["scale"];
      read_opt(s, "sigma", c.scale.sigma);
      read_opt(s, "epsilon", c.scale.epsilon);
      read_opt(s, "k", c.scale.k);
    }
    read_opt(doc, "opacity", c.opacity);
    if (doc.contains("merge")) {
      const auto& m = doc["merge"];
      read_opt(m, "margin", c.merge_margin);
      if (m.contains("height_band") && !m["height_band"].is_null()) {
        const auto b = m["height_band"].get<std::vector<double>>();
        if (b.size() != 2) throw InputError("merge.height_band needs [lo, hi]");
        c.merge_height_band = std::make_pair(b[0], b[1]);
      }
    }
    if (doc.contains("transfer")) {
      const auto& t = doc["transfer"];
      read_opt(t, "enabled", c.transfer_enabled);
      read_opt(t, "lambda", c.transfer.lambda);
      read_opt(t, "beta", c.transfer.beta);
      read_opt(t, "clip_source", c.clip_source);
      if (t.contains("space")) {
        const auto s = t["space"].get<std::string>();
        if (s == "lab") c.transfer_space = colorxfer::ColorSpace::kLab;
        else if (s == "rgb") c.transfer_space = colorxfer::ColorSpace::kRgb;
        else throw InputError(fmt::format("transfer.space must be lab or rgb (got {})", s));
      }
      if (t.contains("reference_source")) {
        const auto s = t["reference_source"].get<std::string>();
        if (s == "image") c.reference_source = ReferenceSource::kImage;
        else if (s == "pointcloud") c.reference_source = ReferenceSource::kPointCloud;
        else throw InputError(fmt::format("transfer.reference_source must be image or pointcloud (got {})", s));
      }
    }
    if (doc.contains("heightfield")) {
      const auto& h = doc["heightfield"];
      read_opt(h, "cell_size", c.cell_size);
      read_opt(h, "plane_ring", c.plane_ring);
      if (h.contains("mode")) {
        const auto m = h["mode"].get<std::string>();
        if (m == "max") c.accumulation = heightfield::Accumulation::kMax;
        else if (m == "min") c.accumulation = heightfield::Accumulation::kMin;
        else throw InputError(fmt::format("heightfield.mode must be max or min (got {})", m));
      }
      if (h.contains("points") && !h["points"].is_null()) {
        c.heightfield_points = h["points"].get<std::string>();
      }
      if (h.contains("plane") && !h["plane"].is_null()) {
        GroundPlane plane;
        plane.normal = vec3(h["plane"].at("normal"), "heightfield.plane.normal");
        plane.offset = h["plane"].at("offset").get<double>();
        c.plane = plane;
      }
    }
    if (doc.contains("simulation")) {
      const auto& s = doc["simulation"];
      read_opt(s, "dt", c.dt);
      read_opt(s, "divergence_bound", c.divergence_bound);
    }
    read_opt(doc, "frame_rate", c.frame_rate);
    if (doc.contains("vehicles")) {
      c.vehicles.clear();
      for (const auto& [id, v] : doc["vehicles"].items()) {
        VehicleSpec spec;
        read_opt(v, "preset", spec.preset);
        if (v.contains("params")) spec.params = params_from_json(v["params"]);
        if (v.contains("mount_offset")) spec.mount_offset = vec3(v["mount_offset"], "mount_offset");
        c.vehicles[id] = spec;
      }
    }
  } catch (const json::exception& e) {
    throw InputError(fmt::format("config: {}", e.what()));
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open config {}", path.string()));
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc, fs::absolute(path).parent_path());
}

json config_to_json(const PipelineConfig& c) {
  const Eigen::Quaterniond q(c.placement.rotation);
  json doc = {
      {"texture", c.texture.string()},
      {"mask", c.mask.string()},
      {"depth", c.depth.string()},
      {"background", c.background.string()},
      {"poses", c.poses.string()},
      {"reference", c.reference.string()},
      {"reference_mask", c.reference_mask ? json(c.reference_mask->string()) : json(nullptr)},
      {"output_dir", c.output_dir.string()},
      {"dims", {{"length", c.dims.length}, {"width", c.dims.width}, {"height", c.dims.height}}},
      {"placement",
       {{"p", {c.placement.translation.x(), c.placement.translation.y(), c.placement.translation.z()}},
        {"q", {q.w(), q.x(), q.y(), q.z()}}}},
      {"lift",
       {{"stride", c.lift.stride},
        {"invert_depth", c.lift.invert_depth},
        {"clip_quantiles", c.lift.clip_quantiles
                               ? json({c.lift.clip_quantiles->first, c.lift.clip_quantiles->second})
                               : json(nullptr)}}},
      {"scale", {{"sigma", c.scale.sigma}, {"epsilon", c.scale.epsilon}, {"k", c.scale.k}}},
      {"opacity", c.opacity},
      {"merge",
       {{"margin", c.merge_margin},
        {"height_band", c.merge_height_band
                            ? json({c.merge_height_band->first, c.merge_height_band->second})
                            : json(nullptr)}}},
      {"transfer",
       {{"enabled", c.transfer_enabled},
        {"lambda", c.transfer.lambda},
        {"beta", c.transfer.beta},
        {"space", c.transfer_space == colorxfer::ColorSpace::kLab ? "lab" : "rgb"},
        {"reference_source", c.reference_source == ReferenceSource::kImage ? "image" : "pointcloud"},
        {"clip_source", c.clip_source}}},
      {"heightfield",
       {{"cell_size", c.cell_size},
        {"mode", c.accumulation == heightfield::Accumulation::kMax ? "max" : "min"},
        {"plane_ring", c.plane_ring},
        {"points", c.heightfield_points ? json(c.heightfield_points->string()) : json(nullptr)}}},
      {"simulation", {{"dt", c.dt}, {"divergence_bound", c.divergence_bound}}},
      {"frame_rate", c.frame_rate},
  };
  if (c.plane) {
    doc["heightfield"]["plane"] = {
        {"normal", {c.plane->normal.x(), c.plane->normal.y(), c.plane->normal.z()}},
        {"offset", c.plane->offset}};
  }
  json vehicles = json::object();
  for (const auto& [id, spec] : c.vehicles) {
    json v = {{"preset", spec.preset},
              {"mount_offset", {spec.mount_offset.x(), spec.mount_offset.y(), spec.mount_offset.z()}}};
    if (spec.params) v["params"] = params_to_json(*spec.params);
    vehicles[id] = v;
  }
  doc["vehicles"] = vehicles;
  return doc;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

/// Uniform double in [0, 1) from the raw 64-bit engine output, so fixture
/// bytes do not depend on the standard library's distribution algorithms.
class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double jitter(double amplitude) { return (uniform() - 0.5) * 2.0 * amplitude; }

 private:
  std::mt19937_64 engine_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out << text;
}

}  // namespace

void make_fixtures(const fs::path& dir, const FixtureOptions& o) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw InputError(fmt::format("cannot create fixture directory {}", dir.string()));
  }
  if (o.rows < 3 || o.cols < 3) throw InputError("fixture image must be at least 3x3");
  FixtureRng rng(o.seed);

  // Painted speed-hump texture: yellow/black checkerboard with mild noise.
  image::RgbImage texture{o.cols, o.rows, std::vector<float>(std::size_t{3} * o.rows * o.cols)};
  for (std::uint32_t r = 0; r < o.rows; ++r) {
    for (std::uint32_t c = 0; c < o.cols; ++c) {
      const bool paint = ((r / 8) + (c / 8)) % 2 == 0;
      const double base[3] = {paint ? 0.93 : 0.12, paint ? 0.78 : 0.12, paint ? 0.12 : 0.13};
      for (int ch = 0; ch < 3; ++ch) {
        texture.data[(std::size_t{r} * o.cols + c) * 3 + ch] =
            static_cast<float>(std::clamp(base[ch] + rng.jitter(0.03), 0.0, 1.0));
      }
    }
  }
  image::write_rgb_png(texture, dir / "texture.png");

  // Foreground everywhere except 3x3 corner notches; still spans every row
  // and column.
  image::Mask mask{o.cols, o.rows, std::vector<std::uint8_t>(std::size_t{o.rows} * o.cols, 1)};
  for (std::uint32_t r = 0; r < o.rows; ++r) {
    for (std::uint32_t c = 0; c < o.cols; ++c) {
      const bool edge_r = r < 3 || r + 3 >= o.rows;
      const bool edge_c = c < 3 || c + 3 >= o.cols;
      if (edge_r && edge_c) mask.data[std::size_t{r} * o.cols + c] = 0;
    }
  }
  image::write_mask_png(mask, dir / "mask.png");

  // Half-sine hump along the rows; background pixels carry junk depth that
  // the mask must remove.
  image::GrayImage depth{o.cols, o.rows, std::vector<float>(std::size_t{o.rows} * o.cols)};
  for (std::uint32_t r = 0; r < o.rows; ++r) {
    const double profile = std::sin(std::numbers::pi * r / (o.rows - 1));
    for (std::uint32_t c = 0; c < o.cols; ++c) {
      const bool fg = mask.data[std::size_t{r} * o.cols + c] != 0;
      depth.at(r, c) = fg ? static_cast<float>(std::lround(1000.0 + 60000.0 * profile)) : 65000.0f;
    }
  }
  image::write_gray16_png(depth, dir / "depth.png");

  // Asphalt reference patch.
  const std::uint32_t patch = 64;
  image::RgbImage road{patch, patch, std::vector<float>(std::size_t{3} * patch * patch)};
  for (std::size_t p = 0; p < std::size_t{patch} * patch; ++p) {
    const double grain = rng.jitter(0.08);
    road.data[3 * p] = static_cast<float>(std::clamp(0.34 + grain + rng.jitter(0.01), 0.0, 1.0));
    road.data[3 * p + 1] = static_cast<float>(std::clamp(0.35 + grain + rng.jitter(0.01), 0.0, 1.0));
    road.data[3 * p + 2] = static_cast<float>(std::clamp(0.38 + grain + rng.jitter(0.01), 0.0, 1.0));
  }
  image::write_rgb_png(road, dir / "road.png");

  // Flat road background: 40 m x 8 m grid at 0.1 m spacing.
  gaussians::GaussianCloud background;
  const int nx = 401, ny = 81;
  background.reserve(static_cast<std::size_t>(nx) * ny);
  const auto opacity = static_cast<float>(gaussians::logit(0.9));
  const auto log_scale = static_cast<float>(std::log(0.06));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x = -20.0 + 0.1 * i;
      const double y = -4.0 + 0.1 * j;
      const double z = rng.jitter(0.002);
      const double grain = rng.jitter(0.06);
      background.positions.push_back(
          {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)});
      background.sh_dc.push_back({static_cast<float>(gaussians::rgb_to_dc(0.36 + grain)),
                                  static_cast<float>(gaussians::rgb_to_dc(0.37 + grain)),
                                  static_cast<float>(gaussians::rgb_to_dc(0.40 + grain))});
      background.sh_rest.push_back({});
      background.opacities.push_back(opacity);
      background.log_scales.push_back({log_scale, log_scale, log_scale});
      background.rotations.push_back({1.0f, 0.0f, 0.0f, 0.0f});
    }
  }
  gaussians::save_ply(background, dir / "background.ply");

  // Both vehicles drive straight along +x over the hump at the origin.
  const double rate = 10.0;
  const auto frames = static_cast<std::size_t>(std::llround(o.duration * rate));
  std::vector<pose::PoseSequence> sequences;
  for (const auto& [id, start_x] : {std::pair{"ego", -15.0}, std::pair{"front", -5.0}}) {
    pose::PoseSequence seq{id, {}};
    for (std::size_t k = 0; k <= frames; ++k) {
      const double t = static_cast<double>(k) / rate;
      seq.frames.push_back({t, Eigen::Quaterniond::Identity(),
                            Eigen::Vector3d(start_x + o.speed * t, 0.0, 0.55)});
    }
    sequences.push_back(std::move(seq));
  }
  pose::write_pose_file(sequences, dir / "poses.json");

  PipelineConfig config;
  config.dims = {o.length, o.width, o.amplitude};
  config.frame_rate = rate;
  write_text(dir / "config.json", config_to_json(config).dump(2) + "\n");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<double> sigma, beta, lambda, dt, cell_size;
  std::string preset;
};

/// Stage timings go to stderr so that output files stay byte-deterministic.
class StageClock {
 public:
  void external(const std::string& stage) { std::cerr << fmt::format("[timing] {:<52} (external)\n", stage); }
  void skipped(const std::string& stage) { std::cerr << fmt::format("[timing] {:<52} skipped\n", stage); }
  template <typename F>
  auto run(const std::string& stage, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      report(stage, start);
    } else {
      auto result = body();
      report(stage, start);
      return result;
    }
  }

 private:
  static void report(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << fmt::format("[timing] {:<52} {:.3f} s\n", stage, s);
  }
};

PipelineConfig config_from_flags(const Flags& f) {
  PipelineConfig c = f.config.empty() ? PipelineConfig{} : load_config(f.config);
  if (!f.out.empty()) c.output_dir = fs::absolute(f.out);
  if (f.sigma) c.scale.sigma = *f.sigma;
  if (f.beta) c.transfer.beta = *f.beta;
  if (f.lambda) c.transfer.lambda = *f.lambda;
  if (f.dt) c.dt = *f.dt;
  if (f.cell_size) c.cell_size = *f.cell_size;
  if (!f.preset.empty()) {
    if (!halfcar::preset(f.preset)) {
      throw InputError(fmt::format("unknown preset '{}' (expected ego or front)", f.preset));
    }
    for (auto& [id, spec] : c.vehicles) {
      spec.preset = f.preset;
      spec.params.reset();
    }
  }
  c.validate();
  return c;
}

fs::path require_file(const PipelineConfig& c, const fs::path& p, const char* role) {
  const fs::path full = c.resolve(p);
  if (!fs::is_regular_file(full)) {
    throw InputError(fmt::format("{} file not found: {}", role, full.string()));
  }
  return full;
}

void ensure_output_dir(const PipelineConfig& c) {
  std::error_code ec;
  fs::create_directories(c.resolve(c.output_dir), ec);
  if (ec) throw InputError(fmt::format("cannot create output directory {}", c.resolve(c.output_dir).string()));
}

lift::LocalPointCloud run_lift(const PipelineConfig& c) {
  const auto texture = image::read_rgb_png(require_file(c, c.texture, "texture"));
  const auto mask = image::read_mask_png(require_file(c, c.mask, "mask"));
  const auto depth = image::read_depth(require_file(c, c.depth, "depth"));
  return lift::lift_depth({depth, mask}, c.dims, texture, c.lift);
}

std::vector<colorxfer::Rgb> to_rgb(const std::vector<Eigen::Vector3d>& colors) {
  std::vector<colorxfer::Rgb> out;
  out.reserve(colors.size());
  for (const auto& c : colors) {
    out.push_back({std::clamp(c.x(), 0.0, 1.0), std::clamp(c.y(), 0.0, 1.0), std::clamp(c.z(), 0.0, 1.0)});
  }
  return out;
}

std::vector<colorxfer::Rgb> image_pixels(const image::RgbImage& img, const image::Mask* mask) {
  if (mask && (mask->width != img.width || mask->height != img.height)) {
    throw InputError("reference mask size does not match the reference image");
  }
  std::vector<colorxfer::Rgb> out;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    if (mask && !mask->data[p]) continue;
    out.push_back({img.data[3 * p], img.data[3 * p + 1], img.data[3 * p + 2]});
  }
  return out;
}

std::vector<colorxfer::Rgb> reference_from_image(const PipelineConfig& c) {
  const auto ref = image::read_rgb_png(require_file(c, c.reference, "reference"));
  std::optional<image::Mask> mask;
  if (c.reference_mask) mask = image::read_mask_png(require_file(c, *c.reference_mask, "reference mask"));
  return image_pixels(ref, mask ? &*mask : nullptr);
}

colorxfer::HarmonizeOptions harmonize_options(const PipelineConfig& c) {
  colorxfer::HarmonizeOptions h;
  h.config = c.transfer;
  h.space = c.transfer_space;
  h.clip_source = c.clip_source;
  return h;
}

gaussians::MergeOptions merge_options(const PipelineConfig& c) {
  gaussians::MergeOptions m;
  m.margin = c.merge_margin;
  m.height_band = c.merge_height_band;
  if (c.plane) m.plane = *c.plane;
  return m;
}

int cmd_fixtures(const Flags& f, std::uint64_t seed, double amplitude) {
  if (f.out.empty()) throw InputError("fixtures: --out <dir> is required");
  FixtureOptions o;
  o.seed = seed;
  o.amplitude = amplitude;
  make_fixtures(f.out, o);
  std::cout << fmt::format("wrote fixtures to {}\n", f.out);
  return 0;
}

int cmd_lift(const Flags& f) {
  const auto c = config_from_flags(f);
  StageClock clock;
  clock.external("Texture extraction");
  clock.external("Depth estimation");
  const auto local = clock.run("Point cloud generation", [&] { return run_lift(c); });
  ensure_output_dir(c);
  lift::write_ascii_ply(local.cloud, c.out("lifted.ply"));
  std::cout << fmt::format("lifted {} points -> {}\n", local.cloud.size(), c.out("lifted.ply").string());
  return 0;
}

int cmd_insert(const Flags& f) {
  const auto c = config_from_flags(f);
  const fs::path background_path = require_file(c, c.background, "background");
  StageClock clock;
  clock.external("Texture extraction");
  clock.external("Depth estimation");
  auto world = clock.run("Point cloud generation",
                         [&] { return lift::to_world(run_lift(c).cloud, c.placement); });

  const auto background = gaussians::load_ply(background_path);
  if (c.transfer_enabled) {
    clock.run("Statistical Lab color transfer (optional)", [&] {
      std::vector<colorxfer::Rgb> reference;
      if (c.reference_source == ReferenceSource::kImage) {
        reference = reference_from_image(c);
      } else {
        // Road colours under the insertion footprint in the original scene.
        gaussians::GaussianCloud probe;
        for (const auto& p : world.points) {
          probe.positions.push_back({float(p.x()), float(p.y()), float(p.z())});
        }
        probe.sh_dc.resize(probe.size());
        probe.sh_rest.resize(probe.size());
        probe.opacities.resize(probe.size());
        probe.log_scales.resize(probe.size());
        probe.rotations.assign(probe.size(), {1.0f, 0.0f, 0.0f, 0.0f});
        std::vector<Eigen::Vector3d> colors;
        for (auto i : gaussians::footprint_members(background, probe, merge_options(c))) {
          colors.push_back(background.base_color(i));
        }
        if (colors.size() < 2) {
          throw InputError("point-cloud colour reference: fewer than 2 background primitives under the footprint");
        }
        reference = to_rgb(colors);
      }
      const auto result = colorxfer::harmonize(to_rgb(world.colors), reference, harmonize_options(c));
      for (std::size_t i = 0; i < result.size(); ++i) {
        world.colors[i] = Eigen::Vector3d(result[i].r, result[i].g, result[i].b);
      }
    });
  } else {
    clock.skipped("Statistical Lab color transfer (optional)");
  }

  ensure_output_dir(c);
  const auto merged = clock.run("Gaussian primitive initialization and scene merging", [&] {
    const auto inserted = gaussians::make_primitives(world, c.scale, c.opacity);
    auto result = gaussians::merge(background, inserted, merge_options(c));
    gaussians::save_ply(inserted, c.out("inserted.ply"));
    gaussians::save_ply(result.cloud, c.out("edited.ply"));
    return std::make_tuple(inserted.size(), result.removed, result.cloud.size());
  });
  const auto [inserted, removed, total] = merged;
  const json report = {{"background", background.size()},
                       {"inserted", inserted},
                       {"removed", removed},
                       {"output", total},
                       {"sigma", c.scale.sigma},
                       {"transfer", c.transfer_enabled}};
  write_text(c.out("insert_report.json"), report.dump(2) + "\n");
  std::cout << fmt::format("inserted {} primitives, replaced {} -> {}\n", inserted, removed,
                           c.out("edited.ply").string());
  return 0;
}

int cmd_transfer(const Flags& f, const std::string& source, const std::string& source_mask,
                 const std::string& output) {
  auto c = config_from_flags(f);
  if (source.empty()) throw InputError("transfer: --source <ply|png> is required");
  const fs::path src_path = source;
  if (!fs::is_regular_file(src_path)) throw InputError(fmt::format("source file not found: {}", source));
  const auto reference = reference_from_image(c);
  auto ext = src_path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  ensure_output_dir(c);

  if (ext == ".ply") {
    auto cloud = gaussians::load_ply(src_path);
    std::vector<Eigen::Vector3d> colors;
    for (std::size_t i = 0; i < cloud.size(); ++i) colors.push_back(cloud.base_color(i));
    const auto result = colorxfer::harmonize(to_rgb(colors), reference, harmonize_options(c));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      cloud.sh_dc[i] = {static_cast<float>(gaussians::rgb_to_dc(result[i].r)),
                        static_cast<float>(gaussians::rgb_to_dc(result[i].g)),
                        static_cast<float>(gaussians::rgb_to_dc(result[i].b))};
    }
    const fs::path dst = output.empty() ? c.out("transferred.ply") : fs::path(output);
    gaussians::save_ply(cloud, dst);
    std::cout << fmt::format("transferred {} primitive colours -> {}\n", cloud.size(), dst.string());
  } else if (ext == ".png") {
    auto img = image::read_rgb_png(src_path);
    std::optional<image::Mask> mask;
    if (!source_mask.empty()) mask = image::read_mask_png(source_mask);
    if (mask && (mask->width != img.width || mask->height != img.height)) {
      throw InputError("source mask size does not match the source image");
    }
    const auto pixels = image_pixels(img, mask ? &*mask : nullptr);
    const auto result = colorxfer::harmonize(pixels, reference, harmonize_options(c));
    std::size_t k = 0;
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
      if (mask && !mask->data[p]) continue;
      img.data[3 * p] = static_cast<float>(result[k].r);
      img.data[3 * p + 1] = static_cast<float>(result[k].g);
      img.data[3 * p + 2] = static_cast<float>(result[k].b);
      ++k;
    }
    const fs::path dst = output.empty() ? c.out("transferred.png") : fs::path(output);
    image::write_rgb_png(img, dst);
    std::cout << fmt::format("transferred {} pixels -> {}\n", pixels.size(), dst.string());
  } else {
    throw InputError(fmt::format("transfer: unsupported source type '{}' (need .ply or .png)", ext));
  }
  return 0;
}

std::vector<Eigen::Vector3d> load_points(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  bool ascii = false;
  for (int i = 0; i < 3 && std::getline(in, line); ++i) {
    if (line.rfind("format ascii", 0) == 0) ascii = true;
  }
  if (ascii) return lift::read_ascii_ply(path).points;
  const auto cloud = gaussians::load_ply(path);
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(cloud.size());
  for (const auto& p : cloud.positions) pts.emplace_back(p[0], p[1], p[2]);
  return pts;
}

struct FieldBundle {
  GroundPlane plane;
  heightfield::HeightField field;
  std::size_t point_count = 0;
};

json plane_json(const GroundPlane& plane) {
  return {{"normal", {plane.normal.x(), plane.normal.y(), plane.normal.z()}}, {"offset", plane.offset}};
}

FieldBundle build_field(const PipelineConfig& c) {
  const fs::path points_path = c.heightfield_points
                                   ? require_file(c, *c.heightfield_points, "height field points")
                                   : require_file(c, c.out("inserted.ply"), "inserted primitives");
  const auto points = load_points(points_path);
  if (points.empty()) throw InputError("height field: no points");

  GroundPlane plane;
  if (c.plane) {
    plane = *c.plane;
  } else if (fs::is_regular_file(c.resolve(c.background))) {
    const auto background = gaussians::load_ply(c.resolve(c.background));
    gaussians::GaussianCloud footprint;
    for (const auto& p : points) {
      footprint.positions.push_back({float(p.x()), float(p.y()), float(p.z())});
    }
    gaussians::MergeOptions ring;
    ring.margin = c.plane_ring;
    std::vector<Eigen::Vector3d> road;
    for (auto i : gaussians::footprint_members(background, footprint, ring)) {
      const auto& p = background.positions[i];
      road.emplace_back(p[0], p[1], p[2]);
    }
    if (road.size() >= 3) {
      plane = heightfield::fit_ground_plane(road);
    } else {
      spdlog::warn("too few background primitives around the insertion; using the z = 0 plane");
    }
  } else {
    spdlog::warn("no background scene for plane fitting; using the z = 0 plane");
  }
  return {plane, heightfield::build_heightfield(points, plane, c.cell_size, c.accumulation),
          points.size()};
}

void save_field(const PipelineConfig& c, const FieldBundle& b) {
  heightfield::save_grid(b.field, c.out("heightfield.rvhf"));
  heightfield::save_pgm(b.field, c.out("heightfield.pgm"));
  const auto [lo, hi] = b.field.occupied_range();
  const json meta = {{"plane", plane_json(b.plane)},
                     {"cell_size", b.field.cell_size()},
                     {"mode", b.field.mode() == heightfield::Accumulation::kMax ? "max" : "min"},
                     {"origin", {b.field.origin().x(), b.field.origin().y()}},
                     {"width", b.field.width()},
                     {"height", b.field.height()},
                     {"points", b.point_count},
                     {"residual_range", {lo, hi}}};
  write_text(c.out("heightfield.json"), meta.dump(2) + "\n");
}

FieldBundle load_field(const PipelineConfig& c) {
  std::ifstream in(c.out("heightfield.json"));
  json meta;
  try {
    in >> meta;
    GroundPlane plane;
    plane.normal = vec3(meta.at("plane").at("normal"), "plane.normal");
    plane.offset = meta.at("plane").at("offset").get<double>();
    plane.validate();
    return {plane, heightfield::load_grid(c.out("heightfield.rvhf")),
            meta.value("points", std::size_t{0})};
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: {}", c.out("heightfield.json").string(), e.what()));
  }
}

int cmd_heightfield(const Flags& f) {
  const auto c = config_from_flags(f);
  ensure_output_dir(c);
  const auto bundle = build_field(c);
  save_field(c, bundle);
  const auto [lo, hi] = bundle.field.occupied_range();
  std::cout << fmt::format("height field {} x {} cells, residual range [{:.4f}, {:.4f}] m -> {}\n",
                           bundle.field.width(), bundle.field.height(), lo, hi,
                           c.out("heightfield.rvhf").string());
  return 0;
}

std::string simulation_hash(const PipelineConfig& c, const GroundPlane& plane) {
  json vehicles = json::object();
  for (const auto& [id, spec] : c.vehicles) {
    vehicles[id] = {{"params", params_to_json(spec.resolve())},
                    {"mount_offset", {spec.mount_offset.x(), spec.mount_offset.y(), spec.mount_offset.z()}}};
  }
  const json doc = {{"dt", c.dt},
                    {"divergence_bound", c.divergence_bound},
                    {"cell_size", c.cell_size},
                    {"mode", c.accumulation == heightfield::Accumulation::kMax ? "max" : "min"},
                    {"plane", plane_json(plane)},
                    {"vehicles", vehicles}};
  return sha256_hex(doc.dump());
}

json provenance(const PipelineConfig& c, const GroundPlane& plane) {
  return {{"sim_config_hash", simulation_hash(c, plane)}, {"dt", c.dt}, {"integrator", "rk4"}};
}

void write_corrections(const PipelineConfig& c, const std::vector<pose::PoseSequence>& corrected,
                       const std::map<std::string, pose::CorrectionSeries>& corrections,
                       const GroundPlane& plane) {
  for (const auto& seq : corrected) {
    const auto it = corrections.find(seq.vehicle_id);
    if (it == corrections.end()) continue;
    std::ofstream csv(c.out(fmt::format("correction_{}.csv", seq.vehicle_id)));
    pose::write_pose_csv(seq, it->second, csv);
  }
  pose::write_pose_file(corrected, c.out("poses_corrected.json"), provenance(c, plane));
}

int cmd_simulate(const Flags& f, const std::string& only_vehicle) {
  const auto c = config_from_flags(f);
  ensure_output_dir(c);
  const auto sequences = pose::read_pose_file(require_file(c, c.poses, "poses"));
  const bool have_field =
      fs::is_regular_file(c.out("heightfield.rvhf")) && fs::is_regular_file(c.out("heightfield.json"));
  FieldBundle bundle = have_field ? load_field(c) : build_field(c);
  if (!have_field) save_field(c, bundle);

  StageClock clock;
  clock.run("Vehicle-dynamics solving and pose correction", [&] {
    std::vector<pose::PoseSequence> corrected;
    std::map<std::string, pose::CorrectionSeries> corrections;
    for (const auto& seq : sequences) {
      const auto spec = c.vehicles.find(seq.vehicle_id);
      const bool wanted = only_vehicle.empty() || only_vehicle == seq.vehicle_id;
      if (spec == c.vehicles.end() || !wanted || seq.frames.size() < 2) {
        corrected.push_back(seq);
        continue;
      }
      const auto params = spec->second.resolve();
      const auto traj = pose::trajectory_from_poses(seq, bundle.plane);
      const auto excitation = heightfield::excitation_along(bundle.field, traj, params, c.dt);
      const double t0 = seq.frames.front().t;
      const double span = seq.frames.back().t - t0;
      const auto sim = halfcar::simulate({}, excitation, params, span, std::min(c.dt, span),
                                         {c.divergence_bound});
      {
        std::ofstream csv(c.out(fmt::format("sim_{}.csv", seq.vehicle_id)));
        halfcar::write_csv(sim, csv);
      }
      std::vector<double> rel;
      for (const auto& fr : seq.frames) rel.push_back(fr.t - t0);
      auto corr = pose::sample_correction(sim, rel);
      corrected.push_back(pose::apply_correction(seq, corr, {bundle.plane.normal, spec->second.mount_offset}));
      corrections[seq.vehicle_id] = std::move(corr);
    }
    write_corrections(c, corrected, corrections, bundle.plane);
  });
  std::cout << fmt::format("corrected poses -> {}\n", c.out("poses_corrected.json").string());
  return 0;
}

int cmd_correct_poses(const Flags& f, const std::vector<double>& translate, double yaw_deg,
                      const std::string& delete_range, const std::string& only_vehicle) {
  const auto c = config_from_flags(f);
  ensure_output_dir(c);
  auto sequences = pose::read_pose_file(require_file(c, c.poses, "poses"));
  const GroundPlane plane = fs::is_regular_file(c.out("heightfield.json")) ? load_field(c).plane
                                                                           : c.plane.value_or(GroundPlane{});

  std::vector<pose::PoseSequence> corrected;
  std::map<std::string, pose::CorrectionSeries> corrections;
  for (auto seq : sequences) {
    const bool wanted = only_vehicle.empty() || only_vehicle == seq.vehicle_id;
    if (wanted) {
      if (!translate.empty()) {
        if (translate.size() != 3) throw InputError("--translate needs three values x y z");
        seq = pose::edit_pose(seq, pose::Translate{{translate[0], translate[1], translate[2]}});
      }
      if (yaw_deg != 0.0) {
        seq = pose::edit_pose(seq, pose::Rotate{Eigen::Quaterniond(
                                       Eigen::AngleAxisd(yaw_deg * std::numbers::pi / 180.0,
                                                         Eigen::Vector3d::UnitZ()))});
      }
      if (!delete_range.empty()) {
        std::size_t begin = 0, end = 0;
        char sep = 0;
        std::istringstream parse(delete_range);
        if (!(parse >> begin >> sep >> end) || sep != ':') {
          throw InputError(fmt::format("--delete expects begin:end, got '{}'", delete_range));
        }
        seq = pose::edit_pose(seq, pose::DeleteFrames{begin, end});
      }
    }
    const auto spec = c.vehicles.find(seq.vehicle_id);
    const fs::path sim_path = c.out(fmt::format("sim_{}.csv", seq.vehicle_id));
    if (!wanted || spec == c.vehicles.end() || seq.frames.empty() || !fs::is_regular_file(sim_path)) {
      corrected.push_back(seq);
      continue;
    }
    std::ifstream in(sim_path);
    const auto sim = halfcar::read_csv(in);
    // Frame times are relative to the first recorded frame, before deletions.
    const auto original = std::find_if(sequences.begin(), sequences.end(),
                                       [&](const auto& s) { return s.vehicle_id == seq.vehicle_id; });
    const double t0 = original->frames.empty() ? seq.frames.front().t : original->frames.front().t;
    std::vector<double> rel;
    for (const auto& fr : seq.frames) rel.push_back(fr.t - t0);
    auto corr = pose::sample_correction(sim, rel);
    corrected.push_back(pose::apply_correction(seq, corr, {plane.normal, spec->second.mount_offset}));
    corrections[seq.vehicle_id] = std::move(corr);
  }
  write_corrections(c, corrected, corrections, plane);
  std::cout << fmt::format("corrected poses -> {}\n", c.out("poses_corrected.json").string());
  return 0;
}

std::vector<double> read_csv_column(const fs::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw InputError(fmt::format("{}: empty CSV", path.string()));
  std::vector<std::string> names;
  {
    std::istringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) names.push_back(name);
  }
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) throw InputError(fmt::format("{}: no column '{}'", path.string(), column));
  const auto idx = static_cast<std::size_t>(it - names.begin());
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    for (std::size_t k = 0; k <= idx && std::getline(row, cell, ','); ++k) {}
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InputError(fmt::format("{}: bad value '{}' in column {}", path.string(), cell, column));
    }
  }
  return values;
}

int cmd_metrics(const std::vector<std::string>& series, const std::string& column,
                const std::vector<std::string>& images, const std::string& mask_a,
                const std::string& mask_b) {
  json report = json::object();
  if (series.size() == 2) {
    const auto a = read_csv_column(series[0], column);
    const auto b = read_csv_column(series[1], column);
    const auto ext = metrics::extrema_error(a, b);
    report["column"] = column;
    report["rmse"] = metrics::rmse(a, b);
    report["extrema_error"] = ext.value;
    report["peak_error"] = ext.peak;
    report["trough_error"] = ext.trough;
  } else if (!series.empty()) {
    throw InputError("--series needs exactly two CSV files");
  }
  if (images.size() == 2) {
    const auto a = image::read_rgb_png(images[0]);
    const auto b = image::read_rgb_png(images[1]);
    std::optional<image::Mask> ma, mb;
    if (!mask_a.empty()) ma = image::read_mask_png(mask_a);
    if (!mask_b.empty()) mb = image::read_mask_png(mask_b);
    const auto ga = image::to_luma(a);
    const auto gb = image::to_luma(b);
    report["laplacian_variance_a"] = metrics::laplacian_variance(ga);
    report["laplacian_variance_b"] = metrics::laplacian_variance(gb);
    report["tenengrad_a"] = metrics::tenengrad(ga);
    report["tenengrad_b"] = metrics::tenengrad(gb);
    report["ciede2000"] = metrics::ciede2000_of_means(a, ma ? &*ma : nullptr, b, mb ? &*mb : nullptr);
    if (a.width == b.width && a.height == b.height) {
      report["ciede2000_per_pixel"] =
          metrics::ciede2000_per_pixel(a, ma ? &*ma : nullptr, b, mb ? &*mb : nullptr);
    }
  } else if (!images.empty()) {
    throw InputError("--images needs exactly two PNG files");
  }
  if (report.empty()) throw InputError("metrics: give --series A.csv B.csv and/or --images A.png B.png");
  std::cout << report.dump(2) << '\n';
  return 0;
}

void configure_logging() {
  auto logger = spdlog::get("roves");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("roves");
    spdlog::set_default_logger(logger);
  }
  const char* env = std::getenv("ROVES_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Pipeline config JSON");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--sigma", f.sigma, "Global Gaussian scale factor in (0, 1]");
  cmd->add_option("--beta", f.beta, "Colour blend weight in [0, 1]");
  cmd->add_option("--lambda", f.lambda, "Luminance shift weight in [0, 1]");
  cmd->add_option("--dt", f.dt, "Integration step (s)");
  cmd->add_option("--cell-size", f.cell_size, "Height field cell size (m)");
  cmd->add_option("--preset", f.preset, "Vehicle preset for all simulated vehicles")
      ->check(CLI::IsMember({"ego", "front"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  configure_logging();
  CLI::App app{"Physics-aware road editing for Gaussian driving scenes"};
  app.require_subcommand(1);
  Flags flags;

  auto* fixtures = app.add_subcommand("fixtures", "Write deterministic synthetic inputs");
  std::uint64_t seed = 7;
  double amplitude = 0.07;
  add_common(fixtures, flags);
  fixtures->add_option("--seed", seed, "Random seed");
  fixtures->add_option("--amplitude", amplitude, "Hump height (m)");

  auto* lift_cmd = app.add_subcommand("lift", "Lift masked depth to a local point cloud");
  add_common(lift_cmd, flags);

  auto* insert = app.add_subcommand("insert", "Insert the lifted element into the background scene");
  add_common(insert, flags);

  auto* transfer = app.add_subcommand("transfer", "Statistical colour transfer towards the road reference");
  std::string source, source_mask, output;
  add_common(transfer, flags);
  transfer->add_option("--source", source, "Gaussian PLY or PNG to recolour");
  transfer->add_option("--source-mask", source_mask, "Mask selecting source pixels (PNG source)");
  transfer->add_option("--output", output, "Output path (default <out>/transferred.<ext>)");

  auto* hf = app.add_subcommand("heightfield", "Build the road height field from inserted primitives");
  add_common(hf, flags);

  auto* simulate = app.add_subcommand("simulate", "Solve half-car dynamics and correct vehicle poses");
  std::string vehicle;
  add_common(simulate, flags);
  simulate->add_option("--vehicle", vehicle, "Only simulate this vehicle id");

  auto* correct = app.add_subcommand("correct-poses", "Apply pose edits and stored dynamics corrections");
  std::vector<double> translate;
  double yaw = 0.0;
  std::string delete_range;
  add_common(correct, flags);
  correct->add_option("--vehicle", vehicle, "Only edit/correct this vehicle id");
  correct->add_option("--translate", translate, "Translate every frame by x y z (m)")->expected(3);
  correct->add_option("--rotate-yaw", yaw, "Rotate every frame about world z (deg)");
  correct->add_option("--delete", delete_range, "Delete frames begin:end (end exclusive)");

  auto* metrics_cmd = app.add_subcommand("metrics", "Dynamic-response, sharpness and colour metrics");
  std::vector<std::string> series, images;
  std::string column = "z_s", mask_a, mask_b;
  metrics_cmd->add_option("--series", series, "Two CSV files")->expected(2);
  metrics_cmd->add_option("--column", column, "CSV column to compare");
  metrics_cmd->add_option("--images", images, "Two PNG files")->expected(2);
  metrics_cmd->add_option("--mask-a", mask_a, "Mask for the first image");
  metrics_cmd->add_option("--mask-b", mask_b, "Mask for the second image");

  std::vector<std::string> argv_store = args;
  std::vector<char*> argv;
  std::string program = "roves";
  argv.push_back(program.data());
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fixtures->parsed()) return cmd_fixtures(flags, seed, amplitude);
    if (lift_cmd->parsed()) return cmd_lift(flags);
    if (insert->parsed()) return cmd_insert(flags);
    if (transfer->parsed()) return cmd_transfer(flags, source, source_mask, output);
    if (hf->parsed()) return cmd_heightfield(flags);
    if (simulate->parsed()) return cmd_simulate(flags, vehicle);
    if (correct->parsed()) return cmd_correct_poses(flags, translate, yaw, delete_range, vehicle);
    if (metrics_cmd->parsed()) return cmd_metrics(series, column, images, mask_a, mask_b);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const halfcar::SimulationDiverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace roves::pipeline
