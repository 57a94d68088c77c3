#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "avi/scheduler.hpp"
#include "avi/state.hpp"
#include "avi/vec.hpp"

namespace avi {

struct BodySpec
{
  int id = 0;
  BodyKind kind = BodyKind::Particle;
  Vec3 pos{};
  Vec3 vel{};
  double radius = 0.0;
  std::optional<double> mass = 1.0; ///< nullopt means fixed
  Vec3 normal{};                    ///< half-planes only
};

struct GravitySpec
{
  Vec3 g{};
  double h = 0.0;
};

struct SpringSpec
{
  int a = 0;
  int b = 0;
  double rest = 1.0;
  double stiffness = 1.0;
  double h = 0.0;
};

using ForceSpec = std::variant<GravitySpec, SpringSpec>;

struct ContactSpec
{
  double eta = 0.1;
  double k = 1000.0;
  double e = 1.0;
  double mu = 0.0;
  double alpha = 0.1;
  std::optional<double> h1; ///< overrides alpha when present
};

/// Parsed, validated description of a simulation.
struct SceneConfig
{
  int dim = 2;
  std::vector<BodySpec> bodies;
  std::vector<ForceSpec> forces;
  std::optional<ContactSpec> contact;
  double duration = 0.0;
  double logdt = 0.1;
  std::uint64_t seed = 0;
  bool broken_clocks = false;
};

/// Line-oriented scene grammar:
///
///   dim 2|3
///   body particle|disc|halfplane id=INT pos=x,y[,z] [vel=..] [radius=R] [mass=M|fixed] [normal=..]
///   force gravity g=x,y[,z] h=H
///   force spring a=ID b=ID rest=L stiffness=K h=H
///   contact eta=E k=K [e=E] [mu=MU] [alpha=A|h1=H]
///   run duration=T [logdt=DT] [seed=N]
///
/// `#` starts a comment. Throws ParseError carrying the offending line.
SceneConfig parse_scene(std::string_view text);

/// Inverse of parse_scene (17 significant digits; round-trips exactly).
std::string print_scene(const SceneConfig& config);

/// Re-checks the invariants parse_scene enforces; throws ConfigError.
void validate(const SceneConfig& config);

struct BuiltinOptions
{
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::optional<int> spheres;
  std::optional<double> restitution;
  bool broken_clocks = false;
};

inline constexpr std::array<double, 7> kRestitutionSweep = {1.0, 0.9, 0.8, 0.7, 0.5, 0.2, 0.0};
inline constexpr int kDefaultBoxSpheres = 100;
inline constexpr int kDefaultSweepSpheres = 50;

/// "spring", "box" or "restitution-sweep" (the base scene of the sweep; the
/// caller overrides `e` per run). Throws ConfigError for other names.
SceneConfig builtin_scene(std::string_view name, const BuiltinOptions& options = {});

/// Randomly placed, non-overlapping discs with speeds in [0, 10] inside a fixed
/// 3 x 3 box of four half-planes. Every pair starts outside its first layer.
SceneConfig box_scene(int spheres, std::uint64_t seed, double gravity);

/// Resolves ids to indices, derives h1 and produces the runnable scene.
Scene build_scene(const SceneConfig& config);

} // namespace avi
