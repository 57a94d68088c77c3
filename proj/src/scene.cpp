#include "avi/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "avi/errors.hpp"
#include "avi/potentials.hpp"

namespace avi {

namespace {

// Box experiment: 3 m x 3 m, discs of radius 10 cm and unit mass, speeds in [0, 10] m/s.
constexpr double kBoxSize = 3.0;
constexpr double kBoxRadius = 0.1;
constexpr double kBoxMaxSpeed = 10.0;
constexpr double kBoxEta = 0.01;
constexpr double kBoxStiffness = 1.0e4;
constexpr double kBoxGravityStep = 1.0e-3;
// Resting piles under gravity need finer layer steps to keep energy flat.
constexpr double kSweepAlpha = 0.01;
constexpr int kBoxPlacementAttempts = 2'000'000;

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

std::vector<std::string_view> tokenize(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start)
      out.push_back(line.substr(start, i - start));
  }
  return out;
}

/// key=value arguments of one directive; every key must be consumed.
class Arguments
{
public:
  Arguments(int line, std::span<const std::string_view> tokens) : line_(line)
  {
    for (auto tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw ParseError(line_, "expected key=value, got '" + std::string(tok) + "'");
      const std::string key(tok.substr(0, eq));
      if (!values_.emplace(key, tok.substr(eq + 1)).second)
        throw ParseError(line_, "duplicate key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  std::string_view raw(const std::string& key)
  {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw ParseError(line_, "missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  double number(const std::string& key)
  {
    return parse_number(key, raw(key));
  }

  std::optional<double> optional_number(const std::string& key)
  {
    if (!has(key))
      return std::nullopt;
    return number(key);
  }

  std::int64_t integer(const std::string& key)
  {
    const std::string_view v = raw(key);
    std::int64_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
      throw ParseError(line_, "key '" + key + "': expected an integer, got '" + std::string(v) + "'");
    return out;
  }

  Vec3 vector(const std::string& key, int dim)
  {
    const auto parts = split(raw(key), ',');
    if (static_cast<int>(parts.size()) != dim)
      throw ParseError(line_, "key '" + key + "': expected " + std::to_string(dim) + " components");
    Vec3 v;
    for (int i = 0; i < dim; ++i)
      v[i] = parse_number(key, parts[static_cast<std::size_t>(i)]);
    return v;
  }

  void finish() const
  {
    for (const auto& [key, value] : values_) {
      if (!used_.contains(key))
        throw ParseError(line_, "unknown key '" + key + "'");
    }
  }

  int line() const { return line_; }

private:
  double parse_number(const std::string& key, std::string_view v) const
  {
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || !std::isfinite(out))
      throw ParseError(line_, "key '" + key + "': expected a number, got '" + std::string(v) + "'");
    return out;
  }

  int line_;
  std::map<std::string, std::string_view> values_;
  std::set<std::string> used_;
};

void require(bool ok, int line, const std::string& what)
{
  if (!ok)
    throw ParseError(line, what);
}

BodyKind parse_kind(std::string_view s, int line)
{
  if (s == "particle")
    return BodyKind::Particle;
  if (s == "disc")
    return BodyKind::Disc;
  if (s == "halfplane")
    return BodyKind::HalfPlane;
  throw ParseError(line, "unknown body kind '" + std::string(s) + "'");
}

BodySpec parse_body(Arguments& args, BodyKind kind, int dim)
{
  const int line = args.line();
  BodySpec b;
  b.kind = kind;
  const std::int64_t id = args.integer("id");
  require(id >= std::numeric_limits<int>::min() && id <= std::numeric_limits<int>::max(), line,
          "key 'id' out of range");
  b.id = static_cast<int>(id);
  b.pos = args.vector("pos", dim);
  if (args.has("vel"))
    b.vel = args.vector("vel", dim);

  if (args.has("radius")) {
    b.radius = args.number("radius");
    require(kind == BodyKind::Disc, line, "key 'radius' only applies to discs");
    require(b.radius >= 0.0, line, "key 'radius' must be >= 0");
  } else {
    require(kind != BodyKind::Disc, line, "disc requires key 'radius'");
  }

  if (args.has("mass")) {
    if (args.raw("mass") == "fixed") {
      b.mass.reset();
    } else {
      require(kind != BodyKind::HalfPlane, line, "key 'mass': half-planes are always fixed");
      b.mass = args.number("mass");
      require(*b.mass > 0.0, line, "key 'mass' must be positive or 'fixed'");
    }
  }

  if (kind == BodyKind::HalfPlane) {
    b.mass.reset();
    b.normal = args.vector("normal", dim);
    const double n = norm(b.normal);
    require(n > 0.0, line, "key 'normal' must be non-zero");
    b.normal *= 1.0 / n;
    require(b.vel == Vec3{}, line, "key 'vel': half-planes do not move");
  } else {
    require(!args.has("normal"), line, "key 'normal' only applies to half-planes");
  }
  args.finish();
  return b;
}

std::string format_number(double v)
{
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string format_vector(const Vec3& v, int dim)
{
  std::string s = format_number(v.x) + "," + format_number(v.y);
  if (dim == 3)
    s += "," + format_number(v.z);
  return s;
}

} // namespace

SceneConfig parse_scene(std::string_view text)
{
  SceneConfig cfg;
  bool seen_dim = false;
  bool seen_geometry = false;
  bool seen_run = false;
  int line_no = 0;

  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty())
      continue;
    const std::string_view directive = tokens[0];

    if (directive == "dim") {
      require(tokens.size() == 2, line_no, "usage: dim 2|3");
      require(!seen_dim, line_no, "duplicate 'dim' directive");
      require(!seen_geometry, line_no, "'dim' must precede bodies and forces");
      if (tokens[1] == "2")
        cfg.dim = 2;
      else if (tokens[1] == "3")
        cfg.dim = 3;
      else
        throw ParseError(line_no, "dim must be 2 or 3");
      seen_dim = true;
    } else if (directive == "body") {
      require(tokens.size() >= 2, line_no, "body requires a kind");
      const BodyKind kind = parse_kind(tokens[1], line_no);
      Arguments args(line_no, std::span(tokens).subspan(2));
      cfg.bodies.push_back(parse_body(args, kind, cfg.dim));
      seen_geometry = true;
    } else if (directive == "force") {
      require(tokens.size() >= 2, line_no, "force requires a kind");
      Arguments args(line_no, std::span(tokens).subspan(2));
      if (tokens[1] == "gravity") {
        GravitySpec g;
        g.g = args.vector("g", cfg.dim);
        g.h = args.number("h");
        require(g.h > 0.0, line_no, "key 'h' must be positive");
        cfg.forces.emplace_back(g);
      } else if (tokens[1] == "spring") {
        SpringSpec s;
        s.a = static_cast<int>(args.integer("a"));
        s.b = static_cast<int>(args.integer("b"));
        s.rest = args.number("rest");
        s.stiffness = args.number("stiffness");
        s.h = args.number("h");
        require(s.rest >= 0.0, line_no, "key 'rest' must be >= 0");
        require(s.stiffness > 0.0, line_no, "key 'stiffness' must be positive");
        require(s.h > 0.0, line_no, "key 'h' must be positive");
        require(s.a != s.b, line_no, "spring endpoints 'a' and 'b' must differ");
        cfg.forces.emplace_back(s);
      } else {
        throw ParseError(line_no, "unknown force kind '" + std::string(tokens[1]) + "'");
      }
      args.finish();
      seen_geometry = true;
    } else if (directive == "contact") {
      require(!cfg.contact, line_no, "duplicate 'contact' directive");
      Arguments args(line_no, std::span(tokens).subspan(1));
      ContactSpec c;
      c.eta = args.number("eta");
      c.k = args.number("k");
      require(c.eta > 0.0, line_no, "key 'eta' must be positive");
      require(c.k > 0.0, line_no, "key 'k' must be positive");
      if (auto e = args.optional_number("e")) {
        require(*e >= 0.0 && *e <= 1.0, line_no, "key 'e' must lie in [0, 1]");
        c.e = *e;
      }
      if (auto mu = args.optional_number("mu")) {
        require(*mu >= 0.0, line_no, "key 'mu' must be >= 0");
        c.mu = *mu;
      }
      require(!(args.has("alpha") && args.has("h1")), line_no, "keys 'alpha' and 'h1' are exclusive");
      if (auto alpha = args.optional_number("alpha")) {
        require(*alpha > 0.0, line_no, "key 'alpha' must be positive");
        c.alpha = *alpha;
      }
      if (auto h1 = args.optional_number("h1")) {
        require(*h1 > 0.0, line_no, "key 'h1' must be positive");
        c.h1 = *h1;
      }
      args.finish();
      cfg.contact = c;
    } else if (directive == "run") {
      require(!seen_run, line_no, "duplicate 'run' directive");
      Arguments args(line_no, std::span(tokens).subspan(1));
      cfg.duration = args.number("duration");
      require(cfg.duration > 0.0, line_no, "key 'duration' must be positive");
      if (auto logdt = args.optional_number("logdt")) {
        require(*logdt > 0.0, line_no, "key 'logdt' must be positive");
        cfg.logdt = *logdt;
      }
      if (args.has("seed")) {
        const std::int64_t seed = args.integer("seed");
        require(seed >= 0, line_no, "key 'seed' must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(seed);
      }
      args.finish();
      seen_run = true;
    } else {
      throw ParseError(line_no, "unknown directive '" + std::string(directive) + "'");
    }
  }

  require(seen_run, 0, "missing 'run duration=...' directive");
  try {
    validate(cfg);
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ParseError(0, e.what());
  }
  return cfg;
}

void validate(const SceneConfig& cfg)
{
  if (cfg.dim != 2 && cfg.dim != 3)
    throw ConfigError("dim must be 2 or 3");
  std::set<int> ids;
  for (const auto& b : cfg.bodies) {
    if (!ids.insert(b.id).second)
      throw ConfigError("duplicate body id " + std::to_string(b.id));
    if (cfg.dim == 2 && (b.pos.z != 0.0 || b.vel.z != 0.0 || b.normal.z != 0.0))
      throw ConfigError("body " + std::to_string(b.id) + ": z component in a 2D scene");
  }
  for (const auto& f : cfg.forces) {
    if (const auto* s = std::get_if<SpringSpec>(&f)) {
      if (!ids.contains(s->a))
        throw ConfigError("spring key 'a' references unknown body " + std::to_string(s->a));
      if (!ids.contains(s->b))
        throw ConfigError("spring key 'b' references unknown body " + std::to_string(s->b));
    }
  }
  if (cfg.contact) {
    const auto& c = *cfg.contact;
    if (!(c.eta > 0.0))
      throw ConfigError("contact 'eta' must be positive");
    if (!(c.k > 0.0))
      throw ConfigError("contact 'k' must be positive");
    if (!(c.e >= 0.0 && c.e <= 1.0))
      throw ConfigError("contact 'e' must lie in [0, 1]");
    if (!(c.mu >= 0.0))
      throw ConfigError("contact 'mu' must be >= 0");
  }
  if (!(cfg.duration > 0.0))
    throw ConfigError("run 'duration' must be positive");
  if (!(cfg.logdt > 0.0))
    throw ConfigError("run 'logdt' must be positive");
}

std::string print_scene(const SceneConfig& cfg)
{
  std::ostringstream out;
  out << "dim " << cfg.dim << '\n';
  for (const auto& b : cfg.bodies) {
    out << "body " << to_string(b.kind) << " id=" << b.id << " pos=" << format_vector(b.pos, cfg.dim);
    if (b.kind != BodyKind::HalfPlane)
      out << " vel=" << format_vector(b.vel, cfg.dim);
    if (b.kind == BodyKind::Disc)
      out << " radius=" << format_number(b.radius);
    if (b.kind == BodyKind::HalfPlane)
      out << " normal=" << format_vector(b.normal, cfg.dim);
    else
      out << " mass=" << (b.mass ? format_number(*b.mass) : std::string("fixed"));
    out << '\n';
  }
  for (const auto& f : cfg.forces) {
    if (const auto* g = std::get_if<GravitySpec>(&f)) {
      out << "force gravity g=" << format_vector(g->g, cfg.dim) << " h=" << format_number(g->h) << '\n';
    } else {
      const auto& s = std::get<SpringSpec>(f);
      out << "force spring a=" << s.a << " b=" << s.b << " rest=" << format_number(s.rest)
          << " stiffness=" << format_number(s.stiffness) << " h=" << format_number(s.h) << '\n';
    }
  }
  if (cfg.contact) {
    const auto& c = *cfg.contact;
    out << "contact eta=" << format_number(c.eta) << " k=" << format_number(c.k)
        << " e=" << format_number(c.e) << " mu=" << format_number(c.mu);
    if (c.h1)
      out << " h1=" << format_number(*c.h1);
    else
      out << " alpha=" << format_number(c.alpha);
    out << '\n';
  }
  out << "run duration=" << format_number(cfg.duration) << " logdt=" << format_number(cfg.logdt)
      << " seed=" << cfg.seed << '\n';
  return out.str();
}

SceneConfig box_scene(int spheres, std::uint64_t seed, double gravity)
{
  if (spheres < 1)
    throw ConfigError("box scene needs at least one sphere");
  SceneConfig cfg;
  cfg.dim = 2;
  cfg.seed = seed;
  cfg.duration = 10.0;

  ContactSpec contact;
  contact.eta = kBoxEta;
  contact.k = kBoxStiffness;
  cfg.contact = contact;

  // Portable 64-bit engine; doubles taken from the top 53 bits.
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const double clearance = 2.0 * kBoxEta * 1.01;
  const double lo = kBoxRadius + clearance;
  const double hi = kBoxSize - lo;
  const double min_center = 2.0 * kBoxRadius + clearance;

  std::vector<Vec3> centers;
  int attempts = 0;
  while (static_cast<int>(centers.size()) < spheres) {
    if (++attempts > kBoxPlacementAttempts)
      throw ConfigError("cannot place " + std::to_string(spheres) + " non-overlapping spheres in the box");
    const Vec3 c{lo + (hi - lo) * uniform(), lo + (hi - lo) * uniform(), 0.0};
    const bool overlaps = std::any_of(centers.begin(), centers.end(),
                                      [&](const Vec3& o) { return norm(c - o) <= min_center; });
    if (!overlaps)
      centers.push_back(c);
  }

  for (int i = 0; i < spheres; ++i) {
    const double speed = kBoxMaxSpeed * uniform();
    const double angle = 2.0 * std::numbers::pi * uniform();
    BodySpec b;
    b.id = i;
    b.kind = BodyKind::Disc;
    b.pos = centers[static_cast<std::size_t>(i)];
    b.vel = {speed * std::cos(angle), speed * std::sin(angle), 0.0};
    b.radius = kBoxRadius;
    b.mass = 1.0;
    cfg.bodies.push_back(b);
  }

  const std::pair<Vec3, Vec3> walls[] = {
    {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}},
    {{kBoxSize, 0.0, 0.0}, {-1.0, 0.0, 0.0}},
    {{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},
    {{0.0, kBoxSize, 0.0}, {0.0, -1.0, 0.0}},
  };
  int id = spheres;
  for (const auto& [point, normal] : walls) {
    BodySpec w;
    w.id = id++;
    w.kind = BodyKind::HalfPlane;
    w.pos = point;
    w.normal = normal;
    w.mass.reset();
    cfg.bodies.push_back(w);
  }

  if (gravity != 0.0)
    cfg.forces.emplace_back(GravitySpec{{0.0, -gravity, 0.0}, kBoxGravityStep});
  return cfg;
}

SceneConfig builtin_scene(std::string_view name, const BuiltinOptions& options)
{
  SceneConfig cfg;
  if (name == "spring") {
    // Unit spring, unit masses, resting one unit above the floor; E0 = 3.
    cfg.dim = 2;
    cfg.bodies.push_back({0, BodyKind::HalfPlane, {0.0, 0.0, 0.0}, {}, 0.0, std::nullopt, {0.0, 1.0, 0.0}});
    cfg.bodies.push_back({1, BodyKind::Particle, {0.0, 1.0, 0.0}, {}, 0.0, 1.0, {}});
    cfg.bodies.push_back({2, BodyKind::Particle, {0.0, 2.0, 0.0}, {}, 0.0, 1.0, {}});
    cfg.forces.emplace_back(SpringSpec{1, 2, 1.0, 1.0, 0.01});
    cfg.forces.emplace_back(GravitySpec{{0.0, -1.0, 0.0}, 0.01});
    ContactSpec contact;
    contact.eta = 0.1;
    contact.k = 1000.0;
    cfg.contact = contact;
    cfg.duration = 100.0;
  } else if (name == "box") {
    cfg = box_scene(options.spheres.value_or(kDefaultBoxSpheres), options.seed.value_or(0), 0.0);
  } else if (name == "restitution-sweep") {
    cfg = box_scene(options.spheres.value_or(kDefaultSweepSpheres), options.seed.value_or(0), 9.8);
    cfg.contact->alpha = kSweepAlpha;
    cfg.duration = 20.0;
  } else {
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
  }

  if (options.spheres && name == "spring")
    throw ConfigError("--spheres only applies to box experiments");
  if (options.duration)
    cfg.duration = *options.duration;
  if (options.seed)
    cfg.seed = *options.seed;
  if (options.restitution && cfg.contact)
    cfg.contact->e = *options.restitution;
  cfg.broken_clocks = options.broken_clocks;
  validate(cfg);
  return cfg;
}

Scene build_scene(const SceneConfig& cfg)
{
  validate(cfg);
  Scene scene;
  scene.state.dim = cfg.dim;
  std::unordered_map<int, std::size_t> index;
  double m_min = std::numeric_limits<double>::infinity();
  for (const auto& spec : cfg.bodies) {
    Body b;
    b.id = spec.id;
    b.kind = spec.kind;
    b.radius = spec.kind == BodyKind::Disc ? spec.radius : 0.0;
    b.fixed = !spec.mass.has_value() || spec.kind == BodyKind::HalfPlane;
    b.mass = b.fixed ? 0.0 : *spec.mass;
    b.normal = spec.normal;
    index[spec.id] = scene.state.add_body(b, spec.pos, spec.vel);
    if (!b.fixed)
      m_min = std::min(m_min, b.mass);
  }

  int next_id = 0;
  for (const auto& f : cfg.forces) {
    MaterialPotential m;
    m.id = next_id++;
    if (const auto* g = std::get_if<GravitySpec>(&f)) {
      m.h = g->h;
      m.force = GravityForce{g->g};
    } else {
      const auto& s = std::get<SpringSpec>(f);
      m.h = s.h;
      m.force = SpringForce{index.at(s.a), index.at(s.b), s.rest, s.stiffness};
    }
    scene.materials.push_back(m);
  }

  if (cfg.contact) {
    const auto& c = *cfg.contact;
    ContactParams p;
    p.eta = c.eta;
    p.k = c.k;
    p.e = c.e;
    p.mu = c.mu;
    if (c.h1)
      p.h1 = *c.h1;
    else
      p.h1 = base_timestep(c.k, std::isfinite(m_min) ? m_min : 1.0, c.alpha);
    scene.contact = p;
  }
  scene.duration = cfg.duration;
  scene.logdt = cfg.logdt;
  scene.clock = cfg.broken_clocks ? ClockPolicy::Broken : ClockPolicy::Aligned;
  return scene;
}

} // namespace avi
