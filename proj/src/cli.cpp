#include "avi/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "avi/diagnostics.hpp"
#include "avi/errors.hpp"
#include "avi/scene.hpp"
#include "avi/scheduler.hpp"

namespace avi {

namespace {

struct Options
{
  std::string scene_file;
  std::string experiment;
  std::string out;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::optional<int> spheres;
  std::optional<double> restitution;
  bool broken_clocks = false;
};

/// Raised for problems that are the caller's fault, before any integration.
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

SceneConfig load_scene_file(const Options& o)
{
  std::ifstream in(o.scene_file, std::ios::binary);
  if (!in)
    throw UsageError("cannot open scene file '" + o.scene_file + "'");
  std::ostringstream text;
  text << in.rdbuf();
  SceneConfig cfg = parse_scene(text.str());
  if (o.spheres)
    throw UsageError("--spheres only applies to box experiments");
  if (o.duration)
    cfg.duration = *o.duration;
  if (o.seed)
    cfg.seed = *o.seed;
  if (o.restitution) {
    if (!cfg.contact)
      throw UsageError("--e given but the scene has no contact directive");
    cfg.contact->e = *o.restitution;
  }
  cfg.broken_clocks = o.broken_clocks;
  validate(cfg);
  return cfg;
}

/// Runs one configuration, streaming CSV rows as snapshots are taken.
void run_to_stream(const SceneConfig& cfg, std::ostream& out)
{
  Simulation sim(build_scene(cfg));
  const int dim = cfg.dim;
  out << csv_header(dim);
  sim.set_snapshot_sink([&out, dim](const Snapshot& s) { out << csv_row(s, dim); });
  sim.run();
  out.flush();
  if (!out)
    throw Error("failed writing CSV output");
}

std::unique_ptr<std::ofstream> open_output(const std::string& path)
{
  auto file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*file)
    throw UsageError("cannot open output file '" + path + "'");
  return file;
}

std::string sweep_path(const std::string& out, double e)
{
  std::filesystem::path stem = out.empty() ? std::filesystem::path("restitution-sweep") : std::filesystem::path(out);
  stem.replace_extension();
  char tag[32];
  std::snprintf(tag, sizeof(tag), "_e%.1f.csv", e);
  return stem.string() + tag;
}

int run_sweep(const Options& o, std::ostream& out, std::ostream& err)
{
  if (o.restitution)
    throw UsageError("--e cannot be combined with restitution-sweep");
  std::vector<SceneConfig> configs;
  std::vector<std::unique_ptr<std::ofstream>> files;
  std::vector<std::string> paths;
  for (double e : kRestitutionSweep) {
    BuiltinOptions b{o.duration, o.seed, o.spheres, e, o.broken_clocks};
    configs.push_back(builtin_scene("restitution-sweep", b));
    paths.push_back(sweep_path(o.out, e));
    files.push_back(open_output(paths.back()));
  }

  // Independent runs; each one stays sequential.
  std::vector<std::string> failures(configs.size());
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        run_to_stream(configs[i], *files[i]);
      } catch (const std::exception& ex) {
        failures[i] = ex.what();
      }
    });
  }
  for (auto& w : workers)
    w.join();

  int code = kExitOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (failures[i].empty()) {
      out << paths[i] << '\n';
    } else {
      err << "avi_sim: run with e=" << kRestitutionSweep[i] << " failed: " << failures[i] << '\n';
      code = kExitSimulation;
    }
  }
  return code;
}

int execute(const Options& o, bool simulate, std::ostream& out, std::ostream& err)
{
  if (!simulate && o.experiment == "restitution-sweep")
    return run_sweep(o, out, err);

  SceneConfig cfg;
  if (simulate) {
    cfg = load_scene_file(o);
  } else {
    if (o.spheres && o.experiment != "box")
      throw UsageError("--spheres only applies to box experiments");
    cfg = builtin_scene(o.experiment, {o.duration, o.seed, o.spheres, o.restitution, o.broken_clocks});
  }

  std::unique_ptr<std::ofstream> file;
  if (!o.out.empty())
    file = open_output(o.out);
  std::ostream& sink = file ? static_cast<std::ostream&>(*file) : out;
  try {
    run_to_stream(cfg, sink);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    err << "avi_sim: simulation failed: " << ex.what() << '\n';
    return kExitSimulation;
  }
  return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app("Asynchronous variational integrator with nested penalty-layer contact", "avi_sim");
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--out", o.out, "CSV output path (default: stdout)");
    sub->add_option("--duration", o.duration, "Override the run duration")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Override the random seed");
    sub->add_flag("--broken-clocks", o.broken_clocks, "Start new layers at the activation instant");
    sub->add_option("--spheres", o.spheres, "Number of discs (box experiments only)")->check(CLI::PositiveNumber);
    sub->add_option("--e", o.restitution, "Override the coefficient of restitution")->check(CLI::Range(0.0, 1.0));
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run a scene file");
  simulate->add_option("scene", o.scene_file, "Scene file")->required();
  add_common(simulate);

  CLI::App* experiment = app.add_subcommand("experiment", "Run a built-in experiment");
  experiment->add_option("name", o.experiment, "spring | box | restitution-sweep")
    ->required()
    ->check(CLI::IsMember({"spring", "box", "restitution-sweep"}));
  add_common(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return execute(o, simulate->parsed(), out, err);
  } catch (const UsageError& e) {
    err << "avi_sim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "avi_sim: " << o.scene_file << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "avi_sim: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "avi_sim: simulation failed: " << e.what() << '\n';
    return kExitSimulation;
  }
}

} // namespace avi
