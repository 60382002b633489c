#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "radmaxlab/banach_space.hpp"
#include "radmaxlab/experiments.hpp"

using namespace radmaxlab;

namespace {

constexpr int kUsage = 2;
constexpr int kFailed = 1;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on Rademacher maximal functions, Carleson embeddings and Kato square roots"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, space, p_list, J_list, format, out, ensemble_kind;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid, m, ensemble, n;
  std::optional<double> eps;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--seed", seed, "root seed");
  app.add_option("--out", out, "write the report into this directory instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--grid", grid, "grid resolution J (2^J cells per side)");
  app.add_option("--space", space, "value space, e.g. lq:1.5:8, hilbert:4, schatten:2:3");
  app.add_option("--p", p_list, "comma separated exponents");
  app.add_option("--J-list", J_list, "comma separated resolutions for stability tables");
  app.add_option("--m", m, "counterexample depth");
  app.add_option("--ensemble", ensemble, "ensemble size");
  app.add_option("--ensemble-kind", ensemble_kind, "random or chain Carleson families");
  app.add_option("--n", n, "spatial dimension");
  app.add_option("--eps", eps, "Carleson exponent loss");

  for (const auto& name : harness::experiment_names()) app.add_subcommand(name, "run the " + name + " experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  harness::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = harness::load_config(config_path);
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (seed) cfg.seed = *seed;
    if (!format.empty()) cfg.format = format;
    if (grid) cfg.J = *grid;
    if (!space.empty()) cfg.space = space;
    if (!p_list.empty()) cfg.p = harness::parse_double_list(p_list);
    if (!J_list.empty()) cfg.J_list = harness::parse_int_list(J_list);
    if (m) cfg.m = *m;
    if (ensemble) cfg.ensemble = *ensemble;
    if (!ensemble_kind.empty()) cfg.ensemble_kind = ensemble_kind;
    if (n) cfg.n = *n;
    if (eps) cfg.eps = *eps;
    if (!out.empty()) cfg.out_dir = out;
    banach::SpaceDescriptor::parse(cfg.space);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  std::optional<harness::Report> rep;
  try {
    rep = harness::run_experiment(cfg);
  } catch (const harness::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "experiment failed: " << e.what() << '\n';
    return kFailed;
  }

  if (out.empty()) {
    std::cout << (cfg.format == "csv" ? rep->to_csv() : rep->body().dump(2) + "\n");
  } else {
    std::cerr << "wrote " << rep->write(cfg.out_dir, cfg.format) << '\n';
  }
  if (rep->failed()) {
    std::cerr << "experiment failed: " << rep->body()["failures"].dump() << '\n';
    return kFailed;
  }
  return 0;
}
