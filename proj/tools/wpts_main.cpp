#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "wpts/config_io.hpp"
#include "wpts/errors.hpp"
#include "wpts/harness.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_path;
  bool quick = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment config");
  cmd->add_option("--seed", opts.seed, "base seed (default 1)");
  cmd->add_option("--out", opts.out_path,
                  "output CSV path; stdout when omitted");
  cmd->add_flag("--quick", opts.quick,
                "use the built-in small profile instead of --config");
}

wpts::ExperimentConfig resolve_config(const CommonOpts& opts,
                                      bool exact_scale) {
  if (opts.quick)
    return exact_scale ? wpts::small_scenario_config() : wpts::quick_profile();
  if (opts.config_path.empty())
    throw wpts::ConfigError("pass --config <file> or --quick");
  return wpts::load_config(opts.config_path);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  wpts::write_text_file(out_path, text);
}

std::string transmission_sets_csv(const wpts::TransmissionSetMatrix& sets) {
  std::string out = "set";
  for (int ap = 0; ap < sets.rows(); ++ap)
    out += ",ap" + std::to_string(ap);
  out += '\n';
  for (int a = 0; a < sets.cols(); ++a) {
    out += std::to_string(a);
    for (int ap = 0; ap < sets.rows(); ++ap)
      out += ',' + std::to_string(sets(ap, a));
    out += '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduler testbed for wireless data delivery with RF energy "
               "harvesting"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, gap_opts, enum_opts;
  std::string axis_arg;
  std::string dump_values_path;

  CLI::App* run_cmd = app.add_subcommand(
      "run", "one simulation per configured policy, one CSV row each");
  add_common(run_cmd, run_opts);

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "policy comparison along the arrival or interference axis");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis_arg, "arrival or interference")
      ->required();

  CLI::App* gap_cmd = app.add_subcommand(
      "gap", "exact vs sampled value iteration over the gap horizons");
  add_common(gap_cmd, gap_opts);
  gap_cmd->add_option(
      "--dump-values", dump_values_path,
      "also write the exact value table (first policy, largest horizon)");

  CLI::App* enum_cmd = app.add_subcommand(
      "enum-sets", "print the enumerated transmission sets");
  add_common(enum_cmd, enum_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      const wpts::ExperimentConfig cfg = resolve_config(run_opts, false);
      std::vector<std::pair<wpts::PolicyKind, wpts::RunMetrics>> rows;
      for (wpts::PolicyKind policy : cfg.policies)
        rows.emplace_back(policy,
                          wpts::run_simulation(cfg, policy, run_opts.seed));
      emit(run_opts.out_path, wpts::run_csv(rows));
    } else if (*sweep_cmd) {
      const wpts::ExperimentConfig cfg = resolve_config(sweep_opts, false);
      const wpts::SweepAxis axis = wpts::parse_axis(axis_arg);
      emit(sweep_opts.out_path,
           wpts::sweep_csv(wpts::run_sweep(cfg, axis, sweep_opts.seed)));
    } else if (*gap_cmd) {
      const wpts::ExperimentConfig cfg = resolve_config(gap_opts, true);
      emit(gap_opts.out_path,
           wpts::gap_csv(wpts::run_gap_study(cfg, gap_opts.seed)));
      if (!dump_values_path.empty()) {
        const wpts::Topology topology =
            wpts::resolve_topology(cfg, gap_opts.seed);
        const wpts::SystemModel model = wpts::make_model(cfg, topology);
        wpts::MdpConfig mdp = cfg.mdp;
        if (!cfg.gap_horizons.empty())
          mdp.horizon = *std::max_element(cfg.gap_horizons.begin(),
                                          cfg.gap_horizons.end());
        const wpts::ValueTable table = wpts::exact_value_iteration(
            model, mdp, wpts::make_state_space(model),
            wpts::enumerate_actions(cfg, topology.graph),
            cfg.policies.front());
        wpts::write_value_table_csv(table, dump_values_path);
      }
    } else if (*enum_cmd) {
      const wpts::ExperimentConfig cfg = resolve_config(enum_opts, false);
      const wpts::Topology topology =
          wpts::resolve_topology(cfg, enum_opts.seed);
      emit(enum_opts.out_path,
           transmission_sets_csv(
               wpts::enumerate_actions(cfg, topology.graph)));
    }
  } catch (const wpts::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const wpts::CapExceededError& e) {
    std::fprintf(stderr, "resource cap: %s\n", e.what());
    return 3;
  } catch (const wpts::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  }
  return 0;
}
