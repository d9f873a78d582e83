#include "dronecd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "dronecd/engine.hpp"
#include "dronecd/io.hpp"
#include "dronecd/oracle.hpp"

namespace dronecd {

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

ScheduleInstance three_route_instance() {
  return ScheduleInstance(Eigen::Vector3d(3.4, 2.8, 4.4), 2, 1.15);
}

struct SolveArgs {
  std::string instance;
  int qubits = 20;
  int iterations = 400;
  std::uint64_t seed = 0;
  std::optional<double> penalty;
  std::string acceptance = "always";
  std::string trace;
};

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  const auto file = parse_instance(read_file(args.instance));
  SolverConfig cfg;
  cfg.qubits = args.qubits;
  cfg.max_iterations = args.iterations;
  cfg.seed = args.seed;
  cfg.penalty = args.penalty;
  cfg.acceptance = args.acceptance == "monotone" ? Acceptance::monotone : Acceptance::always;

  const auto result = solve(file.instance, cfg);
  if (!args.trace.empty()) write_file_atomic(args.trace, write_trace(result.trace));
  out << "best_makespan=" << format_value(result.best_makespan)
      << " iters=" << result.trace.size() << " seed=" << args.seed << '\n';
  return kExitOk;
}

int cmd_oracle(const std::string& path, std::ostream& out) {
  const auto file = parse_instance(read_file(path));
  out << format_value(brute_force_makespan(file.instance).makespan) << '\n';
  return kExitOk;
}

struct ConvertArgs {
  std::string benchmark;
  int drones = 0;
  std::string layout;
  std::string out;
  double recharge = kBenchmarkRecharge;
  std::string unit = "min";
};

int cmd_convert(const ConvertArgs& args) {
  BenchmarkLayout layout;
  try {
    layout = parse_layout(args.layout);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--layout", e.what());
  }
  const auto inst =
      adapt_machine_scheduling(read_file(args.benchmark), layout, args.drones, args.recharge);
  write_file_atomic(args.out, write_instance({inst, args.unit}));
  return kExitOk;
}

int cmd_selfcheck(std::ostream& out) {
  const auto inst = three_route_instance();
  SolverConfig cfg;
  cfg.max_iterations = 100;
  cfg.seed = 7;
  const auto result = solve(inst, cfg);
  const double oracle = brute_force_makespan(inst).makespan;
  const bool pass = std::abs(result.best_makespan - 7.35) <= 1e-9 &&
                    std::abs(oracle - 7.35) <= 1e-9;
  out << "selfcheck " << (pass ? "pass" : "FAIL")
      << ": best_makespan=" << format_value(result.best_makespan)
      << " oracle=" << format_value(oracle) << " expected=7.35\n";
  return pass ? kExitOk : kExitData;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drone scheduling by block coordinate descent with a simulated VQE"};
  app.name(argc > 0 ? argv[0] : "dronecd");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance and print the best makespan");
  solve_cmd->add_option("--instance", solve_args.instance, "Instance JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--qubits", solve_args.qubits, "Variables per block (m)")
      ->capture_default_str()
      ->check(CLI::Range(2, kMaxQubits));
  solve_cmd->add_option("--iterations", solve_args.iterations, "Iteration budget")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--seed", solve_args.seed, "Master seed")->capture_default_str();
  solve_cmd->add_option("--penalty", solve_args.penalty,
                        "Constraint penalty (default: sum r + c n)")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--acceptance", solve_args.acceptance, "always | monotone")
      ->capture_default_str()
      ->check(CLI::IsMember({"always", "monotone"}));
  solve_cmd->add_option("--trace", solve_args.trace, "Write the per-iteration CSV trace here");

  std::string oracle_path;
  auto* oracle_cmd = app.add_subcommand("oracle", "Print the exact optimum by enumeration");
  oracle_cmd->add_option("--instance", oracle_path, "Instance JSON file")
      ->required()
      ->check(CLI::ExistingFile);

  ConvertArgs convert_args;
  auto* convert_cmd =
      app.add_subcommand("convert", "Turn a parallel-machine benchmark table into an instance");
  convert_cmd->add_option("--benchmark", convert_args.benchmark, "Whitespace-separated table")
      ->required()
      ->check(CLI::ExistingFile);
  convert_cmd->add_option("--drones", convert_args.drones, "Drone count q")
      ->required()
      ->check(CLI::PositiveNumber);
  convert_cmd->add_option("--layout", convert_args.layout,
                          "key=value list: skip, orient (rows|cols), column, jobs");
  convert_cmd->add_option("--out", convert_args.out, "Instance file to write")->required();
  convert_cmd->add_option("--recharge", convert_args.recharge, "Recharge time")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  convert_cmd->add_option("--unit", convert_args.unit, "Time unit label")->capture_default_str();

  auto* selfcheck_cmd = app.add_subcommand("selfcheck", "Solve the built-in three-route example");

  try {
    app.parse(argc, argv);
    if (*solve_cmd) return cmd_solve(solve_args, out);
    if (*oracle_cmd) return cmd_oracle(oracle_path, out);
    if (*convert_cmd) return cmd_convert(convert_args);
    if (*selfcheck_cmd) return cmd_selfcheck(out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << app.get_name() << ": error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dronecd
