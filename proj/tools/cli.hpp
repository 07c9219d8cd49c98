#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uwit/uwit.hpp"

namespace uwit::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kInvalidState = 3,
  kUnwritable = 4,
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Thrown inside subcommands to leave with a specific exit code.
struct Exit {
  int code;
  std::string message;
};

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("UWIT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw Exit{kUsage, std::string("UWIT_SEED is not an unsigned integer: ") + env};
    }
  }
  return kDefaultSeed;
}

inline double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Exit{kUsage, what + ": not a number: " + text};
  }
}

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, "--p-grid"));
  if (out.empty()) throw Exit{kUsage, "--p-grid is empty"};
  return out;
}

/// Sends `body` to `path`, or to `out` when no path is given.
inline void emit(const std::optional<std::string>& path, const std::string& body, std::ostream& out) {
  if (!path) {
    out << body;
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw Exit{kUnwritable, "cannot write " + *path};
  file << body;
  file.flush();
  if (!file) throw Exit{kUnwritable, "write failed for " + *path};
}

inline nlohmann::json verdict_json(const CriterionVerdict& v) {
  return {{"id", v.criterion_id}, {"value", v.value}, {"threshold", v.threshold}, {"detected", v.detected}};
}

// ---------------------------------------------------------------------------
// evaluate

inline const std::vector<std::string>& known_criteria() {
  static const std::vector<std::string> ids{"linear_witness", "nonlinear_witness", "pauli_lur",
                                            "bell_variance",  "bell_tsallis",      "eur_criterion3"};
  return ids;
}

inline nlohmann::json evaluate_report(const DensityMatrix& rho, const std::vector<std::string>& selected,
                                      const std::vector<double>& q_values) {
  nlohmann::json criteria = nlohmann::json::array();
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& id : selected) {
    if (!rho.is_two_qubit()) {
      skipped.push_back(id);
      continue;
    }
    if (id == "linear_witness") {
      criteria.push_back(verdict_json(linear_witness(rho)));
    } else if (id == "nonlinear_witness") {
      criteria.push_back(verdict_json(nonlinear_witness_value(rho)));
    } else if (id == "pauli_lur") {
      criteria.push_back(verdict_json(pauli_lur(rho)));
    } else if (id == "bell_variance") {
      criteria.push_back(verdict_json(bell_variance_criterion(rho)));
    } else if (id == "bell_tsallis") {
      for (double q : q_values) criteria.push_back(verdict_json(bell_tsallis_criterion(rho, q)));
    } else if (id == "eur_criterion3") {
      const double c = maassen_bound(Observable(pauli::x()), Observable(pauli::z()));
      criteria.push_back(verdict_json(
          eur_criterion3(rho, {pauli::x(), pauli::x()}, {pauli::z(), pauli::z()}, c)));
    }
  }
  const auto npt = is_npt(rho);
  nlohmann::json report{{"dims", {rho.dims().alice, rho.dims().bob}},
                        {"criteria", std::move(criteria)},
                        {"npt", npt.npt},
                        {"min_pt_eigenvalue", npt.min_eigenvalue}};
  if (!skipped.empty()) report["skipped"] = std::move(skipped);
  return report;
}

inline std::string report_as_csv(const nlohmann::json& report) {
  std::string body = "id,value,threshold,detected\n";
  for (const auto& c : report["criteria"]) {
    body += c["id"].get<std::string>() + ',' + format_number(c["value"].get<double>()) + ',' +
            format_number(c["threshold"].get<double>()) + ',' + (c["detected"].get<bool>() ? "1" : "0") + '\n';
  }
  body += "npt," + format_number(report["min_pt_eigenvalue"].get<double>()) + ",0," +
          (report["npt"].get<bool>() ? "1" : "0") + '\n';
  return body;
}

// ---------------------------------------------------------------------------
// gen-state

inline DensityMatrix generate_state(const std::string& kind, const std::vector<std::string>& params,
                                    std::uint64_t seed) {
  auto need = [&](std::size_t n, const char* usage) {
    if (params.size() != n) throw Exit{kUsage, "usage: gen-state " + kind + " " + usage};
  };
  auto number = [&](std::size_t i) { return parse_number(params[i], "gen-state " + kind); };
  try {
    if (kind == "bell") {
      need(1, "<1|2|3|4>");
      const double i = number(0);
      if (i != 1 && i != 2 && i != 3 && i != 4) throw Exit{kUsage, "Bell state index must be 1, 2, 3 or 4"};
      return bell_states()[static_cast<std::size_t>(i) - 1].density();
    }
    if (kind == "werner") {
      need(1, "<p>");
      return werner(number(0));
    }
    if (kind == "noisy-singlet") {
      need(2, "<p> <d>");
      auto rng = make_stream(seed);
      const double p = number(0);
      if (!(p >= 0.0 && p <= 1.0)) throw Exit{kUsage, "p must lie in [0, 1]"};
      return noisy_singlet(p, sample_noise_ball(number(1), rng));
    }
    if (kind == "bell-diagonal") {
      need(3, "<x> <y> <z>");
      return bell_diagonal_state({number(0), number(1), number(2)});
    }
    if (kind == "random-separable") {
      need(1, "<k>");
      const double k = number(0);
      if (k < 1 || k != std::floor(k)) throw Exit{kUsage, "component count must be a positive integer"};
      auto rng = make_stream(seed);
      return random_separable(static_cast<std::size_t>(k), Dims{2, 2}, rng);
    }
  } catch (const Error& e) {
    throw Exit{kUsage, e.what()};
  }
  throw Exit{kUsage, "unknown state kind '" + kind +
                         "' (expected bell, werner, noisy-singlet, bell-diagonal, random-separable)"};
}

// ---------------------------------------------------------------------------

/// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separability criteria from uncertainty relations"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::string format = "csv";
  unsigned workers = default_workers();
  std::vector<double> q_values;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file (default: standard output)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate every criterion on a JSON density matrix");
  std::string state_path;
  std::vector<std::string> selected = known_criteria();
  evaluate->add_option("state", state_path, "State file")->required();
  evaluate->add_option("--criteria", selected, "Criteria to evaluate")->delimiter(',')->check(
      CLI::IsMember(known_criteria()));
  evaluate->add_option("--q", q_values, "Tsallis parameters for bell_tsallis (repeatable)");
  add_common(evaluate);

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo detection fractions for p|psi-><psi-| + (1-p) sigma");
  NoiseBallConfig config;
  std::string p_grid_text;
  sweep->add_option("--d", config.d, "Noise ball radius")->check(CLI::NonNegativeNumber);
  sweep->add_option("--p-grid", p_grid_text, "Comma-separated singlet weights");
  sweep->add_option("--samples", config.samples, "Samples per p")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Random seed");
  sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  add_common(sweep);

  auto* geometry = app.add_subcommand("geometry", "Classify a grid of Bell-diagonal states");
  std::size_t resolution = 101;
  geometry->add_option("--resolution", resolution, "Grid points per axis")->check(CLI::Range(2, 1001));
  geometry->add_option("--q", q_values, "Tsallis parameters (repeatable)");
  geometry->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  add_common(geometry);

  auto* werner_cmd = app.add_subcommand("werner", "Detection thresholds along the Werner line");
  add_common(werner_cmd);

  auto* gen = app.add_subcommand("gen-state", "Write a JSON density matrix");
  std::string kind;
  std::vector<std::string> params;
  gen->add_option("kind", kind, "bell | werner | noisy-singlet | bell-diagonal | random-separable")->required();
  gen->add_option("params", params, "Kind-specific parameters")->allow_extra_args();
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--out", out_path, "Output file (default: standard output)");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (evaluate->parsed()) {
      if (q_values.empty()) q_values = {2.0};
      const DensityMatrix rho = load_density_matrix(state_path);
      auto report = evaluate_report(rho, selected, q_values);
      report["state"] = state_path;
      emit(out_path, format == "json" ? report.dump(2) + "\n" : report_as_csv(report), out);
      return kOk;
    }
    if (sweep->parsed()) {
      config.seed = resolve_seed(seed);
      const auto grid = p_grid_text.empty() ? default_p_grid() : parse_grid(p_grid_text);
      const auto rows = run_detection_sweep(config, grid, {workers});
      std::ostringstream body;
      if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows)
          j.push_back({{"p", r.p}, {"frac_witness", r.fraction_witness}, {"frac_lur", r.fraction_lur},
                       {"frac_npt", r.fraction_npt}, {"samples", r.samples}, {"seed", r.seed}});
        body << j.dump(2) << '\n';
      } else {
        write_detection_csv(body, rows);
      }
      emit(out_path, body.str(), out);
      std::size_t chain = 0, ppt = 0;
      for (const auto& r : rows) {
        chain += r.chain_violations;
        ppt += r.ppt_detections;
      }
      (out_path ? out : err) << "sweep: " << rows.size() << " p values x " << config.samples
                             << " samples, d=" << format_number(config.d) << ", seed=" << config.seed
                             << ", chain violations=" << chain << ", PPT detections=" << ppt << '\n';
      return kOk;
    }
    if (geometry->parsed()) {
      if (q_values.empty()) q_values = {2.0, 4.0, 15.0};
      const auto scan = run_geometry_scan(resolution, q_values, workers);
      std::ostringstream body;
      if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& cell : scan.cells)
          for (std::size_t k = 0; k < scan.q_values.size(); ++k)
            j.push_back({{"x", cell.coords.x}, {"y", cell.coords.y}, {"z", cell.coords.z},
                         {"is_state", cell.is_state}, {"in_octahedron", cell.in_octahedron},
                         {"sphere_detected", cell.sphere_detected}, {"q", scan.q_values[k]},
                         {"tsallis_detected", cell.tsallis_detected(k)}});
        body << j.dump() << '\n';
      } else {
        write_geometry_csv(body, scan);
      }
      emit(out_path, body.str(), out);
      std::size_t states = 0;
      for (const auto& cell : scan.cells) states += cell.is_state;
      (out_path ? out : err) << "geometry: " << scan.cells.size() << " cells (" << states << " states) x "
                             << scan.q_values.size() << " q values = " << scan.cells.size() * scan.q_values.size()
                             << " rows\n";
      return kOk;
    }
    if (werner_cmd->parsed()) {
      const auto t = werner_thresholds();
      std::string body;
      if (format == "json") {
        body = nlohmann::json{{"witness", t.witness}, {"lur", t.lur}, {"npt", t.npt}}.dump(2) + "\n";
      } else {
        body = "criterion,threshold\nwitness," + format_number(t.witness) + "\nlur," + format_number(t.lur) +
               "\nnpt," + format_number(t.npt) + "\n";
      }
      emit(out_path, body, out);
      if (out_path) {
        out << "werner: witness=" << format_number(t.witness) << " lur=" << format_number(t.lur)
            << " npt=" << format_number(t.npt) << '\n';
      }
      return kOk;
    }
    if (gen->parsed()) {
      const DensityMatrix rho = generate_state(kind, params, resolve_seed(seed));
      emit(out_path, to_json(rho).dump(2) + "\n", out);
      return kOk;
    }
  } catch (const Exit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const InvalidStateError& e) {
    err << "error: invalid state: " << e.what() << '\n';
    return kInvalidState;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Format || e.kind() == ErrorKind::InvalidParameter ||
                   e.kind() == ErrorKind::InvalidWeight || e.kind() == ErrorKind::RejectionOverflow
               ? kUsage
               : kInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace uwit::cli
