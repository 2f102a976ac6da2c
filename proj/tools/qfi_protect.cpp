// Command-line front end: scheme analysis, condition checking, immune-set
// generation, figure reproduction, and Monte Carlo runs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qfip/qfip.hpp"

namespace {

using json = nlohmann::json;
using namespace qfip;

constexpr const char* kToolVersion = "qfi-protect 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct ScenarioOptions {
  int n_total = 15;
  int block_size = 1;
  double gamma_x = 0.0;
  double gamma_z = 0.0;
  double omega = 0.001;
  double time = 1.0;

  CLI::Option* opt_n = nullptr;
  CLI::Option* opt_block = nullptr;
  CLI::Option* opt_gx = nullptr;
  CLI::Option* opt_gz = nullptr;
  CLI::Option* opt_w = nullptr;
  CLI::Option* opt_t = nullptr;
  std::string config_path;

  void attach(CLI::App* app) {
    opt_n = app->add_option("--n-total", n_total, "total qubit count N")
                ->check(CLI::PositiveNumber);
    opt_block = app->add_option("--block-size", block_size,
                                "phase-flip block size n (odd)")
                    ->check(CLI::PositiveNumber);
    opt_gx = app->add_option("--gamma-x", gamma_x, "transverse dephasing rate")
                 ->check(CLI::NonNegativeNumber);
    opt_gz = app->add_option("--gamma-z", gamma_z, "parallel dephasing rate")
                 ->check(CLI::NonNegativeNumber);
    opt_w = app->add_option("--omega", omega, "signal frequency");
    opt_t = app->add_option("--time", time, "accumulation time")
                ->check(CLI::NonNegativeNumber);
    app->add_option("--config", config_path,
                    "flat key=value scenario file (flags override)");
  }

  // Flags beat the config file, which beats defaults.
  void resolve() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot open file");
    const auto kv = parse_flat_config(in);
    auto pull = [&kv](CLI::Option* opt, const std::string& key, auto& slot) {
      if (opt->count() > 0) return;
      const auto it = kv.find(key);
      if (it == kv.end()) return;
      std::istringstream is(it->second);
      is >> slot;
      if (is.fail())
        throw CLI::ValidationError("--config", "bad value for " + key);
    };
    pull(opt_n, "n_total", n_total);
    pull(opt_block, "block_size", block_size);
    pull(opt_gx, "gamma_x", gamma_x);
    pull(opt_gz, "gamma_z", gamma_z);
    pull(opt_w, "omega", omega);
    pull(opt_t, "time", time);
  }

  DephasingScenario scenario() const {
    return DephasingScenario(n_total, block_size, gamma_x, gamma_z, omega,
                             time);
  }

  DephasingScenario scenario_at(double t) const {
    return DephasingScenario(n_total, block_size, gamma_x, gamma_z, omega, t);
  }
};

struct OutputOptions {
  std::string path;
  std::string format = "csv";

  void attach(CLI::App* app) {
    app->add_option("--output", path, "output file (default: stdout)");
    app->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(path);
      if (!out) throw CLI::ValidationError("--output", "cannot open file");
      out << text;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct CsvWriter {
  std::ostringstream os;

  void meta(const std::string& key, const std::string& value) {
    os << "# " << key << " = " << value << "\n";
  }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      os << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }
};

std::vector<double> log_grid(double from, double to, int points) {
  std::vector<double> out;
  const double la = std::log10(from), lb = std::log10(to);
  for (int i = 0; i < points; ++i)
    out.push_back(std::pow(10.0, la + (lb - la) * i / (points - 1)));
  return out;
}

std::vector<Matrix> parse_error_list(const std::string& spec, int expected_n) {
  std::vector<Matrix> out;
  std::stringstream ss(spec);
  std::string token;
  int index = 0;
  while (std::getline(ss, token, ',')) {
    ++index;
    const auto a = token.find_first_not_of(" \t");
    const auto b = token.find_last_not_of(" \t");
    if (a == std::string::npos)
      throw CLI::ValidationError("--errors", "empty Pauli string at entry " +
                                                 std::to_string(index));
    token = token.substr(a, b - a + 1);
    PauliOperator p = [&] {
      try {
        return PauliOperator::parse(token);
      } catch (const std::invalid_argument& err) {
        throw CLI::ValidationError(
            "--errors", "entry " + std::to_string(index) + ": " + err.what());
      }
    }();
    if (expected_n > 0 && p.n != expected_n)
      throw CLI::ValidationError(
          "--errors", "entry " + std::to_string(index) + " acts on " +
                          std::to_string(p.n) + " qubits, expected " +
                          std::to_string(expected_n));
    out.push_back(p.dense());
  }
  if (out.empty()) throw CLI::ValidationError("--errors", "no errors given");
  return out;
}

// ---- qfi ---------------------------------------------------------------

int cmd_qfi(const ScenarioOptions& sc_opts, const OutputOptions& out_opts,
            bool oracle, long nu, double sweep_from, double sweep_to,
            int sweep_points) {
  const DephasingScenario base = sc_opts.scenario();
  if (base.n_total % 2 == 0)
    throw std::domain_error("raw closed form needs odd n_total");
  if (oracle && base.n_total > kKrausProductCap)
    throw std::domain_error("--oracle capped at " +
                            std::to_string(kKrausProductCap) + " qubits");

  CsvWriter csv;
  csv.meta("tool", kToolVersion);
  csv.meta("scenario", "n_total=" + std::to_string(base.n_total) +
                           " block_size=" + std::to_string(base.block_size) +
                           " gamma_x=" + fmt(base.gamma_x) + " gamma_z=" +
                           fmt(base.gamma_z) + " omega=" + fmt(base.omega));
  csv.meta("nu", std::to_string(nu));
  std::vector<std::string> cols = {"t", "qfi_raw", "qfi_logical", "crb_raw",
                                   "crb_logical"};
  if (oracle) cols.push_back("qfi_oracle");
  csv.header(cols);

  // the QFI decays to exactly zero at strong dephasing; report the bound
  // as unattainable rather than failing
  const auto crb_cell = [nu](double f) {
    return f > 0 ? fmt(crb(f, nu)) : std::string("inf");
  };
  const auto crb_json = [nu](double f) {
    return f > 0 ? json(crb(f, nu)) : json();
  };

  json rows = json::array();
  for (const double t : log_grid(sweep_from, sweep_to, sweep_points)) {
    const DephasingScenario sc = sc_opts.scenario_at(t);
    const double f_raw =
        ghz_qfi_exact(sc.n_total, t, sc.omega, sc.p_x(), sc.p_z());
    const double f_log = logical_ghz_qfi_exact(sc);
    std::vector<std::string> cells = {fmt(t), fmt(f_raw), fmt(f_log),
                                      crb_cell(f_raw), crb_cell(f_log)};
    json jrow = {{"t", t},
                 {"qfi_raw", f_raw},
                 {"qfi_logical", f_log},
                 {"crb_raw", crb_json(f_raw)},
                 {"crb_logical", crb_json(f_log)}};
    if (oracle) {
      const double f_oracle = ghz_qfi_brute_force(sc, SchemeKind::raw);
      cells.push_back(fmt(f_oracle));
      jrow["qfi_oracle"] = f_oracle;
    }
    csv.row(cells);
    rows.push_back(std::move(jrow));
  }
  if (out_opts.format == "json")
    out_opts.write(rows.dump(2) + "\n");
  else
    out_opts.write(csv.os.str());
  return kExitOk;
}

// ---- check -------------------------------------------------------------

int cmd_check(const std::string& builder, int n, double time, double theta,
              const std::string& errors_spec, const OutputOptions& out_opts) {
  if (n <= 0) throw CLI::ValidationError("--n", "must be positive");
  PureState probe = [&] {
    if (builder == "theorem3") {
      if (n % 2 == 0)
        throw CLI::ValidationError("--n", "theorem3 builder needs odd n");
      Vector plus1 = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
      Vector v = Vector::Ones(1);
      for (int i = 0; i < n; ++i) v = tensor_product(v, plus1);
      return PureState(std::move(v));
    }
    if (builder == "ghz") return ghz_probe(n);
    throw CLI::ValidationError("--builder", "unknown builder " + builder);
  }();
  HermitianObservable h = [&] {
    if (builder == "theorem3") {
      PauliOperator zi = PauliOperator::identity(n);
      for (int i = 0; i < n; ++i) zi.z_bits[std::size_t(i)] = 1;
      return HermitianObservable(time * zi.dense());
    }
    Matrix sum = Matrix::Zero(probe.dim(), probe.dim());
    for (int i = 0; i < n; ++i) sum += embed_pauli('Z', i, n);
    return HermitianObservable(0.5 * time * sum);
  }();

  // the no-error branch is always part of the physical error set
  std::vector<Matrix> errors{identity(probe.dim())};
  for (auto& e : parse_error_list(errors_spec, n)) errors.push_back(std::move(e));
  const ParametricFamily family(probe, h);
  const TestableReport testable =
      check_testable_conditions(family, theta, errors);
  const KrausChannel channel = channel_from_errors(errors);
  const PreservationReport known =
      check_preservation_known_channel(family, theta, channel);

  const DensityMatrix rho = evolve(family, theta);
  const Matrix drho = state_derivative(family, theta);
  const double before = qfi(rho, drho);
  const double after = qfi(apply_channel(channel, rho),
                           apply_channel(channel, drho));

  const json report = {
      {"cond_i", testable.cond_i},
      {"cond_ii", testable.cond_ii},
      {"preserved", testable.preserved()},
      {"residuals",
       {{"cond_i", testable.max_ci_violation},
        {"cond_ii", testable.max_cii_violation},
        {"known_channel", known.max_residual}}},
      {"qfi_before", before},
      {"qfi_after", after}};
  out_opts.write(report.dump(2) + "\n");
  return kExitOk;
}

// ---- immune-set --------------------------------------------------------

int cmd_immune_set(int n, const OutputOptions& out_opts) {
  if (n <= 0 || n % 2 == 0)
    throw CLI::ValidationError("--n", "need odd positive n = 2t+1");
  const int t = (n - 1) / 2;
  const StabilizerCode code = phase_flip_code(n);
  const auto set =
      immune_error_set(code, z_errors_up_to_weight(n, t), code.logical_x);
  std::ostringstream os;
  for (const auto& p : set) os << p.str() << "\n";
  out_opts.write(os.str());
  return kExitOk;
}

// ---- figure ------------------------------------------------------------

int cmd_figure(int which, const ScenarioOptions& sc_opts,
               const OutputOptions& out_opts) {
  CsvWriter csv;
  csv.meta("tool", kToolVersion);
  if (which == 3) {
    const int N = sc_opts.n_total;
    const double gx = sc_opts.gamma_x;
    const double gz = sc_opts.gamma_z;
    const double w = sc_opts.omega;
    csv.meta("figure", "3");
    csv.meta("parameters", "N=" + std::to_string(N) + " omega=" + fmt(w) +
                               " gamma_x=" + fmt(gx) + " gamma_z=" + fmt(gz));
    csv.header({"t", "n", "crb"});
    for (const int n : {1, 3, 5, 15}) {
      if (N % n != 0) continue;
      for (const double t : log_grid(0.01, 20.0, 200)) {
        const DephasingScenario sc(N, n, gx, gz, w, t);
        const double f = logical_ghz_qfi_exact(sc);
        csv.row({fmt(t), std::to_string(n),
                 f > 0 ? fmt(crb(f, 1)) : "inf"});
      }
    }
  } else if (which == 4) {
    const double w = sc_opts.omega;
    const double t = sc_opts.time;
    csv.meta("figure", "4");
    csv.meta("parameters", "omega=" + fmt(w) + " t=" + fmt(t));
    csv.meta("note",
             "N grid restricted to odd multiples of 3 (closed form needs an "
             "odd block count)");
    csv.header({"N", "scenario", "crb"});
    const std::vector<std::pair<std::string, std::pair<double, double>>>
        noise = {{"1", {5e-4, 5e-3}}, {"2", {1e-3, 1e-2}}};
    const auto crb_cell = [](double f) {
      return f > 0 ? fmt(crb(f, 1)) : std::string("inf");
    };
    for (int N = 3; N <= 150; N += 6) {
      for (const auto& [tag, g] : noise) {
        const DephasingScenario raw(N, 1, g.first, g.second, w, t);
        const double f_raw =
            ghz_qfi_exact(N, t, w, raw.p_x(), raw.p_z());
        csv.row({std::to_string(N), "raw-" + tag, crb_cell(f_raw)});
        const DephasingScenario log3(N, 3, g.first, g.second, w, t);
        csv.row({std::to_string(N), "logical-" + tag,
                 crb_cell(logical_ghz_qfi_exact(log3))});
      }
      csv.row({std::to_string(N), "heisenberg", fmt(1.0 / N)});
      csv.row({std::to_string(N), "sql", fmt(1.0 / std::sqrt(double(N)))});
      csv.row({std::to_string(N), "heisenberg-3x", fmt(3.0 / N)});
    }
  } else {
    throw CLI::ValidationError("--which", "figure must be 3 or 4");
  }
  out_opts.write(csv.os.str());
  return kExitOk;
}

// ---- montecarlo --------------------------------------------------------

int cmd_montecarlo(const std::string& scheme, double theta, double time,
                   int nu, int trials, std::uint64_t seed, double z_mix,
                   const OutputOptions& out_opts) {
  if (trials <= 0) throw CLI::ValidationError("--trials", "must be positive");
  if (nu <= 0) throw CLI::ValidationError("--nu", "must be positive");

  std::optional<AttainmentReport> report;
  if (scheme == "single-qubit") {
    const PureState plus(
        Vector((Vector(2) << 1, 1).finished() / std::sqrt(2.0)));
    const ParametricFamily family(
        plus, HermitianObservable(0.5 * time * pauli_matrix('Z')));
    // SLD eigenbasis at theta: the rotated Y basis attains the QFI; measure
    // in the eigenbasis of the evolved-Y observable.
    const Matrix l = sld(evolve(family, theta),
                         state_derivative(family, theta)).sld.entries;
    Eigen::SelfAdjointEigenSolver<Matrix> es(l);
    std::vector<Matrix> projectors;
    for (Eigen::Index i = 0; i < 2; ++i)
      projectors.push_back(es.eigenvectors().col(i) *
                           es.eigenvectors().col(i).adjoint());
    const Povm povm(std::move(projectors));
    report = crb_attainment_report(family, povm, nullptr, theta,
                                   M_PI / (2.0 * time), nu, trials, seed);
  } else if (scheme == "theorem3") {
    const int n = 3;
    Vector plus1 = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
    Vector v = Vector::Ones(1);
    for (int i = 0; i < n; ++i) v = tensor_product(v, plus1);
    PauliOperator zi = PauliOperator::identity(n);
    for (int i = 0; i < n; ++i) zi.z_bits[std::size_t(i)] = 1;
    const ParametricFamily family(PureState(std::move(v)),
                                  HermitianObservable(time * zi.dense()));
    const StabilizerCode code = phase_flip_code(n);
    const Povm povm = optimal_measurement_povm(code, code.logical_x);
    // weight z_mix per single-site Z, the identity absorbing the rest
    const auto zs = z_errors_up_to_weight(n, 1);
    const double id_weight = 1.0 - z_mix * double(zs.size() - 1);
    if (id_weight < 0)
      throw CLI::ValidationError("--z-mix", "total error weight exceeds 1");
    std::vector<Matrix> errors{std::sqrt(id_weight) * zs.front().dense()};
    for (std::size_t i = 1; i < zs.size(); ++i)
      errors.push_back(std::sqrt(z_mix) * zs[i].dense());
    const KrausChannel channel = channel_from_errors(errors);
    // the X-basis fringes are even in theta, so the search window must stay
    // inside one monotonic branch to keep the likelihood single-peaked
    report = crb_attainment_report(family, povm, &channel, theta,
                                   0.25 / time, nu, trials, seed);
  } else {
    throw CLI::ValidationError("--scheme", "unknown scheme " + scheme);
  }

  const json out = {{"scheme", scheme},
                    {"theta", theta},
                    {"nu", report->nu},
                    {"trials", report->trials},
                    {"seed", report->seed},
                    {"rng", kRngAlgorithm},
                    {"empirical_std", report->empirical_std},
                    {"empirical_bias", report->empirical_bias},
                    {"crb", report->crb},
                    {"ratio", report->ratio}};
  out_opts.write(out.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QFI-preserving metrology toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ScenarioOptions qfi_sc;
  OutputOptions out_opts;

  auto* qfi_cmd =
      app.add_subcommand("qfi", "sweep QFI and CRB over accumulation time");
  qfi_sc.attach(qfi_cmd);
  out_opts.attach(qfi_cmd);
  bool oracle = false;
  long nu = 1;
  double sweep_from = 0.01, sweep_to = 20.0;
  int sweep_points = 200;
  qfi_cmd->add_flag("--oracle", oracle,
                    "add a brute-force density-matrix column (N <= 9)");
  qfi_cmd->add_option("--nu", nu, "experiment repetitions for the CRB")
      ->check(CLI::PositiveNumber);
  qfi_cmd->add_option("--sweep-from", sweep_from, "first t value")
      ->check(CLI::PositiveNumber);
  qfi_cmd->add_option("--sweep-to", sweep_to, "last t value")
      ->check(CLI::PositiveNumber);
  qfi_cmd->add_option("--sweep-points", sweep_points, "grid size")
      ->check(CLI::Range(2, 100000));

  auto* check_cmd = app.add_subcommand(
      "check", "test QFI preservation for a scheme and an error list");
  OutputOptions check_out;
  check_out.format = "json";
  check_out.attach(check_cmd);
  std::string builder = "theorem3", errors_spec;
  int check_n = 3;
  double check_theta = 0.3, check_time = 1.0;
  check_cmd->add_option("--builder", builder, "probe builder: theorem3|ghz");
  check_cmd->add_option("--n", check_n, "qubit count")
      ->check(CLI::PositiveNumber);
  check_cmd->add_option("--theta", check_theta, "evaluation point");
  check_cmd->add_option("--time", check_time, "accumulation time scale");
  check_cmd
      ->add_option("--errors", errors_spec,
                   "comma-separated Pauli strings, e.g. ZII,IZI,IIZ,XXX")
      ->required();

  auto* immune_cmd = app.add_subcommand(
      "immune-set", "list the QFI-immune error set of the 2t+1 scheme");
  OutputOptions immune_out;
  immune_out.attach(immune_cmd);
  int immune_n = 3;
  immune_cmd->add_option("--n", immune_n, "qubit count (odd, = 2t+1)")
      ->check(CLI::PositiveNumber);

  auto* figure_cmd =
      app.add_subcommand("figure", "emit the reference figure datasets");
  ScenarioOptions fig_sc;
  fig_sc.n_total = 15;
  fig_sc.gamma_x = 0.001;
  fig_sc.gamma_z = 0.5;
  fig_sc.omega = 0.001;
  fig_sc.time = 1.0;
  fig_sc.attach(figure_cmd);
  OutputOptions figure_out;
  figure_out.attach(figure_cmd);
  int which = 3;
  figure_cmd->add_option("--which", which, "figure number: 3 or 4");

  auto* mc_cmd = app.add_subcommand(
      "montecarlo", "Monte Carlo Cramer-Rao attainment experiment");
  OutputOptions mc_out;
  mc_out.format = "json";
  mc_out.attach(mc_cmd);
  std::string scheme = "single-qubit";
  int mc_nu = 10000, mc_trials = 200;
  std::uint64_t mc_seed = 1;
  double mc_theta = 0.3, mc_time = 1.0, mc_zmix = 0.1;
  mc_cmd->add_option("--scheme", scheme, "single-qubit|theorem3");
  mc_cmd->add_option("--theta", mc_theta, "true parameter value");
  mc_cmd->add_option("--time", mc_time, "accumulation time scale");
  mc_cmd->add_option("--nu", mc_nu, "samples per trial");
  mc_cmd->add_option("--trials", mc_trials, "independent MLE experiments");
  mc_cmd->add_option("--seed", mc_seed, "master RNG seed");
  mc_cmd->add_option("--z-mix", mc_zmix,
                     "per-error mixing weight for the theorem3 Z channel")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
    if (qfi_cmd->parsed()) {
      qfi_sc.resolve();
      return cmd_qfi(qfi_sc, out_opts, oracle, nu, sweep_from, sweep_to,
                     sweep_points);
    }
    if (check_cmd->parsed())
      return cmd_check(builder, check_n, check_time, check_theta, errors_spec,
                       check_out);
    if (immune_cmd->parsed()) return cmd_immune_set(immune_n, immune_out);
    if (figure_cmd->parsed()) {
      fig_sc.resolve();
      return cmd_figure(which, fig_sc, figure_out);
    }
    if (mc_cmd->parsed())
      return cmd_montecarlo(scheme, mc_theta, mc_time, mc_nu, mc_trials,
                            mc_seed, mc_zmix, mc_out);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
