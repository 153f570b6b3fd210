#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqft/adiabatic_limit.hpp"
#include "cqft/causal_distributions.hpp"
#include "cqft/eg_induction.hpp"
#include "cqft/errors.hpp"
#include "cqft/fock_kernel.hpp"
#include "cqft/qed_second_order.hpp"
#include "cqft/splitting_engine.hpp"
#include "defaults.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cqft;

namespace {

constexpr const char* massless_message =
    "on-shell normalization does not exist for a massless charged field (m = 0): "
    "the adiabatic limit diverges; use --normalization custom with a spacelike subtraction point";

struct Flags {
  std::string config_path;
  std::string out_dir = ".";
  double m = 0, mu = 0, c0 = 0, c1 = 0, c2 = 0, eps_start = 0, eps_stop = 0;
  int eps_steps = 0, order = 0, grid_modes = 0, cutoff = 0;
  std::string normalization;
  std::string theory, channel, profiles;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values, const std::string& label = {}) {
    bool first = true;
    if (!label.empty()) {
      out_ << label;
      first = false;
    }
    for (double v : values) {
      out_ << (first ? "" : ",") << fmt17(v);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<double> linear_grid(const json& g) {
  const double lo = g.at("lo").get<double>();
  const double hi = g.at("hi").get<double>();
  const int n = g.at("points").get<int>();
  if (n < 2 || !(hi > lo)) throw ValidationError("grid needs lo < hi and at least two points");
  std::vector<double> xs(n);
  for (int k = 0; k < n; ++k) xs[k] = lo + (hi - lo) * k / (n - 1);
  return xs;
}

// Defaults, then the config file block for `command`, then explicit flags.
json resolve(const std::string& command, const Flags& flags, const CLI::App& app) {
  json cfg = json::parse(embedded_defaults).at(command);
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw ValidationError("cannot read config " + flags.config_path);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg.merge_patch(file.contains(command) ? file.at(command) : file);
  }
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--m")) cfg["m"] = flags.m;
  if (given("--mu")) cfg["mu"] = flags.mu;
  if (given("--c0")) cfg["c0"] = flags.c0;
  if (given("--c1")) cfg["c1"] = flags.c1;
  if (given("--c2")) cfg["c2"] = flags.c2;
  if (given("--normalization")) cfg["normalization"] = flags.normalization;
  if (given("--eps-start")) cfg["eps_start"] = flags.eps_start;
  if (given("--eps-stop")) cfg["eps_stop"] = flags.eps_stop;
  if (given("--eps-steps")) cfg["eps_steps"] = flags.eps_steps;
  if (given("--order")) cfg["order"] = flags.order;
  if (given("--grid-modes")) cfg["grid_modes"] = flags.grid_modes;
  if (given("--cutoff")) cfg["cutoff"] = flags.cutoff;
  if (given("--theory")) cfg["theory"] = flags.theory;
  if (given("--channel")) cfg["channel"] = flags.channel;
  if (given("--profiles")) {
    json list = json::array();
    std::string item;
    for (char c : flags.profiles + ",") {
      if (c == ',') {
        if (!item.empty()) list.push_back(item);
        item.clear();
      } else {
        item += c;
      }
    }
    cfg["profiles"] = list;
  }
  if (cfg.contains("tolerance") && !(cfg["tolerance"].get<double>() > 0))
    throw ValidationError("tolerances must be positive");
  return cfg;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (!fs::is_directory(out)) throw ValidationError("output directory " + dir + " is not writable");
  return out;
}

bool on_shell(const json& cfg) {
  const auto norm = cfg.at("normalization").get<std::string>();
  if (norm != "on-shell" && norm != "custom") throw ValidationError("normalization must be on-shell or custom");
  return norm == "on-shell";
}

SplitSpec pi_spec(const json& cfg) {
  const double m = cfg.at("m").get<double>();
  const double c0 = cfg.value("c0", 0.0), c1 = cfg.value("c1", 0.0);
  if (m < 0) throw ValidationError("mass must be nonnegative");
  if (on_shell(cfg)) {
    if (m == 0) throw ValidationError(massless_message);
    return on_shell_pi_spec(c0, c1);
  }
  return SplitSpec{1, {c0, c1}, SubtractionPoint::at(cfg.at("subtraction_point").get<double>())};
}

SplitSpec sigma_spec(const json& cfg) {
  const double m = cfg.at("m").get<double>();
  const double c0 = cfg.value("c0", 0.0), c1 = cfg.value("c1", 0.0);
  if (m < 0) throw ValidationError("mass must be nonnegative");
  if (on_shell(cfg)) {
    if (m == 0) throw ValidationError(massless_message);
    return on_shell_sigma_spec(m, c0, c1);
  }
  return SplitSpec{1, {c0, c1}, SubtractionPoint::at(cfg.at("subtraction_point").get<double>())};
}

double sigma_mu(const json& cfg) {
  return cfg.contains("mu") ? cfg.at("mu").get<double>() : cfg.at("m").get<double>() / 10.0;
}

int cmd_split(const json& cfg, const fs::path& out) {
  const json& desc = cfg.at("distribution");
  const CausalDistribution d = desc.is_string() ? distribution_from_json(json{{"kind", desc}})
                                                : distribution_from_json(desc);
  SplitSpec spec;
  spec.omega = d.omega;
  for (const char* key : {"c0", "c1", "c2"})
    if (cfg.contains(key)) spec.normalization.emplace_back(cfg.at(key).get<double>());
  if (cfg.contains("constants"))
    for (const auto& c : cfg.at("constants")) spec.normalization.emplace_back(c.get<double>());
  if (!spec.normalization.empty()) spec.subtraction_point = SubtractionPoint::at(cfg.value("subtraction_point", 0.0));
  const SplitResult r = split(d, spec);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';

  CsvWriter csv(out / "split.csv", {"x", "d_re", "d_im", "ret_re", "ret_im", "adv_re", "adv_im"});
  // ret and adv are approached from their own half-planes, so the jump is not zero by construction
  double residual = 0.0;
  for (double x : linear_grid(cfg.at("grid"))) {
    const Complex dv = d(x), rv = r.retarded(x), av = r.advanced(x);
    const double delta = 1e-9 * std::max(1.0, std::abs(x));
    auto jump_at = [&](double h) { return r.retarded.at({x, h}) - r.advanced.at({x, -h}); };
    const Complex jump = 2.0 * jump_at(delta / 2) - jump_at(delta);
    residual = std::max(residual, std::abs(jump - dv));
    csv.row({x, dv.real(), dv.imag(), rv.real(), rv.imag(), av.real(), av.imag()});
  }
  const auto est = scaling_degree_estimate(d, {1.0, 0.0, 0.0, 0.0});
  json report = {{"distribution", d.name},
                 {"omega", d.omega},
                 {"omega_estimate", est.exponent},
                 {"omega_estimate_low_confidence", est.low_confidence},
                 {"ambiguity_dimension", ambiguity_dimension(d.omega)},
                 {"subtractions", r.subtractions},
                 {"subtraction_point", r.x0},
                 {"reconstruction_residual", residual},
                 {"warnings", r.warnings}};
  write_json(out / "split.json", report);
  return 0;
}

int cmd_vacuum_pol(const json& cfg, const fs::path& out) {
  const double m = cfg.at("m").get<double>();
  const auto pi = build_vacuum_polarization(m, pi_spec(cfg));
  CsvWriter csv(out / "vacuum-pol.csv", {"s", "pi_re", "pi_im"});
  for (double s : linear_grid(cfg.at("grid"))) {
    const Complex v = pi.scalar(s);
    csv.row({s, v.real(), v.imag()});
  }
  const auto report = check_on_shell(pi, cfg.at("tolerance").get<double>());
  write_json(out / "vacuum-pol.json", {{"m", m},
                                       {"normalization", cfg.at("normalization")},
                                       {"c0", cfg.value("c0", 0.0)},
                                       {"c1", cfg.value("c1", 0.0)},
                                       {"on_shell", report.to_json()}});
  return 0;
}

int cmd_self_energy(const json& cfg, const fs::path& out) {
  const double m = cfg.at("m").get<double>();
  const double mu = sigma_mu(cfg);
  const auto sigma = build_self_energy(m, mu, sigma_spec(cfg));
  CsvWriter csv(out / "self-energy.csv", {"s", "a_re", "a_im", "b_re", "b_im"});
  for (double s : linear_grid(cfg.at("grid"))) {
    const Complex a = sigma.a(s), b = sigma.b(s);
    csv.row({s, a.real(), a.imag(), b.real(), b.imag()});
  }
  const auto report = check_on_shell(sigma, cfg.at("tolerance").get<double>());
  write_json(out / "self-energy.json", {{"m", m},
                                        {"mu", mu},
                                        {"normalization", cfg.at("normalization")},
                                        {"c0", cfg.value("c0", 0.0)},
                                        {"c1", cfg.value("c1", 0.0)},
                                        {"on_shell", report.to_json()}});
  return 0;
}

int cmd_sweep(const json& cfg, const fs::path& out) {
  const std::string channel_name = cfg.at("channel").get<std::string>();
  const double m = cfg.at("m").get<double>();
  const auto schedule = ScalingFamily::geometric(cfg.at("eps_start").get<double>(), cfg.at("eps_stop").get<double>(),
                                                 cfg.at("eps_steps").get<int>());
  CsvWriter csv(out / "adiabatic-sweep.csv", {"profile", "eps", "re", "im", "abs"});
  json verdicts = json::object();

  std::optional<SelfEnergy> sigma;
  std::optional<VacuumPolarization> pi;
  const bool vacuum = channel_name == "vacuum";
  std::optional<Channel> channel;
  if (!vacuum) {
    channel = channel_from_string(channel_name);
    if (*channel == Channel::sigma_into_psi)
      sigma = build_self_energy(m, sigma_mu(cfg), sigma_spec(cfg));
    else
      pi = build_vacuum_polarization(m, pi_spec(cfg));
  } else if (m <= 0) {
    throw ValidationError("the vacuum channel needs m > 0");
  }

  for (const auto& pname : cfg.at("profiles")) {
    ScalingFamily family;
    family.profile = profile_from_string(pname.get<std::string>());
    family.epsilons = schedule;
    family.validate();
    SweepResult r;
    if (vacuum) {
      r = weak_limit_vacuum(2, family, m, {cfg.value("c0", 0.0), cfg.value("c1", 0.0), cfg.value("c2", 0.0)});
    } else {
      GreenFunction green{sigma ? &*sigma : nullptr, pi ? &*pi : nullptr};
      const TestData data = TestData::standard();
      r = sweep(*channel, green, data, family);
      json v = r.verdict_json();
      if (const auto exact = epsilon_free_value(*channel, green, data, family))
        v["epsilon_free_value"] = {exact->real(), exact->imag()};
      else
        v["epsilon_free_value"] = nullptr;
      verdicts[pname.get<std::string>()] = v;
    }
    if (vacuum) verdicts[pname.get<std::string>()] = r.verdict_json();
    for (std::size_t k = 0; k < r.epsilons.size(); ++k)
      csv.row({r.epsilons[k], r.values[k].real(), r.values[k].imag(), std::abs(r.values[k])}, pname.get<std::string>());
  }
  write_json(out / "adiabatic-sweep.json",
             {{"channel", channel_name}, {"m", m}, {"normalization", cfg.at("normalization")}, {"profiles", verdicts}});
  return 0;
}

int cmd_fock_check(const json& cfg, const fs::path& out) {
  const int modes = cfg.at("grid_modes").get<int>();
  const int cutoff = cfg.at("cutoff").get<int>();
  const double tol = cfg.at("tolerance").get<double>();
  if (modes < 1 || modes > 12) throw ValidationError("grid_modes must lie in [1, 12]");
  if (cutoff < 1 || cutoff > 6) throw ValidationError("cutoff must lie in [1, 6]");
  json report = {{"grid_modes", modes}, {"cutoff", cutoff}, {"tolerance", tol}};
  bool pass = true;
  for (auto [name, stats] : {std::pair{"bose", Statistics::bose}, std::pair{"fermi", Statistics::fermi}}) {
    const auto grid = MomentumGrid::line(static_cast<std::size_t>(modes), 0.5, 2.0, stats);
    const double dev = commutator_check(grid, cutoff);
    report[name] = {{"max_deviation", dev}, {"pass", dev <= tol}};
    pass = pass && dev <= tol;
  }
  report["pass"] = pass;
  write_json(out / "fock-check.json", report);
  return 0;
}

int cmd_wick_expand(const json& cfg, const fs::path& out) {
  const int order = cfg.at("order").get<int>();
  const auto theory = interaction_from_string(cfg.at("theory").get<std::string>());
  if (order < 1 || order > default_symbolic_cap)
    throw ValidationError("order " + std::to_string(order) + " outside [1, " + std::to_string(default_symbolic_cap) +
                          "]");
  SplitRegistry registry;
  const OrderData data = run_induction(theory, order, registry);
  json report = {{"theory", cfg.at("theory")}, {"order", order}, {"S", to_json(data.S.at(order))}};
  report["term_count"] = data.S.at(order).size();
  report["splits"] = to_json(registry);
  write_json(out / "wick-expand.json", report);
  return 0;
}

void check_thread_env() {
  if (const char* v = std::getenv("CQFT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1) throw ValidationError("CQFT_THREADS must be a positive integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal perturbation theory toolkit: splitting, second-order QED Green functions, adiabatic sweeps."};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config_path, "JSON configuration; a block named after the command is used if present");
  app.add_option("--out", f.out_dir, "Output directory")->capture_default_str();
  app.add_option("--m", f.m, "Fermion mass (default 1)");
  app.add_option("--mu", f.mu, "Photon regulator mass for the self-energy (default m/10)");
  app.add_option("--normalization", f.normalization, "on-shell or custom (default on-shell)")
      ->check(CLI::IsMember({"on-shell", "custom"}));
  app.add_option("--c0", f.c0, "Normalization constant C0 (default 0)");
  app.add_option("--c1", f.c1, "Normalization constant C1 (default 0)");
  app.add_option("--c2", f.c2, "Normalization constant C2 (default 0)");
  app.add_option("--eps-start", f.eps_start, "Largest eps of the schedule (default 2^-3)");
  app.add_option("--eps-stop", f.eps_stop, "Smallest eps of the schedule (default 2^-14)");
  app.add_option("--eps-steps", f.eps_steps, "Number of schedule points (default 12)");
  app.add_option("--order", f.order, "Perturbative order for wick-expand (default 2, cap 5)");
  app.add_option("--grid-modes", f.grid_modes, "Momentum modes for fock-check (default 6)");
  app.add_option("--cutoff", f.cutoff, "Particle-number cutoff for fock-check (default 3)");
  app.add_option("--theory", f.theory, "Interaction for wick-expand: qed, phi3, phi2 (default qed)");
  app.add_option("--channel", f.channel,
                 "Sweep channel: sigma_into_psi, pi_into_a, pi_into_current, vacuum (default sigma_into_psi)");
  app.add_option("--profiles", f.profiles, "Comma-separated switching profiles: gaussian, sech, sech2");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const json&, const fs::path&);
  };
  const std::vector<Command> commands = {
      {"split", "Split a causal distribution into retarded and advanced parts", cmd_split},
      {"vacuum-pol", "Build the normalized vacuum polarization and check the on-shell conditions", cmd_vacuum_pol},
      {"self-energy", "Build the normalized electron self-energy and check the shell conditions", cmd_self_energy},
      {"adiabatic-sweep", "Sweep the switching scale and classify the adiabatic limit", cmd_sweep},
      {"fock-check", "Verify CCR/CAR on a truncated momentum grid", cmd_fock_check},
      {"wick-expand", "Expand the time-ordered product of a given order", cmd_wick_expand},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    check_thread_env();
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) {
        const json cfg = resolve(c.name, f, app);
        return c.run(cfg, prepare_out(f.out_dir));
      }
    }
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: bad configuration: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const TruncationError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
}
