#pragma once
//
// Run configuration and the three commands behind the entrolab tool:
// verify (seeded batch), sweep (epsilon grid over product_perturbed) and
// inspect (one pair from matrix files). Commands return their output text
// and exit code; writing is left to write_atomically.
//

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "entrolab/matrix_io.hpp"
#include "entrolab/statesgen.hpp"
#include "entrolab/verify.hpp"

namespace entrolab::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2 };

enum class Command { verify, sweep, inspect };
enum class Format { json, csv };
enum class TauKind { random, max_entangled };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
    case Command::inspect: return "inspect";
  }
  return "?";
}

inline const char* to_string(Format f) { return f == Format::json ? "json" : "csv"; }
inline const char* to_string(TauKind t) { return t == TauKind::random ? "random" : "max_entangled"; }

struct RunConfig {
  Command command = Command::verify;
  std::uint64_t trials = 100;
  EnsembleSpec ensemble;  // carries dims and seed
  QuadratureSpec quadrature;
  Tolerances tolerances;
  std::map<std::string, double> tolerance_overrides;
  std::string out;  // empty: stdout
  Format format = Format::json;
  bool smooth = false;
  unsigned jobs = 1;
  bool timestamp = true;
  std::vector<double> epsilons;  // sweep grid
  TauKind tau = TauKind::random;
  std::string rho_path, sigma_path;  // inspect

  const BipartiteDims& dims() const { return ensemble.dims; }

  /// Applies overrides and checks ranges; throws ValidationError.
  void finalize() {
    ensemble.validate();
    quadrature.validate();
    for (const auto& [name, value] : tolerance_overrides) {
      if (!tolerances.set(name, value)) {
        throw ValidationError("invalid tolerance override " + name + "=" + format_value(value));
      }
    }
    if (jobs == 0) throw ValidationError("--jobs must be at least 1");
    for (double e : epsilons) {
      if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("epsilon " + format_value(e) + " outside [0, 1]");
    }
    if (command == Command::sweep && ensemble.kind != EnsembleKind::product_perturbed) {
      throw ValidationError("sweep requires ensemble product_perturbed");
    }
  }
};

/// The part of a config that determines results. Output path and job count
/// are left out so that they cannot change the bytes of a report.
inline nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j{{"command", to_string(c.command)},
                   {"dims", {c.dims().dim_a, c.dims().dim_b}},
                   {"quadrature", c.quadrature},
                   {"tolerances", c.tolerances},
                   {"format", to_string(c.format)},
                   {"smooth", c.smooth}};
  switch (c.command) {
    case Command::verify:
      j["trials"] = c.trials;
      j["ensemble"] = c.ensemble;
      break;
    case Command::sweep:
      j["trials"] = c.trials;
      j["ensemble"] = c.ensemble;
      j["epsilons"] = c.epsilons;
      j["tau"] = to_string(c.tau);
      break;
    case Command::inspect:
      j["rho"] = c.rho_path;
      j["sigma"] = c.sigma_path;
      break;
  }
  return j;
}

/// Default epsilon grid for sweeps: 0, 0.05, ..., 0.5.
inline std::vector<double> default_epsilon_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 20.0);
  return g;
}

/// "T,PANELS,NODES".
inline QuadratureSpec parse_quadrature(const std::string& s) {
  QuadratureSpec q;
  char tail = 0;
  double t = 0.0;
  long panels = 0, nodes = 0;
  if (std::sscanf(s.c_str(), "%lf,%ld,%ld%c", &t, &panels, &nodes, &tail) != 3 || panels <= 0 || nodes <= 0) {
    throw ValidationError("--quadrature expects T,PANELS,NODES, got '" + s + "'");
  }
  q.truncation = t;
  q.panels = static_cast<int>(panels);
  q.nodes_per_panel = static_cast<int>(nodes);
  q.validate();
  return q;
}

/// "NAME=VAL".
inline std::pair<std::string, double> parse_tolerance(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--tolerance expects NAME=VAL, got '" + s + "'");
  const std::string value = s.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ValidationError("--tolerance value is not a number: '" + s + "'");
  return {s.substr(0, eq), v};
}

/// Seed from ENTROLAB_SEED, or 0 when unset. Throws on garbage.
inline std::uint64_t seed_from_env() {
  const char* v = std::getenv("ENTROLAB_SEED");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  errno = 0;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (errno != 0 || *end != '\0' || v[0] == '-') throw ValidationError("ENTROLAB_SEED is not an unsigned integer");
  return s;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes `text` to `path` through a sibling temp file and a rename, so a
/// failed run never leaves a truncated report behind.
inline void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(static_cast<unsigned long long>(
                       std::chrono::steady_clock::now().time_since_epoch().count()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    os << text;
    os.flush();
    if (!os) {
      os.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move report into place at " + path);
  }
}

struct CommandResult {
  int exit_code = kOk;
  std::string text;
};

/// Runs fn(i) for i in [0, n) on `jobs` threads; results land in index order.
template <typename R, typename F>
std::vector<R> parallel_map(std::uint64_t n, unsigned jobs, F fn) {
  std::vector<std::optional<R>> slots(n);
  std::atomic<std::uint64_t> next{0};
  const auto worker = [&] {
    for (std::uint64_t i = next++; i < n; i = next++) slots[i].emplace(fn(i));
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct TrialOutcome {
  std::uint64_t index = 0;
  nlohmann::json record;
  std::vector<InequalityReport> reports;  // headline reports, links nested
  Status status = Status::pass;
};

/// Every check on one prepared pair: the breakdown, the classical suite,
/// Pinsker, and L^1(sigma_A (x) sigma_B) contraction of the pinching and
/// modular-average channels on a random observable.
inline std::vector<InequalityReport> pair_reports(const DensityOperator& rho, const DensityOperator& sigma,
                                                  const BipartiteDims& dims, const RunConfig& c,
                                                  std::uint64_t observable_seed, nlohmann::json& record) {
  const auto b = run_breakdown(rho, sigma, dims, c.tolerances);
  record["breakdown"] = b;
  std::vector<InequalityReport> out = b.chain;
  out.push_back(b.l_bound);
  out.push_back(b.composition);
  if (!b.chain_consistent) {
    out.push_back(make_report("chain_consistency", 0.0, 1.0, Relation::greater_equal, 0.0));
  }
  for (auto& r : check_classical_suite(rho, sigma, dims, c.tolerances)) out.push_back(std::move(r));
  out.push_back(check_pinsker(rho, sigma, c.tolerances));

  const auto [sa, sb] = marginals(sigma, dims);
  const auto weight = tensor(sa, sb);
  const auto x = random_observable(dims.total(), observable_seed, 1.0);
  auto pin = check_l1_contraction(pinching_channel(weight), weight, x, c.tolerances.inequality,
                                  c.tolerances.fixed_point);
  pin.name = "l1_contraction.pinching";
  out.push_back(std::move(pin));
  auto mod = check_l1_contraction(modular_average_channel(weight, c.quadrature), weight, x,
                                  c.tolerances.inequality, c.tolerances.fixed_point);
  mod.name = "l1_contraction.modular";
  out.push_back(std::move(mod));
  return out;
}

inline Status overall_status(const std::vector<InequalityReport>& reports) {
  bool any_applicable = false;
  for (const auto& r : reports) {
    if (!r.all_pass()) return Status::fail;
    any_applicable = any_applicable || r.applicable();
  }
  return any_applicable ? Status::pass : Status::inapplicable;
}

inline TrialOutcome run_trial(const RunConfig& c, std::uint64_t index) {
  TrialOutcome t;
  t.index = index;
  auto& rec = t.record;
  rec["trial"] = index;
  try {
    const auto in = sample_trial(c.ensemble, index);
    rec["seed"] = in.seed;
    rec["redraws"] = in.redraws;
    rec["sigma_smoothing"] = in.sigma_smoothing;
    std::string reason;
    const auto prepared = prepare_full_rank(in.rho, in.sigma, c.dims(), c.smooth, &reason);
    if (!prepared) {
      t.reports.push_back(make_inapplicable("trial", reason));
      t.status = Status::inapplicable;
    } else {
      if (prepared->rho_smoothing > 0.0) rec["rho_smoothing"] = prepared->rho_smoothing;
      if (prepared->sigma_smoothing > 0.0) rec["sigma_smoothing"] = in.sigma_smoothing + prepared->sigma_smoothing;
      t.reports = pair_reports(prepared->rho, prepared->sigma, c.dims(), c,
                               sub_seed(in.seed, stream::observable), rec);
      t.status = overall_status(t.reports);
    }
  } catch (const Error& e) {
    auto r = make_inapplicable("trial", e.what());
    r.status = Status::fail;
    t.reports.push_back(std::move(r));
    t.status = Status::fail;
  }
  rec["status"] = to_string(t.status);
  rec["reports"] = t.reports;
  return t;
}

inline std::string csv_value(const ExtendedReal& x) { return x.is_infinite() ? "+inf" : format_value(x.as_double()); }
inline std::string csv_value(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  return format_value(x);
}

inline std::string csv_preamble(const RunConfig& c, const std::optional<std::string>& stamp) {
  std::string s = "# schema=" + std::to_string(kSchemaVersion) + "\n# config=" + config_json(c).dump() + "\n";
  if (stamp) s += "# timestamp=" + *stamp + "\n";
  return s;
}

inline CommandResult run_verify(const RunConfig& c) {
  const std::optional<std::string> stamp = c.timestamp ? std::optional(utc_timestamp()) : std::nullopt;
  const auto trials = parallel_map<TrialOutcome>(c.trials, c.jobs, [&](std::uint64_t i) { return run_trial(c, i); });

  std::uint64_t passed = 0, failed = 0, inapplicable = 0, checks = 0, check_failures = 0;
  for (const auto& t : trials) {
    if (t.status == Status::pass) ++passed;
    else if (t.status == Status::fail) ++failed;
    else ++inapplicable;
    std::vector<const InequalityReport*> flat;
    for (const auto& r : t.reports) flatten_reports(r, flat);
    for (const auto* r : flat) {
      if (!r->applicable()) continue;
      ++checks;
      if (r->failed()) ++check_failures;
    }
  }
  // A trial can fail through an exception, which carries no applicable report.
  CommandResult out;
  out.exit_code = failed == 0 ? kOk : kCheckFailed;

  if (c.format == Format::json) {
    nlohmann::json j{{"schema", kSchemaVersion}, {"tool", "entrolab"}, {"config", config_json(c)}};
    if (stamp) j["timestamp"] = *stamp;
    j["trials"] = nlohmann::json::array();
    for (const auto& t : trials) j["trials"].push_back(t.record);
    j["summary"] = {{"trials", c.trials},
                    {"passed", passed},
                    {"failed", failed},
                    {"inapplicable", inapplicable},
                    {"checks", checks},
                    {"check_failures", check_failures}};
    out.text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << csv_preamble(c, stamp) << "trial_id,name,lhs,rhs,slack,pass\n";
    for (const auto& t : trials) {
      std::vector<const InequalityReport*> flat;
      for (const auto& r : t.reports) flatten_reports(r, flat);
      for (const auto* r : flat) {
        os << t.index << ',' << r->name << ',' << csv_value(r->lhs) << ',' << csv_value(r->rhs) << ','
           << csv_value(r->slack) << ','
           << (r->status == Status::pass ? "true" : r->status == Status::fail ? "false" : "inapplicable")
           << '\n';
      }
    }
    out.text = os.str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Column order of the sweep table (schema 1).
inline constexpr const char* kSweepColumns =
    "epsilon,trials,mean_h_norm,max_h_norm,mean_l_norm,max_l_norm,mean_alpha,max_alpha,"
    "mean_ratio,max_ratio,theorem_failures,ratio_le_alpha,alpha_lt_2";

struct SweepSample {
  double h_norm = 0.0, l_norm = 0.0, alpha = 0.0, ratio = 0.0;
  bool theorem_pass = true;
  bool ratio_defined = false;
};

/// Smoothed maximally entangled state on dims (padded into the smaller factor).
inline DensityOperator smoothed_max_entangled(const BipartiteDims& dims) {
  const Eigen::Index k = std::min(dims.dim_a, dims.dim_b);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dims.total());
  for (Eigen::Index i = 0; i < k; ++i) v(i * dims.dim_b + i) = 1.0;
  return smooth(pure_state(v), kPureSmoothing);
}

inline SweepSample sweep_sample(const RunConfig& c, double eps, std::uint64_t trial,
                                const std::optional<DensityOperator>& tau) {
  EnsembleSpec spec = c.ensemble;
  spec.epsilon = eps;
  const auto in = sample_trial(spec, trial, tau);
  SweepSample s;
  const auto b = run_breakdown(in.rho, in.sigma, spec.dims, c.tolerances);
  s.h_norm = b.h_norm;
  s.l_norm = b.l_norm;
  s.alpha = b.alpha;
  s.theorem_pass = b.theorem().pass();
  if (b.d_full > 0.0) {
    s.ratio = (b.d_a + b.d_b) / b.d_full;
    s.ratio_defined = true;
  }
  return s;
}

inline CommandResult run_sweep(const RunConfig& c) {
  const std::optional<std::string> stamp = c.timestamp ? std::optional(utc_timestamp()) : std::nullopt;
  const std::vector<double> grid = c.epsilons.empty() ? default_epsilon_grid() : c.epsilons;
  std::optional<DensityOperator> tau;
  if (c.tau == TauKind::max_entangled) tau = smoothed_max_entangled(c.dims());

  std::ostringstream os;
  os << csv_preamble(c, stamp) << kSweepColumns << '\n';
  bool ok = true;
  for (double eps : grid) {
    const auto samples = parallel_map<SweepSample>(
        c.trials, c.jobs, [&](std::uint64_t i) { return sweep_sample(c, eps, i, tau); });
    double sum_h = 0, max_h = 0, sum_l = 0, max_l = 0, sum_a = 0, max_a = 0, sum_r = 0, max_r = 0;
    std::uint64_t failures = 0, ratio_count = 0;
    bool ratio_le_alpha = true;
    for (const auto& s : samples) {
      sum_h += s.h_norm, max_h = std::max(max_h, s.h_norm);
      sum_l += s.l_norm, max_l = std::max(max_l, s.l_norm);
      sum_a += s.alpha, max_a = std::max(max_a, s.alpha);
      if (s.ratio_defined) {
        sum_r += s.ratio, max_r = std::max(max_r, s.ratio), ++ratio_count;
        ratio_le_alpha = ratio_le_alpha && s.ratio <= s.alpha + c.tolerances.inequality;
      }
      if (!s.theorem_pass) ++failures;
    }
    const double n = samples.empty() ? 1.0 : static_cast<double>(samples.size());
    const double mean_r = ratio_count == 0 ? 0.0 : sum_r / static_cast<double>(ratio_count);
    ok = ok && failures == 0 && ratio_le_alpha;
    os << csv_value(eps) << ',' << samples.size() << ',' << csv_value(sum_h / n) << ',' << csv_value(max_h) << ','
       << csv_value(sum_l / n) << ',' << csv_value(max_l) << ',' << csv_value(sum_a / n) << ','
       << csv_value(max_a) << ',' << csv_value(mean_r) << ',' << csv_value(max_r) << ',' << failures << ','
       << (ratio_le_alpha ? "true" : "false") << ',' << (!samples.empty() && max_a < 2.0 ? "true" : "false")
       << '\n';
  }
  return {ok ? kOk : kCheckFailed, os.str()};
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

inline CommandResult run_inspect(const RunConfig& c) {
  const std::optional<std::string> stamp = c.timestamp ? std::optional(utc_timestamp()) : std::nullopt;
  const auto rho = DensityOperator::from_matrix(read_matrix_file(c.rho_path));
  const auto sigma = DensityOperator::from_matrix(read_matrix_file(c.sigma_path));
  c.dims().require_matches(rho.dim(), "rho file");
  c.dims().require_matches(sigma.dim(), "sigma file");

  nlohmann::json j{{"schema", kSchemaVersion}, {"tool", "entrolab"}, {"config", config_json(c)}};
  if (stamp) j["timestamp"] = *stamp;
  std::string reason;
  const auto prepared = prepare_full_rank(rho, sigma, c.dims(), c.smooth, &reason);
  if (!prepared) {
    j["status"] = to_string(Status::inapplicable);
    j["reason"] = reason;
    j["pinsker"] = check_pinsker(rho, sigma, c.tolerances);
    return {kOk, j.dump(2) + "\n"};
  }
  j["rho_smoothing"] = prepared->rho_smoothing;
  j["sigma_smoothing"] = prepared->sigma_smoothing;
  const auto reports = pair_reports(prepared->rho, prepared->sigma, c.dims(), c, sub_seed(0, stream::observable), j);
  const auto status = overall_status(reports);
  j["status"] = to_string(status);
  j["reports"] = reports;
  return {status == Status::fail ? kCheckFailed : kOk, j.dump(2) + "\n"};
}

inline CommandResult run_command(const RunConfig& c) {
  switch (c.command) {
    case Command::verify: return run_verify(c);
    case Command::sweep: return run_sweep(c);
    case Command::inspect: return run_inspect(c);
  }
  return {kConfigError, ""};
}

}  // namespace entrolab::cli
