// Command-line front end: recovery pipelines, certificate verification,
// bound audits, sweeps and grid-convergence tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssr/bounds.hpp"
#include "ssr/certificate.hpp"
#include "ssr/errors.hpp"
#include "ssr/io.hpp"
#include "ssr/parallel.hpp"
#include "ssr/recovery.hpp"

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kSolver = 3 };

struct Common {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string config;
};

struct RecoverArgs {
  std::string method = "sdp";
  std::string measure, moments, out;
  int degree = 6;
  int restarts = 20000;
  double tol = 1e-8;
  std::optional<double> tau;
  double delta = 0.0;
  int grid_n = 40;
  double thresh = 0.1;
  double bandwidth = 0.0;
};

struct CertificateArgs {
  std::string support, out, samples_out;
  int degree = 41;
  double sampling = 50.0;
  int plot_points = 20000;
};

struct AuditArgs {
  std::vector<int> degrees{20, 30, 41};
  std::vector<std::string> bounds;
  int samples = 10000;
  std::string out;
};

struct SweepArgs {
  int trials = 5;
  int degree = 6;
  int restarts = 200;
  int bins = 20;
  std::string out, dat;
};

struct ConvergenceArgs {
  std::string measure, out, dat;
  int degree = 6;
  std::vector<int> grid_ns{20, 40, 80};
  double thresh = 0.1;
  double bandwidth = 0.0;
};

struct MomentsArgs {
  std::string measure, out;
  int degree = 6;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty())
    std::cout << text << '\n';
  else
    ssr::write_file(path, text + "\n");
}

void emit_table(const std::string& csv_path, const std::string& dat_path, const std::vector<std::string>& header,
                const ssr::CsvTable& rows) {
  std::ostringstream csv;
  ssr::write_csv(csv, header, rows);
  if (csv_path.empty())
    std::cout << csv.str();
  else
    ssr::write_file(csv_path, csv.str());
  if (!dat_path.empty()) {
    std::ostringstream dat;
    ssr::write_dat(dat, header, rows);
    ssr::write_file(dat_path, dat.str());
  }
}

int run_recover(const RecoverArgs& a, const Common& c) {
  if (a.measure.empty() == a.moments.empty()) throw ssr::InputError("recover: give exactly one of --measure or --moments");
  std::optional<ssr::AtomicMeasure> truth;
  ssr::MomentVector y;
  if (!a.measure.empty()) {
    truth = ssr::load_measure(a.measure);
    y = ssr::moments(a.degree, *truth);
  } else {
    y = ssr::load_moments(a.moments);
  }
  if (a.delta > 0.0) y = ssr::add_noise(y, {ssr::NoiseModel::Kind::Deterministic, a.delta, c.seed});
  ssr::RecoveryResult r;
  const ssr::AtomicMeasure* t = truth ? &*truth : nullptr;
  if (a.method == "sdp") {
    ssr::SdpRecoveryOptions o;
    o.restarts = a.restarts;
    o.tol = a.tol;
    o.tau = a.tau;
    o.seed = c.seed;
    o.bandwidth = a.bandwidth;
    r = ssr::recover_sdp(y, o, t);
  } else {
    ssr::DiscreteRecoveryOptions o;
    o.grid_n = a.grid_n;
    o.thresh = a.thresh;
    o.bandwidth = a.bandwidth;
    r = ssr::recover_discrete(y, o, t);
  }
  std::string json = ssr::recovery_to_json(r);
  if (a.out.empty()) {
    std::cout << json << '\n';
  } else {
    ssr::write_file(a.out, json + "\n");
    std::cout << "atoms " << r.measure.size() << '\n';
  }
  if (r.eps_x)
    std::cerr << "eps_x " << ssr::format_double(*r.eps_x) << "\neps_c " << ssr::format_double(*r.eps_c)
              << "\nspurious " << *r.spurious_atoms << '\n';
  return kOk;
}

int run_certificate(const CertificateArgs& a) {
  ssr::AtomicMeasure mu = ssr::load_measure(a.support);
  std::vector<double> signs;
  for (const auto& at : mu.atoms) signs.push_back(at.weight >= 0.0 ? 1.0 : -1.0);
  ssr::SupportConfig support = ssr::SupportConfig::make(mu.points(), signs);
  ssr::JacksonKernel ker(a.degree);
  ssr::DualCertificate cert = ssr::solve_certificate(ker, support);
  if (cert.separation_warning)
    std::cerr << "warning: separation " << support.separation << " is below 19.2 pi / N = "
              << 19.2 * std::numbers::pi / a.degree << "\n";
  ssr::VerificationReport rep = ssr::verify_certificate(cert, a.sampling);
  emit(a.out, rep.to_json());
  if (!a.samples_out.empty()) {
    std::vector<ssr::SpherePoint> pts = ssr::fibonacci_lattice(static_cast<size_t>(a.plot_points));
    std::vector<double> q = cert.eval_many(pts);
    ssr::CsvTable rows;
    for (size_t i = 0; i < pts.size(); ++i)
      rows.push_back({ssr::format_double(pts[i][0]), ssr::format_double(pts[i][1]), ssr::format_double(pts[i][2]),
                      ssr::format_double(pts[i].inclination()), ssr::format_double(pts[i].azimuth()),
                      ssr::format_double(q[i])});
    std::ostringstream dat;
    ssr::write_dat(dat, {"x", "y", "z", "r", "theta", "q"}, rows);
    ssr::write_file(a.samples_out, dat.str());
  }
  return rep.pass ? kOk : kFail;
}

int run_audit(const AuditArgs& a, const Common& c) {
  std::vector<std::string> ids = a.bounds.empty() ? ssr::bound_ids() : a.bounds;
  for (const auto& id : ids)
    if (!ssr::is_bound_id(id)) throw ssr::InputError("unknown bound id '" + id + "'");
  ssr::CsvTable rows;
  bool all = true;
  for (int N : a.degrees)
    for (const auto& id : ids) {
      ssr::BoundAudit r = ssr::audit_bound(id, N, static_cast<size_t>(a.samples), c.seed);
      all = all && r.pass;
      rows.push_back({r.id, std::to_string(N), ssr::format_double(r.worst_ratio), ssr::format_double(r.worst_margin),
                      ssr::format_double(r.worst_omega), r.pass ? "1" : "0"});
    }
  emit_table(a.out, "", {"bound", "N", "worst_ratio", "worst_margin", "worst_omega", "pass"}, rows);
  return all ? kOk : kFail;
}

int run_sweep(const SweepArgs& a, const Common& c) {
  if (a.trials < 1 || a.bins < 1 || a.restarts < 1) throw ssr::InputError("sweep: trials, bins and restarts must be >= 1");
  ssr::SweepOptions o;
  o.trials_per_bin = a.trials;
  o.N = a.degree;
  o.restarts = a.restarts;
  o.bins = a.bins;
  o.seed = c.seed;
  std::vector<ssr::SweepBin> bins = ssr::superres_constant_sweep(o);
  emit_table(a.out, a.dat, ssr::kSweepHeader, ssr::sweep_table(bins));
  return kOk;
}

int run_convergence(const ConvergenceArgs& a) {
  ssr::AtomicMeasure truth = ssr::load_measure(a.measure);
  ssr::MomentVector y = ssr::moments(a.degree, truth);
  ssr::DiscreteRecoveryOptions o;
  o.thresh = a.thresh;
  o.bandwidth = a.bandwidth;
  std::vector<ssr::ConvergenceRow> rows = ssr::grid_convergence_study(y, truth, a.grid_ns, o);
  emit_table(a.out, a.dat, ssr::kConvergenceHeader, ssr::convergence_table(rows));
  return kOk;
}

int run_moments(const MomentsArgs& a) {
  ssr::AtomicMeasure mu = ssr::load_measure(a.measure);
  emit(a.out, ssr::moments_to_json(ssr::moments(a.degree, mu)));
  return kOk;
}

// Config values are injected as flags right after the subcommand token,
// skipping any flag the user already passed, so CLI flags win.
std::vector<std::string> apply_config(const std::vector<std::string>& args, const std::vector<std::string>& commands) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(ssr::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ssr::InputError("config: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw ssr::InputError("config file must hold a JSON object");
  size_t sub = args.size();
  for (size_t i = 1; i < args.size(); ++i)
    if (std::find(commands.begin(), commands.end(), args[i]) != commands.end()) {
      sub = i;
      break;
    }
  if (sub == args.size()) return args;
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& s) { return s == flag || s.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  auto add = [&](const std::string& key, const nlohmann::json& v) {
    std::string flag = "--" + key;
    if (given(flag)) return;
    extra.push_back(flag);
    auto scalar = [](const nlohmann::json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
    if (v.is_array())
      for (const auto& e : v) extra.push_back(scalar(e));
    else
      extra.push_back(scalar(v));
  };
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.value().is_object()) {
      if (it.key() == args[sub])
        for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) add(jt.key(), jt.value());
    } else {
      add(it.key(), it.value());
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + sub + 1);
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + sub + 1, args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-resolution of point measures on the sphere"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Seed for all random choices");
  app.add_option("--threads", common.threads, "Worker threads (default: SPHERE_SUPERRES_THREADS or all CPUs)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", common.config, "JSON config file; CLI flags take precedence");

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "Recover a measure from its moments");
  rec->add_option("--method", ra.method)->check(CLI::IsMember({"sdp", "grid"}));
  rec->add_option("--measure", ra.measure, "Measure JSON (ground truth and data source)");
  rec->add_option("--moments", ra.moments, "Moment JSON");
  rec->add_option("--degree", ra.degree)->check(CLI::PositiveNumber);
  rec->add_option("--restarts", ra.restarts)->check(CLI::PositiveNumber);
  rec->add_option("--tol", ra.tol)->check(CLI::PositiveNumber);
  rec->add_option("--tau", ra.tau)->check(CLI::PositiveNumber);
  rec->add_option("--delta", ra.delta)->check(CLI::NonNegativeNumber);
  rec->add_option("--grid-n", ra.grid_n)->check(CLI::PositiveNumber);
  rec->add_option("--thresh", ra.thresh)->check(CLI::PositiveNumber);
  rec->add_option("--bandwidth", ra.bandwidth)->check(CLI::NonNegativeNumber);
  rec->add_option("--out", ra.out);

  CertificateArgs ca;
  auto* cer = app.add_subcommand("certificate", "Build and verify a dual certificate");
  cer->add_option("--support", ca.support, "Measure JSON; signs are taken from the amplitudes")->required();
  cer->add_option("--degree", ca.degree)->check(CLI::PositiveNumber);
  cer->add_option("--sampling", ca.sampling)->check(CLI::PositiveNumber);
  cer->add_option("--plot-points", ca.plot_points)->check(CLI::PositiveNumber);
  cer->add_option("--out", ca.out);
  cer->add_option("--samples-out", ca.samples_out, "Data file of sampled q values");

  AuditArgs aa;
  auto* aud = app.add_subcommand("bounds-audit", "Sample the kernel localization inequalities");
  aud->add_option("--degrees", aa.degrees)->check(CLI::PositiveNumber);
  aud->add_option("--bound", aa.bounds, "Bound ids (default: all)");
  aud->add_option("--samples", aa.samples)->check(CLI::PositiveNumber);
  aud->add_option("--out", aa.out);

  SweepArgs sa;
  auto* swp = app.add_subcommand("sweep", "Success rate against separation for two-point measures");
  swp->add_option("--trials", sa.trials);
  swp->add_option("--degree", sa.degree)->check(CLI::PositiveNumber);
  swp->add_option("--restarts", sa.restarts);
  swp->add_option("--bins", sa.bins);
  swp->add_option("--out", sa.out);
  swp->add_option("--dat", sa.dat);

  ConvergenceArgs va;
  auto* cnv = app.add_subcommand("convergence", "Grid recovery error against grid size");
  cnv->add_option("--measure", va.measure)->required();
  cnv->add_option("--degree", va.degree)->check(CLI::PositiveNumber);
  cnv->add_option("--grid-ns", va.grid_ns)->check(CLI::PositiveNumber);
  cnv->add_option("--thresh", va.thresh)->check(CLI::PositiveNumber);
  cnv->add_option("--bandwidth", va.bandwidth)->check(CLI::NonNegativeNumber);
  cnv->add_option("--out", va.out);
  cnv->add_option("--dat", va.dat);

  MomentsArgs ma;
  auto* mom = app.add_subcommand("moments", "Print the moment vector of a measure");
  mom->add_option("--measure", ma.measure)->required();
  mom->add_option("--degree", ma.degree)->check(CLI::PositiveNumber);
  mom->add_option("--out", ma.out);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = apply_config(args, {"recover", "certificate", "bounds-audit", "sweep", "convergence", "moments"});
    std::vector<const char*> cargs;
    for (const auto& s : args) cargs.push_back(s.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? kOk : kUsage;
    }
    if (common.threads > 0) ssr::set_thread_count(common.threads);

    if (*rec) return run_recover(ra, common);
    if (*cer) return run_certificate(ca);
    if (*aud) return run_audit(aa, common);
    if (*swp) return run_sweep(sa, common);
    if (*cnv) return run_convergence(va);
    if (*mom) return run_moments(ma);
  } catch (const ssr::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ssr::NonConvergedError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const ssr::MaxIterError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const ssr::InfeasibleError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const ssr::RankError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const ssr::SingularSystemError& e) {
    std::cerr << "solver error: " << e.what() << " (condition " << e.condition << ")\n";
    return kSolver;
  } catch (const ssr::EmptySupportError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
