#include "ssr/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace ssr {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw InputError(std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

AtomicMeasure measure_from_json(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
    throw InputError("measure file needs an 'atoms' array");
  AtomicMeasure mu;
  for (const auto& a : j["atoms"]) {
    if (!a.is_object()) throw InputError("atom entries must be objects");
    mu.atoms.push_back(Atom{SpherePoint::from_spherical(number(a, "r"), number(a, "theta")), number(a, "c")});
  }
  return mu;
}

std::string measure_to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms)
    atoms.push_back({{"r", a.point.inclination()}, {"theta", a.point.azimuth()}, {"c", a.weight}});
  return json{{"atoms", atoms}}.dump(2);
}

AtomicMeasure load_measure(const std::string& path) { return measure_from_json(read_file(path)); }

MomentVector moments_from_json(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object() || !j.contains("N") || !j["N"].is_number_integer() || !j.contains("values"))
    throw InputError("moment file needs integer 'N' and 'values'");
  int N = j["N"].get<int>();
  if (N < 0) throw InputError("moment degree must be >= 0");
  const json& v = j["values"];
  if (!v.is_array() || static_cast<int>(v.size()) != num_harmonics(N))
    throw InputError("moment file: expected (N+1)^2 values");
  MomentVector y(N);
  for (size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_array() || v[k].size() != 2 || !v[k][0].is_number() || !v[k][1].is_number())
      throw InputError("moment values must be [re, im] pairs");
    y.values[k] = cplx(v[k][0].get<double>(), v[k][1].get<double>());
  }
  return y;
}

std::string moments_to_json(const MomentVector& y) {
  json v = json::array();
  for (Eigen::Index k = 0; k < y.values.size(); ++k) v.push_back({y.values[k].real(), y.values[k].imag()});
  return json{{"N", y.N}, {"values", v}}.dump(2);
}

MomentVector load_moments(const std::string& path) { return moments_from_json(read_file(path)); }

std::string recovery_to_json(const RecoveryResult& r) {
  const auto& d = r.diagnostics;
  json diag = {{"method", d.method},
               {"solver",
                {{"iterations", d.solver.iterations},
                 {"primal_residual", d.solver.primal_residual},
                 {"dual_residual", d.solver.dual_residual},
                 {"objective", d.solver.objective},
                 {"converged", d.solver.converged}}},
               {"restarts", d.restarts},
               {"accepted_minima", d.accepted_minima},
               {"failed_descents", d.failed_descents},
               {"tol", d.tol},
               {"thresh", d.thresh},
               {"bandwidth", d.bandwidth},
               {"cluster_sizes", d.cluster_sizes},
               {"ls_residual", d.ls_residual},
               {"rank_deficient", d.rank_deficient}};
  if (d.method == "sdp") {
    diag["sdp_objective"] = d.sdp_objective;
    diag["sdp_min_eig"] = d.sdp_min_eig;
    diag["sdp_trace_residual"] = d.sdp_trace_residual;
    diag["abs_f_at_atoms"] = d.abs_f_at_atoms;
    diag["sign_f_at_atoms"] = d.sign_f_at_atoms;
  } else {
    diag["grid_nodes"] = d.grid_nodes;
    diag["off_cluster_mass"] = d.off_cluster_mass;
  }
  json out = {{"measure", json::parse(measure_to_json(r.measure))}, {"diagnostics", diag}};
  if (r.eps_x) {
    out["eps_x"] = optional_number(r.eps_x);
    out["eps_c"] = optional_number(r.eps_c);
    out["spurious_atoms"] = r.spurious_atoms ? json(*r.spurious_atoms) : json(nullptr);
  }
  return out.dump(2);
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

void write_csv(std::ostream& os, const std::vector<std::string>& header, const CsvTable& rows) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        os << '"';
        for (char ch : c) os << (ch == '"' ? std::string("\"\"") : std::string(1, ch));
        os << '"';
      } else {
        os << c;
      }
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

CsvTable read_csv(std::istream& is) {
  CsvTable out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cells.push_back(cur);
    out.push_back(std::move(cells));
  }
  return out;
}

void write_dat(std::ostream& os, const std::vector<std::string>& header, const CsvTable& rows) {
  os << '#';
  for (const auto& h : header) os << ' ' << h;
  os << '\n';
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << r[i];
    os << '\n';
  }
}

const std::vector<std::string> kSweepHeader = {"center", "lower", "upper", "trials", "successes", "rate"};
const std::vector<std::string> kConvergenceHeader = {"n", "eps_x", "eps_c", "off_cluster_mass", "atoms", "spurious"};

CsvTable sweep_table(const std::vector<SweepBin>& bins) {
  CsvTable t;
  for (const auto& b : bins)
    t.push_back({format_double(b.center), format_double(b.lower), format_double(b.upper), std::to_string(b.trials),
                 std::to_string(b.successes), format_double(b.rate())});
  return t;
}

CsvTable convergence_table(const std::vector<ConvergenceRow>& rows) {
  CsvTable t;
  for (const auto& r : rows)
    t.push_back({std::to_string(r.n), format_double(r.eps_x), format_double(r.eps_c), format_double(r.off_cluster_mass),
                 std::to_string(r.atoms), std::to_string(r.spurious)});
  return t;
}

}  // namespace ssr
