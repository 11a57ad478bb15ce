#include "rnse/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "rnse/error.hpp"

namespace rnse {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double plain_number(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ValidationError("config: " + key + " = '" + raw + "' is not a number");
  return v;
}

// "1.5", "pi", "-pi/2", "3*pi/4".
double number(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  const auto at = s.find("pi");
  if (at == std::string::npos) return plain_number(s, key);
  std::string head = trim(s.substr(0, at));
  std::string tail = trim(s.substr(at + 2));
  double factor = 1.0;
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty()) {
    if (head.back() == '*') head.pop_back();
    factor = plain_number(head, key);
  }
  double div = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw ValidationError("config: " + key + " = '" + raw + "' is not a number");
    div = plain_number(tail.substr(1), key);
  }
  return factor * std::numbers::pi / div;
}

long integer(const std::string& raw, const std::string& key) {
  const double v = plain_number(raw, key);
  if (v != std::floor(v) || std::abs(v) > 9e15)
    throw ValidationError("config: " + key + " = '" + raw + "' is not an integer");
  return static_cast<long>(v);
}

std::uint64_t unsigned_integer(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ValidationError("config: " + key + " = '" + raw + "' is not an unsigned integer");
  return v;
}

bool boolean(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("config: " + key + " = '" + raw + "' is not a boolean");
}

std::vector<std::string> items(const std::string& raw) {
  std::string s = raw;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

ForcingKind kind(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "rp") return ForcingKind::kRotatingPeriodic;
  if (s == "ap") return ForcingKind::kSpiralAlmostPeriodic;
  if (s == "aa") return ForcingKind::kSpiralAlmostAutomorphic;
  return forcing_kind_from_string(s);
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  grid.validate();
  affine.validate();
  require(std::isfinite(coriolis.l) && std::isfinite(coriolis.alpha), "coriolis: l and alpha must be finite");
  norms.validate();
  solver_config().validate();
  require(forcing.delta >= 0.0 && std::isfinite(forcing.delta), "forcing: delta must be >= 0");
  require(forcing.beta >= 0.0 && std::isfinite(forcing.beta), "forcing: beta must be >= 0");
  require(std::isfinite(forcing.ratio), "forcing: ratio must be finite");
  require(forcing.k_lo > 0.0 && forcing.k_hi >= forcing.k_lo, "forcing: need 0 < k_lo <= k_hi");
  if (forcing.candidate_residue)
    require(*forcing.candidate_residue >= 0 && *forcing.candidate_residue < 4,
            "forcing: candidate_residue must lie in 0..3");
  const ExperimentSection& e = experiment;
  require(!e.id.empty(), "experiment: id must not be empty");
  require(e.t_lo >= 0.0 && e.t_hi >= 0.0, "experiment: t_window times must be >= 0");
  require(e.t_lo > 0.0 && e.t_hi > e.t_lo, "experiment: t_window needs 0 < t_lo < t_hi");
  require(e.t_points >= 3, "experiment: t_points must be >= 3");
  if (e.slope_tol) require(*e.slope_tol > 0.0, "experiment: slope_tol must be positive");
  require(e.spinup_periods >= 0 && e.substeps >= 1, "experiment: bad spin-up or substeps");
  require(!e.epsilon_levels.empty(), "experiment: epsilon_levels must not be empty");
  for (double x : e.epsilon_levels) require(x > 0.0, "experiment: epsilon levels must be positive");
  require(e.inclusion_epsilon > 0.0, "experiment: inclusion_epsilon must be positive");
  require(e.scan_periods >= 1 && e.window_points >= 1, "experiment: bad scan_periods or window_points");
  require(!e.sequence.empty(), "experiment: sequence must not be empty");
  for (long k : e.sequence) require(k >= 1, "experiment: sequence entries must be >= 1");
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s = solver;
  s.coriolis = coriolis;
  s.params = norms;
  return s;
}

ForcingSpec RunConfig::forcing_spec() const {
  ForcingSpec s;
  s.kind = forcing.kind;
  s.profile = make_profile(grid, forcing.k_lo, forcing.k_hi, forcing.profile_seed);
  if (forcing.delta == 0.0) s.profile *= 0.0;  // f = 0
  s.delta = forcing.delta;
  s.affine = affine;
  s.affine.alpha = coriolis.alpha;
  s.beta = forcing.beta;
  s.frequency_ratio = forcing.ratio;
  return s;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  RunConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, std::map<std::string, Setter>> keys = {
      {"grid",
       {{"n", [&](auto& v, auto& k) { c.grid.n = static_cast<int>(integer(v, k)); }},
        {"L", [&](auto& v, auto& k) { c.grid.box_length = number(v, k); }},
        {"dealias", [&](auto& v, auto& k) { c.grid.dealias_fraction = number(v, k); }}}},
      {"coriolis",
       {{"l", [&](auto& v, auto& k) { c.coriolis.l = number(v, k); }},
        {"alpha", [&](auto& v, auto& k) { c.coriolis.alpha = number(v, k); }}}},
      {"affine",
       {{"theta", [&](auto& v, auto& k) { c.affine.theta = number(v, k); }},
        {"T", [&](auto& v, auto& k) { c.affine.period_T = number(v, k); }}}},
      {"forcing",
       {{"kind", [&](auto& v, auto&) { c.forcing.kind = kind(v); }},
        {"delta", [&](auto& v, auto& k) { c.forcing.delta = number(v, k); }},
        {"beta", [&](auto& v, auto& k) { c.forcing.beta = number(v, k); }},
        {"ratio", [&](auto& v, auto& k) { c.forcing.ratio = number(v, k); }},
        {"profile_seed", [&](auto& v, auto& k) { c.forcing.profile_seed = unsigned_integer(v, k); }},
        {"k_lo", [&](auto& v, auto& k) { c.forcing.k_lo = number(v, k); }},
        {"k_hi", [&](auto& v, auto& k) { c.forcing.k_hi = number(v, k); }},
        {"candidate_residue",
         [&](auto& v, auto& k) { c.forcing.candidate_residue = static_cast<int>(integer(v, k)); }},
        {"candidate_phase", [&](auto& v, auto& k) { c.forcing.candidate_phase = number(v, k); }}}},
      {"solver",
       {{"m_steps", [&](auto& v, auto& k) { c.solver.m_steps = static_cast<int>(integer(v, k)); }},
        {"history_periods",
         [&](auto& v, auto& k) { c.solver.history_periods = static_cast<int>(integer(v, k)); }},
        {"picard_tol", [&](auto& v, auto& k) { c.solver.picard_tol = number(v, k); }},
        {"max_iters", [&](auto& v, auto& k) { c.solver.max_iters = static_cast<int>(integer(v, k)); }},
        {"min_iters", [&](auto& v, auto& k) { c.solver.min_iters = static_cast<int>(integer(v, k)); }}}},
      {"norms",
       {{"r", [&](auto& v, auto& k) { c.norms.r = number(v, k); }},
        {"q", [&](auto& v, auto& k) { c.norms.q_sol = number(v, k); }},
        {"p", [&](auto& v, auto& k) { c.norms.p = number(v, k); }},
        {"s", [&](auto& v, auto& k) { c.norms.s = number(v, k); }},
        {"kappa", [&](auto& v, auto& k) { c.norms.kappa = number(v, k); }},
        {"N", [&](auto& v, auto& k) { c.norms.N = number(v, k); }},
        {"j_min", [&](auto& v, auto& k) { c.norms.j_min = static_cast<int>(integer(v, k)); }},
        {"j_max", [&](auto& v, auto& k) { c.norms.j_max = static_cast<int>(integer(v, k)); }}}},
      {"experiment",
       {{"id", [&](auto& v, auto&) { c.experiment.id = trim(v); }},
        {"t_window",
         [&](auto& v, auto& k) {
           const auto w = items(v);
           if (w.size() != 2) throw ValidationError("config: " + k + " needs two times");
           c.experiment.t_lo = number(w[0], k);
           c.experiment.t_hi = number(w[1], k);
         }},
        {"t_points", [&](auto& v, auto& k) { c.experiment.t_points = static_cast<int>(integer(v, k)); }},
        {"slope_tol", [&](auto& v, auto& k) { c.experiment.slope_tol = number(v, k); }},
        {"lp_lq",
         [&](auto& v, auto& k) {
           const auto w = items(v);
           if (w.size() != 3) throw ValidationError("config: " + k + " needs p, q, m");
           c.experiment.lp_lq = std::array<double, 3>{number(w[0], k), w[1] == "inf" ? kInfinity : number(w[1], k),
                                                      static_cast<double>(integer(w[2], k))};
         }},
        {"data_exponent", [&](auto& v, auto& k) { c.experiment.data_exponent = number(v, k); }},
        {"output_dir", [&](auto& v, auto&) { c.experiment.output_dir = trim(v); }},
        {"seed", [&](auto& v, auto& k) { c.experiment.seed = unsigned_integer(v, k); }},
        {"march_check", [&](auto& v, auto& k) { c.experiment.march_check = boolean(v, k); }},
        {"spinup_periods", [&](auto& v, auto& k) { c.experiment.spinup_periods = integer(v, k); }},
        {"substeps", [&](auto& v, auto& k) { c.experiment.substeps = static_cast<int>(integer(v, k)); }},
        {"epsilon_levels",
         [&](auto& v, auto& k) {
           c.experiment.epsilon_levels.clear();
           for (const auto& w : items(v)) c.experiment.epsilon_levels.push_back(number(w, k));
         }},
        {"inclusion_epsilon", [&](auto& v, auto& k) { c.experiment.inclusion_epsilon = number(v, k); }},
        {"scan_periods", [&](auto& v, auto& k) { c.experiment.scan_periods = integer(v, k); }},
        {"window_points",
         [&](auto& v, auto& k) { c.experiment.window_points = static_cast<int>(integer(v, k)); }},
        {"sequence", [&](auto& v, auto& k) {
           c.experiment.sequence.clear();
           for (const auto& w : items(v)) c.experiment.sequence.push_back(integer(w, k));
         }}}}};

  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ValidationError("config: key '" + section + "' outside a section");
    const auto s = keys.find(section);
    if (s == keys.end()) throw ValidationError("config: unknown section [" + section + "]");
    for (const auto& [key, val] : body) {
      const auto k = s->second.find(key);
      if (k == s->second.end()) throw ValidationError("config: unknown key " + section + "." + key);
      k->second(val.data(), section + "." + key);
    }
  }
  c.affine.alpha = c.coriolis.alpha;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("config: cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  o << "[grid]\n"
    << "n = " << c.grid.n << "\n"
    << "L = " << fmt(c.grid.box_length) << "\n"
    << "dealias = " << fmt(c.grid.dealias_fraction) << "\n\n";
  o << "[coriolis]\n"
    << "l = " << fmt(c.coriolis.l) << "\n"
    << "alpha = " << fmt(c.coriolis.alpha) << "\n\n";
  o << "[affine]\n"
    << "theta = " << fmt(c.affine.theta) << "\n"
    << "T = " << fmt(c.affine.period_T) << "\n\n";
  o << "[forcing]\n"
    << "kind = " << to_string(c.forcing.kind) << "\n"
    << "delta = " << fmt(c.forcing.delta) << "\n"
    << "beta = " << fmt(c.forcing.beta) << "\n"
    << "ratio = " << fmt(c.forcing.ratio) << "\n"
    << "profile_seed = " << c.forcing.profile_seed << "\n"
    << "k_lo = " << fmt(c.forcing.k_lo) << "\n"
    << "k_hi = " << fmt(c.forcing.k_hi) << "\n";
  if (c.forcing.candidate_residue) o << "candidate_residue = " << *c.forcing.candidate_residue << "\n";
  o << "candidate_phase = " << fmt(c.forcing.candidate_phase) << "\n\n";
  o << "[solver]\n"
    << "m_steps = " << c.solver.m_steps << "\n"
    << "history_periods = " << c.solver.history_periods << "\n"
    << "picard_tol = " << fmt(c.solver.picard_tol) << "\n"
    << "max_iters = " << c.solver.max_iters << "\n"
    << "min_iters = " << c.solver.min_iters << "\n\n";
  o << "[norms]\n"
    << "r = " << fmt(c.norms.r) << "\n"
    << "q = " << fmt(c.norms.q_sol) << "\n"
    << "p = " << fmt(c.norms.p) << "\n"
    << "s = " << fmt(c.norms.s) << "\n"
    << "kappa = " << fmt(c.norms.kappa) << "\n"
    << "N = " << fmt(c.norms.N) << "\n"
    << "j_min = " << c.norms.j_min << "\n"
    << "j_max = " << c.norms.j_max << "\n\n";
  const ExperimentSection& e = c.experiment;
  o << "[experiment]\n"
    << "id = " << e.id << "\n"
    << "t_window = " << fmt(e.t_lo) << ", " << fmt(e.t_hi) << "\n"
    << "t_points = " << e.t_points << "\n";
  if (e.slope_tol) o << "slope_tol = " << fmt(*e.slope_tol) << "\n";
  if (e.lp_lq) {
    const auto& x = *e.lp_lq;
    o << "lp_lq = " << fmt(x[0]) << ", " << (std::isinf(x[1]) ? std::string("inf") : fmt(x[1])) << ", "
      << fmt(x[2]) << "\n";
  }
  o << "data_exponent = " << fmt(e.data_exponent) << "\n";
  o << "output_dir = " << e.output_dir << "\n"
    << "seed = " << e.seed << "\n"
    << "march_check = " << (e.march_check ? "true" : "false") << "\n"
    << "spinup_periods = " << e.spinup_periods << "\n"
    << "substeps = " << e.substeps << "\n"
    << "epsilon_levels = " << join(e.epsilon_levels) << "\n"
    << "inclusion_epsilon = " << fmt(e.inclusion_epsilon) << "\n"
    << "scan_periods = " << e.scan_periods << "\n"
    << "window_points = " << e.window_points << "\n"
    << "sequence = " << join(e.sequence) << "\n";
  return o.str();
}

}  // namespace rnse
