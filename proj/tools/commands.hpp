#pragma once

// Subcommands of the sepbell tool. Each returns a Report that renders to CSV
// or JSON; nothing here depends on wall-clock time, so equal inputs give
// equal bytes.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sepbell/criteria.hpp"
#include "sepbell/io.hpp"
#include "sepbell/optimize.hpp"
#include "sepbell/puretest.hpp"
#include "sepbell/random.hpp"

namespace sepbell::cli {

enum class Format { csv, json };

struct RunConfig {
  std::uint64_t seed = 1;
  Tolerances tol;
  OptimizeOptions optimize;
  Format format = Format::csv;
  std::string out;  // empty: stdout
};

/// INI file with [tolerances] and [optimize] sections of key=value pairs.
inline void apply_config_file(const std::string& path, RunConfig& cfg) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Schema, fmt::format("{}:{}: {}", path, e.line(), e.message()));
  }
  const std::map<std::string, double*> tolerances{
      {"hermiticity", &cfg.tol.hermiticity}, {"trace", &cfg.tol.trace},
      {"psd", &cfg.tol.psd},                 {"equality", &cfg.tol.equality},
      {"verdict", &cfg.tol.verdict},         {"unit", &cfg.tol.unit},
      {"orthonormal", &cfg.tol.orthonormal}, {"normalization", &cfg.tol.normalization},
      {"pure_separable", &cfg.tol.pure_separable},
  };
  auto number = [&path](const std::string& key, const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::Schema, fmt::format("{}: key '{}' is not a number", path, key));
  };
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const std::string text = node.get_value<std::string>();
      if (section == "tolerances") {
        const auto it = tolerances.find(key);
        if (it == tolerances.end()) throw Error(ErrorKind::Schema, fmt::format("{}: unknown key '{}'", path, full));
        const double v = number(full, text);
        if (!(v > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, fmt::format("{}: '{}' must be positive", path, full), v);
        *it->second = v;
      } else if (section == "optimize") {
        const double v = number(full, text);
        if (key == "restarts")
          cfg.optimize.restarts = static_cast<int>(v);
        else if (key == "max_evaluations")
          cfg.optimize.max_evaluations = static_cast<int>(v);
        else if (key == "tolerance")
          cfg.optimize.tolerance = v;
        else
          throw Error(ErrorKind::Schema, fmt::format("{}: unknown key '{}'", path, full));
        if (!(v > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, fmt::format("{}: '{}' must be positive", path, full), v);
      } else {
        throw Error(ErrorKind::Schema, fmt::format("{}: unknown section '{}'", path, section));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Reports

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;  // in insertion order
  std::vector<std::string> footer;
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return fmt::format("{:.12g}", v);
}

inline std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

inline nlohmann::ordered_json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_number(v);
          return v;
        } else {
          return v;
        }
      },
      c);
}

inline std::string render(const Report& r, Format format) {
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["format"] = "sepbell-report";
    j["version"] = 1;
    j["command"] = r.command;
    j["seed"] = r.seed;
    j["columns"] = r.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = json_cell(row[i]);
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.summary) summary[k] = json_cell(v);
    j["summary"] = std::move(summary);
    j["notes"] = r.footer;
    return j.dump(2) + "\n";
  }
  std::string out = "# sepbell-report v1\n";
  out += fmt::format("# command={} seed={}\n", r.command, r.seed);
  for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + r.columns[i];
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  for (const auto& [k, v] : r.summary) out += fmt::format("# {}={}\n", k, csv_cell(v));
  for (const auto& line : r.footer) out += "# " + line + "\n";
  return out;
}

inline Report make_report(const std::string& command, const RunConfig& cfg, std::vector<std::string> columns) {
  Report r;
  r.command = command;
  r.seed = cfg.seed;
  r.columns = std::move(columns);
  return r;
}

// ---------------------------------------------------------------------------
// eval

inline const std::vector<std::string>& all_criteria() {
  static const std::vector<std::string> names{"chsh",      "cirelson",  "quad",     "eq7",        "roy",
                                              "mixsep2_1", "mixsep2_2", "mixsep2_3", "mixsep2_4", "fidelity",
                                              "fid2",      "loo_linear", "loo_nonlinear", "ppt"};
  return names;
}

inline std::vector<std::string> expand_criteria(const std::vector<std::string>& requested,
                                                const std::vector<std::string>& known) {
  std::vector<std::string> out;
  for (const auto& name : requested) {
    if (name == "all") {
      out.insert(out.end(), known.begin(), known.end());
    } else if (name == "mixsep2" && std::find(known.begin(), known.end(), "mixsep2") == known.end()) {
      for (int k = 1; k <= 4; ++k) out.push_back("mixsep2_" + std::to_string(k));
    } else if (std::find(known.begin(), known.end(), name) != known.end()) {
      out.push_back(name);
    } else {
      throw Error(ErrorKind::Schema, "unknown criterion '" + name + "'");
    }
  }
  return out;
}

/// Every state criterion by name, with the frames supplying the CHSH-type
/// settings (a, a', b, b') = (A, A', B, B') and the LOO bases {A, A', A'', 1}/sqrt 2.
inline CriterionReport evaluate_criterion(const std::string& name, const DensityMatrix& rho, const SettingPair& f,
                                          const Tolerances& tol) {
  const Vec3 a = f.a.axis(0), a1 = f.a.axis(1), b = f.b.axis(0), b1 = f.b.axis(1);
  if (name == "chsh") return chsh(rho, a, a1, b, b1, tol);
  if (name == "cirelson") return cirelson(rho, a, a1, b, b1, tol);
  if (name == "quad") return quad(rho, a, a1, b, b1, tol);
  if (name == "eq7") return sep_bound_eq7(rho, f, tol);
  if (name == "roy") return roy_check(rho, f, tol);
  if (name.rfind("mixsep2_", 0) == 0) {
    const int k = name.back() - '1';
    if (k < 0 || k > 3 || name.size() != 9) throw Error(ErrorKind::Schema, "unknown criterion '" + name + "'");
    return mixsep2(rho, f, tol)[k];
  }
  if (name == "fidelity") return fidelity(rho, tol);
  if (name == "fid2") return fid2(rho, tol);
  if (name == "loo_linear" || name == "loo_nonlinear") {
    const auto ga = LooBasis::from_triple(f.a), gb = LooBasis::from_triple(f.b);
    auto r = name == "loo_linear" ? loo_linear_witness(rho, ga, gb, tol) : loo_nonlinear_witness(rho, ga, gb, tol);
    r.settings = describe(f);
    return r;
  }
  if (name == "ppt") return ppt(rho, tol);
  throw Error(ErrorKind::Schema, "unknown criterion '" + name + "'");
}

inline Report cmd_eval(const RunConfig& cfg, const std::string& state, const std::vector<std::string>& criteria,
                       const std::string& frames) {
  const auto rho = io::load_state(state, cfg.tol);
  const auto pair = io::load_frames(frames, cfg.tol);
  Report r = make_report("eval", cfg,
                         {"criterion", "lhs", "rhs", "slack", "relation", "verdict", "tolerance", "settings", "note"});
  for (const auto& name : expand_criteria(criteria, all_criteria())) {
    const auto c = evaluate_criterion(name, rho, pair, cfg.tol);
    r.rows.push_back({c.name, c.lhs, c.rhs, c.slack, std::string(c.relation == Relation::at_most ? "<=" : ">="),
                      std::string(to_string(c.verdict)), c.tolerance, c.settings, c.note});
  }
  r.summary.emplace_back("state", state);
  r.summary.emplace_back("frames", frames);
  return r;
}

// ---------------------------------------------------------------------------
// scan

inline const std::vector<std::string>& scan_criteria() {
  static const std::vector<std::string> names{
      "ppt",      "mixsep2",  "mixsep2_1",  "mixsep2_2",     "mixsep2_3", "mixsep2_4", "chsh_max",
      "quad_max", "gap",      "loo_linear", "loo_nonlinear", "loo_optimal", "fidelity", "fid2",
      "eq7",      "roy",      "chsh",       "quad"};
  return names;
}

struct ScanPoint {
  double slack = 0.0;
  bool violated = false;
};

inline DensityMatrix family_state(const std::string& family, double p) {
  if (family == "werner") return werner(p);
  if (family == "noisy_singlet") return noisy_singlet(p);
  throw Error(ErrorKind::Schema, "unknown family '" + family + "'");
}

/// Slack and verdict of one scan criterion. `violated` means the state is
/// flagged (entangled, or inside the gap for "gap").
inline ScanPoint scan_point(const std::string& name, const DensityMatrix& rho, const SettingPair& f,
                            const RunConfig& cfg) {
  const double tol = cfg.tol.verdict;
  if (name == "mixsep2") {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : mixsep2(rho, f, cfg.tol)) worst = std::min(worst, c.slack);
    return {worst, worst < -tol};
  }
  if (name == "chsh_max") {
    const double s = 2.0 - chsh_max_analytic(rho);
    return {s, s < -tol};
  }
  if (name == "quad_max") {
    const double s = 1.0 - quad_max_orthogonal_analytic(rho);
    return {s, s < -tol};
  }
  if (name == "gap") {
    const auto g = lhv_gap_classify(rho, cfg.tol);
    return {-g.depth(), g.gap_member};
  }
  if (name == "loo_optimal") {
    OptimizeOptions opts = cfg.optimize;
    opts.seed = cfg.seed;
    const double s = 1.0 - numeric_max(rho, Objective::loo_linear, opts).value;
    return {s, s < -tol};
  }
  const auto c = evaluate_criterion(name, rho, f, cfg.tol);
  return {c.slack, c.violated()};
}

struct Transition {
  std::string criterion;
  double p = 0.0;
  bool onset = true;  // false -> true with increasing p
};

inline Report cmd_scan(const RunConfig& cfg, const std::string& family, double pmin, double pmax, double step,
                       const std::vector<std::string>& criteria, const std::string& frames) {
  if (!(step > 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "scan step must be positive", step);
  if (!(pmin >= 0.0 && pmin <= pmax && pmax <= 1.0))
    throw Error(ErrorKind::ParameterOutOfRange, "scan range must satisfy 0 <= pmin <= pmax <= 1", pmin);
  family_state(family, pmin);
  const auto pair = io::load_frames(frames, cfg.tol);
  const auto names = expand_criteria(criteria, scan_criteria());

  std::vector<std::string> columns{"p"};
  for (const auto& n : names) {
    columns.push_back(n);
    columns.push_back(n + "_violated");
  }
  Report r = make_report("scan", cfg, columns);

  const auto count = static_cast<long>(std::floor((pmax - pmin) / step + 1e-9));
  std::vector<double> grid;
  for (long k = 0; k <= count; ++k) grid.push_back(std::min(pmax, pmin + static_cast<double>(k) * step));

  std::vector<std::vector<ScanPoint>> table(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto rho = family_state(family, grid[i]);
    std::vector<Cell> row{grid[i]};
    for (const auto& n : names) {
      const auto pt = scan_point(n, rho, pair, cfg);
      table[i].push_back(pt);
      row.emplace_back(pt.slack);
      row.emplace_back(pt.violated);
    }
    r.rows.push_back(std::move(row));
  }

  // Every change of verdict between neighbouring grid points is bisected to
  // 1e-4 and reported at the midpoint of the final bracket.
  std::vector<Transition> transitions;
  for (std::size_t c = 0; c < names.size(); ++c) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      if (table[i][c].violated == table[i + 1][c].violated) continue;
      double lo = grid[i], hi = grid[i + 1];
      const bool lo_state = table[i][c].violated;
      while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (scan_point(names[c], family_state(family, mid), pair, cfg).violated == lo_state)
          lo = mid;
        else
          hi = mid;
      }
      transitions.push_back({names[c], 0.5 * (lo + hi), !lo_state});
    }
  }
  r.summary.emplace_back("family", family);
  r.summary.emplace_back("frames", frames);
  for (const auto& t : transitions)
    r.summary.emplace_back(fmt::format("threshold.{}.{}", t.criterion, t.onset ? "onset" : "offset"), t.p);
  for (const auto& n : names) {
    const bool any = std::any_of(transitions.begin(), transitions.end(), [&](const auto& t) { return t.criterion == n; });
    if (!any) r.summary.emplace_back(fmt::format("threshold.{}", n), std::string("none in range"));
  }
  return r;
}

// ---------------------------------------------------------------------------
// equivalence

inline Report cmd_equivalence(const RunConfig& cfg, long samples, double band) {
  if (samples < 1) throw Error(ErrorKind::ParameterOutOfRange, "sample count must be at least 1", static_cast<double>(samples));
  Report r = make_report("equivalence", cfg,
                         {"index", "sample_seed", "ppt_min", "verdict", "max_violation", "agreement", "defect"});
  std::map<std::string, std::int64_t> matrix;
  std::int64_t contradictions = 0, banded = 0;
  for (long i = 0; i < samples; ++i) {
    const std::uint64_t s = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const auto rho = random_state(s, StateKind::mixed_trace_metric);
    OptimizeOptions opts = cfg.optimize;
    opts.seed = s;
    const auto v = ns_verdict(rho, opts, cfg.tol);
    const bool ppt_entangled = v.ppt_min < -cfg.tol.verdict;
    const bool in_band = std::abs(v.ppt_min) < band;
    std::string agreement;
    if (v.verdict != Separability::inconclusive && (v.verdict == Separability::entangled) == ppt_entangled)
      agreement = "agree";
    else if (in_band)
      agreement = "band";
    else
      agreement = "contradiction";
    contradictions += agreement == "contradiction";
    banded += in_band;
    ++matrix[fmt::format("{}|ppt_{}", to_string(v.verdict), ppt_entangled ? "entangled" : "separable")];
    r.rows.push_back({static_cast<std::int64_t>(i), fmt::format("{}", s), v.ppt_min, std::string(to_string(v.verdict)),
                      v.max_violation, agreement, v.defect});
  }
  r.summary.emplace_back("samples", static_cast<std::int64_t>(samples));
  r.summary.emplace_back("band", band);
  r.summary.emplace_back("in_band", banded);
  for (const auto& [k, v] : matrix) r.summary.emplace_back("count." + k, v);
  r.summary.emplace_back("contradictions", contradictions);
  return r;
}

// ---------------------------------------------------------------------------
// region

inline Report cmd_region(const RunConfig& cfg, long samples, const std::string& kind) {
  if (samples < 1) throw Error(ErrorKind::ParameterOutOfRange, "sample count must be at least 1", static_cast<double>(samples));
  if (kind != "all_states" && kind != "separable") throw Error(ErrorKind::Schema, "unknown region kind '" + kind + "'");
  const bool separable = kind == "separable";
  Report r = make_report("region", cfg, {"x", "y", "radius"});
  StateSampler sampler(cfg.seed);
  double max_radius = 0.0;
  for (long i = 0; i < samples; ++i) {
    // Pure and mixed samples alternate for the unrestricted region.
    const auto rho = separable ? sampler.separable_mixture()
                               : (i % 2 == 0 ? sampler.pure_uniform().density(cfg.tol) : sampler.mixed());
    const Mat3 ra = sampler.rotation(), rb = sampler.rotation();
    const Vec3 a = ra.col(0), a1 = ra.col(1), b = rb.col(0), b1 = rb.col(1);
    const double x = correlation(rho, a, b) - correlation(rho, a1, b1);
    const double y = correlation(rho, a, b1) + correlation(rho, a1, b);
    const double radius = std::hypot(x, y);
    max_radius = std::max(max_radius, radius);
    r.rows.push_back({x, y, radius});
  }
  const double bound = separable ? 1.0 : 2.0;
  r.summary.emplace_back("kind", kind);
  r.summary.emplace_back("max_radius", max_radius);
  r.summary.emplace_back("radius_bound", bound);
  r.summary.emplace_back("within_bound", max_radius <= bound + cfg.tol.verdict);
  r.footer.push_back(fmt::format("excluded fraction 1-pi/8 = {:.4f} of the square |x|,|y| <= 2", 1.0 - std::numbers::pi / 8.0));
  return r;
}

// ---------------------------------------------------------------------------
// puretest

inline PureState load_pure(const std::string& arg, const Tolerances& tol) {
  if (arg == "singlet") return bell::singlet();
  if (arg == "psi_plus") return bell::psi_plus();
  if (arg == "phi_plus") return bell::phi_plus();
  if (arg == "phi_minus") return bell::phi_minus();
  if (arg == "up_up") return up_up();
  if (arg == "counterexample") return permutation_counterexample();
  return io::pure_from_json(io::load_json(arg), tol);
}

inline Report cmd_puretest(const RunConfig& cfg, const std::string& state, long samples, bool all_four) {
  const PureTestOptions opts{.all_four = all_four, .tol = cfg.tol};
  std::vector<std::pair<std::string, PureState>> inputs;
  if (!state.empty()) {
    inputs.emplace_back(state, load_pure(state, cfg.tol));
  } else {
    if (samples < 1) throw Error(ErrorKind::ParameterOutOfRange, "sample count must be at least 1", static_cast<double>(samples));
    for (long i = 0; i < samples; ++i) {
      const auto s = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
      inputs.emplace_back(fmt::format("{}", s), random_pure_state(s));
    }
  }

  const auto probe = six_inequality_test(inputs.front().second, opts);
  std::vector<std::string> columns{"seed", "rs"};
  for (const auto& rep : probe.reports) columns.push_back(rep.name);
  for (int k = 1; k <= 3; ++k) columns.push_back(fmt::format("residual_prime_{}", k));
  for (int k = 1; k <= 3; ++k) columns.push_back(fmt::format("residual_abg_{}", k));
  columns.push_back("verdict");
  columns.push_back("boundary");
  Report r = make_report("puretest", cfg, columns);

  std::int64_t entangled = 0, boundary = 0;
  for (const auto& [label, psi] : inputs) {
    const auto rep = six_inequality_test(psi, opts);
    std::vector<Cell> row{label, rep.schmidt_rs};
    for (const auto& c : rep.reports) row.emplace_back(c.slack);
    for (double v : rep.residuals) row.emplace_back(v);
    for (double v : rep.residuals_abg) row.emplace_back(v);
    row.emplace_back(std::string(to_string(rep.verdict)));
    row.emplace_back(rep.boundary);
    entangled += rep.verdict == PureVerdict::entangled;
    boundary += rep.boundary;
    r.rows.push_back(std::move(row));
  }
  r.summary.emplace_back("states", static_cast<std::int64_t>(inputs.size()));
  r.summary.emplace_back("entangled", entangled);
  r.summary.emplace_back("boundary", boundary);
  return r;
}

// ---------------------------------------------------------------------------
// optimize

inline Objective parse_objective(const std::string& name) {
  for (auto o : {Objective::chsh, Objective::quad, Objective::mixsep2_slack, Objective::loo_linear})
    if (to_string(o) == name) return o;
  throw Error(ErrorKind::Schema, "unknown objective '" + name + "'");
}

inline Report cmd_optimize(const RunConfig& cfg, const std::string& state, const std::string& objective) {
  const auto rho = io::load_state(state, cfg.tol);
  const Objective obj = parse_objective(objective);
  OptimizeOptions opts = cfg.optimize;
  opts.seed = cfg.seed;
  const auto res = numeric_max(rho, obj, opts);

  Report r = make_report("optimize", cfg,
                         {"objective", "value", "analytic", "restarts", "evaluations", "best_restart", "converged",
                          "settings"});
  Cell analytic = std::string("");
  std::string settings;
  switch (obj) {
    case Objective::chsh:
      analytic = chsh_max_analytic(rho);
      settings = "a=" + describe(res.settings[0]) + " a'=" + describe(res.settings[1]) +
                 " b=" + describe(res.settings[2]) + " b'=" + describe(res.settings[3]);
      break;
    case Objective::quad:
      analytic = quad_max_orthogonal_analytic(rho);
      settings = describe(res.frames);
      break;
    case Objective::mixsep2_slack: settings = describe(res.frames); break;
    case Objective::loo_linear: {
      std::string rows;
      for (int i = 0; i < 4; ++i)
        rows += fmt::format("({} {} {} {})", format_number(res.loo_rotation(i, 0)), format_number(res.loo_rotation(i, 1)),
                            format_number(res.loo_rotation(i, 2)), format_number(res.loo_rotation(i, 3)));
      settings = "O=" + rows;
      break;
    }
  }
  r.rows.push_back({std::string(to_string(obj)), res.value, analytic, static_cast<std::int64_t>(res.restarts),
                    static_cast<std::int64_t>(res.evaluations), static_cast<std::int64_t>(res.best_restart),
                    res.converged, settings});
  r.summary.emplace_back("state", state);
  if (obj == Objective::loo_linear) r.summary.emplace_back("witness_min", 1.0 - res.value);
  return r;
}

}  // namespace sepbell::cli
