#pragma once

// JSON input: states, pure states, spin triples and frame pairs. Errors are
// Schema errors naming the source position (syntax) or the field path
// (content).

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sepbell/config.hpp"
#include "sepbell/frames.hpp"
#include "sepbell/states.hpp"

namespace sepbell::io {

using nlohmann::json;

/// Parses text; syntax errors report "<source>:<line>:<column>" and the
/// offending line.
inline json parse_json(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1, line_start = 0;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
        line_start = i + 1;
      } else {
        ++col;
      }
    }
    const std::size_t line_end = text.find('\n', line_start);
    const std::string context = text.substr(line_start, line_end == std::string::npos ? std::string::npos
                                                                                       : line_end - line_start);
    throw Error(ErrorKind::Schema, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                       ": invalid JSON near `" + context + "`");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Schema, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline json load_json(const std::string& path) { return parse_json(read_file(path), path); }

namespace detail {

[[noreturn]] inline void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Schema, "field '" + field + "': " + what);
}

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline double real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

/// A number or a [re, im] pair.
inline cplx complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(path, "expected a number or a [re, im] pair");
}

inline Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  return {real(j[0], path + "[0]"), real(j[1], path + "[1]"), real(j[2], path + "[2]")};
}

inline Mat3 mat3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected 3 rows");
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.row(i) = vec3(j[i], path + "[" + std::to_string(i) + "]").transpose();
  return m;
}

}  // namespace detail

/// {"amplitudes": [a, b, c, d]} with complex entries.
inline PureState pure_from_json(const json& j, const Tolerances& tol = {}) {
  const json& amps = detail::member(j, "amplitudes", "");
  if (!amps.is_array() || amps.size() != 4) detail::fail("amplitudes", "expected 4 entries");
  Ket4 v;
  for (int i = 0; i < 4; ++i) v(i) = detail::complex(amps[i], "amplitudes[" + std::to_string(i) + "]");
  return PureState(v, tol);
}

/// Shorthand: singlet, psi_plus, phi_plus, phi_minus, up_up,
/// maximally_mixed, werner:<p>, noisy_singlet:<p>.
inline DensityMatrix state_from_spec(const std::string& spec, const Tolerances& tol = {}) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  if (colon != std::string::npos) {
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(spec.substr(colon + 1), &used);
      if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::Schema, "state '" + spec + "': weight is not a number");
    }
    if (head == "werner") return werner(p);
    if (head == "noisy_singlet") return noisy_singlet(p);
    throw Error(ErrorKind::Schema, "state '" + spec + "': unknown family '" + head + "'");
  }
  if (spec == "singlet") return bell::singlet().density(tol);
  if (spec == "psi_plus") return bell::psi_plus().density(tol);
  if (spec == "phi_plus") return bell::phi_plus().density(tol);
  if (spec == "phi_minus") return bell::phi_minus().density(tol);
  if (spec == "up_up") return up_up().density(tol);
  if (spec == "maximally_mixed") return maximally_mixed();
  throw Error(ErrorKind::Schema, "unknown state '" + spec + "'");
}

/// One of
///   {"family": "werner" | "noisy_singlet", "p": x}
///   {"named": "<shorthand>"}
///   {"amplitudes": [4 complex]}
///   {"matrix": [[4 complex] x 4]}
///   {"pauli": {"r": [3], "s": [3], "t": [[3] x 3]}}
inline DensityMatrix state_from_json(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) detail::fail("<root>", "expected an object");
  if (j.contains("family")) {
    const json& fam = j["family"];
    if (!fam.is_string()) detail::fail("family", "expected a string");
    const double p = detail::real(detail::member(j, "p", ""), "p");
    const std::string name = fam.get<std::string>();
    if (name == "werner") return werner(p);
    if (name == "noisy_singlet") return noisy_singlet(p);
    detail::fail("family", "unknown family '" + name + "'");
  }
  if (j.contains("named")) {
    if (!j["named"].is_string()) detail::fail("named", "expected a string");
    return state_from_spec(j["named"].get<std::string>(), tol);
  }
  if (j.contains("amplitudes")) return pure_from_json(j, tol).density(tol);
  if (j.contains("matrix")) {
    const json& m = j["matrix"];
    if (!m.is_array() || m.size() != 4) detail::fail("matrix", "expected 4 rows");
    Mat4 out;
    for (int r = 0; r < 4; ++r) {
      const std::string row = "matrix[" + std::to_string(r) + "]";
      if (!m[r].is_array() || m[r].size() != 4) detail::fail(row, "expected 4 entries");
      for (int c = 0; c < 4; ++c) out(r, c) = detail::complex(m[r][c], row + "[" + std::to_string(c) + "]");
    }
    return DensityMatrix::validate(out, tol);
  }
  if (j.contains("pauli")) {
    const json& p = j["pauli"];
    PauliForm f;
    f.r = detail::vec3(detail::member(p, "r", "pauli"), "pauli.r");
    f.s = detail::vec3(detail::member(p, "s", "pauli"), "pauli.s");
    f.t = detail::mat3(detail::member(p, "t", "pauli"), "pauli.t");
    return pauli_compose(f, tol);
  }
  detail::fail("<root>", "expected one of family, named, amplitudes, matrix, pauli");
}

/// A file path, or a shorthand accepted by state_from_spec.
inline DensityMatrix load_state(const std::string& arg, const Tolerances& tol = {}) {
  std::ifstream probe(arg);
  if (probe) return state_from_json(load_json(arg), tol);
  return state_from_spec(arg, tol);
}

/// Three rows (A, A', A'').
inline SpinTriple triple_from_json(const json& j, const std::string& path, const Tolerances& tol = {}) {
  const Mat3 m = detail::mat3(j, path);
  for (int k = 0; k < 3; ++k) {
    const double dev = std::abs(m.row(k).norm() - 1.0);
    if (dev > tol.unit) throw Error(ErrorKind::NotUnit, "field '" + path + "[" + std::to_string(k) + "]': not a unit vector", dev);
  }
  return SpinTriple::from_matrix(m, tol);
}

/// {"A": triple, "B": triple}
inline SettingPair frames_from_json(const json& j, const Tolerances& tol = {}) {
  return {triple_from_json(detail::member(j, "A", ""), "A", tol),
          triple_from_json(detail::member(j, "B", ""), "B", tol)};
}

/// Named pairs (pauli, loo, alpha, beta, gamma, beta_prime, gamma_prime) or
/// a JSON file.
inline SettingPair load_frames(const std::string& arg, const Tolerances& tol = {}) {
  if (arg == "pauli") return SettingPair{};
  if (arg == "loo") return loo_reference_pair();
  const auto named = named_triples();
  if (const auto it = named.find(arg); it != named.end()) return it->second;
  std::ifstream probe(arg);
  if (!probe) throw Error(ErrorKind::Schema, "unknown frames '" + arg + "'");
  return frames_from_json(load_json(arg), tol);
}

}  // namespace sepbell::io
