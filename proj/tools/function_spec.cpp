#include "function_spec.hpp"

#include "csv.hpp"

#include <charconv>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

namespace foliate::cli {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

struct Parsed {
  std::string kind;
  std::string rest;
};

Parsed kind_of(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::map<std::string, std::string> key_values(const std::string& spec, const std::string& rest) {
  std::map<std::string, std::string> out;
  if (rest.empty()) return out;
  for (const auto& item : split(rest, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw SpecError("expected key=value in '" + spec + "', got '" + item + "'");
    }
    if (!out.emplace(item.substr(0, eq), item.substr(eq + 1)).second) {
      throw SpecError("duplicate key '" + item.substr(0, eq) + "' in '" + spec + "'");
    }
  }
  return out;
}

int parse_int(const std::string& text, const std::string& context) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw SpecError("bad integer '" + text + "' in '" + context + "'");
  }
  return v;
}

}  // namespace

double parse_number(const std::string& text) {
  std::string body = text;
  double scale = 1.0;
  if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
    body.resize(body.size() - 2);
    scale = std::numbers::pi;
    if (body.empty() || body == "+") return scale;
    if (body == "-") return -scale;
  }
  if (!body.empty() && body.front() == '+') body.erase(0, 1);
  double v = 0.0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
  if (body.empty() || res.ec != std::errc() || res.ptr != body.data() + body.size()) {
    throw SpecError("bad number '" + text + "'");
  }
  return v * scale;
}

LeafFunction parse_leaf_function(const std::string& spec) {
  const auto [kind, rest] = kind_of(spec);
  if (kind == "const") {
    if (rest.empty()) throw SpecError("const needs a value, e.g. const:1");
    return LeafFunction::constant(parse_number(rest));
  }
  if (kind == "sin" && rest.empty()) return LeafFunction::sine();
  if (kind == "cos" && rest.empty()) return LeafFunction::cosine();
  if (kind == "fourier") {
    double period = 2.0 * std::numbers::pi;
    std::vector<double> a(1, 0.0), b(1, 0.0);
    for (const auto& [key, value] : key_values(spec, rest)) {
      if (key == "P") {
        period = parse_number(value);
      } else if ((key[0] == 'a' || key[0] == 'b') && key.size() > 1) {
        const int k = parse_int(key.substr(1), spec);
        if (k < 0 || (key[0] == 'b' && k == 0)) throw SpecError("bad harmonic '" + key + "'");
        const auto need = static_cast<std::size_t>(k) + 1;
        if (a.size() < need) {
          a.resize(need, 0.0);
          b.resize(need, 0.0);
        }
        (key[0] == 'a' ? a : b)[static_cast<std::size_t>(k)] = parse_number(value);
      } else {
        throw SpecError("unknown fourier key '" + key + "'");
      }
    }
    return LeafFunction::trigonometric(period, a, b);
  }
  if (kind == "poly") {
    std::vector<double> c;
    std::optional<double> lo, hi;
    for (const auto& [key, value] : key_values(spec, rest)) {
      if (key == "lo") {
        lo = parse_number(value);
      } else if (key == "hi") {
        hi = parse_number(value);
      } else if (key[0] == 'c' && key.size() > 1) {
        const int k = parse_int(key.substr(1), spec);
        if (k < 0) throw SpecError("bad degree '" + key + "'");
        if (c.size() <= static_cast<std::size_t>(k)) c.resize(static_cast<std::size_t>(k) + 1, 0.0);
        c[static_cast<std::size_t>(k)] = parse_number(value);
      } else {
        throw SpecError("unknown poly key '" + key + "'");
      }
    }
    if (!lo || !hi) throw SpecError("poly needs lo= and hi=");
    if (c.empty()) c.push_back(0.0);
    return LeafFunction::polynomial(c, *lo, *hi);
  }
  if (kind == "samples") {
    const auto kv = key_values(spec, rest);
    const auto file = kv.find("file");
    if (file == kv.end()) throw SpecError("samples needs file=");
    int order = 1;
    if (auto it = kv.find("order"); it != kv.end()) order = parse_int(it->second, spec);
    for (const auto& [key, value] : kv) {
      if (key != "file" && key != "order") throw SpecError("unknown samples key '" + key + "'");
    }
    const CsvTable table = read_csv(file->second);
    if (table.columns.size() < 2) throw SpecError("samples file needs two columns: " + file->second);
    return LeafFunction::samples(table.columns[0], table.columns[1], order);
  }
  throw SpecError("unknown leaf function '" + spec + "'");
}

PlaneFunction parse_plane_function(const std::string& spec) {
  const auto [kind, rest] = kind_of(spec);
  if (kind == "const") {
    if (rest.empty()) throw SpecError("const needs a value, e.g. const:1");
    return PlaneFunction::constant(parse_number(rest));
  }
  if (kind != "torus") throw SpecError("unknown torus function '" + spec + "'");
  double mean = 0.0;
  std::vector<PlaneFunction::TorusTerm> terms;
  for (const auto& [key, value] : key_values(spec, rest)) {
    if (key == "mean") {
      mean = parse_number(value);
      continue;
    }
    const auto us = key.find('_');
    if ((key[0] != 'c' && key[0] != 's') || us == std::string::npos || us < 2) {
      throw SpecError("unknown torus key '" + key + "'");
    }
    const int m = parse_int(key.substr(1, us - 1), spec);
    const int n = parse_int(key.substr(us + 1), spec);
    terms.push_back({parse_number(value), m, n, key[0] == 's'});
  }
  return PlaneFunction::torus(mean, std::move(terms));
}

AnnulusFunction parse_annulus_function(const std::string& spec) {
  const auto [kind, rest] = kind_of(spec);
  if (kind == "const") {
    if (rest.empty()) throw SpecError("const needs a value, e.g. const:1");
    return AnnulusFunction::constant(parse_number(rest));
  }
  if (kind != "annulus") throw SpecError("unknown annulus function '" + spec + "'");
  std::vector<AnnulusFunction::Term> terms;
  for (const auto& [key, value] : key_values(spec, rest)) {
    if (key.size() < 2 || key[0] != 'r') throw SpecError("unknown annulus key '" + key + "'");
    const auto mode_at = key.find_first_of("cs");
    AnnulusFunction::Term term{parse_number(value), 0, AnnulusFunction::Mode::one, 0};
    if (mode_at == std::string::npos) {
      term.degree = parse_int(key.substr(1), spec);
    } else {
      term.degree = parse_int(key.substr(1, mode_at - 1), spec);
      term.mode = key[mode_at] == 'c' ? AnnulusFunction::Mode::cosine : AnnulusFunction::Mode::sine;
      term.harmonic = parse_int(key.substr(mode_at + 1), spec);
    }
    if (term.degree < 0) throw SpecError("negative degree in '" + key + "'");
    terms.push_back(term);
  }
  return AnnulusFunction(std::move(terms));
}

ScalarField parse_scalar_field(const std::string& spec, Eigen::Index dim) {
  std::vector<ScalarField::Ridge> ridges;
  for (const auto& term : split(spec, '+')) {
    const auto [kind, rest] = kind_of(term);
    ScalarField::Ridge ridge{1.0, ScalarField::Profile::constant, Eigen::VectorXd::Zero(dim), 0.0};
    if (kind == "const") {
      ridge.profile = ScalarField::Profile::constant;
    } else if (kind == "sin") {
      ridge.profile = ScalarField::Profile::sine;
    } else if (kind == "cos") {
      ridge.profile = ScalarField::Profile::cosine;
    } else if (kind == "tanh") {
      ridge.profile = ScalarField::Profile::tanh;
    } else if (kind == "linear") {
      ridge.profile = ScalarField::Profile::linear;
    } else {
      throw SpecError("unknown ridge profile '" + term + "'");
    }
    if (ridge.profile != ScalarField::Profile::constant) ridge.direction[0] = 1.0;
    for (const auto& [key, value] : key_values(term, rest)) {
      if (key == "a") {
        ridge.amplitude = parse_number(value);
      } else if (key == "b") {
        ridge.shift = parse_number(value);
      } else if (key == "k") {
        const auto parts = split(value, '/');
        if (static_cast<Eigen::Index>(parts.size()) != dim) {
          throw SpecError("k needs " + std::to_string(dim) + " components in '" + term + "'");
        }
        for (Eigen::Index d = 0; d < dim; ++d) {
          ridge.direction[d] = parse_number(parts[static_cast<std::size_t>(d)]);
        }
      } else {
        throw SpecError("unknown ridge key '" + key + "'");
      }
    }
    ridges.push_back(std::move(ridge));
  }
  if (ridges.empty()) throw SpecError("empty field spec");
  return ScalarField(dim, std::move(ridges));
}

GridSpec parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw SpecError("grid must be lo:hi:count, got '" + text + "'");
  GridSpec g{parse_number(parts[0]), parse_number(parts[1]), parse_int(parts[2], text)};
  if (g.count < 3) throw SpecError("grid count must be at least 3");
  if (!(g.hi > g.lo)) throw SpecError("grid needs lo < hi");
  return g;
}

}  // namespace foliate::cli
