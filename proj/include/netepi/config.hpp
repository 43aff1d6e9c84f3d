#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netepi/csv.hpp"
#include "netepi/dist.hpp"
#include "netepi/error.hpp"
#include "netepi/graphs.hpp"
#include "netepi/rates.hpp"
#include "netepi/sim.hpp"

namespace netepi {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw config_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <class T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("field \"") + what + "\" has the wrong type");
  }
}

template <class T>
T field(const json& j, const char* key) {
  return get_as<T>(require(j, key), key);
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get_as<T>(j.at(key), key);
}

}  // namespace detail

/// {"kind":"poisson","mean":c} | {"kind":"regular","k":k} | {"kind":"pmf","probs":[...]}
inline DegreeDistribution parse_degree_law(const json& j) {
  using detail::field;
  const auto kind = field<std::string>(j, "kind");
  if (kind == "poisson") {
    return DegreeDistribution::poisson(field<double>(j, "mean"),
                                       detail::field_or<double>(j, "tail_mass", DegreeDistribution::default_tail_mass));
  }
  if (kind == "regular") {
    const auto k = field<long long>(j, "k");
    if (k < 0) throw config_error("regular degree must be >= 0");
    return DegreeDistribution::point_mass(static_cast<std::size_t>(k));
  }
  if (kind == "pmf") return DegreeDistribution::from_pmf(field<std::vector<double>>(j, "probs"));
  throw config_error("unknown degree law kind \"" + kind + "\"");
}

/// A bare number is shorthand for a constant rate.
inline RateFunction parse_rate(const json& j) {
  using detail::field;
  if (j.is_number()) return RateFunction::constant(j.get<double>());
  const auto kind = field<std::string>(j, "kind");
  if (kind == "constant") return RateFunction::constant(field<double>(j, "value"));
  if (kind == "ramp")
    return RateFunction::ramp(field<double>(j, "from"), field<double>(j, "to"), field<double>(j, "t0"),
                              field<double>(j, "t1"));
  if (kind == "sin")
    return RateFunction::sinusoid(field<double>(j, "base"), field<double>(j, "amplitude"), field<double>(j, "period"),
                                  detail::field_or<double>(j, "phase", 0.0));
  if (kind == "pwl") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : detail::require(j, "knots")) {
      if (!k.is_array() || k.size() != 2) throw config_error("pwl knots must be [t, v] pairs");
      knots.emplace_back(detail::get_as<double>(k[0], "knots"), detail::get_as<double>(k[1], "knots"));
    }
    return RateFunction::piecewise_linear(std::move(knots));
  }
  if (kind == "quotient")
    return RateFunction::quotient(parse_rate(detail::require(j, "num")), parse_rate(detail::require(j, "den")));
  throw config_error("unknown rate kind \"" + kind + "\"");
}

/// Random graph family to sample per trial.
struct GraphSpec {
  enum class Kind { erdos_renyi, configuration_model };
  Kind kind = Kind::erdos_renyi;
  std::size_t n = 250;
  double mean_degree = 2.0;                      // erdos_renyi
  std::optional<DegreeDistribution> law;         // configuration_model from a law
  std::vector<std::size_t> degrees;              // configuration_model from a sequence

  SparseGraph sample(std::uint64_t seed) const {
    if (kind == Kind::erdos_renyi) return erdos_renyi(n, mean_degree, seed);
    if (law) return configuration_model(n, *law, seed);
    return configuration_model(std::span<const std::size_t>(degrees), seed);
  }

  /// Degree law of the local limit: Poisson(c) for ER, the law (or the
  /// empirical sequence histogram) for the configuration model.
  DegreeDistribution limit_law() const {
    if (kind == Kind::erdos_renyi) return DegreeDistribution::poisson(mean_degree);
    if (law) return *law;
    std::vector<std::size_t> counts;
    for (std::size_t d : degrees) {
      if (d >= counts.size()) counts.resize(d + 1, 0);
      ++counts[d];
    }
    return DegreeDistribution::from_counts(counts);
  }

  std::string describe() const {
    std::ostringstream os;
    if (kind == Kind::erdos_renyi) {
      os << "ER(n=" << n << ", c=" << format_real(mean_degree) << ")";
    } else if (law) {
      os << "CM(n=" << n << ", " << law->describe() << ")";
    } else {
      os << "CM(sequence of " << degrees.size() << ")";
    }
    return os.str();
  }
};

/// {"kind":"er","n":..,"mean_degree":..} | {"kind":"cm","n":..,"degree":law} |
/// {"kind":"cm","degrees":[...]}
inline GraphSpec parse_graph(const json& j) {
  using detail::field;
  GraphSpec g;
  const auto kind = field<std::string>(j, "kind");
  if (kind == "er") {
    g.kind = GraphSpec::Kind::erdos_renyi;
    g.n = field<std::size_t>(j, "n");
    g.mean_degree = field<double>(j, "mean_degree");
    if (g.n == 0) throw config_error("graph needs at least one vertex");
    if (!(g.mean_degree > 0.0) || g.mean_degree > static_cast<double>(g.n))
      throw config_error("ER mean degree must lie in (0, n]");
  } else if (kind == "cm") {
    g.kind = GraphSpec::Kind::configuration_model;
    if (j.contains("degrees")) {
      g.degrees = field<std::vector<std::size_t>>(j, "degrees");
      g.n = g.degrees.size();
      std::size_t total = 0;
      for (std::size_t d : g.degrees) {
        if (d >= g.n) throw config_error("degree must be smaller than the number of vertices");
        total += d;
      }
      if (total % 2 != 0) throw config_error("degree sequence must have an even sum");
    } else {
      g.n = field<std::size_t>(j, "n");
      g.law = parse_degree_law(detail::require(j, "degree"));
    }
    if (g.n == 0) throw config_error("graph needs at least one vertex");
  } else {
    throw config_error("unknown graph kind \"" + kind + "\"");
  }
  return g;
}

/// {"alpha":..,"beta":rate,"rho":rate,"lambda":rate,"s0":..,"e0":..,"i0":..}
/// overlaid on `base`. When s0 or e0 is given without i0, i0 = 1 - s0 - e0.
inline EpidemicParams parse_epidemic(const json& j, EpidemicParams base = {}) {
  using detail::field_or;
  EpidemicParams p = std::move(base);
  p.alpha = field_or<double>(j, "alpha", p.alpha);
  if (j.contains("beta")) p.beta = parse_rate(j.at("beta"));
  if (j.contains("rho")) p.rho = parse_rate(j.at("rho"));
  if (j.contains("lambda")) p.lambda = parse_rate(j.at("lambda"));
  const bool moved = j.contains("s0") || j.contains("e0");
  p.s0 = field_or<double>(j, "s0", p.s0);
  p.e0 = field_or<double>(j, "e0", p.e0);
  p.i0 = field_or<double>(j, "i0", moved ? 1.0 - p.s0 - p.e0 : p.i0);
  p.validate();
  return p;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config is not valid JSON: " + std::string(e.what()));
  }
}

}  // namespace netepi
