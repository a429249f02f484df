#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace mestd::cli {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::InvalidParameter, what); }

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json linear_from_db(const json& v, const std::string& key) {
  if (v.is_number()) return db_to_linear(v.get<double>());
  if (v.is_array()) {
    json out = json::array();
    for (const auto& x : v) out.push_back(linear_from_db(x, key));
    return out;
  }
  schema_error("\"" + key + "\" must be a number or an array of numbers");
}

// Rewrites every "<name>_db" key into "<name>" in linear units.
json convert_db_keys(const json& node) {
  if (node.is_array()) {
    json out = json::array();
    for (const auto& x : node) out.push_back(convert_db_keys(x));
    return out;
  }
  if (!node.is_object()) return node;
  json out = json::object();
  for (const auto& [key, value] : node.items()) {
    if (ends_with(key, "_db")) {
      const std::string base = key.substr(0, key.size() - 3);
      if (node.contains(base)) schema_error("both \"" + key + "\" and \"" + base + "\" given");
      out[base] = linear_from_db(value, key);
    } else {
      out[key] = convert_db_keys(value);
    }
  }
  return out;
}

const json& require(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    schema_error(std::string("missing \"") + key + "\" in " + where);
  }
  return obj.at(key);
}

double number(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) schema_error(std::string("\"") + key + "\" in " + where + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) schema_error(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) schema_error(std::string("\"") + key + "\" in " + where + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) schema_error(std::string("\"") + key + "\" must hold numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ContinuousFading parse_continuous(const json& f, const std::string& type) {
  if (type == "rician") return ContinuousFading::rician(number(f, "k", "fading"), number_or(f, "mean", 1.0));
  if (type == "nakagami") {
    const double m = f.contains("m") ? number(f, "m", "fading")
                                     : nakagami_m_from_rician(number(f, "k", "fading"));
    return ContinuousFading::nakagami(m, number_or(f, "mean", 1.0));
  }
  if (type == "rayleigh") return ContinuousFading::rayleigh(number_or(f, "mean", 1.0));
  if (type == "lognormal") {
    return ContinuousFading::lognormal(number(f, "location", "fading"), number(f, "scale", "fading"));
  }
  if (type == "tabulated") {
    return ContinuousFading::tabulated(numbers(f, "gains", "fading"), numbers(f, "values", "fading"));
  }
  schema_error("unknown fading type \"" + type + "\"");
}

}  // namespace

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) { return std::strtod(fmt(x).c_str(), nullptr); }

ScenarioConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("config is not valid JSON: ") + e.what());
  }
  doc = convert_db_keys(doc);
  if (!doc.is_object()) schema_error("config must be a JSON object");

  ScenarioConfig cfg;
  const json& src = require(doc, "source", "config");
  cfg.source = SourceModel(number_or(src, "sigma2", 1.0), number(src, "rate", "source"));

  const json& f = require(doc, "fading", "config");
  const json& type_node = require(f, "type", "fading");
  if (!type_node.is_string()) schema_error("fading \"type\" must be a string");
  const auto type = type_node.get<std::string>();
  if (type == "discrete") {
    cfg.fading = DiscreteFading(to_vector(numbers(f, "states", "fading")), to_vector(numbers(f, "probs", "fading")));
  } else {
    ContinuousScenario cont{parse_continuous(f, type), std::nullopt};
    if (f.contains("discretization")) {
      const json& d = f.at("discretization");
      const double m = number(d, "M", "discretization");
      if (m != static_cast<int>(m)) schema_error("discretization \"M\" must be an integer");
      cont.discretization = Discretization{static_cast<int>(m), number(d, "s_max", "discretization")};
    }
    cfg.fading = std::move(cont);
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    cfg.solver.tolerance = number_or(s, "tolerance", cfg.solver.tolerance);
    const double iters = number_or(s, "max_iterations", cfg.solver.max_iterations);
    if (iters != static_cast<int>(iters)) schema_error("\"max_iterations\" must be an integer");
    cfg.solver.max_iterations = static_cast<int>(iters);
    cfg.solver.barrier_reduction = number_or(s, "barrier_reduction", cfg.solver.barrier_reduction);
    cfg.solver.initial_point_slack = number_or(s, "initial_point_slack", cfg.solver.initial_point_slack);
    cfg.solver.validate();
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (o.contains("path")) cfg.output_path = o.at("path").get<std::string>();
    if (o.contains("format")) {
      const auto fmt_name = o.at("format").get<std::string>();
      if (fmt_name == "csv") {
        cfg.format = Format::Csv;
      } else if (fmt_name == "json") {
        cfg.format = Format::Json;
      } else {
        schema_error("output format must be \"csv\" or \"json\"");
      }
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema_error("cannot read config \"" + path + "\"");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace mestd::cli
