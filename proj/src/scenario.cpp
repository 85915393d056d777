#include "sea/scenario.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sea/error.hpp"
#include "sea/toml_reader.hpp"

namespace sea {
namespace {

using nlohmann::json;

constexpr double kLoadTraceTol = 1e-8;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

double get_number(const json& doc, const std::string& key, double fallback, const std::string& prefix) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  const json& v = doc.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  throw Error(errc::kParse, join(prefix, key), "expected a number");
}

bool get_bool(const json& doc, const std::string& key, bool fallback, const std::string& prefix) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_boolean()) throw Error(errc::kParse, join(prefix, key), "expected a boolean");
  return doc.at(key).get<bool>();
}

int get_int(const json& doc, const std::string& key, int fallback, const std::string& prefix) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number_integer()) throw Error(errc::kParse, join(prefix, key), "expected an integer");
  return doc.at(key).get<int>();
}

std::vector<double> get_number_list(const json& doc, const std::string& key, const std::string& prefix) {
  std::vector<double> out;
  if (!doc.contains(key)) return out;
  const json& v = doc.at(key);
  if (!v.is_array()) throw Error(errc::kParse, join(prefix, key), "expected an array of numbers");
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(errc::kParse, join(prefix, key), "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const json& require(const json& doc, const std::string& key, const std::string& prefix) {
  if (!doc.contains(key)) throw Error(errc::kParse, join(prefix, key), "required field is missing");
  return doc.at(key);
}

GeneratorSpec parse_generator(const json& doc, const std::string& prefix) {
  GeneratorSpec spec;
  if (!doc.contains("generator")) return spec;
  const json& g = doc.at("generator");
  const std::string gp = join(prefix, "generator");
  if (!g.is_object()) throw Error(errc::kParse, gp, "expected an object");
  spec.tau = get_number(g, "tau", 1.0, gp);
  spec.dissipation = get_bool(g, "dissipation", true, gp);
  if (std::isinf(spec.tau) && spec.tau > 0) spec.dissipation = false;
  if (spec.dissipation && !(spec.tau > 0.0)) throw Error(errc::kInvalidArgument, join(gp, "tau"), "must be positive");
  if (g.contains("constraints")) {
    const json& list = g.at("constraints");
    if (!list.is_array()) throw Error(errc::kParse, join(gp, "constraints"), "expected an array");
    spec.constraints.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& c = list[i];
      const std::string field = join(gp, "constraints[" + std::to_string(i) + "]");
      if (c.is_string()) {
        const auto name = c.get<std::string>();
        if (name == "identity") {
          spec.constraints.push_back(ConstraintEntry::identity());
        } else if (name == "hamiltonian") {
          spec.constraints.push_back(ConstraintEntry::hamiltonian());
        } else {
          throw Error(errc::kParse, field, "unknown constraint name \"" + name + "\"");
        }
      } else if (c.is_object()) {
        const std::string label = c.contains("label") && c.at("label").is_string() ? c.at("label").get<std::string>()
                                                                                   : "C" + std::to_string(i);
        spec.constraints.push_back(ConstraintEntry::custom(operator_from_json(c, field), label));
      } else {
        throw Error(errc::kParse, field, "expected \"identity\", \"hamiltonian\" or an operator object");
      }
    }
  }
  if (spec.constraints.empty() || spec.constraints.front().kind != ConstraintEntry::Kind::kIdentity) {
    spec.constraints.insert(spec.constraints.begin(), ConstraintEntry::identity());
  }
  return spec;
}

}  // namespace

const ScenarioConfig& ScenarioFile::require_config() const {
  if (!config) throw Error(errc::kParse, "hamiltonian", "scenario has no top-level hamiltonian/rho0");
  return *config;
}

ScenarioConfig scenario_config_from_json(const json& doc, const std::string& prefix) {
  if (!doc.is_object()) throw Error(errc::kParse, prefix.empty() ? "$" : prefix, "expected an object");
  ScenarioConfig c;
  c.hamiltonian = operator_from_json(require(doc, "hamiltonian", prefix), join(prefix, "hamiltonian"));
  c.dim = c.hamiltonian.dim();
  if (doc.contains("dim") && get_int(doc, "dim", c.dim, prefix) != c.dim) {
    throw Error(errc::kDimensionMismatch, join(prefix, "dim"), "does not match the hamiltonian");
  }
  const HermitianOperator rho = operator_from_json(require(doc, "rho0", prefix), join(prefix, "rho0"));
  if (rho.dim() != c.dim) throw Error(errc::kDimensionMismatch, join(prefix, "rho0"), "dimension differs from dim");
  c.rho0 = DensityState::from_operator(rho, kStateTol, kLoadTraceTol, join(prefix, "rho0"));
  c.generator = parse_generator(doc, prefix);
  c.hbar = get_number(doc, "hbar", 1.0, prefix);
  c.t_final = get_number(doc, "t_final", 50.0, prefix);
  c.integrator.dt_init = get_number(doc, "dt_init", c.integrator.dt_init, prefix);
  if (doc.contains("integrator")) {
    const json& integ = doc.at("integrator");
    const std::string ip = join(prefix, "integrator");
    c.integrator.rtol = get_number(integ, "rtol", c.integrator.rtol, ip);
    c.integrator.atol = get_number(integ, "atol", c.integrator.atol, ip);
    c.integrator.dt_min = get_number(integ, "dt_min", c.integrator.dt_min, ip);
    c.integrator.max_steps = static_cast<long>(get_number(integ, "max_steps", static_cast<double>(c.integrator.max_steps), ip));
  }
  c.eig_floor = get_number(doc, "eig_floor", c.eig_floor, prefix);
  c.output_dt = get_number(doc, "output_dt", 0.0, prefix);
  c.output_times = get_number_list(doc, "output_times", prefix);
  if (doc.contains("equilibrium")) {
    const json& eq = doc.at("equilibrium");
    const std::string ep = join(prefix, "equilibrium");
    c.stop_at_equilibrium = get_bool(eq, "stop", c.stop_at_equilibrium, ep);
    c.equilibrium_tol = get_number(eq, "tol", c.equilibrium_tol, ep);
    c.equilibrium_count = get_int(eq, "count", c.equilibrium_count, ep);
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(e.code(), join(prefix, e.field()), e.detail());
  }
  return c;
}

json scenario_config_to_json(const ScenarioConfig& c) {
  json constraints = json::array();
  for (const auto& e : c.generator.constraints) {
    switch (e.kind) {
      case ConstraintEntry::Kind::kIdentity:
        constraints.push_back("identity");
        break;
      case ConstraintEntry::Kind::kHamiltonian:
        constraints.push_back("hamiltonian");
        break;
      case ConstraintEntry::Kind::kCustom: {
        json op = to_json(e.op);
        op["label"] = e.label;
        constraints.push_back(std::move(op));
        break;
      }
    }
  }
  json generator = {{"dissipation", c.generator.dissipation}, {"constraints", std::move(constraints)}};
  generator["tau"] = c.generator.dissipation ? json(c.generator.tau) : json("inf");
  return {{"dim", c.dim},
          {"hbar", c.hbar},
          {"hamiltonian", to_json(c.hamiltonian)},
          {"rho0", to_json(c.rho0.op())},
          {"generator", std::move(generator)},
          {"t_final", c.t_final},
          {"dt_init", c.integrator.dt_init},
          {"integrator",
           {{"rtol", c.integrator.rtol},
            {"atol", c.integrator.atol},
            {"dt_min", c.integrator.dt_min},
            {"max_steps", c.integrator.max_steps}}},
          {"eig_floor", c.eig_floor},
          {"output_dt", c.output_dt > 0.0 ? c.output_dt : c.t_final / 200.0},
          {"output_times", c.output_times},
          {"equilibrium",
           {{"stop", c.stop_at_equilibrium}, {"tol", c.equilibrium_tol}, {"count", c.equilibrium_count}}}};
}

ScenarioFile parse_scenario(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw Error(errc::kParse, "$", "scenario must be an object");
  ScenarioFile file;
  file.source = source;
  json resolved = json::object();

  if (doc.contains("hamiltonian") || doc.contains("rho0")) {
    file.config = scenario_config_from_json(doc);
    resolved = scenario_config_to_json(*file.config);
  }
  if (doc.contains("onsager")) {
    OnsagerSection s;
    const auto times = get_number_list(doc.at("onsager"), "times", "onsager");
    if (!times.empty()) s.times = times;
    file.onsager = s;
    resolved["onsager"] = {{"times", s.times}};
  }
  if (doc.contains("sector")) {
    const json& sec = doc.at("sector");
    SectorSection s;
    s.n_op = operator_from_json(require(sec, "N", "sector"), "sector.N");
    s.index = get_int(sec, "index", 0, "sector");
    s.samples = get_int(sec, "samples", 10, "sector");
    file.sector = s;
    resolved["sector"] = {{"N", to_json(s.n_op)}, {"index", s.index}, {"samples", s.samples}};
  }
  if (doc.contains("separability")) {
    const json& sep = doc.at("separability");
    SeparabilitySection s{scenario_config_from_json(require(sep, "A", "separability"), "separability.A"),
                          scenario_config_from_json(require(sep, "B", "separability"), "separability.B")};
    if (sep.contains("mode")) {
      if (!sep.at("mode").is_string()) throw Error(errc::kParse, "separability.mode", "expected a string");
      s.mode = separability_mode_from_string(sep.at("mode").get<std::string>());
    }
    s.t_final = get_number(sep, "t_final", s.a.t_final, "separability");
    s.outputs = get_int(sep, "outputs", s.outputs, "separability");
    file.separability = s;
    resolved["separability"] = {{"A", scenario_config_to_json(s.a)},
                                {"B", scenario_config_to_json(s.b)},
                                {"mode", to_string(s.mode)},
                                {"t_final", s.t_final},
                                {"outputs", s.outputs}};
  }
  if (!file.config && !file.separability) {
    throw Error(errc::kParse, "hamiltonian", "scenario needs hamiltonian/rho0 or a separability section");
  }
  file.resolved = std::move(resolved);
  file.digest = sha256_hex(file.resolved.dump());
  return file;
}

json read_scenario_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::kIo, "scenario", "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (path.extension() == ".toml") return parse_toml(text);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(errc::kParse, "scenario", e.what());
  }
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_scenario_document(path), path.string());
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(errc::kIo, "digest", "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace sea
