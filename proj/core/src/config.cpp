#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mpsenc/config.hpp"

namespace mpsenc {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown field \"" + it.key() + "\" in " + where);
}

}  // namespace

void validate_config(const RunConfig& c) {
  if (c.schema_version != 1) throw std::invalid_argument("config: unsupported schema_version");
  if (c.n_qubits < 1 || c.n_qubits > 64)
    throw std::invalid_argument("config: n_qubits must be in [1, 64]");
  if (!(c.dist.L > 0.0)) throw std::invalid_argument("config: L must be positive");
  if (c.builder != "svd" && c.builder != "tci")
    throw std::invalid_argument("config: builder must be \"svd\" or \"tci\"");
  if (c.origin_policy != "scan" && c.origin_policy != "fixed")
    throw std::invalid_argument("config: origin_policy must be \"scan\" or \"fixed\"");
  if (c.origin_policy == "fixed" && (c.origin < 1 || c.origin > c.n_qubits - 1))
    throw std::invalid_argument("config: fixed origin bond out of range");
  if (c.n_layers < 1) throw std::invalid_argument("config: n_layers must be >= 1");
  if (c.eps_trunc < 0.0) throw std::invalid_argument("config: eps_trunc must be >= 0");
  if (c.chi_sim < 2) throw std::invalid_argument("config: chi_sim must be >= 2");
  if (c.shots < 0) throw std::invalid_argument("config: shots must be >= 0");
  if (c.tci.max_rank < 2) throw std::invalid_argument("config: tci.max_rank must be >= 2");
  if (!(c.tci.rel_tol > 0.0)) throw std::invalid_argument("config: tci.rel_tol must be positive");
  if (c.tci.max_sweeps < 1 || c.tci.n_error_samples < 1)
    throw std::invalid_argument("config: tci sweep and sample counts must be positive");
  DistributionSpec::kind_from_string(DistributionSpec::kind_to_string(c.dist.kind));
}

RunConfig run_config_from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(j,
                 {"schema_version", "distribution", "n_qubits", "builder", "tci", "n_layers",
                  "origin_policy", "origin", "eps_trunc", "chi_sim", "shots", "seed", "out_dir"},
                 "top level");
  RunConfig c;
  c.schema_version = j.value("schema_version", 1);

  if (j.contains("distribution")) {
    const json& d = j.at("distribution");
    reject_unknown(d, {"kind", "mu", "scale", "shape", "L", "n_qubits"}, "distribution");
    if (d.contains("kind")) c.dist.kind = DistributionSpec::kind_from_string(d.at("kind"));
    c.dist.mu = d.value("mu", c.dist.mu);
    c.dist.scale = d.value("scale", c.dist.scale);
    c.dist.shape = d.value("shape", c.dist.shape);
    c.dist.L = d.value("L", c.dist.L);
    if (d.contains("n_qubits")) {
      int dn = d.at("n_qubits");
      if (j.contains("n_qubits") && int(j.at("n_qubits")) != dn)
        throw std::invalid_argument("config: conflicting n_qubits values");
      c.n_qubits = dn;
    }
  }
  if (j.contains("n_qubits")) c.n_qubits = j.at("n_qubits");
  c.builder = j.value("builder", c.builder);
  if (j.contains("tci")) {
    const json& t = j.at("tci");
    reject_unknown(t, {"max_rank", "rel_tol", "max_sweeps", "n_error_samples", "rng_seed"}, "tci");
    c.tci.max_rank = t.value("max_rank", static_cast<std::int64_t>(c.tci.max_rank));
    c.tci.rel_tol = t.value("rel_tol", c.tci.rel_tol);
    c.tci.max_sweeps = t.value("max_sweeps", c.tci.max_sweeps);
    c.tci.n_error_samples = t.value("n_error_samples", c.tci.n_error_samples);
    c.tci.rng_seed = t.value("rng_seed", c.tci.rng_seed);
  }
  c.n_layers = j.value("n_layers", c.n_layers);
  c.origin_policy = j.value("origin_policy", c.origin_policy);
  c.origin = j.value("origin", c.origin);
  c.eps_trunc = j.value("eps_trunc", c.eps_trunc);
  c.chi_sim = j.value("chi_sim", c.chi_sim);
  c.shots = j.value("shots", c.shots);
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  validate_config(c);
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["distribution"] = {{"kind", DistributionSpec::kind_to_string(c.dist.kind)},
                       {"mu", c.dist.mu},
                       {"scale", c.dist.scale},
                       {"shape", c.dist.shape},
                       {"L", c.dist.L}};
  j["n_qubits"] = c.n_qubits;
  j["builder"] = c.builder;
  j["tci"] = {{"max_rank", static_cast<std::int64_t>(c.tci.max_rank)},
              {"rel_tol", c.tci.rel_tol},
              {"max_sweeps", c.tci.max_sweeps},
              {"n_error_samples", c.tci.n_error_samples},
              {"rng_seed", c.tci.rng_seed}};
  j["n_layers"] = c.n_layers;
  j["origin_policy"] = c.origin_policy;
  j["origin"] = c.origin;
  j["eps_trunc"] = c.eps_trunc;
  j["chi_sim"] = c.chi_sim;
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

}  // namespace mpsenc
