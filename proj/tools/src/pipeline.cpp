#include "pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

#include "artifacts.hpp"
#include "json.hpp"
#include "mpsenc/circuit.hpp"
#include "mpsenc/simulate.hpp"
#include "mpsenc/stats.hpp"

namespace mpsenc::cli {

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::string path = out_path(dir, name);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

nlohmann::json config_echo(const RunConfig& cfg) { return nlohmann::json::parse(run_config_to_json(cfg)); }

}  // namespace

EncodeOutcome build_mps(const RunConfig& cfg) {
  validate_config(cfg);
  Grid grid(cfg.n_qubits, cfg.dist.L);
  FunctionOracle oracle = sqrt_pdf_oracle(cfg.dist);
  EncodeOutcome out{Mps{}, oracle, grid};
  out.g1_value = g1(oracle, cfg.dist.L);
  out.g2_value = g2(oracle, cfg.dist.L);
  if (cfg.builder == "tci") {
    out.tci = tci_build(oracle, grid, cfg.tci);
    out.mps = out.tci->mps;
  } else {
    out.mps = mps_from_vector(discretize(oracle, grid));
  }
  return out;
}

BuildOptions build_options(const RunConfig& cfg) {
  BuildOptions opt;
  opt.n_layers = cfg.n_layers;
  opt.origin = cfg.origin_policy == "fixed" ? cfg.origin : -1;
  opt.eps_trunc = cfg.eps_trunc;
  opt.chi_sim = cfg.chi_sim;
  return opt;
}

int cmd_encode(const RunConfig& cfg) {
  EncodeOutcome enc = build_mps(cfg);
  Mps canon = canonicalize(enc.mps, 1);
  EntanglementProfile profile = entanglement_profile(canon);
  {
    auto os = open_out(cfg.out_dir, "profile.csv");
    profile.write_csv(os);
  }
  {
    auto os = open_out(cfg.out_dir, "profile_analytic.csv");
    write_prediction_csv(enc.g1_value, enc.g2_value, cfg.n_qubits, os);
  }
  {
    auto os = open_out(cfg.out_dir, "mps.json");
    write_mps_json(canon, os);
  }
  nlohmann::json meta;
  meta["config"] = config_echo(cfg);
  meta["max_bond"] = canon.max_bond();
  meta["g1"] = enc.g1_value;
  meta["g2"] = enc.g2_value;
  meta["validity_window_start"] = validity_window_start(cfg.dist);
  if (enc.tci) {
    meta["tci"] = {{"converged", enc.tci->converged},
                   {"sweeps", enc.tci->sweeps},
                   {"oracle_calls", enc.tci->oracle_calls},
                   {"mean_rel_error", enc.tci->error.mean_rel},
                   {"max_rel_error", enc.tci->error.max_rel}};
  }
  auto os = open_out(cfg.out_dir, "encode_meta.json");
  os << meta.dump(2) << '\n';
  return 0;
}

int cmd_circuit(const RunConfig& cfg) {
  EncodeOutcome enc = build_mps(cfg);
  BuildResult res = build_encoding_circuit(enc.mps, build_options(cfg));
  CircuitMetrics met = circuit_metrics(res.circuit);
  {
    auto os = open_out(cfg.out_dir, "circuit.qasm");
    write_qasm(res.circuit, os);
  }
  {
    auto os = open_out(cfg.out_dir, "circuit.json");
    write_circuit_json(res.circuit, os);
  }
  nlohmann::json fid;
  fid["config"] = config_echo(cfg);
  fid["fidelity"] = res.fidelity;
  fid["layer_fidelity"] = res.layer_fidelity;
  fid["discarded_weight"] = res.discarded_weight;
  fid["chi_sim_warning"] = res.chi_sim_warning;
  fid["depth"] = met.depth;
  fid["cnots"] = met.cnot_count;
  fid["gates"] = met.gate_count;
  auto os = open_out(cfg.out_dir, "fidelity.json");
  os << fid.dump(2) << '\n';
  if (res.chi_sim_warning)
    std::cerr << "warning: chi_sim cap discarded weight " << res.discarded_weight << '\n';
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  EncodeOutcome enc = build_mps(cfg);
  BuildResult res = build_encoding_circuit(enc.mps, build_options(cfg));
  CircuitMetrics met = circuit_metrics(res.circuit);

  const bool dense = cfg.n_qubits <= 28;
  ApplyResult sim = apply_circuit(res.circuit, zero_state(cfg.n_qubits, dense, cfg.chi_sim));

  ValidationReport report;
  report.fidelity = res.fidelity;
  report.depth = met.depth;
  report.cnot_count = met.cnot_count;

  // KL needs every bin probability; only the dense path enumerates them.
  if (dense) {
    Eigen::VectorXcd ideal = discretize(enc.oracle, enc.grid);
    std::vector<double> q(static_cast<std::size_t>(sim.state.vec.size()));
    std::vector<double> p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = std::norm(sim.state.vec(static_cast<Eigen::Index>(i)));
      p[i] = std::norm(ideal(static_cast<Eigen::Index>(i)));
    }
    KlResult kl = kl_divergence(q, p);
    report.kl = kl.kl;
    report.kl_floored_bins = kl.floored_bins;
  } else {
    report.kl = std::numeric_limits<double>::quiet_NaN();
    report.kl_floored_bins = -1;
  }

  Histogram hist{enc.grid, sample(sim.state, cfg.shots, cfg.seed)};
  {
    auto os = open_out(cfg.out_dir, "histogram.csv");
    write_histogram_csv(hist, os);
  }
  {
    auto os = open_out(cfg.out_dir, "histogram.json");
    write_histogram_json(hist, os);
  }
  {
    auto os = open_out(cfg.out_dir, "plotdata.csv");
    write_plotdata_csv(hist, cfg.dist, os);
  }

  // KS on the first 200 shots of the same stream (a reproducible subset).
  std::int64_t n_ks = std::min<std::int64_t>(200, cfg.shots);
  auto sub = sample(sim.state, n_ks, cfg.seed);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n_ks));
  for (const auto& [j, cnt] : sub)
    for (std::int64_t i = 0; i < cnt; ++i) xs.push_back(enc.grid.x_of_index(j));
  KsResult ks = ks_test(xs, cfg.dist);
  report.ks_statistic = ks.statistic;
  report.ks_pvalue = ks.p_value;
  report.n_samples = n_ks;

  {
    auto os = open_out(cfg.out_dir, "report.json");
    report.write_json(os);
  }
  std::cout << "fidelity " << res.fidelity << "  KL " << report.kl << "  KS p " << ks.p_value
            << "  depth " << met.depth << "  cnots " << met.cnot_count << '\n';
  return ks.p_value > 0.05 ? 0 : 2;
}

}  // namespace mpsenc::cli
