#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mpsenc/config.hpp"
#include "pipeline.hpp"
#include "reproduce.hpp"

namespace {

using mpsenc::RunConfig;

// Flags mirror RunConfig; a --config file supplies the base and explicit
// flags override it field by field.
struct ConfigFlags {
  std::string config_path;
  std::string kind, builder, origin_policy, out_dir;
  double mu = 0, scale = 0, shape = 0, domain_length = 0, eps_trunc = 0, tci_tol = 0;
  int n_qubits = 0, n_layers = 0, origin = 0, chi_sim = 0, tci_max_rank = 0, tci_max_sweeps = 0,
      tci_error_samples = 0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0, tci_seed = 0;

  CLI::Option *o_kind, *o_mu, *o_scale, *o_shape, *o_L, *o_n, *o_builder, *o_layers, *o_policy,
      *o_origin, *o_eps, *o_chi, *o_shots, *o_seed, *o_out, *o_trank, *o_ttol, *o_tsweeps,
      *o_tsamples, *o_tseed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration file");
    o_kind = app->add_option("--dist", kind, "distribution kind (normal, log_normal, levy, gamma)");
    o_mu = app->add_option("--mu", mu, "location parameter");
    o_scale = app->add_option("--scale", scale, "scale parameter (sigma / c / theta)");
    o_shape = app->add_option("--shape", shape, "shape parameter (gamma k)");
    o_L = app->add_option("--domain-length", domain_length, "support interval length L");
    o_n = app->add_option("--n-qubits", n_qubits, "grid qubits N");
    o_builder = app->add_option("--builder", builder, "mps builder: svd or tci");
    o_layers = app->add_option("--layers", n_layers, "disentangling layer count");
    o_policy = app->add_option("--origin-policy", origin_policy, "scan or fixed");
    o_origin = app->add_option("--origin", origin, "layer origin bond (with --origin-policy fixed)");
    o_eps = app->add_option("--eps-trunc", eps_trunc, "bond-skip truncation threshold");
    o_chi = app->add_option("--chi-sim", chi_sim, "MPS simulator bond cap");
    o_shots = app->add_option("--shots", shots, "sampling shots");
    o_seed = app->add_option("--seed", seed, "sampling seed");
    o_out = app->add_option("--out-dir", out_dir, "output directory (created if missing)");
    o_trank = app->add_option("--tci-max-rank", tci_max_rank, "cross interpolation rank cap");
    o_ttol = app->add_option("--tci-tol", tci_tol, "cross interpolation target error");
    o_tsweeps = app->add_option("--tci-max-sweeps", tci_max_sweeps, "cross interpolation sweep cap");
    o_tsamples = app->add_option("--tci-error-samples", tci_error_samples,
                                 "points for the sampled error estimate");
    o_tseed = app->add_option("--tci-seed", tci_seed, "seed for the error-estimate sample points");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw std::runtime_error("cannot read config file " + config_path);
      std::ostringstream buf;
      buf << is.rdbuf();
      cfg = mpsenc::run_config_from_json(buf.str());
    }
    if (o_kind->count()) cfg.dist.kind = mpsenc::DistributionSpec::kind_from_string(kind);
    if (o_mu->count()) cfg.dist.mu = mu;
    if (o_scale->count()) cfg.dist.scale = scale;
    if (o_shape->count()) cfg.dist.shape = shape;
    if (o_L->count()) cfg.dist.L = domain_length;
    if (o_n->count()) cfg.n_qubits = n_qubits;
    if (o_builder->count()) cfg.builder = builder;
    if (o_layers->count()) cfg.n_layers = n_layers;
    if (o_policy->count()) cfg.origin_policy = origin_policy;
    if (o_origin->count()) {
      cfg.origin = origin;
      if (!o_policy->count() && config_path.empty()) cfg.origin_policy = "fixed";
    }
    if (o_eps->count()) cfg.eps_trunc = eps_trunc;
    if (o_chi->count()) cfg.chi_sim = chi_sim;
    if (o_shots->count()) cfg.shots = shots;
    if (o_seed->count()) cfg.seed = seed;
    if (o_out->count()) cfg.out_dir = out_dir;
    if (o_trank->count()) cfg.tci.max_rank = tci_max_rank;
    if (o_ttol->count()) cfg.tci.rel_tol = tci_tol;
    if (o_tsweeps->count()) cfg.tci.max_sweeps = tci_max_sweeps;
    if (o_tsamples->count()) cfg.tci.n_error_samples = tci_error_samples;
    if (o_tseed->count()) cfg.tci.rng_seed = tci_seed;
    mpsenc::validate_config(cfg);
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"function-to-circuit encoding pipeline"};
  app.require_subcommand(1);

  ConfigFlags enc_flags, circ_flags, val_flags;
  CLI::App* enc = app.add_subcommand("encode", "build the MPS and export entanglement profiles");
  enc_flags.attach(enc);
  CLI::App* circ = app.add_subcommand("circuit", "compile the encoding circuit (QASM + JSON)");
  circ_flags.attach(circ);
  CLI::App* val =
      app.add_subcommand("validate", "simulate, sample, and run the statistical tests");
  val_flags.attach(val);

  std::string target, rep_out = ".";
  CLI::App* rep = app.add_subcommand("reproduce", "run a named figure/table sweep");
  rep->add_option("target", target, "fig2, fig4, fig5, fig6, table1, or table2")->required();
  rep->add_option("--out-dir", rep_out, "output directory (created if missing)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (enc->parsed()) return mpsenc::cli::cmd_encode(enc_flags.resolve());
    if (circ->parsed()) return mpsenc::cli::cmd_circuit(circ_flags.resolve());
    if (val->parsed()) return mpsenc::cli::cmd_validate(val_flags.resolve());
    if (rep->parsed()) return mpsenc::cli::cmd_reproduce(target, rep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
