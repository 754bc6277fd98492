#include "kanvmc/run.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Core>

#ifdef KANVMC_HAVE_OPENMP
#include <omp.h>
#endif

#include "kanvmc/checkpoint.hpp"
#include "kanvmc/errors.hpp"
#include "kanvmc/exact.hpp"
#include "kanvmc/io.hpp"
#include "kanvmc/observables.hpp"

namespace kanvmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Json estimate_json(const VmcEstimate& e) {
  return {{"energy", e.energy},
          {"variance", e.variance},
          {"stderr", e.std_error},
          {"acceptance", std::isnan(e.acceptance) ? Json(nullptr) : Json(e.acceptance)},
          {"samples", e.samples}};
}

void write_json(const std::filesystem::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

Json record_header(const RunConfig& cfg, const char* command) {
  return {{"command", command},
          {"run_id", cfg.run_id()},
          {"seed", {{"model", cfg.model.seed}, {"sampler", cfg.sampler.seed}}},
          {"config", describe(cfg)},
          {"source", cfg.source}};
}

void say(const RunContext& ctx, const std::string& line) {
  if (ctx.log != nullptr) *ctx.log << line << std::endl;
}

SectorFilter sector_filter(const RunConfig& cfg) {
  SectorFilter f;
  if (cfg.zero_magnetization()) f.magnetization = 0;
  return f;
}

std::vector<ObservableSeries> exact_series(const SectorBasis& basis, const Eigen::VectorXd& v, const RunConfig& cfg,
                                           const std::string& mode, const std::string& tag) {
  std::vector<ObservableSeries> out;
  const ExactSource src{basis, v, cfg.hamiltonian.msr};
  for (const auto& r : requested_observables(cfg)) {
    out.push_back(series(src, r.kind, r.axis));
    out.back().mode = mode;
    out.back().model_tag = tag;
  }
  return out;
}

std::vector<ObservableSeries> sampled_series(const Model& model, const RunConfig& cfg) {
  SamplerConfig sc = cfg.sampler;
  sc.n_samples = cfg.final_samples;
  sc.seed = cfg.sampler.seed ^ 0x6f627365ULL;
  CachedWavefunction<Model> cached(model);
  ChainEnsemble chains = init_chains(sc, model.sites(), cached);
  warmup(chains, cached, sc.warmup_sweeps);
  const SampleSet samples = draw_samples(chains, cached, sc);
  const SampledSource<CachedWavefunction<Model>> src{cached, samples.configs, cfg.hamiltonian.msr, sector_filter(cfg)};
  std::vector<ObservableSeries> out;
  for (const auto& r : requested_observables(cfg)) {
    out.push_back(series(src, r.kind, r.axis));
    out.back().mode = "stochastic";
    out.back().model_tag = model.spec().tag();
  }
  return out;
}

std::string series_csv(const std::vector<ObservableSeries>& s) {
  std::ostringstream os;
  write_series_csv(os, s);
  return os.str();
}

bool ed_feasible(const RunConfig& cfg, Index dim) { return dim <= cfg.output.compare_ed_max_dimension; }

EdSolution solve(const RunConfig& cfg, const SectorBasis& basis) {
  const int k = static_cast<int>(std::min<Index>(cfg.ed_states, basis.size()));
  return ed_solve(cfg.hamiltonian, basis, k, cfg.lanczos);
}

Json ed_json(const EdSolution& sol) {
  std::vector<double> ev(sol.eigenvalues.data(), sol.eigenvalues.data() + sol.eigenvalues.size());
  return {{"eigenvalues", ev}, {"ground_multiplicity", ground_multiplicity(sol)}, {"dimension", sol.basis.size()}};
}

}  // namespace

void set_threads(int threads) {
  if (threads <= 0) return;
  Eigen::setNbThreads(threads);
#ifdef KANVMC_HAVE_OPENMP
  omp_set_num_threads(threads);
#endif
}

std::vector<ObservableRequest> requested_observables(const RunConfig& cfg) {
  if (!cfg.output.observables.empty()) return cfg.output.observables;
  if (cfg.hamiltonian.kind == ModelKind::Tfim) {
    return {{ObservableKind::M2, Axis::Z}, {ObservableKind::SpinSpin, Axis::Z}};
  }
  return {{ObservableKind::Isotropic, Axis::Z},
          {ObservableKind::DimerDimer, Axis::Z},
          {ObservableKind::StructureFactor, Axis::Z}};
}

void check_compatible(const Model& model, const RunConfig& cfg) {
  const AnsatzSpec& a = model.spec();
  const AnsatzSpec& b = cfg.model;
  std::string what;
  if (a.kind != b.kind) what = "ansatz kind";
  else if (a.sites != b.sites) what = "chain length";
  else if (a.reflected != b.reflected) what = "reflection";
  else if (a.kind != AnsatzKind::Rbm && a.hidden != b.hidden) what = "hidden widths";
  else if (a.kind == AnsatzKind::SineKan && a.grid != b.grid) what = "grid size";
  else if (a.kind == AnsatzKind::Rbm && a.alpha != b.alpha) what = "hidden density";
  if (!what.empty()) throw ConfigError("checkpoint and config disagree on " + what);
}

Json cmd_train(const RunConfig& cfg, const RunContext& ctx) {
  const auto t0 = Clock::now();
  const auto& dir = cfg.output.dir;
  ensure_dir(dir);
  Model model = Model::create(cfg.model);
  say(ctx, "train " + cfg.run_id() + ": " + model.spec().tag() + " with " + std::to_string(model.param_count()) +
               " parameters, " + std::to_string(cfg.plan.epochs()) + " epochs");

  EpochCallback on_epoch;
  if (ctx.log != nullptr && ctx.log_every > 0) {
    on_epoch = [&](const HistoryRow& row) {
      if ((row.epoch + 1) % ctx.log_every == 0 || row.epoch == 0) {
        std::ostringstream os;
        os << "  epoch " << row.epoch + 1 << "  E " << format_double(row.energy) << "  var "
           << format_double(row.variance) << "  acc " << format_double(row.acceptance);
        if (row.bias_h > 0.0) os << "  h " << format_double(row.bias_h);
        say(ctx, os.str());
      }
    };
  }
  std::vector<HistoryRow> history;
  try {
    history = train(model, cfg.hamiltonian, cfg.sampler, cfg.plan, on_epoch);
  } catch (const NumericalAbort& e) {
    throw NumericalAbort(std::string(e.what()) + " (run " + cfg.run_id() + ", seed " +
                         std::to_string(cfg.sampler.seed) + ")");
  }
  const double train_seconds = seconds_since(t0);

  Json rec = record_header(cfg, "train");
  std::uint64_t clamps = 0;
  for (const auto& r : history) clamps += r.clamp_count;
  if (cfg.output.history) {
    write_file_atomic(dir / "history.csv", history_csv(history));
    rec["history_path"] = (dir / "history.csv").string();
  }
  if (cfg.output.checkpoint) {
    save_checkpoint(dir / "model.ckpt", model);
    rec["checkpoint_path"] = (dir / "model.ckpt").string();
  }

  SamplerConfig final_sampler = cfg.sampler;
  final_sampler.n_samples = cfg.final_samples;
  final_sampler.seed = cfg.sampler.seed ^ 0x66696e616cULL;
  final_sampler.validate();
  const VmcEstimate final_estimate = sample_estimate(model, cfg.hamiltonian, final_sampler);
  rec["final"] = estimate_json(final_estimate);
  rec["param_count"] = model.param_count();
  rec["clamp_count"] = clamps;
  rec["epochs"] = static_cast<long>(history.size());

  const SectorBasis basis = cfg.basis();
  if (ed_feasible(cfg, basis.size())) {
    const EdSolution sol = solve(cfg, basis);
    const Eigen::VectorXd v = model_vector(model, basis);
    const double e_exact_model = exact_expectation(v, basis, as_generator(cfg.hamiltonian));
    const double e0 = sol.eigenvalues(0);
    rec["ed"] = ed_json(sol);
    rec["ed"]["relative_error"] = relative_error(final_estimate.energy, e0);
    rec["ed"]["model_energy_exact"] = e_exact_model;
    rec["ed"]["relative_error_exact"] = relative_error(e_exact_model, e0);
    rec["fidelity"] = fidelity(v, sol);
    if (!cfg.output.observables.empty()) {
      auto s = cfg.output.exact_observables ? exact_series(basis, v, cfg, "exact", model.spec().tag())
                                            : std::vector<ObservableSeries>{};
      auto ref = exact_series(basis, sol.eigenvectors.col(0), cfg, "ed", "ED");
      s.insert(s.end(), ref.begin(), ref.end());
      if (cfg.output.sampled_observables) {
        auto st = sampled_series(model, cfg);
        s.insert(s.end(), st.begin(), st.end());
      }
      write_file_atomic(dir / "observables.csv", series_csv(s));
      rec["observables_path"] = (dir / "observables.csv").string();
    }
  } else {
    rec["ed"] = nullptr;
    rec["fidelity"] = nullptr;
  }
  rec["train_seconds"] = train_seconds;
  rec["wall_clock_seconds"] = seconds_since(t0);
  write_json(dir / "results.json", rec);
  say(ctx, "final energy " + format_double(final_estimate.energy) + " +- " + format_double(final_estimate.std_error));
  return rec;
}

Json cmd_ed(const RunConfig& cfg, const RunContext& ctx) {
  const auto t0 = Clock::now();
  const SectorBasis basis = cfg.basis();
  say(ctx, "ed: dimension " + std::to_string(basis.size()));
  const EdSolution sol = solve(cfg, basis);
  Json rec = record_header(cfg, "ed");
  rec["ed"] = ed_json(sol);
  rec["ed"]["max_residual"] = max_residual(build_sector_matrix(cfg.hamiltonian, basis), sol);
  rec["wall_clock_seconds"] = seconds_since(t0);
  ensure_dir(cfg.output.dir);
  if (!cfg.output.observables.empty()) {
    write_file_atomic(cfg.output.dir / "ed_observables.csv",
                      series_csv(exact_series(basis, sol.eigenvectors.col(0), cfg, "ed", "ED")));
    rec["observables_path"] = (cfg.output.dir / "ed_observables.csv").string();
  }
  write_json(cfg.output.dir / "ed.json", rec);
  for (Index i = 0; i < sol.eigenvalues.size(); ++i) say(ctx, "  E" + std::to_string(i) + " " + format_double(sol.eigenvalues(i)));
  return rec;
}

Json cmd_observe(const RunConfig& cfg, const std::filesystem::path& checkpoint, const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Model model = load_checkpoint(checkpoint);
  check_compatible(model, cfg);
  std::vector<ObservableSeries> s;
  const SectorBasis basis = cfg.exact_observables_possible() ? cfg.basis() : SectorBasis{};
  if (cfg.output.exact_observables) {
    if (!cfg.exact_observables_possible()) throw ConfigError("exact observables need a sector of at most 2^20 states");
    const Eigen::VectorXd v = model_vector(model, basis);
    s = exact_series(basis, v, cfg, "exact", model.spec().tag());
  }
  if (cfg.output.sampled_observables) {
    auto st = sampled_series(model, cfg);
    s.insert(s.end(), st.begin(), st.end());
  }
  if (cfg.exact_observables_possible() && ed_feasible(cfg, basis.size())) {
    const EdSolution sol = solve(cfg, basis);
    auto ref = exact_series(basis, sol.eigenvectors.col(0), cfg, "ed", "ED");
    s.insert(s.end(), ref.begin(), ref.end());
  }
  ensure_dir(cfg.output.dir);
  write_file_atomic(cfg.output.dir / "observables.csv", series_csv(s));
  Json rec = record_header(cfg, "observe");
  rec["checkpoint_path"] = checkpoint.string();
  rec["observables_path"] = (cfg.output.dir / "observables.csv").string();
  rec["series"] = static_cast<long>(s.size());
  rec["wall_clock_seconds"] = seconds_since(t0);
  say(ctx, "wrote " + std::to_string(s.size()) + " series to " + rec["observables_path"].get<std::string>());
  return rec;
}

Json cmd_fidelity(const RunConfig& cfg, const std::filesystem::path& checkpoint, const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Model model = load_checkpoint(checkpoint);
  check_compatible(model, cfg);
  if (!cfg.exact_observables_possible()) throw ConfigError("fidelity needs a sector of at most 2^20 states");
  const SectorBasis basis = cfg.basis();
  const EdSolution sol = solve(cfg, basis);
  const Eigen::VectorXd v = model_vector(model, basis);
  Json rec = record_header(cfg, "fidelity");
  rec["checkpoint_path"] = checkpoint.string();
  rec["fidelity"] = fidelity(v, sol);
  rec["ed"] = ed_json(sol);
  rec["model_energy_exact"] = exact_expectation(v, basis, as_generator(cfg.hamiltonian));
  rec["wall_clock_seconds"] = seconds_since(t0);
  say(ctx, "fidelity " + format_double(rec["fidelity"].get<double>()));
  return rec;
}

Json cmd_bench(const RunConfig& cfg, const RunContext& ctx) {
  std::ostringstream csv;
  csv << "L,param_count,passes,warmup_passes,mean_seconds\n";
  Json rows = Json::array();
  for (int sites : cfg.bench.lengths) {
    AnsatzSpec spec = cfg.model;
    spec.sites = sites;
    const Model model = Model::create(spec);
    std::mt19937_64 rng(cfg.model.seed ^ static_cast<std::uint64_t>(sites));
    SpinConfig c(sites);
    for (int i = 0; i < sites; ++i) c.set(i, (rng() & 1U) != 0);
    volatile double sink = 0.0;
    for (long i = 0; i < cfg.bench.warmup_passes; ++i) sink = sink + model.log_psi(c);
    const auto t0 = Clock::now();
    for (long i = 0; i < cfg.bench.passes; ++i) sink = sink + model.log_psi(c);
    const double mean = seconds_since(t0) / static_cast<double>(cfg.bench.passes);
    csv << sites << ',' << model.param_count() << ',' << cfg.bench.passes << ',' << cfg.bench.warmup_passes << ','
        << format_double(mean) << '\n';
    rows.push_back({{"L", sites},
                    {"param_count", model.param_count()},
                    {"passes", cfg.bench.passes},
                    {"warmup_passes", cfg.bench.warmup_passes},
                    {"mean_seconds", mean}});
    say(ctx, "  L " + std::to_string(sites) + "  " + format_double(mean * 1e6) + " us");
  }
  ensure_dir(cfg.output.dir);
  write_file_atomic(cfg.output.dir / "bench.csv", csv.str());
  Json rec = record_header(cfg, "bench");
  rec["rows"] = rows;
  rec["bench_path"] = (cfg.output.dir / "bench.csv").string();
  return rec;
}

Json cmd_validate(const RunConfig& cfg) {
  Json rec = record_header(cfg, "validate");
  rec["param_count"] = param_count(cfg.model);
  rec["tag"] = cfg.model.tag();
  const std::uint64_t dim = cfg.sector_dimension();
  rec["sector_dimension"] = dim == UINT64_MAX ? Json(nullptr) : Json(dim);
  return rec;
}

}  // namespace kanvmc
