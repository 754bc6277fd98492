#pragma once

#include <filesystem>
#include <ostream>

#include "kanvmc/config.hpp"

namespace kanvmc {

/// Where progress lines go; null silences them.
struct RunContext {
  std::ostream* log = nullptr;
  /// Print a progress line every this many epochs (0: never).
  long log_every = 500;
};

/// Thread count for Eigen and OpenMP; 0 keeps the library default.
void set_threads(int threads);

/// Trains, writes history.csv, model.ckpt and results.json into the output
/// directory and returns the results record.
Json cmd_train(const RunConfig& cfg, const RunContext& ctx = {});

/// Lowest ed_states eigenpairs; writes ed.json (and ed_observables.csv when
/// observables are requested).
Json cmd_ed(const RunConfig& cfg, const RunContext& ctx = {});

/// Observable series of a checkpointed model in exact and/or stochastic
/// mode, plus the ED reference when the sector is small enough.
Json cmd_observe(const RunConfig& cfg, const std::filesystem::path& checkpoint, const RunContext& ctx = {});

Json cmd_fidelity(const RunConfig& cfg, const std::filesystem::path& checkpoint, const RunContext& ctx = {});

/// Mean single-configuration forward latency per chain length; writes bench.csv.
Json cmd_bench(const RunConfig& cfg, const RunContext& ctx = {});

/// Resolved configuration with derived quantities; touches no files.
Json cmd_validate(const RunConfig& cfg);

/// Checkpoint architecture must match the configured one.
void check_compatible(const Model& model, const RunConfig& cfg);

/// Observables listed in the config, or the defaults for its Hamiltonian.
std::vector<ObservableRequest> requested_observables(const RunConfig& cfg);

}  // namespace kanvmc
