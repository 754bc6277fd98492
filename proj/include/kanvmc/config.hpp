#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kanvmc/ansatz.hpp"
#include "kanvmc/exact.hpp"
#include "kanvmc/hamiltonian.hpp"
#include "kanvmc/observables.hpp"
#include "kanvmc/sampler.hpp"
#include "kanvmc/schedule.hpp"
#include "kanvmc/vmc.hpp"

namespace kanvmc {

using Json = nlohmann::json;

enum class SectorChoice { Full, ZeroMagnetization };

struct ObservableRequest {
  ObservableKind kind = ObservableKind::Isotropic;
  Axis axis = Axis::Z;
};

struct OutputOptions {
  std::filesystem::path dir = "runs/default";
  bool history = true;
  bool checkpoint = true;
  std::vector<ObservableRequest> observables;
  bool exact_observables = true;
  bool sampled_observables = true;
  /// Compare against ED after training when the sector is at most this large.
  Index compare_ed_max_dimension = 20000;
};

struct BenchOptions {
  std::vector<int> lengths = {16, 32, 64, 128, 256};
  long passes = 100000;
  long warmup_passes = 200000;
};

/// Fully resolved run description: every "auto" in the file has been
/// replaced by a concrete choice.
struct RunConfig {
  AnsatzSpec model;
  HamiltonianModel hamiltonian;
  SectorChoice sector = SectorChoice::ZeroMagnetization;
  SamplerConfig sampler;
  TrainingPlan plan;
  Index final_samples = 0;
  OutputOptions output;
  LanczosOptions lanczos;
  int ed_states = 4;
  BenchOptions bench;
  /// The merged document the run was resolved from.
  Json source;

  bool zero_magnetization() const noexcept { return sector == SectorChoice::ZeroMagnetization; }
  SectorBasis basis() const { return enumerate_sector(hamiltonian.sites, zero_magnetization()); }
  /// Saturates at UINT64_MAX beyond 62 sites.
  std::uint64_t sector_dimension() const;
  bool exact_observables_possible() const {
    return sector_dimension() <= static_cast<std::uint64_t>(kMaxOracleDimension);
  }
  std::string run_id() const;
};

struct LoadOptions {
  bool desk_scale = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// Deep merge: objects merge key by key, anything else is replaced.
void merge_into(Json& base, const Json& overlay);

/// Parses and validates a configuration document. Unknown keys, bad values
/// and unsupported combinations throw ConfigError.
RunConfig resolve_config(Json doc, const LoadOptions& opts = {});
RunConfig load_config(const std::filesystem::path& path, const LoadOptions& opts = {});

/// Echo of the resolved configuration, suitable for results records.
Json describe(const RunConfig& cfg);

}  // namespace kanvmc
