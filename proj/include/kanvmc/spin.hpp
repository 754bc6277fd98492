#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace kanvmc {

using Index = Eigen::Index;

/// Largest chain the bit encoding can hold.
inline constexpr int kMaxSites = 256;

/// Largest chain for which a basis may be enumerated.
inline constexpr int kMaxEnumerableSites = 24;

/// A spin-1/2 configuration in the sigma^z basis of an L-site chain.
///
/// Site i is stored as bit i of a fixed-width word array (1 = up). The
/// sigma view sigma_i = 2 b_i - 1 is derived on read.
class SpinConfig {
 public:
  static constexpr int kWords = kMaxSites / 64;
  using Words = std::array<std::uint64_t, kWords>;

  SpinConfig() = default;

  /// All-down configuration on `sites` sites. Requires 2 <= sites <= kMaxSites.
  explicit SpinConfig(int sites);

  /// Configuration from the low `sites` bits of `bits`. Requires sites <= 64.
  SpinConfig(int sites, std::uint64_t bits);

  static SpinConfig from_sigma(std::span<const int> sigma);

  /// Parses 'u'/'1'/'+' as up and 'd'/'0'/'-' as down, site 0 first.
  static SpinConfig parse(std::string_view text);

  int sites() const noexcept { return sites_; }

  bool up(int site) const noexcept {
    return (words_[static_cast<std::size_t>(site >> 6)] >> (site & 63)) & 1U;
  }
  int sigma(int site) const noexcept { return up(site) ? 1 : -1; }

  void set(int site, bool up) noexcept;
  void toggle(int site) noexcept {
    words_[static_cast<std::size_t>(site >> 6)] ^= std::uint64_t{1} << (site & 63);
  }

  int up_count() const noexcept;

  const Words& words() const noexcept { return words_; }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend std::strong_ordering operator<=>(const SpinConfig& a, const SpinConfig& b) noexcept;

 private:
  Words words_{};
  int sites_ = 0;
};

struct SpinConfigHash {
  std::size_t operator()(const SpinConfig& c) const noexcept;
};

/// Integer encoding (site i = bit i); only defined for chains of at most 64 sites.
std::uint64_t encode(const SpinConfig& c);
SpinConfig decode(int sites, std::uint64_t bits);

SpinConfig flip(const SpinConfig& c, int site);
SpinConfig exchange(const SpinConfig& c, int i, int j);
SpinConfig reflect(const SpinConfig& c);

/// Sum of sigma_i.
int magnetization(const SpinConfig& c) noexcept;

/// Number of up spins on sublattice A (even sites).
int sublattice_a_up_count(const SpinConfig& c) noexcept;

inline bool on_sublattice_a(int site) noexcept { return (site & 1) == 0; }

std::string to_string(const SpinConfig& c);

/// Writes sigma values (+1/-1) of each configuration as one column of `out`.
void to_sigma_matrix(std::span<const SpinConfig> configs, Eigen::MatrixXd& out);

/// Ordered, duplicate-free list of basis states, optionally restricted to
/// the zero-magnetization sector.
class SectorBasis {
 public:
  SectorBasis() = default;
  SectorBasis(int sites, std::optional<int> up_count, std::vector<std::uint64_t> states);

  int sites() const noexcept { return sites_; }
  bool constrained() const noexcept { return up_count_.has_value(); }
  std::optional<int> up_count() const noexcept { return up_count_; }
  Index size() const noexcept { return static_cast<Index>(states_.size()); }

  SpinConfig state(Index i) const { return decode(sites_, states_[static_cast<std::size_t>(i)]); }
  std::span<const std::uint64_t> encoded() const noexcept { return states_; }

  /// Ordinal of `c`, or nullopt when it lies outside the basis.
  std::optional<Index> index_of(const SpinConfig& c) const;

  std::vector<SpinConfig> configs() const;

 private:
  int sites_ = 0;
  std::optional<int> up_count_;
  std::vector<std::uint64_t> states_;
};

SectorBasis enumerate_sector(int sites, bool zero_magnetization);

/// Binomial coefficient, exact for the sizes used here.
std::uint64_t binomial(int n, int k);

}  // namespace kanvmc
