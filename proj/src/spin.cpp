#include "kanvmc/spin.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace kanvmc {

namespace {

void check_site(const SpinConfig& c, int site) {
  if (site < 0 || site >= c.sites()) {
    throw std::out_of_range("site " + std::to_string(site) + " outside chain of " +
                            std::to_string(c.sites()) + " sites");
  }
}

}  // namespace

SpinConfig::SpinConfig(int sites) : sites_(sites) {
  if (sites < 2 || sites > kMaxSites) {
    throw std::invalid_argument("chain length must lie in [2, " + std::to_string(kMaxSites) +
                                "], got " + std::to_string(sites));
  }
}

SpinConfig::SpinConfig(int sites, std::uint64_t bits) : SpinConfig(sites) {
  if (sites > 64) {
    throw std::invalid_argument("integer encoding limited to 64 sites");
  }
  if (sites < 64 && (bits >> sites) != 0) {
    throw std::invalid_argument("bits set beyond the last site");
  }
  words_[0] = bits;
}

SpinConfig SpinConfig::from_sigma(std::span<const int> sigma) {
  SpinConfig c(static_cast<int>(sigma.size()));
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] != 1 && sigma[i] != -1) {
      throw std::invalid_argument("sigma values must be +1 or -1");
    }
    c.set(static_cast<int>(i), sigma[i] == 1);
  }
  return c;
}

SpinConfig SpinConfig::parse(std::string_view text) {
  SpinConfig c(static_cast<int>(text.size()));
  for (std::size_t i = 0; i < text.size(); ++i) {
    switch (text[i]) {
      case 'u': case 'U': case '1': case '+':
        c.set(static_cast<int>(i), true);
        break;
      case 'd': case 'D': case '0': case '-':
        break;
      default:
        throw std::invalid_argument("unrecognised spin character in '" + std::string(text) + "'");
    }
  }
  return c;
}

void SpinConfig::set(int site, bool up) noexcept {
  const auto word = static_cast<std::size_t>(site >> 6);
  const std::uint64_t mask = std::uint64_t{1} << (site & 63);
  words_[word] = up ? (words_[word] | mask) : (words_[word] & ~mask);
}

int SpinConfig::up_count() const noexcept {
  int n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

std::strong_ordering operator<=>(const SpinConfig& a, const SpinConfig& b) noexcept {
  if (auto cmp = a.sites_ <=> b.sites_; cmp != 0) return cmp;
  for (int w = SpinConfig::kWords - 1; w >= 0; --w) {
    const auto i = static_cast<std::size_t>(w);
    if (auto cmp = a.words_[i] <=> b.words_[i]; cmp != 0) return cmp;
  }
  return std::strong_ordering::equal;
}

std::size_t SpinConfigHash::operator()(const SpinConfig& c) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(c.sites());
  for (auto w : c.words()) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

std::uint64_t encode(const SpinConfig& c) {
  if (c.sites() > 64) throw std::invalid_argument("integer encoding limited to 64 sites");
  return c.words()[0];
}

SpinConfig decode(int sites, std::uint64_t bits) { return SpinConfig(sites, bits); }

SpinConfig flip(const SpinConfig& c, int site) {
  check_site(c, site);
  SpinConfig out = c;
  out.toggle(site);
  return out;
}

SpinConfig exchange(const SpinConfig& c, int i, int j) {
  check_site(c, i);
  check_site(c, j);
  if (c.up(i) == c.up(j)) {
    throw std::invalid_argument("exchange requires opposite spins at sites " + std::to_string(i) +
                                " and " + std::to_string(j));
  }
  SpinConfig out = c;
  out.toggle(i);
  out.toggle(j);
  return out;
}

SpinConfig reflect(const SpinConfig& c) {
  SpinConfig out(c.sites());
  const int last = c.sites() - 1;
  for (int i = 0; i <= last; ++i) {
    if (c.up(i)) out.set(last - i, true);
  }
  return out;
}

int magnetization(const SpinConfig& c) noexcept { return 2 * c.up_count() - c.sites(); }

int sublattice_a_up_count(const SpinConfig& c) noexcept {
  constexpr std::uint64_t kEven = 0x5555555555555555ULL;
  int n = 0;
  for (auto w : c.words()) n += std::popcount(w & kEven);
  return n;
}

std::string to_string(const SpinConfig& c) {
  std::string s(static_cast<std::size_t>(c.sites()), 'd');
  for (int i = 0; i < c.sites(); ++i) {
    if (c.up(i)) s[static_cast<std::size_t>(i)] = 'u';
  }
  return s;
}

void to_sigma_matrix(std::span<const SpinConfig> configs, Eigen::MatrixXd& out) {
  const int sites = configs.empty() ? 0 : configs.front().sites();
  out.resize(sites, static_cast<Index>(configs.size()));
  for (std::size_t b = 0; b < configs.size(); ++b) {
    const auto col = static_cast<Index>(b);
    for (int i = 0; i < sites; ++i) out(i, col) = configs[b].up(i) ? 1.0 : -1.0;
  }
}

SectorBasis::SectorBasis(int sites, std::optional<int> up_count, std::vector<std::uint64_t> states)
    : sites_(sites), up_count_(up_count), states_(std::move(states)) {}

std::optional<Index> SectorBasis::index_of(const SpinConfig& c) const {
  if (c.sites() != sites_) return std::nullopt;
  const std::uint64_t key = c.words()[0];
  auto it = std::lower_bound(states_.begin(), states_.end(), key);
  if (it == states_.end() || *it != key) return std::nullopt;
  return static_cast<Index>(it - states_.begin());
}

std::vector<SpinConfig> SectorBasis::configs() const {
  std::vector<SpinConfig> out;
  out.reserve(states_.size());
  for (auto s : states_) out.push_back(decode(sites_, s));
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

SectorBasis enumerate_sector(int sites, bool zero_magnetization) {
  if (sites < 2) throw std::invalid_argument("chain length must be at least 2");
  if (sites > kMaxEnumerableSites) {
    throw std::invalid_argument("refusing to enumerate " + std::to_string(sites) +
                                " sites (limit " + std::to_string(kMaxEnumerableSites) + ")");
  }
  std::vector<std::uint64_t> states;
  if (!zero_magnetization) {
    const std::uint64_t dim = std::uint64_t{1} << sites;
    states.resize(dim);
    for (std::uint64_t s = 0; s < dim; ++s) states[s] = s;
    return SectorBasis(sites, std::nullopt, std::move(states));
  }
  if (sites % 2 != 0) {
    throw std::invalid_argument("zero-magnetization sector needs an even chain length");
  }
  const int ups = sites / 2;
  states.reserve(binomial(sites, ups));
  // Gosper's hack walks same-popcount words in increasing order.
  const std::uint64_t limit = std::uint64_t{1} << sites;
  for (std::uint64_t s = (std::uint64_t{1} << ups) - 1; s < limit;) {
    states.push_back(s);
    const std::uint64_t low = s & (~s + 1);
    const std::uint64_t ripple = s + low;
    s = (((ripple ^ s) >> 2) / low) | ripple;
  }
  return SectorBasis(sites, ups, std::move(states));
}

}  // namespace kanvmc
