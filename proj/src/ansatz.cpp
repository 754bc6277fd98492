#include "kanvmc/ansatz.hpp"

#include <cmath>
#include <cstdlib>

namespace kanvmc {

std::string to_string(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::SineKan: return "sinekan";
    case AnsatzKind::Mlp: return "mlp";
    case AnsatzKind::Rbm: return "rbm";
  }
  return "?";
}

AnsatzKind parse_ansatz_kind(const std::string& text) {
  if (text == "sinekan") return AnsatzKind::SineKan;
  if (text == "mlp") return AnsatzKind::Mlp;
  if (text == "rbm") return AnsatzKind::Rbm;
  throw std::invalid_argument("unknown ansatz kind '" + text + "'");
}

AnsatzSpec AnsatzSpec::sinekan(int sites, std::vector<int> hidden, int grid, bool reflected,
                               std::uint64_t seed) {
  AnsatzSpec s;
  s.kind = AnsatzKind::SineKan;
  s.sites = sites;
  s.hidden = std::move(hidden);
  s.grid = grid;
  s.reflected = reflected;
  s.seed = seed;
  return s;
}

AnsatzSpec AnsatzSpec::mlp(int sites, std::vector<int> hidden, bool reflected, std::uint64_t seed) {
  AnsatzSpec s;
  s.kind = AnsatzKind::Mlp;
  s.sites = sites;
  s.hidden = std::move(hidden);
  s.reflected = reflected;
  s.seed = seed;
  return s;
}

AnsatzSpec AnsatzSpec::rbm(int sites, int alpha, std::uint64_t seed) {
  AnsatzSpec s;
  s.kind = AnsatzKind::Rbm;
  s.sites = sites;
  s.hidden = {};
  s.alpha = alpha;
  s.seed = seed;
  return s;
}

std::string AnsatzSpec::tag() const {
  switch (kind) {
    case AnsatzKind::SineKan: return reflected ? "rSineKAN" : "vSineKAN";
    case AnsatzKind::Mlp: return reflected ? "rMLP" : "vMLP";
    case AnsatzKind::Rbm: return "RBM";
  }
  return "?";
}

std::vector<std::string> sinekan_grid_warnings(int sites, const std::vector<int>& hidden, int grid) {
  std::vector<std::string> out;
  if (grid * grid != sites) return out;
  for (int h : hidden) {
    if (std::abs(h - sites) <= 0.1 * sites) {
      out.push_back("grid size " + std::to_string(grid) + " equals sqrt(L) for L = " +
                    std::to_string(sites) + " with hidden width " + std::to_string(h) +
                    " close to L; this combination is known to train poorly (try grid " +
                    std::to_string(grid - 1) + ")");
      break;
    }
  }
  return out;
}

Index param_count(const AnsatzSpec& spec) {
  const auto dims = Model::output_dims(spec);
  Index total = 0;
  Index in = spec.sites;
  switch (spec.kind) {
    case AnsatzKind::SineKan:
      for (Index out : dims) {
        total += SineKanLayer<double>::param_count(in, out, spec.grid);
        in = out;
      }
      return total;
    case AnsatzKind::Mlp:
      for (Index out : dims) {
        total += in * out + out;
        in = out;
      }
      return total;
    case AnsatzKind::Rbm: {
      const Index hidden = Index(spec.alpha) * spec.sites;
      return spec.sites + hidden + hidden * spec.sites;
    }
  }
  return 0;
}

Model init_sinekan(int sites, const std::vector<int>& hidden, int grid, bool reflected, std::uint64_t seed) {
  return Model::create(AnsatzSpec::sinekan(sites, hidden, grid, reflected, seed));
}

}  // namespace kanvmc
