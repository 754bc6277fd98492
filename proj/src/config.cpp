#include "kanvmc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "kanvmc/checkpoint.hpp"
#include "kanvmc/errors.hpp"
#include "kanvmc/io.hpp"

namespace kanvmc {

namespace {

// Read access to one JSON object that remembers which keys were consumed,
// so that leftovers can be reported as unknown.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return as<T>(key);
  }

  template <typename T>
  T as(const std::string& key) {
    seen_.insert(key);
    const Json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("expected true or false");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
            throw ConfigError("expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("expected a string");
      }
      return v.get<T>();
    } catch (const ConfigError& e) {
      throw ConfigError(where(key) + ": " + e.what());
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string where(const std::string& key = "") const { return key.empty() ? path_ : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + where(key) + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json empty_object() { return Json::object(); }

const Json& child(const Json& root, const std::string& key, const Json& fallback) {
  return root.contains(key) && !root.at(key).is_null() ? root.at(key) : fallback;
}

FrequencyInit parse_frequency_init(const std::string& s) {
  if (s == "harmonic") return FrequencyInit::Harmonic;
  if (s == "unit") return FrequencyInit::Unit;
  throw ConfigError("unknown frequency_init '" + s + "' (expected harmonic or unit)");
}

AnsatzSpec parse_model(const Json& j) {
  Section s(j, "model");
  AnsatzSpec spec;
  spec.kind = s.has("kind") ? parse_ansatz_kind(s.as<std::string>("kind")) : AnsatzKind::SineKan;
  if (spec.kind == AnsatzKind::Mlp) spec.hidden = {256, 256};
  if (s.has("hidden")) {
    const Json& h = s.raw("hidden");
    if (!h.is_array() || h.empty()) throw ConfigError("model.hidden must be a non-empty array of widths");
    spec.hidden.clear();
    for (const auto& w : h) {
      if (!w.is_number_integer() || w.get<long long>() < 1) {
        throw ConfigError("model.hidden entries must be positive integers");
      }
      spec.hidden.push_back(w.get<int>());
    }
  }
  spec.grid = s.get<int>("grid", spec.grid);
  spec.alpha = s.get<int>("alpha", spec.alpha);
  spec.reflected = s.get<bool>("reflected", false);
  spec.seed = s.get<std::uint64_t>("seed", 0);
  spec.delta_max = s.get<double>("delta_max", spec.delta_max);
  if (s.has("frequency_init")) spec.frequency_init = parse_frequency_init(s.as<std::string>("frequency_init"));
  s.finish();
  if (spec.grid < 1) throw ConfigError("model.grid must be positive");
  if (spec.alpha < 1) throw ConfigError("model.alpha must be positive");
  if (!(spec.delta_max > 0.0)) throw ConfigError("model.delta_max must be positive");
  if (spec.kind == AnsatzKind::Rbm && spec.reflected) throw ConfigError("the RBM has no reflected variant");
  return spec;
}

struct HamiltonianBlock {
  HamiltonianModel model;
  std::string sector = "auto";
};

HamiltonianBlock parse_hamiltonian(const Json& j) {
  Section s(j, "hamiltonian");
  if (!s.has("kind")) throw ConfigError("hamiltonian.kind is required");
  if (!s.has("sites")) throw ConfigError("hamiltonian.sites is required");
  const ModelKind kind = parse_model_kind(s.as<std::string>("kind"));
  const int sites = s.as<int>("sites");
  if (sites < 2 || sites > kMaxSites) {
    throw ConfigError("hamiltonian.sites must lie in [2, " + std::to_string(kMaxSites) + "]");
  }
  HamiltonianBlock out;
  switch (kind) {
    case ModelKind::Tfim:
      out.model = HamiltonianModel::tfim(sites, s.get<double>("J", 1.0), s.get<double>("h", 1.0));
      if (s.has("msr") && s.as<bool>("msr")) throw ConfigError("the Marshall rotation applies to AHM and J1-J2 only");
      if (out.model.coupling <= 0.0) throw ConfigError("TFIM coupling J must be positive (ferromagnetic)");
      if (out.model.field < 0.0) throw ConfigError("TFIM field h must be non-negative");
      break;
    case ModelKind::Ahm:
      out.model = HamiltonianModel::ahm(sites, s.get<double>("gamma", 0.0), s.get<bool>("msr", true));
      if (out.model.gamma < -1.0 || out.model.gamma > 1.0) throw ConfigError("hamiltonian.gamma must lie in [-1, 1]");
      break;
    case ModelKind::J1J2:
      out.model = HamiltonianModel::j1j2(sites, s.get<double>("j1", 1.0), s.get<double>("j2", 0.0),
                                         s.get<bool>("msr", true));
      if (!(out.model.j1 > 0.0)) throw ConfigError("hamiltonian.j1 must be positive");
      if (out.model.j2 < 0.0) throw ConfigError("hamiltonian.j2 must be non-negative");
      break;
  }
  // keys that belong to other kinds are rejected rather than ignored
  for (const char* key : {"J", "h", "gamma", "j1", "j2", "msr"}) {
    const bool allowed = (kind == ModelKind::Tfim && (std::string(key) == "J" || std::string(key) == "h" ||
                                                      std::string(key) == "msr")) ||
                         (kind == ModelKind::Ahm && (std::string(key) == "gamma" || std::string(key) == "msr")) ||
                         (kind == ModelKind::J1J2 && (std::string(key) == "j1" || std::string(key) == "j2" ||
                                                      std::string(key) == "msr"));
    if (!allowed && j.contains(key)) {
      throw ConfigError("hamiltonian." + std::string(key) + " does not apply to " + to_string(kind));
    }
  }
  out.sector = s.get<std::string>("sector", "auto");
  if (out.sector != "auto" && out.sector != "full" && out.sector != "zero_magnetization") {
    throw ConfigError("hamiltonian.sector must be auto, full or zero_magnetization");
  }
  s.finish();
  if (sites == 2) warn("a 2-site periodic chain counts each bond twice");
  return out;
}

struct SamplerBlock {
  SamplerConfig cfg;
  std::string move = "auto";
};

SamplerBlock parse_sampler(const Json& j) {
  Section s(j, "sampler");
  SamplerBlock out;
  out.cfg.n_chains = s.get<Index>("chains", out.cfg.n_chains);
  out.cfg.n_samples = s.get<Index>("samples", out.cfg.n_samples);
  out.cfg.warmup_sweeps = s.get<int>("warmup_sweeps", out.cfg.warmup_sweeps);
  out.move = s.get<std::string>("move", "auto");
  if (out.move != "auto") out.cfg.move = parse_move_kind(out.move);
  if (s.has("exchange")) out.cfg.exchange = parse_exchange_range(s.as<std::string>("exchange"));
  out.cfg.seed = s.get<std::uint64_t>("seed", 0);
  s.finish();
  out.cfg.validate();
  return out;
}

LrSchedule parse_schedule_object(const Json& j) {
  Section s(j, "training.schedule");
  if (!s.has("kind")) throw ConfigError("training.schedule.kind is required");
  const std::string kind = s.as<std::string>("kind");
  LrSchedule out;
  if (kind == "constant") {
    out = LrSchedule::constant(s.as<long>("epochs"), s.as<double>("lr"));
  } else if (kind == "flat_decay") {
    out = LrSchedule::flat_then_linear(s.as<long>("flat"), s.as<long>("decay"), s.as<double>("lr"),
                                       s.as<double>("final_lr"));
  } else if (kind == "knots") {
    const Json& k = s.raw("knots");
    if (!k.is_array()) throw ConfigError("training.schedule.knots must be an array of [epoch, lr] pairs");
    std::vector<std::pair<long, double>> knots;
    for (const auto& p : k) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number()) {
        throw ConfigError("training.schedule.knots entries must be [epoch, lr] pairs");
      }
      knots.emplace_back(p[0].get<long>(), p[1].get<double>());
    }
    out = LrSchedule(s.as<long>("epochs"), std::move(knots));
  } else {
    throw ConfigError("unknown schedule kind '" + kind + "' (expected constant, flat_decay or knots)");
  }
  s.finish();
  return out;
}

std::optional<AnnealingSpec> parse_annealing(const Json& j, const HamiltonianModel& h) {
  const bool ahm = h.kind == ModelKind::Ahm;
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text == "none") return std::nullopt;
    if (text != "auto") throw ConfigError("training.annealing must be auto, none or an object");
    if (!ahm || h.gamma <= 0.0) return std::nullopt;
    return AnnealingSpec::for_gamma(h.gamma);
  }
  if (!ahm) throw ConfigError("annealing is defined for the AHM only");
  Section s(j, "training.annealing");
  AnnealingSpec a = AnnealingSpec::for_gamma(h.gamma);
  if (s.has("h_init")) {
    const Json& v = s.raw("h_init");
    if (v.is_string() && v.get<std::string>() == "auto") {
    } else if (v.is_number()) {
      a.h_init = v.get<double>();
    } else {
      throw ConfigError("training.annealing.h_init must be a number or auto");
    }
  }
  a.stages = s.get<int>("stages", a.stages);
  a.iters_per_stage = s.get<long>("iters_per_stage", a.iters_per_stage);
  a.post_iters = s.get<long>("post_iters", a.post_iters);
  if (s.has("axis")) {
    const auto axis = s.as<std::string>("axis");
    a.axis = axis == "auto" ? BiasAxis::None : parse_bias_axis(axis);
    if (axis != "auto" && a.axis == BiasAxis::None) throw ConfigError("training.annealing.axis cannot be none");
  }
  s.finish();
  a.validate();
  return a;
}

LrSchedule auto_schedule(const HamiltonianModel& h, const AnsatzSpec& m, double lr,
                         const std::optional<AnnealingSpec>& annealing) {
  switch (h.kind) {
    case ModelKind::Tfim: {
      if (h.field == 0.0) return LrSchedule::constant(100, lr > 0.0 ? lr : 1e-2);
      const double lr0 = lr > 0.0 ? lr : 1e-4;
      return LrSchedule::flat_then_linear(5000, 5000, lr0, lr0 * 1e-2);
    }
    case ModelKind::Ahm: {
      const long total = annealing ? annealing->total_epochs() : 10000;
      const long flat = std::max(1L, total / 2);
      const double lr0 = lr > 0.0 ? lr : 1e-4;
      return LrSchedule::flat_then_linear(flat, total - flat, lr0, lr0 * 1e-2);
    }
    case ModelKind::J1J2:
      return LrSchedule::j1j2(lr > 0.0 ? lr : j1j2_learning_rate(m.kind, m.reflected, h.sites, h.j2));
  }
  throw ConfigError("unsupported Hamiltonian kind");
}

OutputOptions parse_output(const Json& j) {
  Section s(j, "output");
  OutputOptions o;
  o.dir = s.get<std::string>("dir", o.dir.string());
  o.history = s.get<bool>("history", o.history);
  o.checkpoint = s.get<bool>("checkpoint", o.checkpoint);
  if (s.has("observables")) {
    const Json& list = s.raw("observables");
    if (!list.is_array()) throw ConfigError("output.observables must be an array of names");
    for (const auto& item : list) {
      if (!item.is_string()) throw ConfigError("output.observables entries must be strings");
      const auto name = item.get<std::string>();
      ObservableRequest r;
      if (name.rfind("spin_spin_", 0) == 0 && name.size() == 12 && name[10] == name[11]) {
        r.kind = ObservableKind::SpinSpin;
        r.axis = parse_axis(name.substr(10, 1));
      } else {
        r.kind = parse_observable_kind(name);
        if (r.kind == ObservableKind::SpinSpin) throw ConfigError("name the axis, e.g. spin_spin_zz");
      }
      o.observables.push_back(r);
    }
  }
  if (s.has("observable_modes")) {
    const Json& modes = s.raw("observable_modes");
    if (!modes.is_array()) throw ConfigError("output.observable_modes must be an array");
    o.exact_observables = o.sampled_observables = false;
    for (const auto& m : modes) {
      const auto text = m.is_string() ? m.get<std::string>() : "";
      if (text == "exact") {
        o.exact_observables = true;
      } else if (text == "stochastic") {
        o.sampled_observables = true;
      } else {
        throw ConfigError("output.observable_modes entries must be exact or stochastic");
      }
    }
  }
  o.compare_ed_max_dimension = s.get<Index>("compare_ed_max_dimension", o.compare_ed_max_dimension);
  s.finish();
  return o;
}

RunConfig resolve_impl(Json doc, const LoadOptions& opts);

}  // namespace

void merge_into(Json& base, const Json& overlay) {
  if (!base.is_object() || !overlay.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object()) {
      merge_into(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

RunConfig resolve_config(Json doc, const LoadOptions& opts) {
  try {
    return resolve_impl(std::move(doc), opts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
}

namespace {

RunConfig resolve_impl(Json doc, const LoadOptions& opts) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  if (opts.desk_scale) {
    if (!doc.contains("desk_scale")) throw ConfigError("--desk-scale given but the config has no desk_scale block");
    const Json overlay = doc.at("desk_scale");
    if (!overlay.is_object()) throw ConfigError("desk_scale must be an object");
    if (overlay.contains("desk_scale")) throw ConfigError("desk_scale cannot nest");
    merge_into(doc, overlay);
  }
  if (opts.seed) {
    doc["model"]["seed"] = *opts.seed;
    doc["sampler"]["seed"] = *opts.seed;
  }
  if (opts.out) doc["output"]["dir"] = opts.out->string();

  Section root(doc, "config");
  for (const char* key : {"name", "description"}) {
    if (root.has(key) && !doc.at(key).is_string()) throw ConfigError(std::string(key) + " must be a string");
  }
  root.has("desk_scale");
  if (!root.has("hamiltonian")) throw ConfigError("the hamiltonian block is required");
  const Json none = empty_object();

  RunConfig cfg;
  root.has("model");
  cfg.model = parse_model(child(doc, "model", none));
  const HamiltonianBlock hb = parse_hamiltonian(doc.at("hamiltonian"));
  cfg.hamiltonian = hb.model;
  cfg.model.sites = cfg.hamiltonian.sites;
  root.has("sampler");
  SamplerBlock sb = parse_sampler(child(doc, "sampler", none));

  root.has("training");
  {
    Section t(child(doc, "training", none), "training");
    const Json annealing_json = t.has("annealing") ? t.raw("annealing") : Json("auto");
    cfg.plan.annealing = parse_annealing(annealing_json, cfg.hamiltonian);
    // 0 means unset
    const double lr = t.has("lr") ? t.as<double>("lr") : 0.0;
    if (t.has("lr") && !(lr > 0.0)) throw ConfigError("training.lr must be positive");
    if (!t.has("schedule") || (t.raw("schedule").is_string() && t.raw("schedule").get<std::string>() == "auto")) {
      cfg.plan.lr = auto_schedule(cfg.hamiltonian, cfg.model, lr, cfg.plan.annealing);
    } else {
      if (lr > 0.0) throw ConfigError("training.lr only applies to the auto schedule");
      cfg.plan.lr = parse_schedule_object(t.raw("schedule"));
    }
    cfg.final_samples = t.get<Index>("final_samples", sb.cfg.n_samples);
    if (cfg.final_samples < 1) throw ConfigError("training.final_samples must be positive");
    t.finish();
  }

  // sector and move kind, now that the bias axis is known
  const bool uniform_x =
      cfg.plan.annealing &&
      (cfg.plan.annealing->axis == BiasAxis::UniformX ||
       (cfg.plan.annealing->axis == BiasAxis::None && default_bias_axis(cfg.hamiltonian.gamma) == BiasAxis::UniformX));
  if (hb.sector == "auto") {
    cfg.sector = cfg.hamiltonian.kind != ModelKind::Tfim && !uniform_x ? SectorChoice::ZeroMagnetization
                                                                         : SectorChoice::Full;
  } else {
    cfg.sector = hb.sector == "full" ? SectorChoice::Full : SectorChoice::ZeroMagnetization;
  }
  if (cfg.zero_magnetization()) {
    if (cfg.hamiltonian.sites % 2 != 0) {
      throw ConfigError("the zero-magnetization sector needs an even number of sites");
    }
    if (cfg.hamiltonian.kind == ModelKind::Tfim) {
      throw ConfigError("the zero-magnetization sector is not closed under the TFIM; use sector full");
    }
    if (uniform_x) throw ConfigError("a uniform_x bias leaves the zero-magnetization sector; use sector full");
  }
  if (sb.move == "auto") {
    sb.cfg.move = cfg.zero_magnetization() ? MoveKind::PairExchange : MoveKind::LocalFlip;
  } else if (cfg.zero_magnetization() != (sb.cfg.move == MoveKind::PairExchange)) {
    throw ConfigError(cfg.zero_magnetization() ? "local_flip moves leave the zero-magnetization sector"
                                               : "pair_exchange moves cannot reach the full space");
  }
  cfg.sampler = sb.cfg;
  cfg.plan.validate();

  root.has("output");
  cfg.output = parse_output(child(doc, "output", none));
  root.has("ed");
  {
    Section e(child(doc, "ed", none), "ed");
    cfg.ed_states = e.get<int>("k", cfg.ed_states);
    cfg.lanczos.max_basis = e.get<int>("max_basis", cfg.lanczos.max_basis);
    cfg.lanczos.max_restarts = e.get<int>("max_restarts", cfg.lanczos.max_restarts);
    cfg.lanczos.tolerance = e.get<double>("tolerance", cfg.lanczos.tolerance);
    cfg.lanczos.block_size = e.get<int>("block_size", cfg.lanczos.block_size);
    e.finish();
    if (cfg.ed_states < 1) throw ConfigError("ed.k must be at least 1");
  }
  root.has("bench");
  {
    Section b(child(doc, "bench", none), "bench");
    if (b.has("lengths")) {
      const Json& l = b.raw("lengths");
      if (!l.is_array() || l.empty()) throw ConfigError("bench.lengths must be a non-empty array");
      cfg.bench.lengths.clear();
      for (const auto& v : l) {
        if (!v.is_number_integer() || v.get<int>() < 2 || v.get<int>() > kMaxSites) {
          throw ConfigError("bench.lengths entries must be site counts in [2, 256]");
        }
        cfg.bench.lengths.push_back(v.get<int>());
      }
    }
    cfg.bench.passes = b.get<long>("passes", cfg.bench.passes);
    cfg.bench.warmup_passes = b.get<long>("warmup_passes", cfg.bench.warmup_passes);
    b.finish();
    if (cfg.bench.passes < 1 || cfg.bench.warmup_passes < 0) {
      throw ConfigError("bench.passes must be positive and warmup_passes non-negative");
    }
  }
  root.finish();

  if (cfg.model.kind == AnsatzKind::SineKan) {
    for (const auto& w : sinekan_grid_warnings(cfg.model.sites, cfg.model.hidden, cfg.model.grid)) warn(w);
  }
  cfg.source = std::move(doc);
  return cfg;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path, const LoadOptions& opts) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return resolve_config(std::move(doc), opts);
}

Json describe(const RunConfig& cfg) {
  Json j;
  const auto& m = cfg.model;
  j["model"] = {{"kind", to_string(m.kind)}, {"tag", m.tag()},           {"hidden", m.hidden},
                {"grid", m.grid},            {"alpha", m.alpha},         {"reflected", m.reflected},
                {"seed", m.seed},            {"delta_max", m.delta_max}, {"param_count", param_count(m)},
                {"frequency_init", m.frequency_init == FrequencyInit::Harmonic ? "harmonic" : "unit"}};
  const auto& h = cfg.hamiltonian;
  j["hamiltonian"] = {{"kind", to_string(h.kind)}, {"sites", h.sites}, {"msr", h.msr},
                      {"sector", cfg.zero_magnetization() ? "zero_magnetization" : "full"}};
  if (h.kind == ModelKind::Tfim) {
    j["hamiltonian"]["J"] = h.coupling;
    j["hamiltonian"]["h"] = h.field;
  } else if (h.kind == ModelKind::Ahm) {
    j["hamiltonian"]["gamma"] = h.gamma;
  } else {
    j["hamiltonian"]["j1"] = h.j1;
    j["hamiltonian"]["j2"] = h.j2;
  }
  const auto& s = cfg.sampler;
  j["sampler"] = {{"chains", s.n_chains},     {"samples", s.n_samples},          {"warmup_sweeps", s.warmup_sweeps},
                  {"move", to_string(s.move)}, {"exchange", to_string(s.exchange)}, {"seed", s.seed}};
  Json knots = Json::array();
  for (const auto& [e, lr] : cfg.plan.lr.knots()) knots.push_back({e, lr});
  j["training"] = {{"epochs", cfg.plan.epochs()}, {"lr_knots", knots}, {"final_samples", cfg.final_samples}};
  if (cfg.plan.annealing) {
    const auto& a = *cfg.plan.annealing;
    const BiasAxis axis = a.axis == BiasAxis::None ? default_bias_axis(h.gamma) : a.axis;
    j["training"]["annealing"] = {{"h_init", a.h_init},
                                  {"stages", a.stages},
                                  {"iters_per_stage", a.iters_per_stage},
                                  {"post_iters", a.post_iters},
                                  {"axis", to_string(axis)}};
  } else {
    j["training"]["annealing"] = nullptr;
  }
  return j;
}

std::uint64_t RunConfig::sector_dimension() const {
  const int sites = hamiltonian.sites;
  if (sites > 62) return UINT64_MAX;
  return zero_magnetization() ? binomial(sites, sites / 2) : (std::uint64_t{1} << sites);
}

std::string RunConfig::run_id() const {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << fnv1a64(describe(*this).dump());
  return os.str();
}

}  // namespace kanvmc
