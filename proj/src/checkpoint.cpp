#include "kanvmc/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <sstream>

#include "kanvmc/errors.hpp"
#include "kanvmc/io.hpp"

namespace kanvmc {

namespace {

constexpr std::string_view kMagic = "KANVMC1\n";

std::string hidden_text(const std::vector<int>& hidden) {
  std::string out;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(hidden[i]);
  }
  return out;
}

void put_double(std::string& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffU));
}

double get_double(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= std::uint64_t(static_cast<unsigned char>(p[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

template <typename T>
T parse_number(const std::map<std::string, std::string>& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw CheckpointError("checkpoint header lacks '" + key + "'");
  std::istringstream in(it->second);
  T v{};
  in >> v;
  if (!in || !in.eof()) throw CheckpointError("checkpoint header has malformed '" + key + "'");
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string encode_checkpoint(const Model& model) {
  const auto& spec = model.spec();
  const Eigen::VectorXd delta = model.frozen();
  std::string payload;
  payload.reserve(static_cast<std::size_t>(8 * (delta.size() + model.param_count())));
  for (Index i = 0; i < delta.size(); ++i) put_double(payload, delta(i));
  for (Index i = 0; i < model.param_count(); ++i) put_double(payload, model.parameters()(i));

  std::ostringstream head;
  head << kMagic;
  head << "kind=" << to_string(spec.kind) << '\n';
  head << "sites=" << spec.sites << '\n';
  head << "hidden=" << hidden_text(spec.hidden) << '\n';
  head << "grid=" << spec.grid << '\n';
  head << "alpha=" << spec.alpha << '\n';
  head << "reflected=" << (spec.reflected ? 1 : 0) << '\n';
  head << "seed=" << spec.seed << '\n';
  head << "delta_max=" << format_double(spec.delta_max) << '\n';
  head << "frequency_init=" << (spec.frequency_init == FrequencyInit::Harmonic ? "harmonic" : "unit") << '\n';
  head << "format_version=" << kCheckpointVersion << '\n';
  head << "delta_count=" << delta.size() << '\n';
  head << "param_count=" << model.param_count() << '\n';
  head << "checksum=" << std::hex << fnv1a64(payload) << std::dec << '\n';
  head << '\n';
  return head.str() + payload;
}

Model decode_checkpoint(const std::string& bytes) {
  if (bytes.compare(0, kMagic.size(), kMagic) != 0) throw CheckpointError("not a checkpoint (bad magic bytes)");
  const auto end = bytes.find("\n\n", kMagic.size() - 1);
  if (end == std::string::npos) throw CheckpointError("checkpoint header is not terminated");
  std::map<std::string, std::string> h;
  {
    std::istringstream lines(bytes.substr(kMagic.size(), end + 1 - kMagic.size()));
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw CheckpointError("malformed checkpoint header line '" + line + "'");
      h[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  const int version = parse_number<int>(h, "format_version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint format version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  AnsatzSpec spec;
  try {
    spec.kind = parse_ansatz_kind(h.count("kind") ? h.at("kind") : "");
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("checkpoint kind: ") + e.what());
  }
  spec.sites = parse_number<int>(h, "sites");
  spec.hidden.clear();
  {
    std::istringstream in(h.count("hidden") ? h.at("hidden") : "");
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) spec.hidden.push_back(std::stoi(item));
    }
  }
  spec.grid = parse_number<int>(h, "grid");
  spec.alpha = parse_number<int>(h, "alpha");
  spec.reflected = parse_number<int>(h, "reflected") != 0;
  spec.seed = parse_number<std::uint64_t>(h, "seed");
  spec.delta_max = parse_number<double>(h, "delta_max");
  const std::string freq = h.count("frequency_init") ? h.at("frequency_init") : "";
  if (freq != "harmonic" && freq != "unit") throw CheckpointError("checkpoint has unknown frequency_init");
  spec.frequency_init = freq == "unit" ? FrequencyInit::Unit : FrequencyInit::Harmonic;

  const auto n_delta = parse_number<Index>(h, "delta_count");
  const auto n_param = parse_number<Index>(h, "param_count");
  if (n_delta < 0 || n_param < 0) throw CheckpointError("negative array length in checkpoint header");
  if (n_param != param_count(spec)) throw CheckpointError("checkpoint parameter count does not match its header");
  const std::size_t start = end + 2;
  const std::size_t expected = start + 8 * static_cast<std::size_t>(n_delta + n_param);
  if (bytes.size() != expected) {
    throw CheckpointError("checkpoint payload has " + std::to_string(bytes.size() - start) + " bytes, expected " +
                          std::to_string(expected - start) + " (truncated or padded file)");
  }
  std::stringstream cs;
  cs << std::hex << (h.count("checksum") ? h.at("checksum") : "");
  std::uint64_t checksum = 0;
  cs >> checksum;
  if (!cs || checksum != fnv1a64(std::string_view(bytes).substr(start))) {
    throw CheckpointError("checkpoint checksum mismatch (corrupted payload)");
  }
  Eigen::VectorXd delta(n_delta), theta(n_param);
  const char* p = bytes.data() + start;
  for (Index i = 0; i < n_delta; ++i, p += 8) delta(i) = get_double(p);
  for (Index i = 0; i < n_param; ++i, p += 8) theta(i) = get_double(p);
  try {
    return Model::restore(spec, delta, theta);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint does not describe a valid model: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  write_file_atomic(path, encode_checkpoint(model));
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const std::exception& e) {
    throw CheckpointError(e.what());
  }
  return decode_checkpoint(bytes);
}

}  // namespace kanvmc
