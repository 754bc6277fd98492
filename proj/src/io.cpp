#include "kanvmc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace kanvmc {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_history_header(std::ostream& os) {
  os << "epoch,energy,variance,stderr,acceptance,lr,bias_h,clamp_count\n";
}

void write_history_row(std::ostream& os, const HistoryRow& r) {
  os << r.epoch << ',' << format_double(r.energy) << ',' << format_double(r.variance) << ','
     << format_double(r.std_error) << ',' << format_double(r.acceptance) << ',' << format_double(r.lr) << ','
     << format_double(r.bias_h) << ',' << r.clamp_count << '\n';
}

std::string history_csv(const std::vector<HistoryRow>& rows) {
  std::ostringstream os;
  write_history_header(os);
  for (const auto& r : rows) write_history_row(os, r);
  return os.str();
}

}  // namespace kanvmc
