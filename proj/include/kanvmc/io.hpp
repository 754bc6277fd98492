#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "kanvmc/vmc.hpp"

namespace kanvmc {

/// Writes `content` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// epoch,energy,variance,stderr,acceptance,lr,bias_h,clamp_count
void write_history_header(std::ostream& os);
void write_history_row(std::ostream& os, const HistoryRow& row);
std::string history_csv(const std::vector<HistoryRow>& rows);

}  // namespace kanvmc
