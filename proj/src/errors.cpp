#include "kanvmc/errors.hpp"

#include <iostream>
#include <utility>

namespace kanvmc {

namespace {

WarningHandler& warning_handler() {
  static WarningHandler handler;
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  return std::exchange(warning_handler(), std::move(handler));
}

void warn(std::string_view message) {
  if (const auto& handler = warning_handler()) {
    handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace kanvmc
