#include "bvdeg/logging.hpp"

#include <cstdlib>
#include <memory>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace bvdeg::log {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::stderr_logger_st("bvdeg");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::err);
    return l;
  }();
  return instance;
}

}  // namespace

void configure_from_env() {
  const char* env = std::getenv("BVDEG_LOG");
  const std::string value = env ? env : "error";
  if (value == "debug") {
    set_level(Level::Debug);
  } else if (value == "info") {
    set_level(Level::Info);
  } else {
    set_level(Level::Error);
  }
}

void set_level(Level level) {
  switch (level) {
    case Level::Error: logger()->set_level(spdlog::level::err); break;
    case Level::Info: logger()->set_level(spdlog::level::info); break;
    case Level::Debug: logger()->set_level(spdlog::level::debug); break;
  }
}

void error(std::string_view message) { logger()->error("{}", message); }
void info(std::string_view message) { logger()->info("{}", message); }
void debug(std::string_view message) { logger()->debug("{}", message); }

}  // namespace bvdeg::log
