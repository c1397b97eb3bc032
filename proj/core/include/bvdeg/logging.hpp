#pragma once

#include <string_view>

namespace bvdeg::log {

enum class Level { Error, Info, Debug };

/// Reads BVDEG_LOG (error|info|debug); defaults to error.
void configure_from_env();
void set_level(Level level);

void error(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

}  // namespace bvdeg::log
