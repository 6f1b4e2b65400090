#ifndef DINCL_TESTS_BATTERY_HPP
#define DINCL_TESTS_BATTERY_HPP

#include <array>
#include <string>

#include "dincl/io/config.hpp"

namespace battery {

inline constexpr std::array<const char*, 6> kNames{"constant", "decay", "relay", "bangbang", "sliding2d", "crossed"};

inline std::string path(const std::string& name) { return std::string(DINCL_CONFIG_DIR) + "/" + name + ".json"; }

inline dincl::io::SystemConfig load(const std::string& name) { return dincl::io::load_config(path(name)); }

} // namespace battery

#endif // DINCL_TESTS_BATTERY_HPP
