#pragma once
#include <string>
#include <utility>
#include <vector>

#include "qw2d/config.hpp"

namespace qw {

// Named parameter sets for the standard experiments; throws on unknown
// names with the catalog in the message.
Config preset(const std::string& name);

std::vector<std::pair<std::string, std::string>> preset_catalog();

}  // namespace qw
