#pragma once

// key = value hyperparameter files. '#' starts a comment, [section] headers
// are ignored, values may be quoted.

#include <istream>
#include <string>

#include "rclass/types.hpp"

namespace rclass::harness {

// Applies one assignment to `params`. Throws ConfigError on an unknown key or
// an unparsable value.
void apply_setting(HyperParams& params, const std::string& key, const std::string& value);

HyperParams parse_config(std::istream& in, HyperParams base = {});
HyperParams load_config(const std::string& path, HyperParams base = {});

}  // namespace rclass::harness
