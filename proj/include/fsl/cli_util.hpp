#pragma once

#include <map>
#include <string>
#include <vector>

#include "fsl/geometry.hpp"

namespace fsl {

// "1.0,0.5,0.25" -> {1.0, 0.5, 0.25}; a malformed entry names the token
std::vector<double> parse_double_list(const std::string& key, const std::string& text);

// Either "a0:a1:step" (inclusive arithmetic grid) or a comma list; every
// value must lie in the open interval (0,2).
std::vector<double> parse_alpha_list(const std::string& text);

// "x" or "x,y"; a single coordinate leaves y = 0
Point parse_point(const std::string& key, const std::string& text);

// key=value lines; blank lines and lines starting with '#' are skipped;
// duplicate keys and lines without '=' are errors naming the offender
std::map<std::string, std::string> parse_key_values(const std::string& text);

double parse_double_token(const std::string& key, const std::string& text);
long long parse_int_token(const std::string& key, const std::string& text);

}  // namespace fsl
