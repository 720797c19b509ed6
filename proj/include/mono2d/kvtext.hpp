// Line-oriented "key value" text used by checkpoint files. Doubles are
// written with 17 significant digits so reload is bit-faithful.
#pragma once

#include <cstdio>
#include <map>
#include <string>

#include "mono2d/errors.hpp"

namespace mono2d::kvtext {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using Map = std::map<std::string, std::string>;

// Parses "key value" lines; '#' starts a comment, blank lines are skipped.
Map parse(std::istream& in);

const std::string& require(const Map& kv, const std::string& key);
double require_double(const Map& kv, const std::string& key);
long require_long(const Map& kv, const std::string& key);

} // namespace mono2d::kvtext
