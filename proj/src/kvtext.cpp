#include "mono2d/kvtext.hpp"

#include <cstdlib>
#include <istream>
#include <sstream>

namespace mono2d::kvtext {

Map parse(std::istream& in) {
    Map out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::string value;
        std::getline(ls, value);
        const auto start = value.find_first_not_of(" \t\r");
        value = (start == std::string::npos) ? std::string{} : value.substr(start);
        const auto end = value.find_last_not_of(" \t\r");
        if (end != std::string::npos) value.erase(end + 1);
        out[key] = value;
    }
    return out;
}

const std::string& require(const Map& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw CheckpointError("missing key '" + key + "'");
    return it->second;
}

double require_double(const Map& kv, const std::string& key) {
    const std::string& s = require(kv, key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw CheckpointError("key '" + key + "' has non-numeric value '" + s + "'");
    return v;
}

long require_long(const Map& kv, const std::string& key) {
    const std::string& s = require(kv, key);
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw CheckpointError("key '" + key + "' has non-integer value '" + s + "'");
    return v;
}

} // namespace mono2d::kvtext
