#include "mono2d/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "mono2d/kvtext.hpp"

namespace mono2d {

ChannelMode parse_channel_mode(const std::string& name) {
    if (name == "phase") return ChannelMode::Phase;
    if (name == "asym") return ChannelMode::Asym;
    if (name == "both") return ChannelMode::Both;
    throw ConfigError("mode must be one of phase|asym|both, got '" + name + "'");
}

std::string channel_mode_name(ChannelMode mode) {
    switch (mode) {
        case ChannelMode::Phase: return "phase";
        case ChannelMode::Asym: return "asym";
        default: return "both";
    }
}

ChannelMode RunConfig::channel_mode() const { return parse_channel_mode(mode); }

namespace {

std::map<std::string, std::string> parse_assignments(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " has no '='");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + " has an empty key or value");
        kv[key] = value;
    }
    return kv;
}

double to_double(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ConfigError("config key '" + key + "' is not a number");
    return v;
}

long to_long(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw ConfigError("config key '" + key + "' is not an integer");
    return v;
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("config key '" + key + "' must be true/false");
}

} // namespace

RunConfig RunConfig::parse(std::istream& in) {
    RunConfig cfg;
    for (const auto& [key, value] : parse_assignments(in)) {
        if (key == "n_scales") cfg.n_scales = static_cast<int>(to_long(key, value));
        else if (key == "lpf_cutoff") cfg.lpf_cutoff = to_double(key, value);
        else if (key == "lpf_order") cfg.lpf_order = static_cast<int>(to_long(key, value));
        else if (key == "mode") cfg.mode = value;
        else if (key == "epsilon") cfg.epsilon = to_double(key, value);
        else if (key == "rescale_per_image") cfg.rescale_per_image = to_bool(key, value);
        else if (key == "concat_input") cfg.concat_input = to_bool(key, value);
        else if (key == "height") cfg.height = static_cast<int>(to_long(key, value));
        else if (key == "width") cfg.width = static_cast<int>(to_long(key, value));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_long(key, value));
        else if (key == "dataset_count") cfg.dataset_count = static_cast<int>(to_long(key, value));
        else if (key == "val_fraction") cfg.val_fraction = to_double(key, value);
        else if (key == "use_mono2d") cfg.use_mono2d = to_bool(key, value);
        else if (key == "freeze_bank") cfg.freeze_bank = to_bool(key, value);
        else if (key == "learning_rate") cfg.learning_rate = to_double(key, value);
        else if (key == "min_lr") cfg.min_lr = to_double(key, value);
        else if (key == "beta1") cfg.beta1 = to_double(key, value);
        else if (key == "beta2") cfg.beta2 = to_double(key, value);
        else if (key == "epochs") cfg.epochs = static_cast<int>(to_long(key, value));
        else if (key == "batch_size") cfg.batch_size = static_cast<int>(to_long(key, value));
        else throw ConfigError("unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

void RunConfig::serialize(std::ostream& out) const {
    using kvtext::format_double;
    out << "n_scales = " << n_scales << "\n";
    out << "lpf_cutoff = " << format_double(lpf_cutoff) << "\n";
    out << "lpf_order = " << lpf_order << "\n";
    out << "mode = " << mode << "\n";
    out << "epsilon = " << format_double(epsilon) << "\n";
    out << "rescale_per_image = " << (rescale_per_image ? "true" : "false") << "\n";
    out << "concat_input = " << (concat_input ? "true" : "false") << "\n";
    out << "height = " << height << "\n";
    out << "width = " << width << "\n";
    out << "seed = " << seed << "\n";
    out << "dataset_count = " << dataset_count << "\n";
    out << "val_fraction = " << format_double(val_fraction) << "\n";
    out << "use_mono2d = " << (use_mono2d ? "true" : "false") << "\n";
    out << "freeze_bank = " << (freeze_bank ? "true" : "false") << "\n";
    out << "learning_rate = " << format_double(learning_rate) << "\n";
    out << "min_lr = " << format_double(min_lr) << "\n";
    out << "beta1 = " << format_double(beta1) << "\n";
    out << "beta2 = " << format_double(beta2) << "\n";
    out << "epochs = " << epochs << "\n";
    out << "batch_size = " << batch_size << "\n";
}

void RunConfig::validate() const {
    if (n_scales < 1) throw ConfigError("n_scales must be >= 1");
    lpf().validate();
    parse_channel_mode(mode);
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (height < 2 || width < 2) throw ConfigError("height and width must be >= 2");
    if (dataset_count < 2) throw ConfigError("dataset_count must be >= 2");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must be in (0,1)");
    if (!(learning_rate > min_lr && min_lr > 0.0))
        throw ConfigError("need learning_rate > min_lr > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("Adam betas must be in [0,1)");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

} // namespace mono2d
