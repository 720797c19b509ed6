// Run configuration: plain "key = value" files with '#' comments. Every key
// has a CLI flag override; flags win.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mono2d/monogenic.hpp"

namespace mono2d {

struct RunConfig {
    // layer
    int n_scales = 8;
    double lpf_cutoff = 0.5;
    int lpf_order = 10;
    std::string mode = "both"; // phase | asym | both
    double epsilon = 1e-12;
    bool rescale_per_image = true;
    bool concat_input = false;
    // data
    int height = 64;
    int width = 64;
    std::uint64_t seed = 42;
    int dataset_count = 100;
    double val_fraction = 0.1;
    // trainer
    bool use_mono2d = true;
    bool freeze_bank = false;
    double learning_rate = 1e-3;
    double min_lr = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int epochs = 200;
    int batch_size = 8;

    static RunConfig from_file(const std::string& path);
    static RunConfig parse(std::istream& in);
    void serialize(std::ostream& out) const;
    void validate() const; // throws ConfigError

    ChannelMode channel_mode() const;
    LowPassSpec lpf() const { return LowPassSpec{lpf_cutoff, lpf_order}; }

    bool operator==(const RunConfig&) const = default;
};

ChannelMode parse_channel_mode(const std::string& name); // throws ConfigError
std::string channel_mode_name(ChannelMode mode);

} // namespace mono2d
