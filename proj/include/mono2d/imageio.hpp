// File formats: binary PGM (P5) images and the MONO2D raw feature container
// (8-line ASCII header + planar float64 little-endian data). All writes are
// whole-file atomic (temp file + rename).
#pragma once

#include <string>
#include <vector>

#include "mono2d/field.hpp"

namespace mono2d {

// Reads an 8- or 16-bit binary PGM; pixel values map to [0,1] as p/maxval.
RealField read_pgm(const std::string& path);

// Writes an 8-bit binary PGM; values are clamped to [0,1] and quantized.
void write_pgm(const std::string& path, const RealField& image01);

struct FeatureFile {
    int version = 1;
    int height = 0;
    int width = 0;
    std::vector<std::string> channel_names;
    std::vector<RealField> channels;
    int scales = 0;
    std::string flags; // free-form "key=value ..." tokens (mode, seed, ...)
};

void write_feature_file(const std::string& path, const FeatureFile& file);
FeatureFile read_feature_file(const std::string& path);

} // namespace mono2d
