#include "mono2d/imageio.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace mono2d {

namespace {

// Raw feature data is defined as little-endian; writing it by memory image
// requires a little-endian host.
static_assert(std::endian::native == std::endian::little);

void atomic_write(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        writer(out);
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename to '" + path + "' failed: " + ec.message());
}

// Skips PGM whitespace and '#' comment lines, then reads one token.
std::string next_pgm_token(std::istream& in) {
    std::string tok;
    int ch = in.get();
    while (in) {
        if (ch == '#') {
            while (in && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    while (in && !std::isspace(ch)) {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    }
    return tok;
}

long parse_pgm_int(std::istream& in, const char* what) {
    const std::string tok = next_pgm_token(in);
    if (tok.empty()) throw FormatError(std::string("truncated PGM header while reading ") + what);
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw FormatError(std::string("bad PGM ") + what + " value '" + tok + "'");
    return v;
}

} // namespace

RealField read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image '" + path + "'");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw FormatError("'" + path + "' is not a binary (P5) PGM file");
    const long width = parse_pgm_int(in, "width");
    const long height = parse_pgm_int(in, "height");
    const long maxval = parse_pgm_int(in, "maxval");
    if (width < 2 || height < 2 || width > 1 << 15 || height > 1 << 15)
        throw FormatError("unsupported PGM dimensions in '" + path + "'");
    if (maxval < 1 || maxval > 65535) throw FormatError("unsupported PGM maxval in '" + path + "'");
    // Header ends with exactly one whitespace byte (already consumed by the
    // token reader). Raster follows.
    const bool wide = maxval > 255;
    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<unsigned char> raw(count * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw FormatError("truncated PGM raster in '" + path + "'");
    RealField img(static_cast<int>(height), static_cast<int>(width));
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned v = wide ? (static_cast<unsigned>(raw[2 * i]) << 8 | raw[2 * i + 1]) // big-endian
                                : raw[i];
        img[i] = v * scale;
    }
    return img;
}

void write_pgm(const std::string& path, const RealField& image01) {
    atomic_write(path, [&](std::ostream& out) {
        out << "P5\n" << image01.width() << " " << image01.height() << "\n255\n";
        std::vector<unsigned char> raw(image01.size());
        for (std::size_t i = 0; i < image01.size(); ++i) {
            const double v = std::min(std::max(image01[i], 0.0), 1.0);
            raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    });
}

namespace {

void put_f64le(std::ostream& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    out.write(reinterpret_cast<const char*>(&bits), 8);
}

double get_f64le(std::istream& in) {
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), 8);
    return std::bit_cast<double>(bits);
}

} // namespace

void write_feature_file(const std::string& path, const FeatureFile& file) {
    if (file.channels.size() != file.channel_names.size() || file.channels.empty())
        throw InvalidInputError("feature file needs matching channel names and data");
    for (const auto& ch : file.channels)
        if (!ch.same_shape(file.height, file.width))
            throw InvalidShapeError("feature channel shape mismatch");
    atomic_write(path, [&](std::ostream& out) {
        out << "MONO2D\n";
        out << "version " << file.version << "\n";
        out << "height " << file.height << "\n";
        out << "width " << file.width << "\n";
        out << "channels " << file.channels.size() << "\n";
        out << "names";
        for (const auto& n : file.channel_names) out << " " << n;
        out << "\n";
        out << "scales " << file.scales << "\n";
        out << "flags " << file.flags << "\n";
        for (const auto& ch : file.channels)
            for (double v : ch.values()) put_f64le(out, v);
    });
}

FeatureFile read_feature_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature file '" + path + "'");
    std::string line;
    auto read_line = [&](const char* what) {
        if (!std::getline(in, line)) throw FormatError(std::string("truncated feature header: ") + what);
        return line;
    };
    if (read_line("magic") != "MONO2D") throw FormatError("'" + path + "' is not a MONO2D feature file");
    FeatureFile f;
    auto parse_tail = [&](const std::string& ln, const std::string& key) {
        if (ln.rfind(key + " ", 0) != 0) throw FormatError("feature header missing '" + key + "'");
        return ln.substr(key.size() + 1);
    };
    f.version = std::stoi(parse_tail(read_line("version"), "version"));
    f.height = std::stoi(parse_tail(read_line("height"), "height"));
    f.width = std::stoi(parse_tail(read_line("width"), "width"));
    const int channels = std::stoi(parse_tail(read_line("channels"), "channels"));
    std::istringstream names(parse_tail(read_line("names"), "names"));
    for (std::string n; names >> n;) f.channel_names.push_back(n);
    f.scales = std::stoi(parse_tail(read_line("scales"), "scales"));
    f.flags = parse_tail(read_line("flags"), "flags");
    if (channels < 1 || static_cast<int>(f.channel_names.size()) != channels)
        throw FormatError("feature header channel count does not match names");
    if (f.height < 2 || f.width < 2) throw FormatError("feature header has invalid shape");
    f.channels.assign(channels, RealField(f.height, f.width));
    for (auto& ch : f.channels)
        for (auto& v : ch.values()) v = get_f64le(in);
    if (!in) throw FormatError("truncated feature data in '" + path + "'");
    return f;
}

} // namespace mono2d
