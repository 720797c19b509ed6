#include "mono2d/checkpoint.hpp"

#include <filesystem>
#include <fstream>

namespace mono2d {

void save_checkpoint(const std::string& path, const FilterBank& bank, const HeadModel* head) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << "format mono2d_checkpoint\n";
        out << "version 1\n";
        bank.save(out);
        if (head) head->save(out);
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename to '" + path + "' failed: " + ec.message());
}

ModelCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    const auto kv = kvtext::parse(in);
    if (kvtext::require(kv, "format") != "mono2d_checkpoint")
        throw CheckpointError("'" + path + "' is not a mono2d checkpoint");
    if (kvtext::require_long(kv, "version") != 1)
        throw CheckpointError("unsupported checkpoint version in '" + path + "'");
    ModelCheckpoint ckpt;
    ckpt.bank = FilterBank::from_kv(kv);
    if (kv.count("head.channels")) ckpt.head = HeadModel::from_kv(kv);
    return ckpt;
}

} // namespace mono2d
