// Model checkpoints: one plain-text key-value file holding the filter bank
// and, when present, the head weights.
#pragma once

#include <optional>
#include <string>

#include "mono2d/params.hpp"
#include "mono2d/trainer.hpp"

namespace mono2d {

struct ModelCheckpoint {
    FilterBank bank;
    std::optional<HeadModel> head;
};

void save_checkpoint(const std::string& path, const FilterBank& bank, const HeadModel* head = nullptr);
ModelCheckpoint load_checkpoint(const std::string& path);

} // namespace mono2d
