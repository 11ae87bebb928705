#pragma once

#include <span>
#include <string>

#include "uol/trainer.hpp"

namespace uol {

inline constexpr int kCheckpointFormatVersion = 1;

// Versioned JSON container: config snapshot, layer shape manifest, and
// row-major decimal weight arrays. Round-trips every parameter exactly.
void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::string& path);

// Per-epoch loss trace as CSV: epoch, lr, ce, hinge, kl, total.
void save_loss_trace(const std::string& path, std::span<const EpochTrace> trace);

}  // namespace uol
