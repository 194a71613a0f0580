// Copyright 2026 The quadvo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUADVO_TRAIN_CHECKPOINT_H_
#define QUADVO_TRAIN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "quadvo/model/network.h"
#include "quadvo/numcore/tensor.h"
#include "quadvo/train/adam.h"

namespace quadvo::train {

inline constexpr char kCheckpointMagic[8] = {'D', 'A', 'V', 'O', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers and values little-endian:
///   "DAVOCKPT"  u32 version  u64 entry_count
///   per entry: u32 name_len, name (UTF-8), u32 rank, rank x u64 dims,
///              prod(dims) x f64 values
struct CheckpointEntry {
  std::string name;
  Tensor value;

  friend bool operator==(const CheckpointEntry&, const CheckpointEntry&) = default;
};

struct Checkpoint {
  std::vector<CheckpointEntry> entries;

  /// nullptr when absent.
  const Tensor* find(const std::string& name) const;
  void add(std::string name, Tensor value);

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
/// Throws quadvo::FormatError for bad magic, unknown version, truncation,
/// zero dimensions or trailing bytes.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

/// Model configuration and parameters, plus optional optimizer state,
/// epoch counter and history.
///   config/*            model configuration values
///   param/<name>        parameter values
///   adam/step, adam/m/<name>, adam/v/<name>
///   train/epoch         scalar
///   train/history       E x 4 (epoch, train loss, val loss, lr)
Checkpoint make_checkpoint(model::Network& net, const AdamState* adam = nullptr,
                           int epoch = 0, std::span<const EpochRecord> history = {});

/// Rebuilds the network recorded in a checkpoint. Throws
/// std::invalid_argument naming any missing or mis-shaped entry.
model::Network restore_network(const Checkpoint& checkpoint);
/// Adam state for `net`'s parameters; fresh state if none is stored.
AdamState restore_adam(const Checkpoint& checkpoint, model::Network& net);
std::vector<EpochRecord> restore_history(const Checkpoint& checkpoint);

}  // namespace quadvo::train

#endif  // QUADVO_TRAIN_CHECKPOINT_H_
