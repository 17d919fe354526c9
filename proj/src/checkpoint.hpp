// Copyright 2026 The unisum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNISUM_CHECKPOINT_HPP_
#define UNISUM_CHECKPOINT_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "config.hpp"
#include "json.hpp"
#include "model.hpp"
#include "optimizer.hpp"

namespace unisum {

// Binary layout, all integers and doubles little-endian:
//   "USUM"  u32 format version
//   repeated sections: u32 name length, name bytes, u64 payload length, payload
// Sections, in order: meta (JSON text), vocab ("word\tcount" lines), rng
// (textual engine state), extractor, abstracter, optimizer. The last three
// are tensor lists:
//   u32 count, then per tensor: u32 name length, name, u32 rank,
//   rank x u64 dims, f64 values.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  TrainConfig config;
  AdagradState optimizer;
  std::int64_t iteration = 0;
  std::string rng_state;
  // Free-form run record: training history, phase flags.
  nlohmann::json info = nlohmann::json::object();

  Checkpoint(Model m, TrainConfig c);
};

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out);
std::string save_checkpoint(const Checkpoint& ckpt);
void save_checkpoint_file(const Checkpoint& ckpt, const std::string& path);

Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint_bytes(const std::string& bytes);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace unisum

#endif  // UNISUM_CHECKPOINT_HPP_
