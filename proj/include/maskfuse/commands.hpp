// include/maskfuse/commands.hpp

// Copyright 2026 The maskfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MASKFUSE_COMMANDS_HPP_
#define MASKFUSE_COMMANDS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "maskfuse/config.hpp"
#include "maskfuse/dsp.hpp"

namespace maskfuse::app {

// Each command reads its settings from a merged Config, rejects unknown
// keys, validates every path, and only then starts work.

struct CommandSpec {
  std::string name;
  std::string description;
  std::set<std::string> keys;
  /// Keys that may also be given as positional arguments, in order.
  std::vector<std::string> positionals;
};

const std::vector<CommandSpec>& command_specs();
const CommandSpec& command_spec(const std::string& name);

/// Synthesizes the corpus into `out_dir`: WAV files per split plus
/// manifest.csv.
void cmd_synth(const Config& cfg, std::ostream& out);

/// Mixes clean and noise at `snr`, builds the oracle mask (irm, tbm or
/// fuse), enhances, and prints metrics before and after.
void cmd_oracle(const Config& cfg, std::ostream& out);

/// Trains the estimator on a synthesized corpus and writes a checkpoint and
/// a per-epoch log.
void cmd_train(const Config& cfg, std::ostream& out);

/// Estimates and fuses masks for one noisy file using a checkpoint.
void cmd_enhance(const Config& cfg, std::ostream& out);

/// Runs the delta/gamma sweep over a corpus split with estimated or oracle
/// masks and writes the table and CSV.
void cmd_sweep(const Config& cfg, std::ostream& out);

/// Prints SI-SDR, segmental SNR and LSD of `est` against `ref`.
void cmd_eval(const Config& cfg, std::ostream& out);

void run_command(const std::string& name, const Config& cfg, std::ostream& out);

// ---------------------------------------------------------------- corpus on disk

/// One manifest record: `id,kind,path,snr_db,seed`. `snr_db` is empty for
/// clean and noise rows; `path` is relative to the corpus directory.
struct ManifestEntry {
  std::string id;
  std::string kind;
  std::string path;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
};

inline constexpr const char* kManifestName = "manifest.csv";
inline constexpr const char* kManifestHeader = "id,kind,path,snr_db,seed";

std::vector<ManifestEntry> read_manifest(const std::string& corpus_dir);

struct DiskMixture {
  std::string id;
  std::string utterance;
  std::string split;
  double snr_db = 0.0;
  Waveform clean;
  Waveform noisy;
};

/// Every mixture of `split` with its clean reference, in manifest order.
std::vector<DiskMixture> load_split(const std::string& corpus_dir,
                                    const std::string& split);

}  // namespace maskfuse::app

#endif  // MASKFUSE_COMMANDS_HPP_
