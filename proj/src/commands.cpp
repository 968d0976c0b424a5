// src/commands.cpp

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

#include "maskfuse/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "maskfuse/binary_io.hpp"
#include "maskfuse/estimator.hpp"
#include "maskfuse/evalkit.hpp"
#include "maskfuse/masks.hpp"
#include "maskfuse/wav.hpp"

namespace maskfuse::app {

namespace fs = std::filesystem;

namespace {

void require_input_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw UsageError(std::string(what) + ": no such file '" + path + "'");
  }
}

void require_input_dir(const std::string& path, const char* what) {
  if (!fs::is_directory(path)) {
    throw UsageError(std::string(what) + ": no such directory '" + path + "'");
  }
}

// Output files must land in an existing directory.
void require_output_file(const std::string& path, const char* what) {
  if (path.empty()) return;
  fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) parent = ".";
  if (!fs::is_directory(parent)) {
    throw UsageError(std::string(what) + ": directory '" + parent.string() +
                     "' does not exist");
  }
  if (fs::is_directory(path)) {
    throw UsageError(std::string(what) + ": '" + path + "' is a directory");
  }
}

std::string metrics_line(const Waveform& est, const Waveform& ref) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "si_sdr=%.3f segsnr=%.3f lsd=%.3f",
                si_sdr(est, ref), segmental_snr(est, ref),
                log_spectral_distance(est, ref));
  return buf;
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

FusionParams fusion_from(const Config& cfg) {
  try {
    return FusionParams::make(cfg.get_double("delta", 0.5), cfg.get_double("gamma", 0.5));
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  atomic_write_file(path, text);
}

std::string split_of(const std::string& id) { return id.substr(0, id.find('_')); }

std::string utterance_of(const std::string& mixture_id) {
  const auto pos = mixture_id.rfind("_snr");
  if (pos == std::string::npos) {
    throw FormatError("manifest: mixture id '" + mixture_id + "' lacks an _snr suffix");
  }
  return mixture_id.substr(0, pos);
}

TrainingCorpus load_training_corpus(const std::string& dir) {
  TrainingCorpus corpus;
  for (const auto& m : load_split(dir, "train")) {
    corpus.train.push_back(make_training_utterance(m.clean, m.noisy));
  }
  for (const auto& m : load_split(dir, "dev")) {
    corpus.dev.push_back(make_training_utterance(m.clean, m.noisy));
  }
  if (corpus.train.empty()) throw FormatError("corpus " + dir + " has no train mixtures");
  if (corpus.dev.empty()) throw FormatError("corpus " + dir + " has no dev mixtures");
  return corpus;
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs{
      {"synth",
       "Synthesize the speech/noise corpus",
       {"out_dir", "seed", "train_count", "dev_count", "test_count", "duration_s", "snrs"},
       {"out_dir"}},
      {"oracle",
       "Enhance a mixture with an oracle mask",
       {"clean", "noise", "snr", "mask", "delta", "gamma", "beta", "seed", "out",
        "noisy_out", "mask_out", "mask_csv"},
       {"clean", "noise"}},
      {"train",
       "Train the two-head mask estimator",
       {"corpus_dir", "checkpoint", "log", "epochs", "batch_frames", "learning_rate",
        "alpha", "context", "hidden1", "hidden2", "seed", "init_seed", "dev_selection"},
       {"corpus_dir"}},
      {"enhance",
       "Enhance a noisy file with a trained estimator and fused masks",
       {"input", "checkpoint", "out", "delta", "gamma", "irm_out", "tbm_out", "mask_out"},
       {"input"}},
      {"sweep",
       "Score the delta/gamma fusion grid on a corpus split",
       {"corpus_dir", "checkpoint", "oracle", "split", "deltas", "gammas", "metric",
        "fixed_delta", "fixed_gamma", "table_out", "csv_out"},
       {"corpus_dir"}},
      {"eval",
       "Objective metrics of an estimate against a reference",
       {"est", "ref"},
       {"est", "ref"}},
  };
  return specs;
}

const CommandSpec& command_spec(const std::string& name) {
  for (const auto& s : command_specs()) {
    if (s.name == name) return s;
  }
  throw UsageError("unknown command '" + name + "'");
}

void run_command(const std::string& name, const Config& cfg, std::ostream& out) {
  if (name == "synth") return cmd_synth(cfg, out);
  if (name == "oracle") return cmd_oracle(cfg, out);
  if (name == "train") return cmd_train(cfg, out);
  if (name == "enhance") return cmd_enhance(cfg, out);
  if (name == "sweep") return cmd_sweep(cfg, out);
  if (name == "eval") return cmd_eval(cfg, out);
  throw UsageError("unknown command '" + name + "'");
}

void cmd_synth(const Config& cfg, std::ostream& out) {
  cfg.require_known(command_spec("synth").keys);
  const std::string dir = cfg.require_string("out_dir");
  CorpusConfig cc;
  cc.seed = cfg.get_u64("seed", cc.seed);
  cc.train_count = static_cast<std::size_t>(cfg.get_int("train_count", 60));
  cc.dev_count = static_cast<std::size_t>(cfg.get_int("dev_count", 10));
  cc.test_count = static_cast<std::size_t>(cfg.get_int("test_count", 10));
  cc.duration_s = cfg.get_double("duration_s", cc.duration_s);
  cc.snrs_db = cfg.get_list("snrs", cc.snrs_db);
  try {
    cc.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (fs::exists(dir) && !fs::is_directory(dir)) {
    throw UsageError("out_dir '" + dir + "' is not a directory");
  }

  const Corpus corpus = synth_corpus(cc);
  std::ostringstream manifest;
  manifest << kManifestHeader << '\n';
  std::size_t files = 0;
  for (const auto* split : {&corpus.train, &corpus.dev, &corpus.test}) {
    for (const auto& u : *split) {
      fs::create_directories(fs::path(dir) / u.split);
      const std::string clean_rel = u.split + "/" + u.id + "_clean.wav";
      const std::string noise_rel = u.split + "/" + u.id + "_noise.wav";
      write_wav_file((fs::path(dir) / clean_rel).string(), u.clean);
      write_wav_file((fs::path(dir) / noise_rel).string(), u.noise);
      manifest << u.id << ",clean," << clean_rel << ",," << u.seed << '\n';
      manifest << u.id << ",noise," << noise_rel << ",," << u.seed << '\n';
      files += 2;
      for (const auto& m : u.mixtures) {
        const std::string rel = u.split + "/" + m.id + ".wav";
        write_wav_file((fs::path(dir) / rel).string(), m.noisy);
        manifest << m.id << ",noisy," << rel << ',' << format_g(m.snr_db) << ','
                 << m.seed << '\n';
        ++files;
      }
    }
  }
  write_text_file((fs::path(dir) / kManifestName).string(), manifest.str());
  out << "wrote " << (corpus.train.size() + corpus.dev.size() + corpus.test.size())
      << " utterances (" << files << " files) to " << dir << '\n';
}

void cmd_oracle(const Config& cfg, std::ostream& out) {
  cfg.require_known(command_spec("oracle").keys);
  const std::string clean_path = cfg.require_string("clean");
  const std::string noise_path = cfg.require_string("noise");
  const std::string out_path = cfg.get_string("out", "");
  const std::string noisy_out = cfg.get_string("noisy_out", "");
  const std::string mask_out = cfg.get_string("mask_out", "");
  const std::string mask_csv = cfg.get_string("mask_csv", "");
  const std::string kind = cfg.get_string("mask", "irm");
  const double snr = cfg.get_double("snr", 0.0);
  const double beta = cfg.get_double("beta", 0.5);
  if (kind != "irm" && kind != "tbm" && kind != "fuse") {
    throw UsageError("mask must be irm, tbm or fuse, got '" + kind + "'");
  }
  if (!(beta > 0.0)) throw UsageError("beta must be positive");
  const FusionParams fusion = fusion_from(cfg);
  require_input_file(clean_path, "clean");
  require_input_file(noise_path, "noise");
  require_output_file(out_path, "out");
  require_output_file(noisy_out, "noisy_out");
  require_output_file(mask_out, "mask_out");
  require_output_file(mask_csv, "mask_csv");

  const Waveform clean = read_wav_file(clean_path);
  const Waveform noise = read_wav_file(noise_path);
  const auto mix = mix_at_snr(clean, noise, snr, cfg.get_u64("seed", 0));

  const auto noisy_spec = stft(mix.noisy);
  const auto clean_mag = magnitude(stft(clean));
  const auto noise_mag = magnitude(stft(mix.scaled_noise));
  Mask mask;
  if (kind == "irm") {
    mask = compute_irm(clean_mag, noise_mag, beta);
  } else if (kind == "tbm") {
    mask = compute_tbm(clean_mag);
  } else {
    mask = fuse_masks(compute_irm(clean_mag, noise_mag, beta), compute_tbm(clean_mag),
                      fusion);
  }
  const Waveform enhanced = enhance(noisy_spec, mask);

  if (!out_path.empty()) write_wav_file(out_path, enhanced);
  if (!noisy_out.empty()) write_wav_file(noisy_out, mix.noisy);
  if (!mask_out.empty()) write_mask_file(mask_out, mask);
  if (!mask_csv.empty()) {
    std::ostringstream os;
    write_mask_csv(os, mask);
    write_text_file(mask_csv, os.str());
  }
  out << "mask=" << kind << " snr=" << format_g(snr) << " frames=" << mask.frames()
      << '\n';
  out << "before " << metrics_line(mix.noisy, clean) << '\n';
  out << "after  " << metrics_line(enhanced, clean) << '\n';
}

void cmd_train(const Config& cfg, std::ostream& out) {
  cfg.require_known(command_spec("train").keys);
  const std::string dir = cfg.require_string("corpus_dir");
  const std::string ckpt = cfg.require_string("checkpoint");
  const std::string log_path = cfg.get_string("log", ckpt + ".log");

  TrainConfig t;
  t.epochs = static_cast<int>(cfg.get_int("epochs", t.epochs));
  t.batch_frames = static_cast<std::size_t>(cfg.get_int("batch_frames", 256));
  t.learning_rate = cfg.get_double("learning_rate", t.learning_rate);
  t.alpha = cfg.get_double("alpha", t.alpha);
  t.seed = cfg.get_u64("seed", t.seed);
  t.dev_selection = cfg.get_bool("dev_selection", true);
  EstimatorConfig ec;
  ec.context = static_cast<std::size_t>(cfg.get_int("context", 5));
  ec.hidden1 = static_cast<std::size_t>(cfg.get_int("hidden1", 200));
  ec.hidden2 = static_cast<std::size_t>(cfg.get_int("hidden2", 300));
  ec.seed = cfg.get_u64("init_seed", t.seed);
  try {
    t.validate();
    ec.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  require_input_dir(dir, "corpus_dir");
  require_input_file((fs::path(dir) / kManifestName).string(), "manifest");
  require_output_file(ckpt, "checkpoint");
  require_output_file(log_path, "log");

  const TrainingCorpus corpus = load_training_corpus(dir);
  std::ostringstream log;
  char buf[160];
  const auto result = train(corpus, ec, t, [&](const EpochRecord& r) {
    std::snprintf(buf, sizeof buf, "epoch=%d train_loss=%.6f dev_loss=%.6f retained=%d",
                  r.epoch, r.train_loss, r.dev_loss, r.retained ? 1 : 0);
    log << buf << '\n';
    out << buf << '\n';
  });
  std::snprintf(buf, sizeof buf, "# initial train_loss=%.6f dev_loss=%.6f",
                result.log.initial_train_loss, result.log.initial_dev_loss);
  write_text_file(log_path, std::string(buf) + "\n" + log.str());
  write_checkpoint_file(ckpt, result.model);
  out << "best epoch " << result.log.best_epoch << " dev_loss="
      << result.log.best_dev_loss << "; checkpoint " << ckpt << '\n';
}

void cmd_enhance(const Config& cfg, std::ostream& out) {
  cfg.require_known(command_spec("enhance").keys);
  const std::string input = cfg.require_string("input");
  const std::string ckpt = cfg.require_string("checkpoint");
  const std::string out_path = cfg.require_string("out");
  const std::string irm_out = cfg.get_string("irm_out", "");
  const std::string tbm_out = cfg.get_string("tbm_out", "");
  const std::string mask_out = cfg.get_string("mask_out", "");
  const FusionParams fusion = fusion_from(cfg);
  require_input_file(input, "input");
  require_input_file(ckpt, "checkpoint");
  for (const auto* p : {&out_path, &irm_out, &tbm_out, &mask_out}) {
    require_output_file(*p, "output");
  }

  const TrainedModel model = read_checkpoint_file(ckpt);
  const Waveform noisy = read_wav_file(input);
  const auto spec = stft(noisy);
  const auto est = predict_masks(model.params, magnitude(spec), model.stats);
  const Mask fused = fuse_masks(est.irm, est.tbm, fusion);
  const Waveform enhanced = enhance(spec, fused);
  write_wav_file(out_path, enhanced);
  if (!irm_out.empty()) write_mask_file(irm_out, est.irm);
  if (!tbm_out.empty()) write_mask_file(tbm_out, est.tbm);
  if (!mask_out.empty()) write_mask_file(mask_out, fused);
  out << "enhanced " << input << " -> " << out_path << " (" << noisy.size()
      << " samples, delta=" << format_g(fusion.delta())
      << " gamma=" << format_g(fusion.gamma()) << ")\n";
}

void cmd_sweep(const Config& cfg, std::ostream& out) {
  cfg.require_known(command_spec("sweep").keys);
  const std::string dir = cfg.require_string("corpus_dir");
  const bool oracle = cfg.get_bool("oracle", false);
  const std::string ckpt = cfg.get_string("checkpoint", "");
  const std::string split = cfg.get_string("split", "test");
  const std::string table_out = cfg.get_string("table_out", "");
  const std::string csv_out = cfg.get_string("csv_out", "");
  SweepGrid grid = SweepGrid::standard();
  grid.deltas = cfg.get_list("deltas", grid.deltas);
  grid.gammas = cfg.get_list("gammas", grid.gammas);
  try {
    grid.metric = parse_metric(cfg.get_string("metric", "si_sdr"));
    grid.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (!oracle && ckpt.empty()) {
    throw UsageError("sweep needs a checkpoint unless oracle = true");
  }
  require_input_dir(dir, "corpus_dir");
  require_input_file((fs::path(dir) / kManifestName).string(), "manifest");
  if (!oracle) require_input_file(ckpt, "checkpoint");
  require_output_file(table_out, "table_out");
  require_output_file(csv_out, "csv_out");

  std::optional<TrainedModel> model;
  if (!oracle) model = read_checkpoint_file(ckpt);
  std::vector<SweepItem> items;
  for (auto& m : load_split(dir, split)) {
    SweepItem item;
    item.id = m.id;
    item.snr_db = m.snr_db;
    if (oracle) {
      Waveform noise = m.noisy;
      for (std::size_t i = 0; i < noise.size(); ++i) noise.samples[i] -= m.clean.samples[i];
      const auto clean_mag = magnitude(stft(m.clean));
      item.irm_est = compute_irm(clean_mag, magnitude(stft(noise)));
      item.tbm_est = compute_tbm(clean_mag);
    } else {
      auto est = predict_masks(model->params, m.noisy, model->stats);
      item.irm_est = std::move(est.irm);
      item.tbm_est = std::move(est.tbm);
    }
    item.noisy = std::move(m.noisy);
    item.clean = std::move(m.clean);
    items.push_back(std::move(item));
  }
  if (items.empty()) throw FormatError("split '" + split + "' has no mixtures");

  const auto report = sweep_fusion(items, grid);
  const std::string table =
      report.table(cfg.get_double("fixed_delta", 0.5), cfg.get_double("fixed_gamma", 0.5));
  if (!table_out.empty()) write_text_file(table_out, table);
  if (!csv_out.empty()) write_text_file(csv_out, report.csv());
  out << table;
}

void cmd_eval(const Config& cfg, std::ostream& out) {
  cfg.require_known(command_spec("eval").keys);
  const std::string est_path = cfg.require_string("est");
  const std::string ref_path = cfg.require_string("ref");
  require_input_file(est_path, "est");
  require_input_file(ref_path, "ref");
  const Waveform est = read_wav_file(est_path);
  const Waveform ref = read_wav_file(ref_path);
  out << metrics_line(est, ref) << '\n';
}

std::vector<ManifestEntry> read_manifest(const std::string& corpus_dir) {
  const std::string path = (fs::path(corpus_dir) / kManifestName).string();
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) {
    throw FormatError(path + ": missing header '" + std::string(kManifestHeader) + "'");
  }
  std::vector<ManifestEntry> entries;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 5) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected 5 fields");
    }
    ManifestEntry e;
    e.id = fields[0];
    e.kind = fields[1];
    e.path = fields[2];
    try {
      if (!fields[3].empty()) e.snr_db = std::stod(fields[3]);
      e.seed = std::stoull(fields[4]);
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad number");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<DiskMixture> load_split(const std::string& corpus_dir,
                                    const std::string& split) {
  const auto entries = read_manifest(corpus_dir);
  std::map<std::string, std::string> clean_paths;
  for (const auto& e : entries) {
    if (e.kind == "clean") clean_paths[e.id] = e.path;
  }
  std::map<std::string, Waveform> clean_cache;
  std::vector<DiskMixture> out;
  for (const auto& e : entries) {
    if (e.kind != "noisy" || split_of(e.id) != split) continue;
    if (!e.snr_db) throw FormatError("manifest: mixture '" + e.id + "' has no SNR");
    DiskMixture m;
    m.id = e.id;
    m.utterance = utterance_of(e.id);
    m.split = split;
    m.snr_db = *e.snr_db;
    const auto it = clean_paths.find(m.utterance);
    if (it == clean_paths.end()) {
      throw FormatError("manifest: no clean record for '" + m.utterance + "'");
    }
    auto cached = clean_cache.find(m.utterance);
    if (cached == clean_cache.end()) {
      cached = clean_cache
                   .emplace(m.utterance,
                            read_wav_file((fs::path(corpus_dir) / it->second).string()))
                   .first;
    }
    m.clean = cached->second;
    m.noisy = read_wav_file((fs::path(corpus_dir) / e.path).string());
    if (m.noisy.size() != m.clean.size()) {
      throw FormatError("corpus: '" + m.id + "' and its clean reference differ in length");
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace maskfuse::app
