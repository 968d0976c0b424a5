// src/evalkit.cpp

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

#include "maskfuse/evalkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "maskfuse/random.hpp"

namespace maskfuse {

namespace {

constexpr double kCorpusRms = 0.05;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 1));
}

void require_same_length(const Waveform& a, const Waveform& b, const char* what) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize_rms(std::vector<double>& x, double target) {
  const double p = signal_power(x);
  if (p <= 0.0) return;
  const double g = target / std::sqrt(p);
  for (auto& v : x) v *= g;
}

std::string format_fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string format_snr_label(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%gdB", snr);
  return buf;
}

std::size_t nearest_index(const std::vector<double>& values, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (std::abs(values[i] - target) < std::abs(values[best] - target)) best = i;
  }
  return best;
}

// Vowel-like formant centres (Hz).
constexpr std::array<std::array<double, 3>, 7> kVowels{{
    {730, 1090, 2440},
    {270, 2290, 3010},
    {300, 870, 2240},
    {530, 1840, 2480},
    {570, 840, 2410},
    {440, 1020, 2240},
    {660, 1720, 2410},
}};
constexpr std::array<double, 3> kFormantWidth{90, 110, 160};
constexpr std::array<double, 3> kFormantGain{1.0, 0.6, 0.3};

double formant_envelope(const std::array<double, 3>& formants, double freq) {
  double a = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double d = (freq - formants[k]) / kFormantWidth[k];
    a += kFormantGain[k] / (1.0 + d * d);
  }
  // Gentle high-frequency tilt.
  return a + 0.02 / (1.0 + freq / 1000.0);
}

// Raised-cosine attack and release of `ramp` samples.
double ramp_gain(std::size_t i, std::size_t length, std::size_t ramp) {
  const std::size_t edge = std::min(i, length - 1 - i);
  if (edge >= ramp) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(edge) /
                              static_cast<double>(ramp));
}

void add_voiced_segment(std::vector<double>& out, std::size_t start,
                        std::size_t length, double f0_start, double f0_end,
                        const std::array<double, 3>& formants, double gain,
                        Rng& rng) {
  const double fs = kSampleRate;
  const double max_freq = 5000.0;
  const auto harmonics =
      static_cast<std::size_t>(max_freq / std::min(f0_start, f0_end));
  std::vector<double> phase(harmonics);
  for (auto& p : phase) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> amp(harmonics, 0.0);
  const std::size_t ramp = static_cast<std::size_t>(0.02 * fs);
  for (std::size_t i = 0; i < length && start + i < out.size(); ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(length);
    const double f0 = f0_start + (f0_end - f0_start) * frac;
    if (i % 64 == 0) {
      for (std::size_t h = 0; h < harmonics; ++h) {
        const double f = f0 * static_cast<double>(h + 1);
        amp[h] = f < max_freq ? formant_envelope(formants, f) : 0.0;
      }
    }
    double s = 0.0;
    for (std::size_t h = 0; h < harmonics; ++h) {
      phase[h] += 2.0 * std::numbers::pi * f0 * static_cast<double>(h + 1) / fs;
      if (amp[h] != 0.0) s += amp[h] * std::sin(phase[h]);
    }
    // Slow syllabic amplitude modulation.
    const double am = 0.75 + 0.25 * std::sin(std::numbers::pi * frac);
    out[start + i] += gain * am * ramp_gain(i, length, ramp) * s;
  }
  for (auto& p : phase) p = std::fmod(p, 2.0 * std::numbers::pi);
}

void add_fricative_segment(std::vector<double>& out, std::size_t start,
                           std::size_t length, double gain, Rng& rng) {
  const std::size_t ramp = static_cast<std::size_t>(0.01 * kSampleRate);
  double prev = 0.0;
  for (std::size_t i = 0; i < length && start + i < out.size(); ++i) {
    const double x = rng.normal();
    out[start + i] += gain * ramp_gain(i, length, ramp) * (x - 0.9 * prev);
    prev = x;
  }
}

std::vector<double> pink_noise(Rng& rng, std::size_t samples) {
  std::size_t n = 1;
  while (n < samples) n <<= 1;
  std::vector<Complex> buf(n);
  for (auto& v : buf) v = Complex(rng.normal(), 0.0);
  const FftPlan& plan = fft_plan(n);
  plan.forward(buf);
  buf[0] = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double g = 1.0 / std::sqrt(static_cast<double>(k));
    buf[k] *= g;
    if (k != n / 2) buf[n - k] *= g;
  }
  plan.inverse(buf);
  std::vector<double> out(samples);
  for (std::size_t i = 0; i < samples; ++i) out[i] = buf[i].real();
  return out;
}

std::vector<double> babble_noise(Rng& rng, std::size_t samples) {
  const double fs = kSampleRate;
  std::vector<double> out(samples, 0.0);
  constexpr int kTalkers = 8;
  for (int talker = 0; talker < kTalkers; ++talker) {
    std::size_t cursor = static_cast<std::size_t>(rng.uniform(0.0, 0.2) * fs);
    while (cursor < samples) {
      const auto length = static_cast<std::size_t>(rng.uniform(0.05, 0.3) * fs);
      const double f = rng.uniform(150.0, 2500.0);
      const double glide = rng.uniform(0.85, 1.15);
      const double gain = rng.uniform(0.3, 1.0);
      double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < length && cursor + i < samples; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(length);
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * frac);
        phase += 2.0 * std::numbers::pi * f * (1.0 + (glide - 1.0) * frac) / fs;
        const double s = std::sin(phase) + 0.5 * std::sin(2.0 * phase) +
                         0.25 * std::sin(3.0 * phase);
        out[cursor + i] += gain * hann * s;
      }
      cursor += length + static_cast<std::size_t>(rng.uniform(0.0, 0.1) * fs);
    }
  }
  const double floor = std::sqrt(signal_power(out)) * 0.05;
  for (auto& v : out) v += floor * rng.normal();
  return out;
}

std::vector<Utterance> synth_split(const CorpusConfig& cfg, const std::string& split,
                                   std::size_t count, std::size_t first_index) {
  const auto samples =
      static_cast<std::size_t>(std::llround(cfg.duration_s * kSampleRate));
  std::vector<Utterance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t global = first_index + i;
    Utterance u;
    char id[64];
    std::snprintf(id, sizeof id, "%s_%03zu", split.c_str(), i);
    u.id = id;
    u.split = split;
    u.seed = derive_seed(cfg.seed, global);
    u.noise_kind = static_cast<NoiseKind>(global % 3);
    u.clean = synth_speech(derive_seed(u.seed, 1), samples);
    u.noise = synth_noise(u.noise_kind, derive_seed(u.seed, 2), samples);
    for (std::size_t s = 0; s < cfg.snrs_db.size(); ++s) {
      Mixture m;
      m.snr_db = cfg.snrs_db[s];
      m.seed = derive_seed(u.seed, 100 + s);
      char mid[96];
      std::snprintf(mid, sizeof mid, "%s_snr%g", u.id.c_str(), m.snr_db);
      m.id = mid;
      auto mix = mix_at_snr(u.clean, u.noise, m.snr_db, m.seed);
      m.noisy = std::move(mix.noisy);
      m.scaled_noise = std::move(mix.scaled_noise);
      u.mixtures.push_back(std::move(m));
    }
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

double signal_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return dot(x, x) / static_cast<double>(x.size());
}

MixResult mix_at_snr(const Waveform& clean, const Waveform& noise, double snr_db,
                     std::uint64_t seed) {
  validate_waveform(clean, "mix_at_snr clean");
  validate_waveform(noise, "mix_at_snr noise");
  if (!std::isfinite(snr_db)) throw InvalidArgument("mix_at_snr: SNR must be finite");

  Waveform fitted{std::vector<double>(clean.size()), noise.sample_rate};
  if (noise.size() == clean.size()) {
    fitted.samples = noise.samples;
  } else {
    Rng rng(seed);
    const std::size_t offset = rng.index(noise.size());
    for (std::size_t i = 0; i < clean.size(); ++i) {
      fitted.samples[i] = noise.samples[(offset + i) % noise.size()];
    }
  }
  const double p_clean = signal_power(clean.samples);
  const double p_noise = signal_power(fitted.samples);
  if (p_clean <= 0.0) throw InvalidArgument("mix_at_snr: clean signal is silent");
  if (p_noise <= 0.0) throw InvalidArgument("mix_at_snr: noise signal is silent");

  MixResult r;
  r.gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  r.scaled_noise = std::move(fitted);
  for (auto& v : r.scaled_noise.samples) v *= r.gain;
  r.noisy = clean;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    r.noisy.samples[i] += r.scaled_noise.samples[i];
  }
  return r;
}

double measured_snr_db(const Waveform& clean, const Waveform& noise) {
  require_same_length(clean, noise, "measured_snr_db");
  return 10.0 * std::log10(signal_power(clean.samples) / signal_power(noise.samples));
}

double si_sdr(const Waveform& est, const Waveform& ref) {
  require_same_length(est, ref, "si_sdr");
  const double ref_energy = dot(ref.samples, ref.samples);
  if (!(ref_energy > 0.0)) throw InvalidArgument("si_sdr: reference is silent");
  const double scale = dot(est.samples, ref.samples) / ref_energy;
  double target = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double t = scale * ref.samples[i];
    const double e = est.samples[i] - t;
    target += t * t;
    residual += e * e;
  }
  if (target <= 0.0) return -kSiSdrCap;
  if (residual <= 0.0) return kSiSdrCap;
  return std::clamp(10.0 * std::log10(target / residual), -kSiSdrCap, kSiSdrCap);
}

double segmental_snr(const Waveform& est, const Waveform& ref, std::size_t frame,
                     std::size_t hop) {
  require_same_length(est, ref, "segmental_snr");
  if (ref.empty()) throw InvalidArgument("segmental_snr: empty signals");
  if (frame == 0 || hop == 0) throw InvalidArgument("segmental_snr: bad framing");
  const std::size_t frames = ref.size() <= frame ? 1 : 1 + (ref.size() - frame) / hop;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t begin = t * hop;
    const std::size_t end = std::min(begin + frame, ref.size());
    double signal = 0.0;
    double error = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = ref.samples[i] - est.samples[i];
      signal += ref.samples[i] * ref.samples[i];
      error += d * d;
    }
    if (signal / static_cast<double>(end - begin) < kSegSnrSilence) continue;
    const double snr = error <= 0.0 ? kSegSnrMax : 10.0 * std::log10(signal / error);
    sum += std::clamp(snr, kSegSnrMin, kSegSnrMax);
    ++used;
  }
  if (used == 0) throw InvalidArgument("segmental_snr: every reference frame is silent");
  return sum / static_cast<double>(used);
}

double log_spectral_distance(const Waveform& est, const Waveform& ref) {
  require_same_length(est, ref, "log_spectral_distance");
  const auto se = magnitude(stft(est));
  const auto sr = magnitude(stft(ref));
  const auto& a = se.values();
  const auto& b = sr.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = 20.0 * (std::log10(std::max(a[i], kLsdFloor)) -
                             std::log10(std::max(b[i], kLsdFloor)));
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::kSiSdr: return "si_sdr";
    case Metric::kSegSnr: return "segsnr";
    case Metric::kLsd: return "lsd";
  }
  return "unknown";
}

Metric parse_metric(const std::string& name) {
  if (name == "si_sdr") return Metric::kSiSdr;
  if (name == "segsnr") return Metric::kSegSnr;
  if (name == "lsd") return Metric::kLsd;
  throw InvalidArgument("unknown metric '" + name + "' (si_sdr, segsnr, lsd)");
}

double evaluate_metric(Metric m, const Waveform& est, const Waveform& ref) {
  switch (m) {
    case Metric::kSiSdr: return si_sdr(est, ref);
    case Metric::kSegSnr: return segmental_snr(est, ref);
    case Metric::kLsd: return log_spectral_distance(est, ref);
  }
  throw InvalidArgument("evaluate_metric: unknown metric");
}

std::string noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kBabble: return "babble";
  }
  return "unknown";
}

void CorpusConfig::validate() const {
  if (!(duration_s > 0.05)) throw InvalidArgument("corpus: duration must exceed 0.05 s");
  if (train_count == 0 || dev_count == 0 || test_count == 0) {
    throw InvalidArgument("corpus: every split needs at least one utterance");
  }
  if (snrs_db.empty()) throw InvalidArgument("corpus: SNR list is empty");
  for (double s : snrs_db) {
    if (!std::isfinite(s)) throw InvalidArgument("corpus: non-finite SNR");
  }
}

Waveform synth_speech(std::uint64_t seed, std::size_t samples) {
  Rng rng(seed);
  const double fs = kSampleRate;
  std::vector<double> out(samples, 0.0);
  const double base_f0 = rng.uniform(90.0, 250.0);
  auto cursor = static_cast<std::size_t>(rng.uniform(0.05, 0.2) * fs);
  while (cursor < samples) {
    if (rng.uniform() < 0.8) {
      const auto length = static_cast<std::size_t>(rng.uniform(0.12, 0.35) * fs);
      const double f0_start = std::clamp(base_f0 * rng.uniform(0.8, 1.2), 80.0, 300.0);
      const double f0_end = std::clamp(f0_start * rng.uniform(0.8, 1.2), 80.0, 300.0);
      const auto& vowel = kVowels[rng.index(kVowels.size())];
      add_voiced_segment(out, cursor, length, f0_start, f0_end, vowel,
                         rng.uniform(0.5, 1.0), rng);
      cursor += length;
    } else {
      const auto length = static_cast<std::size_t>(rng.uniform(0.05, 0.15) * fs);
      add_fricative_segment(out, cursor, length, rng.uniform(0.05, 0.15), rng);
      cursor += length;
    }
    const double gap = rng.uniform() < 0.35 ? rng.uniform(0.15, 0.4) : rng.uniform(0.02, 0.08);
    cursor += static_cast<std::size_t>(gap * fs);
  }
  normalize_rms(out, kCorpusRms);
  return {std::move(out), kSampleRate};
}

Waveform synth_noise(NoiseKind kind, std::uint64_t seed, std::size_t samples) {
  Rng rng(seed);
  std::vector<double> out;
  switch (kind) {
    case NoiseKind::kWhite:
      out.resize(samples);
      for (auto& v : out) v = rng.normal();
      break;
    case NoiseKind::kPink:
      out = pink_noise(rng, samples);
      break;
    case NoiseKind::kBabble:
      out = babble_noise(rng, samples);
      break;
  }
  normalize_rms(out, kCorpusRms);
  return {std::move(out), kSampleRate};
}

Corpus synth_corpus(const CorpusConfig& cfg) {
  cfg.validate();
  Corpus c;
  c.config = cfg;
  c.train = synth_split(cfg, "train", cfg.train_count, 0);
  c.dev = synth_split(cfg, "dev", cfg.dev_count, cfg.train_count);
  c.test = synth_split(cfg, "test", cfg.test_count, cfg.train_count + cfg.dev_count);
  return c;
}

SweepGrid SweepGrid::standard(Metric metric) {
  SweepGrid g;
  for (int i = 0; i <= 10; ++i) {
    g.deltas.push_back(i / 10.0);
    g.gammas.push_back(i / 10.0);
  }
  g.metric = metric;
  return g;
}

void SweepGrid::validate() const {
  if (deltas.empty() || gammas.empty()) throw InvalidArgument("sweep: empty grid");
  auto check = [](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
        throw InvalidArgument(std::string("sweep: ") + name + " values must lie in [0, 1]");
      }
      if (i > 0 && !(v[i] > v[i - 1])) {
        throw InvalidArgument(std::string("sweep: ") + name + " must be strictly ascending");
      }
    }
  };
  check(deltas, "delta");
  check(gammas, "gamma");
}

SweepReport sweep_fusion(std::span<const SweepItem> items, const SweepGrid& grid) {
  grid.validate();
  if (items.empty()) throw InvalidArgument("sweep: no utterances");

  SweepReport r;
  r.metric = grid.metric;
  r.deltas = grid.deltas;
  r.gammas = grid.gammas;
  for (const auto& item : items) r.snrs.push_back(item.snr_db);
  std::sort(r.snrs.begin(), r.snrs.end());
  r.snrs.erase(std::unique(r.snrs.begin(), r.snrs.end()), r.snrs.end());

  const std::size_t ns = r.snrs.size();
  std::vector<std::size_t> snr_index(items.size());
  std::vector<double> counts(ns, 0.0);
  std::vector<ComplexSpectrogram> specs;
  specs.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    require_same_length(item.noisy, item.clean, "sweep");
    specs.push_back(stft(item.noisy));
    require_same_shape(item.irm_est.values, specs.back().bins, "sweep irm");
    require_same_shape(item.tbm_est.values, specs.back().bins, "sweep tbm");
    snr_index[i] = static_cast<std::size_t>(
        std::lower_bound(r.snrs.begin(), r.snrs.end(), item.snr_db) - r.snrs.begin());
    counts[snr_index[i]] += 1.0;
  }

  // Per-SNR means accumulated in item order.
  auto accumulate = [&](std::vector<double>& dst, std::size_t i, double v) {
    dst[snr_index[i]] += v;
  };
  auto finish = [&](std::span<double> dst) {
    for (std::size_t s = 0; s < ns; ++s) dst[s] /= counts[s];
  };

  r.noisy_baseline.assign(ns, 0.0);
  r.irm_baseline.assign(ns, 0.0);
  r.tbm_baseline.assign(ns, 0.0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    accumulate(r.noisy_baseline, i, evaluate_metric(grid.metric, item.noisy, item.clean));
    accumulate(r.irm_baseline, i,
               evaluate_metric(grid.metric, enhance(specs[i], item.irm_est), item.clean));
    accumulate(r.tbm_baseline, i,
               evaluate_metric(grid.metric, enhance(specs[i], binarize(item.tbm_est, 0.5)),
                               item.clean));
  }
  finish(r.noisy_baseline);
  finish(r.irm_baseline);
  finish(r.tbm_baseline);

  r.cells.assign(r.deltas.size() * r.gammas.size() * ns, 0.0);
  for (std::size_t d = 0; d < r.deltas.size(); ++d) {
    for (std::size_t g = 0; g < r.gammas.size(); ++g) {
      const auto params = FusionParams::sweep_point(r.deltas[d], r.gammas[g]);
      std::span<double> row(r.cells.data() + (d * r.gammas.size() + g) * ns, ns);
      for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        const auto fused = fuse_masks(item.irm_est, item.tbm_est, params);
        row[snr_index[i]] +=
            evaluate_metric(grid.metric, enhance(specs[i], fused), item.clean);
      }
      finish(row);
    }
  }
  return r;
}

std::string SweepReport::table(double fixed_delta, double fixed_gamma) const {
  const std::size_t ns = snrs.size();
  auto avg = [ns](auto get) {
    double s = 0.0;
    for (std::size_t i = 0; i < ns; ++i) s += get(i);
    return s / static_cast<double>(ns);
  };
  auto header = [&](std::ostringstream& os, const std::string& first) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-10s", first.c_str());
    os << buf;
    for (double s : snrs) {
      std::snprintf(buf, sizeof buf, "%10s", format_snr_label(s).c_str());
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%10s", "AVG");
    os << buf << '\n';
  };
  auto line = [&](std::ostringstream& os, const std::string& label, auto get) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-10s", label.c_str());
    os << buf;
    for (std::size_t i = 0; i < ns; ++i) {
      std::snprintf(buf, sizeof buf, "%10.3f", get(i));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%10.3f", avg(get));
    os << buf << '\n';
  };
  auto label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };

  const std::size_t d_fix = nearest_index(deltas, fixed_delta);
  const std::size_t g_fix = nearest_index(gammas, fixed_gamma);
  std::ostringstream os;
  os << "metric: " << metric_name(metric) << '\n' << '\n';
  os << "Baselines\n";
  header(os, "system");
  line(os, "Noisy", [&](std::size_t s) { return noisy_baseline[s]; });
  line(os, "IRM", [&](std::size_t s) { return irm_baseline[s]; });
  line(os, "TBM", [&](std::size_t s) { return tbm_baseline[s]; });
  os << '\n' << "Scale gamma at delta=" << label(deltas[d_fix]) << '\n';
  header(os, "gamma");
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    line(os, label(gammas[g]), [&](std::size_t s) { return cell(d_fix, g, s); });
  }
  os << '\n' << "Threshold delta at gamma=" << label(gammas[g_fix]) << '\n';
  header(os, "delta");
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    line(os, label(deltas[d]), [&](std::size_t s) { return cell(d, g_fix, s); });
  }
  return os.str();
}

std::string SweepReport::csv() const {
  std::ostringstream os;
  os << "delta,gamma,snr_db,metric,value\n";
  const std::string name = metric_name(metric);
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      for (std::size_t s = 0; s < snrs.size(); ++s) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", cell(d, g, s));
        os << format_fixed(deltas[d], 6) << ',' << format_fixed(gammas[g], 6) << ','
           << format_fixed(snrs[s], 6) << ',' << name << ',' << buf << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace maskfuse
