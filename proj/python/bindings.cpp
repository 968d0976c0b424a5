// python/bindings.cpp

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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "maskfuse/dsp.hpp"
#include "maskfuse/estimator.hpp"
#include "maskfuse/evalkit.hpp"
#include "maskfuse/masks.hpp"
#include "maskfuse/objectives.hpp"
#include "maskfuse/wav.hpp"

namespace py = pybind11;
using namespace maskfuse;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray =
    py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

Waveform to_waveform(const RealArray& a, int sample_rate) {
  if (a.ndim() != 1) throw InvalidArgument("expected a 1-D sample array");
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(a.data(), a.data() + a.size());
  return w;
}

RealArray from_waveform(const Waveform& w) {
  RealArray out(static_cast<py::ssize_t>(w.size()));
  std::copy(w.samples.begin(), w.samples.end(), out.mutable_data());
  return out;
}

Grid<double> to_grid(const RealArray& a) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-D (frames, bins) array");
  Grid<double> g(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), g.values().begin());
  return g;
}

template <typename T>
py::array_t<T> from_grid(const Grid<T>& g) {
  py::array_t<T> out({static_cast<py::ssize_t>(g.rows()), static_cast<py::ssize_t>(g.cols())});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

Mask to_mask(const RealArray& a, MaskKind kind) { return Mask{to_grid(a), kind}; }

ComplexSpectrogram to_spectrogram(const ComplexArray& a, std::size_t signal_length) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-D (frames, bins) array");
  ComplexSpectrogram s;
  s.bins = Grid<Complex>(static_cast<std::size_t>(a.shape(0)),
                         static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), s.bins.values().begin());
  s.frame_length = (s.num_bins() - 1) * 2;
  s.hop = s.frame_length / 2;
  s.signal_length = signal_length;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "T-F mask computation, fusion and evaluation";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);
  py::register_exception<UnsupportedFeature>(m, "UnsupportedFeature",
                                             PyExc_NotImplementedError);
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_ArithmeticError);

  m.attr("SAMPLE_RATE") = kSampleRate;
  m.attr("FRAME_LENGTH") = kFrameLength;
  m.attr("FRAME_SHIFT") = kFrameShift;

  m.def("hamming_window", &hamming_window, py::arg("n"));

  m.def(
      "fft",
      [](const ComplexArray& x) {
        std::vector<Complex> v(x.data(), x.data() + x.size());
        return fft(v);
      },
      py::arg("x"));
  m.def(
      "ifft",
      [](const ComplexArray& x) {
        std::vector<Complex> v(x.data(), x.data() + x.size());
        return ifft(v);
      },
      py::arg("x"));

  m.def(
      "stft",
      [](const RealArray& samples, int sample_rate) {
        return from_grid(stft(to_waveform(samples, sample_rate)).bins);
      },
      py::arg("samples"), py::arg("sample_rate") = kSampleRate,
      "One-sided STFT, shape (frames, 257).");
  m.def(
      "istft",
      [](const ComplexArray& spec, std::size_t length) {
        return from_waveform(istft(to_spectrogram(spec, length)));
      },
      py::arg("spec"), py::arg("length"),
      "Inverse STFT trimmed to `length` samples.");

  m.def(
      "compute_irm",
      [](const RealArray& clean_mag, const RealArray& noise_mag, double beta) {
        return from_grid(compute_irm(to_grid(clean_mag), to_grid(noise_mag), beta).values);
      },
      py::arg("clean_mag"), py::arg("noise_mag"), py::arg("beta") = 0.5);
  m.def(
      "compute_tbm",
      [](const RealArray& clean_mag) {
        return from_grid(compute_tbm(to_grid(clean_mag)).values);
      },
      py::arg("clean_mag"));
  m.def(
      "fuse_masks",
      [](const RealArray& irm, const RealArray& tbm, double delta, double gamma) {
        return from_grid(fuse_masks(to_mask(irm, MaskKind::kSoft),
                                    to_mask(tbm, MaskKind::kSoft),
                                    FusionParams::make(delta, gamma))
                             .values);
      },
      py::arg("irm"), py::arg("tbm"), py::arg("delta") = 0.5, py::arg("gamma") = 0.5);
  m.def(
      "enhance",
      [](const RealArray& noisy, const RealArray& mask) {
        return from_waveform(
            enhance(to_waveform(noisy, kSampleRate), to_mask(mask, MaskKind::kSoft)));
      },
      py::arg("noisy"), py::arg("mask"));

  m.def(
      "combined_loss",
      [](const RealArray& pred_irm, const RealArray& pred_tbm, const RealArray& target_irm,
         const RealArray& target_tbm, double alpha) {
        const auto r = combined_loss(to_grid(pred_irm), to_grid(pred_tbm),
                                     to_grid(target_irm), to_grid(target_tbm),
                                     {alpha, 0.0});
        py::dict d;
        d["irm_loss"] = r.irm_loss;
        d["tbm_loss"] = r.tbm_loss;
        d["total"] = r.total;
        d["grad_irm"] = from_grid(r.grad_irm);
        d["grad_tbm"] = from_grid(r.grad_tbm);
        return d;
      },
      py::arg("pred_irm"), py::arg("pred_tbm"), py::arg("target_irm"),
      py::arg("target_tbm"), py::arg("alpha") = 0.1);

  m.def(
      "mix_at_snr",
      [](const RealArray& clean, const RealArray& noise, double snr_db, std::uint64_t seed) {
        const auto r = mix_at_snr(to_waveform(clean, kSampleRate),
                                  to_waveform(noise, kSampleRate), snr_db, seed);
        return py::make_tuple(from_waveform(r.noisy), from_waveform(r.scaled_noise));
      },
      py::arg("clean"), py::arg("noise"), py::arg("snr_db"), py::arg("seed") = 0);

  m.def(
      "si_sdr",
      [](const RealArray& est, const RealArray& ref) {
        return si_sdr(to_waveform(est, kSampleRate), to_waveform(ref, kSampleRate));
      },
      py::arg("est"), py::arg("ref"));
  m.def(
      "segmental_snr",
      [](const RealArray& est, const RealArray& ref) {
        return segmental_snr(to_waveform(est, kSampleRate), to_waveform(ref, kSampleRate));
      },
      py::arg("est"), py::arg("ref"));
  m.def(
      "log_spectral_distance",
      [](const RealArray& est, const RealArray& ref) {
        return log_spectral_distance(to_waveform(est, kSampleRate),
                                     to_waveform(ref, kSampleRate));
      },
      py::arg("est"), py::arg("ref"));

  m.def(
      "read_wav",
      [](const std::string& path) { return from_waveform(read_wav_file(path)); },
      py::arg("path"));
  m.def(
      "write_wav",
      [](const std::string& path, const RealArray& samples) {
        write_wav_file(path, to_waveform(samples, kSampleRate));
      },
      py::arg("path"), py::arg("samples"));

  m.def(
      "predict_masks",
      [](const std::string& checkpoint, const RealArray& noisy) {
        const auto model = read_checkpoint_file(checkpoint);
        const auto est =
            predict_masks(model.params, to_waveform(noisy, kSampleRate), model.stats);
        return py::make_tuple(from_grid(est.irm.values), from_grid(est.tbm.values));
      },
      py::arg("checkpoint"), py::arg("noisy"),
      "Estimated (irm, tbm) masks from a checkpoint file.");
}
