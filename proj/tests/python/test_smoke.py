# Copyright 2026 The maskfuse Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest

import maskfuse


def test_constants():
    assert maskfuse.SAMPLE_RATE == 16000
    assert maskfuse.FRAME_LENGTH == 512
    assert maskfuse.FRAME_SHIFT == 256


def test_fft_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(512) + 1j * rng.standard_normal(512)
    np.testing.assert_allclose(maskfuse.fft(x), np.fft.fft(x), atol=1e-9)
    np.testing.assert_allclose(maskfuse.ifft(maskfuse.fft(x)), x, atol=1e-12)
    with pytest.raises(ValueError):
        maskfuse.fft(np.zeros(500, dtype=complex))


def test_hamming_window():
    w = np.asarray(maskfuse.hamming_window(512))
    k = np.arange(512)
    np.testing.assert_allclose(w, 0.54 - 0.46 * np.cos(2 * np.pi * k / 512), atol=1e-15)


def test_stft_round_trip():
    rng = np.random.default_rng(1)
    x = rng.uniform(-0.5, 0.5, 16000)
    spec = maskfuse.stft(x)
    assert spec.shape == (63, 257)
    y = maskfuse.istft(spec, len(x))
    assert y.shape == x.shape
    np.testing.assert_allclose(y, x, atol=1e-9)


def test_masks_and_fusion():
    rng = np.random.default_rng(2)
    clean = rng.uniform(0, 2, (10, 257))
    noise = rng.uniform(0, 2, (10, 257))
    irm = maskfuse.compute_irm(clean, noise)
    assert irm.shape == (10, 257)
    assert np.all((irm >= 0) & (irm <= 1))
    np.testing.assert_allclose(maskfuse.compute_irm(clean, clean), np.sqrt(0.5))

    tbm = maskfuse.compute_tbm(clean)
    assert set(np.unique(tbm)) <= {0.0, 1.0}
    np.testing.assert_array_equal(tbm, clean > clean.mean(axis=0))

    soft = rng.uniform(0.01, 0.99, (10, 257))
    np.testing.assert_array_equal(maskfuse.fuse_masks(irm, soft, 0.4, 1.0), irm)
    fused = maskfuse.fuse_masks(irm, soft, 0.4, 0.3)
    np.testing.assert_array_equal(fused, np.where(soft > 0.4, irm, 0.3 * irm))
    with pytest.raises(ValueError):
        maskfuse.fuse_masks(irm, soft, 0.0, 0.5)


def test_enhance_with_trivial_masks():
    rng = np.random.default_rng(3)
    noisy = rng.uniform(-0.3, 0.3, 4000)
    frames = maskfuse.stft(noisy).shape[0]
    np.testing.assert_allclose(maskfuse.enhance(noisy, np.ones((frames, 257))), noisy, atol=1e-9)
    np.testing.assert_array_equal(maskfuse.enhance(noisy, np.zeros((frames, 257))), 0.0)


def test_losses():
    r = maskfuse.combined_loss(
        np.array([[0.2, 0.9]]), np.array([[0.5, 1.0]]),
        np.array([[0.0, 1.0]]), np.array([[1.0, 1.0]]), alpha=0.1)
    assert r["irm_loss"] == pytest.approx(0.05)
    assert r["tbm_loss"] == pytest.approx(np.log(2), rel=1e-6)
    assert r["total"] == pytest.approx(0.05 + 0.1 * np.log(2), rel=1e-6)
    assert r["grad_irm"].shape == (1, 2)


def test_mixing_and_metrics():
    rng = np.random.default_rng(4)
    clean = rng.uniform(-0.5, 0.5, 8000)
    noise = rng.uniform(-0.5, 0.5, 8000)
    noisy, scaled = maskfuse.mix_at_snr(clean, noise, 5.0)
    np.testing.assert_allclose(noisy, clean + scaled)
    snr = 10 * np.log10(np.mean(clean ** 2) / np.mean(scaled ** 2))
    assert snr == pytest.approx(5.0, abs=1e-9)

    assert maskfuse.si_sdr(clean, clean) == 100.0
    assert maskfuse.si_sdr(3 * clean, clean) == 100.0
    assert maskfuse.segmental_snr(clean, clean) == 35.0
    assert maskfuse.log_spectral_distance(10 * clean, clean) == pytest.approx(20.0)
    with pytest.raises(ValueError):
        maskfuse.si_sdr(clean, np.zeros_like(clean))


def test_wav_round_trip(tmp_path):
    x = np.linspace(-0.9, 0.9, 1000)
    path = str(tmp_path / "x.wav")
    maskfuse.write_wav(path, x)
    y = maskfuse.read_wav(path)
    assert np.max(np.abs(y - x)) <= 1 / 32768
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFF\x00\x00")
    with pytest.raises(OSError, match="byte offset"):
        maskfuse.read_wav(str(bad))


def test_predict_masks_missing_checkpoint(tmp_path):
    with pytest.raises(OSError):
        maskfuse.predict_masks(str(tmp_path / "none.bin"), np.zeros(1000))
