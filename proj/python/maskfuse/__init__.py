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

"""T-F mask computation, fusion and evaluation (C++ core)."""

from ._core import (  # noqa: F401
    FRAME_LENGTH,
    FRAME_SHIFT,
    SAMPLE_RATE,
    FormatError,
    InvalidArgument,
    TrainingDiverged,
    UnsupportedFeature,
    combined_loss,
    compute_irm,
    compute_tbm,
    enhance,
    fft,
    fuse_masks,
    hamming_window,
    ifft,
    istft,
    log_spectral_distance,
    mix_at_snr,
    predict_masks,
    read_wav,
    segmental_snr,
    si_sdr,
    stft,
    write_wav,
)

__version__ = "0.1.0"
