#pragma once

#include "moskit/types.hpp"

#include <string>

namespace moskit {

// Read a RIFF WAV, 16-bit integer PCM, mono or stereo. Samples are scaled
// to [-1, 1] by dividing by 32768; stereo is downmixed by channel average.
// Anything else (float WAV, 24-bit, compressed) is an unsupported-encoding
// error naming the encoding.
Clip load_audio(const std::string& path);

// Write 16-bit PCM WAV. Values are clamped to [-1, 1 - 2^-15] and quantized
// by rounding, so a load/save round trip moves each sample by at most one
// quantization step (1/32768).
void save_audio(const Clip& clip, const std::string& path);

} // namespace moskit
