#pragma once

#include "moskit/types.hpp"

#include <cstdint>
#include <vector>

namespace moskit {

enum class FilterKind { highpass, lowpass };

// Mean-square power over the whole buffer.
double signal_power(const std::vector<double>& samples);

// Add seeded Gaussian noise scaled so 10*log10(P_signal/P_noise) == snr_db,
// powers taken as full-clip mean squares.
Clip add_white_noise(const Clip& clip, double snr_db, std::uint64_t seed);

// Mix a recorded noise file at the target full-clip SNR. The noise start
// offset is drawn from the seed and the noise is looped circularly when
// shorter than the clip. Output is peak-normalized when the mix exceeds 1.
Clip mix_background_noise(const Clip& clip, const Clip& noise, double snr_db, std::uint64_t seed);

// 6th-order Butterworth-characteristic filter as three cascaded biquads.
Clip apply_filter(const Clip& clip, FilterKind kind, double cutoff_hz);

// Hard clip at +/- threshold_frac * peak(|samples|).
Clip clip_amplitude(const Clip& clip, double threshold_frac);

// Full convolution truncated to the input length, then peak-normalized back
// to the input's peak. A unit-impulse response is the identity.
Clip convolve_rir(const Clip& clip, const Clip& rir);

// Cut into consecutive segments of exactly segment_seconds (remainder
// dropped) and keep those whose energy-VAD activity is >= min_activity.
// VAD: 10 ms frames, active when frame RMS > 0.05 * the segment's
// 95th-percentile frame RMS (nearest rank).
std::vector<Clip> segment_speech(const Clip& audio, double segment_seconds, double min_activity);

// Convenience impulse response: seeded Gaussian noise with an exponential
// envelope reaching -60 dB at rt60_seconds, peak-normalized.
Clip make_exponential_rir(int sample_rate, double rt60_seconds, double duration_seconds,
                          std::uint64_t seed);

} // namespace moskit
