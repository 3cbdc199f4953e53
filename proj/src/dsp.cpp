#include "moskit/dsp.hpp"

#include "moskit/errors.hpp"
#include "moskit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

namespace moskit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double peak(const std::vector<double>& samples) {
    double p = 0.0;
    for (double s : samples) p = std::max(p, std::abs(s));
    return p;
}

// Scale down to unit peak when the mix overshoots; returns the gain applied.
double normalize_if_needed(std::vector<double>& samples) {
    const double p = peak(samples);
    if (p <= 1.0) return 1.0;
    const double g = 1.0 / p;
    for (double& s : samples) s *= g;
    return g;
}

void append_provenance(Clip& clip, const std::string& note) {
    if (!clip.provenance.empty()) clip.provenance += "; ";
    clip.provenance += note;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Biquad {
    double b0, b1, b2, a1, a2; // a0 normalized to 1
    double z1 = 0.0, z2 = 0.0;

    double step(double x) {
        const double y = b0 * x + z1;
        z1 = b1 * x - a1 * y + z2;
        z2 = b2 * x - a2 * y;
        return y;
    }
};

Biquad make_biquad(FilterKind kind, double cutoff_hz, int sample_rate, double q) {
    const double w0 = 2.0 * kPi * cutoff_hz / sample_rate;
    const double cw = std::cos(w0);
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad bq{};
    if (kind == FilterKind::lowpass) {
        bq.b0 = (1.0 - cw) / 2.0 / a0;
        bq.b1 = (1.0 - cw) / a0;
        bq.b2 = bq.b0;
    } else {
        bq.b0 = (1.0 + cw) / 2.0 / a0;
        bq.b1 = -(1.0 + cw) / a0;
        bq.b2 = bq.b0;
    }
    bq.a1 = -2.0 * cw / a0;
    bq.a2 = (1.0 - alpha) / a0;
    return bq;
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

std::vector<double> convolve_full(const std::vector<double>& x, const std::vector<double>& h) {
    const std::size_t n = x.size(), m = h.size();
    const std::size_t out_len = n + m - 1;
    if (n == 0 || m == 0) return {};
    if (static_cast<unsigned long long>(n) * m <= (1ULL << 22)) {
        std::vector<double> out(out_len, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) out[i + j] += x[i] * h[j];
        return out;
    }
    std::size_t size = 1;
    while (size < out_len) size <<= 1;
    std::vector<std::complex<double>> fa(size), fb(size);
    for (std::size_t i = 0; i < n; ++i) fa[i] = x[i];
    for (std::size_t j = 0; j < m; ++j) fb[j] = h[j];
    fft(fa, false);
    fft(fb, false);
    for (std::size_t i = 0; i < size; ++i) fa[i] *= fb[i];
    fft(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
    return out;
}

} // namespace

double signal_power(const std::vector<double>& samples) {
    if (samples.empty()) return 0.0;
    double ss = 0.0;
    for (double s : samples) ss += s * s;
    return ss / static_cast<double>(samples.size());
}

Clip add_white_noise(const Clip& clip, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw ValidationError("add_white_noise: SNR must be finite");
    const double p_sig = signal_power(clip.samples);
    if (p_sig <= 0.0)
        throw ValidationError("add_white_noise: clip '" + clip.clip_id + "' has zero signal power");

    Prng rng(seed);
    std::vector<double> noise(clip.samples.size());
    for (double& v : noise) v = rng.gaussian();
    const double p_noise = signal_power(noise);
    const double gain = std::sqrt(p_sig / (p_noise * std::pow(10.0, snr_db / 10.0)));

    Clip out = clip;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += gain * noise[i];
    const double norm = normalize_if_needed(out.samples);
    std::string note = "white_noise(snr=" + fmt(snr_db) + ")";
    if (norm != 1.0) note += " peak_norm(" + fmt(norm) + ")";
    append_provenance(out, note);
    return out;
}

Clip mix_background_noise(const Clip& clip, const Clip& noise, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw ValidationError("mix_background_noise: SNR must be finite");
    if (clip.sample_rate != noise.sample_rate)
        throw ValidationError("mix_background_noise: sample rates differ (" +
                              std::to_string(clip.sample_rate) + " vs " +
                              std::to_string(noise.sample_rate) + ")");
    if (noise.samples.empty() || signal_power(noise.samples) <= 0.0)
        throw ValidationError("mix_background_noise: noise '" + noise.clip_id + "' has zero power");
    const double p_sig = signal_power(clip.samples);
    if (p_sig <= 0.0)
        throw ValidationError("mix_background_noise: clip '" + clip.clip_id +
                              "' has zero signal power");

    Prng rng(seed);
    const std::size_t offset = rng.uniform_index(noise.samples.size());
    std::vector<double> seg(clip.samples.size());
    for (std::size_t i = 0; i < seg.size(); ++i)
        seg[i] = noise.samples[(offset + i) % noise.samples.size()];
    const double p_seg = signal_power(seg);
    if (p_seg <= 0.0)
        throw ValidationError("mix_background_noise: selected segment of noise '" + noise.clip_id +
                              "' has zero power");
    const double gain = std::sqrt(p_sig / (p_seg * std::pow(10.0, snr_db / 10.0)));

    Clip out = clip;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += gain * seg[i];
    const double norm = normalize_if_needed(out.samples);
    std::string note = "background_noise(" + noise.clip_id + ",snr=" + fmt(snr_db) +
                       ",offset=" + std::to_string(offset) + ")";
    if (norm != 1.0) note += " peak_norm(" + fmt(norm) + ")";
    append_provenance(out, note);
    return out;
}

Clip apply_filter(const Clip& clip, FilterKind kind, double cutoff_hz) {
    if (clip.sample_rate <= 0) throw ValidationError("apply_filter: invalid sample rate");
    if (!(cutoff_hz > 0.0 && cutoff_hz < clip.sample_rate / 2.0))
        throw ValidationError("apply_filter: cutoff " + fmt(cutoff_hz) +
                              " Hz outside (0, " + fmt(clip.sample_rate / 2.0) + ")");

    // Butterworth pole Q values for a 6th-order cascade.
    static constexpr double kQ[3] = {0.5176380902050415, 0.7071067811865476,
                                     1.9318516525781366};
    Biquad sections[3];
    for (int i = 0; i < 3; ++i) sections[i] = make_biquad(kind, cutoff_hz, clip.sample_rate, kQ[i]);

    Clip out = clip;
    for (double& s : out.samples) {
        double v = s;
        for (auto& bq : sections) v = bq.step(v);
        s = v;
    }
    const double norm = normalize_if_needed(out.samples);
    std::string note = std::string(kind == FilterKind::lowpass ? "lowpass" : "highpass") + "(" +
                       fmt(cutoff_hz) + "Hz)";
    if (norm != 1.0) note += " peak_norm(" + fmt(norm) + ")";
    append_provenance(out, note);
    return out;
}

Clip clip_amplitude(const Clip& clip, double threshold_frac) {
    if (clip.samples.empty()) throw ValidationError("clip_amplitude: empty clip");
    if (!(threshold_frac > 0.0 && threshold_frac <= 1.0))
        throw ValidationError("clip_amplitude: threshold fraction " + fmt(threshold_frac) +
                              " outside (0, 1]");
    const double thr = threshold_frac * peak(clip.samples);
    Clip out = clip;
    for (double& s : out.samples) s = std::clamp(s, -thr, thr);
    append_provenance(out, "clipping(frac=" + fmt(threshold_frac) + ")");
    return out;
}

Clip convolve_rir(const Clip& clip, const Clip& rir) {
    if (rir.samples.empty()) throw ValidationError("convolve_rir: empty impulse response");
    if (clip.sample_rate != rir.sample_rate)
        throw ValidationError("convolve_rir: sample rates differ (" +
                              std::to_string(clip.sample_rate) + " vs " +
                              std::to_string(rir.sample_rate) + ")");

    Clip out = clip;
    if (!clip.samples.empty()) {
        std::vector<double> full = convolve_full(clip.samples, rir.samples);
        full.resize(clip.samples.size());
        const double in_peak = peak(clip.samples);
        const double out_peak = peak(full);
        if (out_peak > 0.0 && in_peak > 0.0) {
            const double g = in_peak / out_peak;
            for (double& s : full) s *= g;
        }
        out.samples = std::move(full);
    }
    append_provenance(out, "reverb(" + rir.clip_id + ")");
    return out;
}

std::vector<Clip> segment_speech(const Clip& audio, double segment_seconds, double min_activity) {
    if (audio.sample_rate <= 0) throw ValidationError("segment_speech: invalid sample rate");
    if (!(segment_seconds > 0.0))
        throw ValidationError("segment_speech: segment_seconds must be positive");
    if (!(min_activity >= 0.0 && min_activity <= 1.0))
        throw ValidationError("segment_speech: min_activity must be in [0, 1]");

    const auto seg_len = static_cast<std::size_t>(std::llround(segment_seconds * audio.sample_rate));
    if (seg_len == 0) throw ValidationError("segment_speech: segment shorter than one sample");
    const std::size_t frame = std::max(1, audio.sample_rate / 100);

    std::vector<Clip> kept;
    const std::size_t full_segments = audio.samples.size() / seg_len;
    for (std::size_t seg = 0; seg < full_segments; ++seg) {
        const double* base = audio.samples.data() + seg * seg_len;
        const std::size_t frames = seg_len / frame;
        if (frames == 0) continue;
        std::vector<double> rms(frames);
        for (std::size_t f = 0; f < frames; ++f) {
            double ss = 0.0;
            for (std::size_t i = 0; i < frame; ++i) {
                const double v = base[f * frame + i];
                ss += v * v;
            }
            rms[f] = std::sqrt(ss / static_cast<double>(frame));
        }
        std::vector<double> sorted = rms;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t rank =
            static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(frames)));
        const double p95 = sorted[std::min(frames, std::max<std::size_t>(rank, 1)) - 1];
        const double threshold = 0.05 * p95;
        std::size_t active = 0;
        for (double r : rms)
            if (r > threshold) ++active;
        const double activity = static_cast<double>(active) / static_cast<double>(frames);
        if (activity < min_activity) continue;

        Clip piece;
        piece.dataset = audio.dataset;
        piece.sample_rate = audio.sample_rate;
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_seg%03zu", seg);
        piece.clip_id = audio.clip_id + suffix;
        piece.samples.assign(base, base + seg_len);
        piece.provenance = audio.provenance;
        append_provenance(piece, "segment(" + std::to_string(seg) + ",activity=" + fmt(activity) + ")");
        kept.push_back(std::move(piece));
    }
    return kept;
}

Clip make_exponential_rir(int sample_rate, double rt60_seconds, double duration_seconds,
                          std::uint64_t seed) {
    if (sample_rate <= 0) throw ValidationError("make_exponential_rir: invalid sample rate");
    if (!(rt60_seconds > 0.0)) throw ValidationError("make_exponential_rir: rt60 must be positive");
    if (!(duration_seconds > 0.0))
        throw ValidationError("make_exponential_rir: duration must be positive");

    const auto len =
        static_cast<std::size_t>(std::max<long long>(1, std::llround(duration_seconds * sample_rate)));
    Prng rng(seed);
    Clip rir;
    rir.clip_id = "rir_rt60_" + fmt(rt60_seconds);
    rir.sample_rate = sample_rate;
    rir.samples.resize(len);
    // ln(1000) decay constant: -60 dB at rt60.
    const double k = 6.907755278982137 / (rt60_seconds * sample_rate);
    for (std::size_t n = 0; n < len; ++n)
        rir.samples[n] = rng.gaussian() * std::exp(-k * static_cast<double>(n));
    const double p = peak(rir.samples);
    if (p > 0.0)
        for (double& s : rir.samples) s /= p;
    rir.provenance = "synthetic_rir(rt60=" + fmt(rt60_seconds) + ")";
    return rir;
}

} // namespace moskit
