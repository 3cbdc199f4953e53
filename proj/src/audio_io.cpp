#include "moskit/audio_io.hpp"

#include "moskit/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <vector>

namespace moskit {

namespace {

uint32_t read_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::string format_name(uint16_t audio_format) {
    switch (audio_format) {
    case 1: return "integer PCM";
    case 3: return "IEEE float";
    case 6: return "A-law";
    case 7: return "mu-law";
    case 0xfffe: return "extensible";
    default: return "format code " + std::to_string(audio_format);
    }
}

} // namespace

Clip load_audio(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open audio file: " + path);
    std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>()};
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw ValidationError("not a RIFF WAV file: " + path);

    uint16_t audio_format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    uint32_t data_size = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        uint32_t chunk_size = read_u32(chunk + 4);
        size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) {
            if (std::memcmp(chunk, "data", 4) == 0)
                throw ValidationError("truncated WAV file: data chunk exceeds file size: " + path);
            throw ValidationError("truncated WAV file: " + path);
        }
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw ValidationError("malformed fmt chunk: " + path);
            audio_format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1); // chunks are word aligned
    }

    if (!have_fmt) throw ValidationError("WAV file has no fmt chunk: " + path);
    if (data == nullptr) throw ValidationError("WAV file has no data chunk: " + path);
    if (audio_format != 1)
        throw ValidationError("unsupported encoding: " + format_name(audio_format) +
                              " (only 16-bit integer PCM is supported): " + path);
    if (bits != 16)
        throw ValidationError("unsupported encoding: " + std::to_string(bits) +
                              "-bit PCM (only 16-bit is supported): " + path);
    if (channels != 1 && channels != 2)
        throw ValidationError("unsupported channel count " + std::to_string(channels) +
                              " (mono or stereo only): " + path);
    if (sample_rate == 0) throw ValidationError("WAV file reports zero sample rate: " + path);

    size_t frame_bytes = 2u * channels;
    size_t frames = data_size / frame_bytes;
    if (frames * frame_bytes != data_size)
        throw ValidationError("truncated WAV file: partial sample frame: " + path);

    Clip clip;
    clip.clip_id = std::filesystem::path(path).stem().string();
    clip.sample_rate = static_cast<int>(sample_rate);
    clip.samples.resize(frames);
    for (size_t i = 0; i < frames; ++i) {
        const unsigned char* f = data + i * frame_bytes;
        if (channels == 1) {
            int16_t s = static_cast<int16_t>(f[0] | (f[1] << 8));
            clip.samples[i] = s / 32768.0;
        } else {
            int16_t l = static_cast<int16_t>(f[0] | (f[1] << 8));
            int16_t r = static_cast<int16_t>(f[2] | (f[3] << 8));
            clip.samples[i] = (l / 32768.0 + r / 32768.0) / 2.0;
        }
    }
    return clip;
}

void save_audio(const Clip& clip, const std::string& path) {
    if (clip.samples.empty()) throw ValidationError("refusing to save empty clip: " + path);
    if (clip.sample_rate <= 0)
        throw ValidationError("clip has invalid sample rate " + std::to_string(clip.sample_rate));
    for (double v : clip.samples)
        if (!std::isfinite(v))
            throw ValidationError("clip has non-finite samples: " + clip.clip_id);

    const double hi = 1.0 - 1.0 / 32768.0;
    std::string pcm;
    pcm.reserve(clip.samples.size() * 2);
    for (double v : clip.samples) {
        double x = v < -1.0 ? -1.0 : (v > hi ? hi : v);
        long q = std::lround(x * 32768.0);
        if (q > 32767) q = 32767;
        if (q < -32768) q = -32768;
        put_u16(pcm, static_cast<uint16_t>(static_cast<int16_t>(q)));
    }

    std::string out;
    out.reserve(pcm.size() + 44);
    uint32_t data_size = static_cast<uint32_t>(pcm.size());
    out += "RIFF";
    put_u32(out, 36 + data_size);
    out += "WAVE";
    out += "fmt ";
    put_u32(out, 16);
    put_u16(out, 1); // integer PCM
    put_u16(out, 1); // mono
    put_u32(out, static_cast<uint32_t>(clip.sample_rate));
    put_u32(out, static_cast<uint32_t>(clip.sample_rate) * 2u);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_size);
    out += pcm;

    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write audio file: " + tmp.string());
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
    }
}

} // namespace moskit
