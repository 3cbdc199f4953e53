#pragma once

#include "moskit/types.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace testutil {

inline moskit::Clip make_tone(const std::string& clip_id, int sample_rate, double seconds,
                              double freq_hz, double amplitude = 0.3) {
    moskit::Clip clip;
    clip.clip_id = clip_id;
    clip.sample_rate = sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        clip.samples[i] =
            amplitude * std::sin(2.0 * 3.14159265358979323846 * freq_hz *
                                 static_cast<double>(i) / sample_rate);
    return clip;
}

inline moskit::Clip make_silence(const std::string& clip_id, int sample_rate, double seconds) {
    moskit::Clip clip;
    clip.clip_id = clip_id;
    clip.sample_rate = sample_rate;
    clip.samples.assign(static_cast<std::size_t>(std::llround(seconds * sample_rate)), 0.0);
    return clip;
}

// Self-deleting scratch directory for a test case.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string templ =
            (std::filesystem::temp_directory_path() / "moskit-test-XXXXXX").string();
        if (!mkdtemp(templ.data())) std::abort();
        path = templ;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace testutil
