#pragma once

#include "moskit/types.hpp"

#include <string>

namespace moskit {

struct AdapterOptions {
    double timeout_seconds = 120.0;
    std::string bitrate; // substituted for {bitrate} in the template
};

// Round-trip a clip through an external tool. The clip is written as a
// 16-bit WAV into a private temporary directory, the command template is run
// through /bin/sh with {in}/{out} (and optionally {bitrate}) substituted,
// and the output WAV is read back. The returned clip keeps the input's id
// and dataset but reports whatever sample rate the tool produced; nothing is
// resampled. Nonzero exit, timeout, or unreadable output raise AdapterError
// with the captured stdout/stderr.
Clip run_external_adapter(const Clip& clip, const std::string& command_template,
                          const AdapterOptions& options = {});

} // namespace moskit
