#include "moskit/adapter.hpp"

#include "moskit/audio_io.hpp"
#include "moskit/errors.hpp"

#include <sys/types.h>
#include <sys/wait.h>

#include <csignal>
#include <cstdlib>
#include <ctime>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

namespace moskit {

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;

    TempDir() {
        std::string templ = (fs::temp_directory_path() / "moskit-XXXXXX").string();
        if (!mkdtemp(templ.data())) throw IoError("cannot create temporary directory");
        path = templ;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    for (std::size_t pos = 0; (pos = text.find(key, pos)) != std::string::npos;
         pos += value.size())
        text.replace(pos, key.size(), value);
    return text;
}

// Tail of the captured subprocess output, capped so error messages stay
// readable.
std::string read_diagnostics(const fs::path& log_path) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) return {};
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    constexpr std::size_t kMax = 4096;
    if (text.size() > kMax) text = "..." + text.substr(text.size() - kMax);
    return text;
}

struct RunResult {
    int exit_status = -1;
    bool timed_out = false;
};

RunResult run_with_timeout(const std::string& command, const fs::path& log_path,
                           double timeout_seconds) {
    const pid_t pid = fork();
    if (pid < 0) throw IoError("fork failed for adapter command");
    if (pid == 0) {
        setpgid(0, 0);
        const int fd = open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
        if (fd >= 0) {
            dup2(fd, STDOUT_FILENO);
            dup2(fd, STDERR_FILENO);
            close(fd);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    const double deadline =
        static_cast<double>(std::time(nullptr)) + timeout_seconds; // coarse fallback
    timespec start{};
    clock_gettime(CLOCK_MONOTONIC, &start);

    RunResult result;
    for (;;) {
        int status = 0;
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) {
            if (WIFEXITED(status)) result.exit_status = WEXITSTATUS(status);
            else if (WIFSIGNALED(status)) result.exit_status = 128 + WTERMSIG(status);
            return result;
        }
        if (done < 0) throw IoError("waitpid failed for adapter command");

        timespec now{};
        clock_gettime(CLOCK_MONOTONIC, &now);
        const double elapsed = static_cast<double>(now.tv_sec - start.tv_sec) +
                               static_cast<double>(now.tv_nsec - start.tv_nsec) * 1e-9;
        if (elapsed > timeout_seconds || static_cast<double>(std::time(nullptr)) > deadline + 60.0) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            result.timed_out = true;
            return result;
        }
        const timespec nap{0, 10 * 1000 * 1000};
        nanosleep(&nap, nullptr);
    }
}

} // namespace

Clip run_external_adapter(const Clip& clip, const std::string& command_template,
                          const AdapterOptions& options) {
    if (command_template.find("{in}") == std::string::npos ||
        command_template.find("{out}") == std::string::npos)
        throw ValidationError("adapter template must contain {in} and {out}: '" +
                              command_template + "'");
    if (!(options.timeout_seconds > 0.0))
        throw ValidationError("adapter timeout must be positive");

    TempDir tmp;
    const fs::path in_path = tmp.path / "in.wav";
    const fs::path out_path = tmp.path / "out.wav";
    const fs::path log_path = tmp.path / "adapter.log";
    save_audio(clip, in_path.string());

    std::string command = substitute(command_template, "{in}", in_path.string());
    command = substitute(command, "{out}", out_path.string());
    command = substitute(command, "{bitrate}", options.bitrate);

    const RunResult run = run_with_timeout(command, log_path, options.timeout_seconds);
    const std::string diagnostics = read_diagnostics(log_path);
    if (run.timed_out)
        throw AdapterError("adapter timed out after " + std::to_string(options.timeout_seconds) +
                               " s: " + command_template,
                           diagnostics);
    if (run.exit_status != 0)
        throw AdapterError("adapter exited with status " + std::to_string(run.exit_status) + ": " +
                               command_template,
                           diagnostics);

    Clip out;
    try {
        out = load_audio(out_path.string());
    } catch (const Error& e) {
        throw AdapterError("adapter produced no readable output (" + std::string(e.what()) +
                               "): " + command_template,
                           diagnostics);
    }
    out.clip_id = clip.clip_id;
    out.dataset = clip.dataset;
    out.provenance = clip.provenance;
    return out;
}

} // namespace moskit
