#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/annotation.hpp"
#include "crisisgt/error.hpp"

namespace crisisgt {

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        throw Error(ErrorCode::Io, fmt::format("cannot open event log {}: {}", path_.string(), std::strerror(errno)));
    }
}

EventLog::~EventLog() {
    if (fd_ >= 0) ::close(fd_);
}

void EventLog::append(const Event& event) {
    const std::string line = event_to_line(event) + '\n';
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::Io, fmt::format("event log write failed: {}", std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        throw Error(ErrorCode::Io, fmt::format("event log sync failed: {}", std::strerror(errno)));
    }
}

LogLoad EventLog::load(const std::filesystem::path& path, bool repair) {
    LogLoad result;
    if (!std::filesystem::exists(path)) return result;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read event log {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < content.size()) {
        ++line_no;
        const std::size_t end = content.find('\n', start);
        const bool terminated = end != std::string::npos;
        const std::string_view line(content.data() + start, (terminated ? end : content.size()) - start);
        const std::size_t next = terminated ? end + 1 : content.size();
        const bool last = next >= content.size();

        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            start = next;
            continue;
        }
        std::optional<Event> event;
        if (terminated) {
            try {
                event = event_from_line(line);
            } catch (const Error&) {
            }
        }
        if (!event) {
            if (!last) {
                throw Error(ErrorCode::CorruptLog,
                            fmt::format("event log {} is corrupt at line {}", path.string(), line_no));
            }
            result.truncated_bytes = content.size() - start;
            spdlog::warn("event log {}: discarding {} bytes of an incomplete final record", path.string(),
                         result.truncated_bytes);
            if (repair) std::filesystem::resize_file(path, start);
            break;
        }
        result.events.push_back(std::move(*event));
        start = next;
    }
    return result;
}

}  // namespace crisisgt
