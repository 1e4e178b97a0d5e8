#include "socketwatch/event_store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

namespace socketwatch::store {

namespace {

constexpr char kTab = '\t';

bool has_line_breaks_or_tabs(std::string_view s) {
    return s.find_first_of("\t\r\n") != std::string_view::npos;
}

std::string errno_message(const std::string& what) {
    return what + ": " + std::strerror(errno);
}

// Returns the value of `key=` among space-separated fields.
std::optional<std::string_view> field(std::string_view payload, std::string_view key) {
    std::size_t start = 0;
    while (start <= payload.size()) {
        auto end = payload.find(' ', start);
        if (end == std::string_view::npos) end = payload.size();
        const auto token = payload.substr(start, end - start);
        if (token.size() > key.size() && token.substr(0, key.size()) == key &&
            token[key.size()] == '=')
            return token.substr(key.size() + 1);
        start = end + 1;
    }
    return std::nullopt;
}

// Offset just past the last newline, or 0 if there is none.
off_t complete_prefix_length(int fd, off_t size) {
    constexpr off_t kChunk = 4096;
    char buf[kChunk];
    off_t end = size;
    while (end > 0) {
        const off_t begin = end > kChunk ? end - kChunk : 0;
        const auto len = static_cast<std::size_t>(end - begin);
        if (::pread(fd, buf, len, begin) != static_cast<ssize_t>(len))
            throw StoreError(errno_message("reading log tail"));
        for (std::size_t i = len; i-- > 0;)
            if (buf[i] == '\n') return begin + static_cast<off_t>(i) + 1;
        end = begin;
    }
    return 0;
}

// Reads the last complete line ending at `end` (exclusive of its newline).
std::string last_complete_line(int fd, off_t end) {
    std::string line;
    off_t pos = end - 1;  // the newline
    char c = 0;
    while (pos > 0) {
        if (::pread(fd, &c, 1, pos - 1) != 1) throw StoreError(errno_message("reading log tail"));
        if (c == '\n') break;
        line.insert(line.begin(), c);
        --pos;
    }
    return line;
}

}  // namespace

std::string_view to_string(LogKind kind) noexcept {
    switch (kind) {
        case LogKind::kEvent: return "EVENT";
        case LogKind::kConfig: return "CONFIG";
        case LogKind::kAlarm: return "ALARM";
    }
    return "?";
}

std::optional<LogKind> parse_log_kind(std::string_view text) noexcept {
    if (text == "EVENT") return LogKind::kEvent;
    if (text == "CONFIG") return LogKind::kConfig;
    if (text == "ALARM") return LogKind::kAlarm;
    return std::nullopt;
}

std::string LogRecord::to_line() const {
    std::string line = at.to_string();
    line += kTab;
    line += to_string(kind);
    line += kTab;
    line += socket.str();
    line += kTab;
    line += payload;
    return line;
}

LogRecord event_record(const SwitchOnEvent& event) {
    return {event.at, LogKind::kEvent, event.socket, std::string(to_string(event.source))};
}

LogRecord alarm_record(const Alarm& alarm, const BinSpec& bins) {
    return {bins.bin_end(alarm.date, alarm.bin.index), LogKind::kAlarm, alarm.socket,
            "date=" + alarm.date.to_string() + " bin=" + std::to_string(alarm.bin.index) +
                " raised_at=" + alarm.raised_at.to_string()};
}

SwitchOnEvent event_from_record(const LogRecord& record) {
    const auto source = parse_event_source(record.payload);
    if (record.kind != LogKind::kEvent || !source)
        throw Corrupt("not an EVENT record: " + record.to_line());
    return {record.socket, record.at, *source};
}

Alarm alarm_from_record(const LogRecord& record) {
    if (record.kind != LogKind::kAlarm) throw Corrupt("not an ALARM record: " + record.to_line());
    const auto date = field(record.payload, "date");
    const auto bin = field(record.payload, "bin");
    const auto raised = field(record.payload, "raised_at");
    std::optional<Date> d = date ? Date::parse(*date) : std::nullopt;
    std::optional<Timestamp> r = raised ? Timestamp::parse(*raised) : std::nullopt;
    int index = -1;
    if (bin && !bin->empty() && bin->size() <= 4 &&
        bin->find_first_not_of("0123456789") == std::string_view::npos)
        index = std::stoi(std::string(*bin));
    if (!d || !r || index < 0) throw Corrupt("malformed ALARM payload: " + record.payload);
    return Alarm{record.socket, DayBin{index}, *d, *r};
}

LogRecord parse_record(std::string_view line, std::size_t line_number) {
    auto corrupt = [&](const std::string& why) {
        return Corrupt("log line " + std::to_string(line_number) + ": " + why);
    };
    std::string_view fields[4];
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const auto tab = line.find(kTab, start);
        if (tab == std::string_view::npos) throw corrupt("expected 4 tab-separated fields");
        fields[i] = line.substr(start, tab - start);
        start = tab + 1;
    }
    fields[3] = line.substr(start);
    if (has_line_breaks_or_tabs(fields[3])) throw corrupt("stray tab in payload");

    const auto at = Timestamp::parse(fields[0]);
    if (!at) throw corrupt("bad timestamp '" + std::string(fields[0]) + "'");
    const auto kind = parse_log_kind(fields[1]);
    if (!kind) throw corrupt("bad kind '" + std::string(fields[1]) + "'");
    if (!SocketId::is_valid(fields[2])) throw corrupt("bad socket '" + std::string(fields[2]) + "'");

    LogRecord record{*at, *kind, SocketId(std::string(fields[2])), std::string(fields[3])};
    try {
        if (record.kind == LogKind::kEvent) (void)event_from_record(record);
        if (record.kind == LogKind::kAlarm) (void)alarm_from_record(record);
    } catch (const Corrupt& e) {
        throw corrupt(e.what());
    }
    return record;
}

EventLog::EventLog(std::filesystem::path path, Durability durability)
    : path_(std::move(path)), durability_(durability) {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StoreError(errno_message("opening log " + path_.string()));

    try {
        struct stat st {};
        if (::fstat(fd_, &st) != 0) throw StoreError(errno_message("stat " + path_.string()));
        const off_t keep = complete_prefix_length(fd_, st.st_size);
        if (keep != st.st_size) {
            if (::ftruncate(fd_, keep) != 0)
                throw StoreError(errno_message("truncating partial line in " + path_.string()));
            ::fsync(fd_);
            recovered_ = true;
        }
        if (keep > 0) {
            // The tail we will append after must itself be readable.
            std::string tail = last_complete_line(fd_, keep);
            (void)parse_record(tail, 0);
        }
    } catch (...) {
        ::close(fd_);
        throw;
    }
}

EventLog::~EventLog() {
    if (fd_ >= 0) ::close(fd_);
}

void EventLog::append(const LogRecord& record) {
    if (has_line_breaks_or_tabs(record.payload))
        throw InvalidValue("log payload may not contain tabs or line breaks");
    const std::string line = record.to_line() + '\n';
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == ENOSPC || errno == EDQUOT) throw StorageFull(errno_message("append"));
            throw StoreError(errno_message("append"));
        }
        written += static_cast<std::size_t>(n);
    }
    if (durability_ == Durability::kFsync && ::fdatasync(fd_) != 0) {
        if (errno == ENOSPC || errno == EDQUOT) throw StorageFull(errno_message("fsync"));
        throw StoreError(errno_message("fsync"));
    }
}

ReplayResult replay(const std::filesystem::path& path, const TimeRange& range,
                    const std::function<void(const LogRecord&)>& visit) {
    ReplayResult result;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) return result;
        throw StoreError("cannot read log " + path.string());
    }
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (in.eof()) {
            // No newline: a write that never completed.
            result.warnings.push_back("dropped partial trailing line " + std::to_string(n) +
                                      " in " + path.string());
            break;
        }
        const auto record = parse_record(line, n);
        ++result.records;
        if (range.contains(record.at)) visit(record);
    }
    return result;
}

std::vector<LogRecord> read_all(const std::filesystem::path& path) {
    std::vector<LogRecord> out;
    (void)replay(path, {}, [&](const LogRecord& r) { out.push_back(r); });
    return out;
}

}  // namespace socketwatch::store
