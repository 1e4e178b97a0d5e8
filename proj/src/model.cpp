#include "socketwatch/model.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace socketwatch {

namespace {

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

bool is_alnum(char c) noexcept {
    return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Reads exactly `width` digits starting at `pos`.
std::optional<int> read_fixed(std::string_view text, std::size_t pos, std::size_t width) {
    int value = 0;
    for (std::size_t i = 0; i < width; ++i) {
        const char c = text[pos + i];
        if (!is_digit(c)) return std::nullopt;
        value = value * 10 + (c - '0');
    }
    return value;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

SocketId::SocketId(std::string value) : value_(std::move(value)) {
    if (!is_valid(value_)) throw InvalidValue("invalid socket id '" + value_ + "'");
}

bool SocketId::is_valid(std::string_view value) noexcept {
    if (value.empty() || value.size() > kMaxLength) return false;
    return std::all_of(value.begin(), value.end(),
                       [](char c) { return is_alnum(c) || c == '-' || c == '_'; });
}

Address::Address(std::string value) : value_(std::move(value)) {
    if (!is_valid(value_)) throw InvalidValue("invalid address '" + value_ + "'");
}

bool Address::is_phone(std::string_view value) noexcept {
    if (value.size() < 8 || value.size() > 16 || value.front() != '+') return false;
    return std::all_of(value.begin() + 1, value.end(), is_digit);
}

bool Address::is_valid(std::string_view value) noexcept {
    if (is_phone(value)) return true;
    if (value.size() > kMaxLength) return false;
    const auto colon = value.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    // Scheme follows URI rules; the opaque part is any printable non-space run.
    const auto scheme = value.substr(0, colon);
    if (!((scheme.front() >= 'a' && scheme.front() <= 'z') ||
          (scheme.front() >= 'A' && scheme.front() <= 'Z')))
        return false;
    const bool scheme_ok = std::all_of(scheme.begin(), scheme.end(), [](char c) {
        return is_alnum(c) || c == '+' || c == '-' || c == '.';
    });
    const auto opaque = value.substr(colon + 1);
    const bool opaque_ok = !opaque.empty() && std::all_of(opaque.begin(), opaque.end(),
                                       [](char c) { return c > ' ' && c < 0x7f; });
    return scheme_ok && opaque_ok;
}

std::string_view Address::scheme() const noexcept {
    if (is_phone()) return {};
    return std::string_view(value_).substr(0, value_.find(':'));
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) throw InvalidValue("invalid calendar date");
    return Date{sys_days{ymd}.time_since_epoch().count()};
}

std::optional<Date> Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    const auto y = read_fixed(text, 0, 4);
    const auto m = read_fixed(text, 5, 2);
    const auto d = read_fixed(text, 8, 2);
    if (!y || !m || !d) return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                             std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{sys_days{ymd}.time_since_epoch().count()};
}

std::string Date::to_string() const {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Timestamp Timestamp::from_civil(Date date, int hour, int minute, int second) {
    if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 59)
        throw InvalidValue("invalid time of day");
    return Timestamp{date.days * kSecondsPerDay + hour * 3600 + minute * 60 + second};
}

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
    if (text.size() != 19 || text[10] != 'T' || text[13] != ':' || text[16] != ':')
        return std::nullopt;
    const auto date = Date::parse(text.substr(0, 10));
    const auto h = read_fixed(text, 11, 2);
    const auto m = read_fixed(text, 14, 2);
    const auto s = read_fixed(text, 17, 2);
    if (!date || !h || !m || !s || *h > 23 || *m > 59 || *s > 59) return std::nullopt;
    return Timestamp{date->days * kSecondsPerDay + *h * 3600 + *m * 60 + *s};
}

std::string Timestamp::to_string() const {
    const auto sod = seconds_since_midnight();
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", static_cast<int>(sod / 3600),
                  static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60));
    return date().to_string() + buf;
}

Date Timestamp::date() const noexcept { return Date{floor_div(seconds, kSecondsPerDay)}; }

std::int64_t Timestamp::seconds_since_midnight() const noexcept {
    return seconds - floor_div(seconds, kSecondsPerDay) * kSecondsPerDay;
}

BinSpec::BinSpec(int bin_size_minutes) : size_minutes_(bin_size_minutes) {
    if (bin_size_minutes <= 0 || kMinutesPerDay % bin_size_minutes != 0)
        throw ConfigError("bin_size_minutes must divide 1440, got " +
                          std::to_string(bin_size_minutes));
}

int BinSpec::bin_of(Timestamp at) const noexcept {
    return static_cast<int>(at.minutes_since_midnight() / size_minutes_);
}

Timestamp BinSpec::bin_start(Date date, int bin) const noexcept {
    return Timestamp{date.days * Timestamp::kSecondsPerDay +
                     static_cast<std::int64_t>(bin) * size_minutes_ * 60};
}

Timestamp BinSpec::bin_end(Date date, int bin) const noexcept {
    return bin_start(date, bin + 1);
}

std::string BinSpec::window(int bin) const {
    const int from = bin * size_minutes_;
    const int to = from + size_minutes_;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d:%02d-%02d:%02d", from / 60, from % 60, to / 60, to % 60);
    return buf;
}

DayBin bin_of(Timestamp at, int bin_size_minutes) {
    return DayBin{BinSpec(bin_size_minutes).bin_of(at)};
}

std::string_view to_string(EventSource source) noexcept {
    switch (source) {
        case EventSource::kDeviceReported: return "DEVICE_REPORTED";
        case EventSource::kReplayed: return "REPLAYED";
    }
    return "?";
}

std::optional<EventSource> parse_event_source(std::string_view text) noexcept {
    if (text == "DEVICE_REPORTED") return EventSource::kDeviceReported;
    if (text == "REPLAYED") return EventSource::kReplayed;
    return std::nullopt;
}

std::string_view to_string(DeliveryMode mode) noexcept {
    return mode == DeliveryMode::kDirect ? "DIRECT" : "MIDDLEWARE";
}

std::string alarm_dedupe_key(const SocketId& socket, Date date, DayBin bin) {
    return socket.str() + "/" + date.to_string() + "/" + std::to_string(bin.index);
}

std::string Alarm::dedupe_key() const { return alarm_dedupe_key(socket, date, bin); }

std::string Alarm::body() const {
    return "ALARM " + socket.str() + " " + date.to_string() + " bin=" + std::to_string(bin.index) +
           " no activity in usual time";
}

}  // namespace socketwatch
