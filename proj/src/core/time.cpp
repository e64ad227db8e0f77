#include "sharelm/time.hpp"

#include <charconv>
#include <cstdio>

namespace sharelm {

namespace {

using namespace std::chrono;

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > text.size()) {
        return false;
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        char c = text[i];
        if (c < '0' || c > '9') {
            return false;
        }
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

std::optional<sys_days> make_date(int y, int m, int d) {
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return sys_days{ymd};
}

bool valid_clock(int h, int mi, int s) {
    return h >= 0 && h < 24 && mi >= 0 && mi < 60 && s >= 0 && s < 60;
}

}  // namespace

std::string format_rfc3339(Timestamp ts) {
    auto day_point = floor<days>(ts);
    year_month_day ymd{day_point};
    hh_mm_ss<seconds> tod{ts - day_point};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    int y, mo, d, h, mi, s;
    if (!read_digits(text, 0, 4, y) || !read_digits(text, 5, 2, mo) || !read_digits(text, 8, 2, d) ||
        !read_digits(text, 11, 2, h) || !read_digits(text, 14, 2, mi) || !read_digits(text, 17, 2, s)) {
        return std::nullopt;
    }
    auto date = make_date(y, mo, d);
    if (!date || !valid_clock(h, mi, s)) {
        return std::nullopt;
    }
    return Timestamp{*date} + hours{h} + minutes{mi} + seconds{s};
}

std::optional<Timestamp> normalize_timestamp(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }

    // Unix epoch seconds, possibly fractional.
    if (text.find('-', 1) == std::string_view::npos && text.find(':') == std::string_view::npos) {
        auto dot = text.find('.');
        std::string_view whole = text.substr(0, dot);
        long long secs = 0;
        auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), secs);
        if (ec != std::errc{} || ptr != whole.data() + whole.size()) {
            return std::nullopt;
        }
        if (dot != std::string_view::npos) {
            for (char c : text.substr(dot + 1)) {
                if (c < '0' || c > '9') {
                    return std::nullopt;
                }
            }
        }
        return from_unix_seconds(secs);
    }

    int y, mo, d;
    if (text.size() < 10 || text[4] != '-' || text[7] != '-' || !read_digits(text, 0, 4, y) ||
        !read_digits(text, 5, 2, mo) || !read_digits(text, 8, 2, d)) {
        return std::nullopt;
    }
    auto date = make_date(y, mo, d);
    if (!date) {
        return std::nullopt;
    }
    if (text.size() == 10) {
        return Timestamp{*date};
    }
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') {
        return std::nullopt;
    }
    int h, mi, s = 0;
    if (!read_digits(text, 11, 2, h) || text.size() < 16 || text[13] != ':' ||
        !read_digits(text, 14, 2, mi)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_digits(text, pos + 1, 2, s)) {
            return std::nullopt;
        }
        pos += 3;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::size_t start = pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                ++pos;
            }
            if (pos == start) {
                return std::nullopt;
            }
        }
    }
    if (!valid_clock(h, mi, s)) {
        return std::nullopt;
    }
    Timestamp local = Timestamp{*date} + hours{h} + minutes{mi} + seconds{s};
    std::string_view zone = text.substr(pos);
    if (zone.empty() || zone == "Z" || zone == "z") {
        return local;
    }
    int oh, om;
    if (zone.size() != 6 || (zone[0] != '+' && zone[0] != '-') || zone[3] != ':' ||
        !read_digits(zone, 1, 2, oh) || !read_digits(zone, 4, 2, om) || oh > 23 || om > 59) {
        return std::nullopt;
    }
    auto offset = hours{oh} + minutes{om};
    return zone[0] == '+' ? local - offset : local + offset;
}

Timestamp from_unix_seconds(long long seconds) {
    return Timestamp{std::chrono::seconds{seconds}};
}

bool is_rfc3339_representable(Timestamp ts) {
    year_month_day ymd{floor<days>(ts)};
    int y = static_cast<int>(ymd.year());
    return y >= 0 && y <= 9999;
}

}  // namespace sharelm
