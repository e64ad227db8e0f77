#include "generators.hpp"

#include "sharelm/time.hpp"

#include <gtest/gtest.h>

#include <cstdio>

using namespace sharelm;

namespace {

// Independent civil-calendar oracle: walks whole years and months instead of
// using a closed-form day count.
std::string civil_oracle(long long t) {
    long long days = t >= 0 ? t / 86400 : -((-t + 86399) / 86400);
    long long secs = t - days * 86400;
    auto leap = [](long long y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
    long long year = 1970;
    while (days < 0) {
        --year;
        days += leap(year) ? 366 : 365;
    }
    while (days >= (leap(year) ? 366 : 365)) {
        days -= leap(year) ? 366 : 365;
        ++year;
    }
    const int lengths[] = {31, leap(year) ? 29 : 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int month = 0;
    while (days >= lengths[month]) {
        days -= lengths[month];
        ++month;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04lld-%02d-%02lldT%02lld:%02lld:%02lldZ", year, month + 1, days + 1, secs / 3600,
                  secs / 60 % 60, secs % 60);
    return buf;
}

}  // namespace

TEST(Time, FormatsCanonicalForm) {
    EXPECT_EQ(format_rfc3339(from_unix_seconds(0)), "1970-01-01T00:00:00Z");
    EXPECT_EQ(format_rfc3339(from_unix_seconds(1704164645)), "2024-01-02T03:04:05Z");
}

TEST(Time, FormatAgreesWithCalendarWalk) {
    sharelm::testing::Rng rng(11);
    std::uniform_int_distribution<long long> span(-2208988800LL, 253402300799LL);
    for (int i = 0; i < 400; ++i) {
        long long t = span(rng);
        ASSERT_EQ(format_rfc3339(from_unix_seconds(t)), civil_oracle(t)) << t;
    }
    for (long long t : {951782400LL, 951868799LL, 4107542400LL, -2203891200LL, 253402300799LL}) {
        EXPECT_EQ(format_rfc3339(from_unix_seconds(t)), civil_oracle(t));
    }
}

TEST(Time, ParseInvertsFormat) {
    sharelm::testing::Rng rng(12);
    std::uniform_int_distribution<long long> span(-62167219200LL, 253402300799LL);
    for (int i = 0; i < 1000; ++i) {
        auto ts = from_unix_seconds(span(rng));
        auto text = format_rfc3339(ts);
        auto back = parse_rfc3339(text);
        ASSERT_TRUE(back) << text;
        ASSERT_EQ(*back, ts);
    }
}

TEST(Time, ParseIsStrict) {
    for (const char* bad : {"2024-01-02", "2024-01-02T03:04:05", "2024-01-02 03:04:05Z", "2024-13-01T00:00:00Z",
                            "2024-02-30T00:00:00Z", "2023-02-29T00:00:00Z", "2024-01-02T24:00:00Z",
                            "2024-01-02T03:04:05.5Z", "2024-01-02T03:04:05+00:00", "", "x"}) {
        EXPECT_FALSE(parse_rfc3339(bad)) << bad;
    }
    EXPECT_TRUE(parse_rfc3339("2024-02-29T23:59:59Z"));
}

TEST(Time, NormalizesLenientForms) {
    auto norm = [](const char* text) {
        auto ts = normalize_timestamp(text);
        return ts ? format_rfc3339(*ts) : std::string("none");
    };
    EXPECT_EQ(norm("2024-01-15"), "2024-01-15T00:00:00Z");
    EXPECT_EQ(norm("2023-11-02 14:03:09"), "2023-11-02T14:03:09Z");
    EXPECT_EQ(norm("2023-11-02T14:03"), "2023-11-02T14:03:00Z");
    EXPECT_EQ(norm("2023-11-02T14:03:09.987Z"), "2023-11-02T14:03:09Z");
    EXPECT_EQ(norm("2023-11-02T14:03:09+02:00"), "2023-11-02T12:03:09Z");
    EXPECT_EQ(norm("2023-11-02T00:30:00-01:00"), "2023-11-02T01:30:00Z");
    EXPECT_EQ(norm("1682000000"), "2023-04-20T14:13:20Z");
    EXPECT_EQ(norm("1682000000.75"), "2023-04-20T14:13:20Z");
    EXPECT_EQ(norm("yesterday"), "none");
    EXPECT_EQ(norm("2024-02-31"), "none");
    EXPECT_EQ(norm(""), "none");
}

TEST(Time, RepresentableRange) {
    EXPECT_TRUE(is_rfc3339_representable(from_unix_seconds(253402300799LL)));
    EXPECT_FALSE(is_rfc3339_representable(from_unix_seconds(253402300800LL)));
    EXPECT_TRUE(is_rfc3339_representable(from_unix_seconds(-62167219200LL)));
    EXPECT_FALSE(is_rfc3339_representable(from_unix_seconds(-62167219201LL)));
}
