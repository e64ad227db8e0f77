#include "sharelm/anonymizer/anonymizer.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string_view>
#include <unordered_set>

namespace sharelm::anon {

// Generated at configure time from data/person_names.txt and data/ambiguous_names.txt.
extern const std::string_view kPersonNames[];
extern const std::size_t kPersonNameCount;
extern const std::string_view kAmbiguousNames[];
extern const std::size_t kAmbiguousNameCount;

namespace {

constexpr std::size_t npos = std::string_view::npos;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alpha(char c) { return is_upper(c) || is_lower(c); }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }
bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// Letters, digits, underscore and any non-ASCII byte: things a token may
/// not be glued to.
bool is_word_byte(char c) { return is_alnum(c) || c == '_' || is_high(c); }

bool word_before(std::string_view text, std::size_t pos) {
    return pos > 0 && is_word_byte(text[pos - 1]);
}

bool word_at(std::string_view text, std::size_t pos) {
    return pos < text.size() && is_word_byte(text[pos]);
}

const std::unordered_set<std::string_view>& name_set() {
    static const std::unordered_set<std::string_view> names(kPersonNames, kPersonNames + kPersonNameCount);
    return names;
}

const std::unordered_set<std::string_view>& ambiguous_set() {
    static const std::unordered_set<std::string_view> names(kAmbiguousNames, kAmbiguousNames + kAmbiguousNameCount);
    return names;
}

// --- url with userinfo --------------------------------------------------------

bool is_scheme_char(char c) { return is_alnum(c) || c == '+' || c == '.' || c == '-'; }
bool ends_url(char c) { return is_space(c) || c == '<' || c == '>' || c == '"'; }
bool is_trailing_punct(char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == ')' || c == ']' ||
           c == '}' || c == '\'' || c == '"';
}

void detect_userinfo_urls(std::string_view text, std::vector<Detection>& out) {
    for (std::size_t sep = text.find("://"); sep != npos; sep = text.find("://", sep + 3)) {
        std::size_t start = sep;
        while (start > 0 && is_scheme_char(text[start - 1])) {
            --start;
        }
        while (start < sep && !is_alpha(text[start])) {
            ++start;
        }
        if (start == sep || word_before(text, start)) {
            continue;
        }
        const std::size_t auth_start = sep + 3;
        std::size_t auth_end = auth_start;
        while (auth_end < text.size() && !ends_url(text[auth_end]) && text[auth_end] != '/' &&
               text[auth_end] != '?' && text[auth_end] != '#') {
            ++auth_end;
        }
        auto authority = text.substr(auth_start, auth_end - auth_start);
        auto at = authority.rfind('@');
        if (at == npos || at == 0 || at + 1 == authority.size()) {
            continue;
        }
        std::size_t end = auth_end;
        while (end < text.size() && !ends_url(text[end])) {
            ++end;
        }
        while (end > auth_start + at + 2 && is_trailing_punct(text[end - 1])) {
            --end;
        }
        out.push_back({EntityKind::url_with_userinfo, start, end});
    }
}

// --- email ------------------------------------------------------------------------

bool is_local_char(char c) {
    return is_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

void detect_emails(std::string_view text, std::vector<Detection>& out) {
    const std::size_t n = text.size();
    for (std::size_t at = text.find('@'); at != npos; at = text.find('@', at + 1)) {
        std::size_t start = at;
        while (start > 0 && is_local_char(text[start - 1])) {
            --start;
        }
        while (start < at && text[start] == '.') {
            ++start;
        }
        if (start == at || (start > 0 && is_high(text[start - 1]))) {
            continue;
        }

        // Longest run of dot-separated labels whose last label is an
        // alphabetic TLD of two or more letters.
        std::size_t pos = at + 1;
        std::size_t labels = 0;
        std::size_t best_end = npos;
        while (true) {
            const std::size_t label_start = pos;
            while (pos < n && (is_alnum(text[pos]) || text[pos] == '-')) {
                ++pos;
            }
            if (pos == label_start || text[label_start] == '-' || text[pos - 1] == '-') {
                break;
            }
            ++labels;
            auto label = text.substr(label_start, pos - label_start);
            bool alpha_tld = label.size() >= 2 && std::all_of(label.begin(), label.end(), is_alpha);
            if (labels >= 2 && alpha_tld && !word_at(text, pos) && (pos >= n || text[pos] != '@')) {
                best_end = pos;
            }
            if (pos + 1 < n && text[pos] == '.' && is_alnum(text[pos + 1])) {
                ++pos;
                continue;
            }
            break;
        }
        if (best_end != npos) {
            out.push_back({EntityKind::email, start, best_end});
        }
    }
}

// --- IPv4 ---------------------------------------------------------------------------

void detect_ipv4(std::string_view text, std::vector<Detection>& out) {
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_digit(text[i]) || word_before(text, i) || (i > 0 && text[i - 1] == '.')) {
            continue;
        }
        std::size_t pos = i;
        bool ok = true;
        for (int octet = 0; octet < 4 && ok; ++octet) {
            std::size_t start = pos;
            int value = 0;
            while (pos < n && is_digit(text[pos]) && pos - start < 3) {
                value = value * 10 + (text[pos] - '0');
                ++pos;
            }
            ok = pos > start && value <= 255;
            if (ok && octet < 3) {
                ok = pos < n && text[pos] == '.';
                ++pos;
            }
        }
        if (!ok || word_at(text, pos) || (pos + 1 < n && text[pos] == '.' && is_digit(text[pos + 1]))) {
            continue;
        }
        out.push_back({EntityKind::ip_address, i, pos});
        i = pos;
    }
}

// --- phone numbers ------------------------------------------------------------------

struct PhoneScan {
    std::size_t end = 0;
    std::size_t digits = 0;
    std::size_t max_group = 0;
    std::vector<std::size_t> groups;
    std::vector<char> separators;
    bool plus = false;
    bool parens = false;
    bool bare_spaces = false;
};

bool looks_like_date(const PhoneScan& scan) {
    if (scan.plus || scan.parens || scan.groups.size() != 3) {
        return false;
    }
    bool iso = scan.groups[0] == 4 && scan.groups[1] <= 2 && scan.groups[2] <= 2;
    bool dmy = scan.groups[0] <= 2 && scan.groups[1] <= 2 && scan.groups[2] == 4;
    return iso || dmy;
}

std::optional<PhoneScan> scan_phone(std::string_view text, std::size_t start) {
    const std::size_t n = text.size();
    PhoneScan scan;
    std::size_t pos = start;
    if (text[pos] == '+') {
        scan.plus = true;
        ++pos;
        if (pos >= n || !is_digit(text[pos])) {
            return std::nullopt;
        }
    }
    while (pos < n) {
        bool open = text[pos] == '(';
        if (open) {
            ++pos;
        }
        const std::size_t group_start = pos;
        while (pos < n && is_digit(text[pos])) {
            ++pos;
        }
        const std::size_t length = pos - group_start;
        if (length == 0 || length > 8) {
            break;
        }
        if (open) {
            if (pos >= n || text[pos] != ')') {
                break;
            }
            ++pos;
            scan.parens = true;
        }
        scan.groups.push_back(length);
        scan.digits += length;
        scan.max_group = std::max(scan.max_group, length);
        scan.end = pos;

        // "(555)123-4567": a closing paren may abut the next group.
        if (pos < n && (text[pos] == '(' || (open && is_digit(text[pos])))) {
            continue;
        }
        if (pos + 1 < n && (text[pos] == '-' || text[pos] == '.' || text[pos] == ' ') &&
            (is_digit(text[pos + 1]) || text[pos + 1] == '(')) {
            // Bare space-separated digits are only a phone number in the
            // NANP 3-3-4 shape; anything else is likely a list of numbers.
            if (text[pos] == ' ' && !scan.plus && !scan.parens) {
                bool nanp_so_far = (scan.groups.size() == 1 && scan.groups[0] == 3) ||
                                   (scan.groups.size() == 2 && scan.groups[0] == 3 && scan.groups[1] == 3);
                if (!nanp_so_far) {
                    break;
                }
                scan.bare_spaces = true;
            }
            scan.separators.push_back(text[pos]);
            ++pos;
            continue;
        }
        break;
    }
    if (scan.groups.empty()) {
        return std::nullopt;
    }
    return scan;
}

void detect_phones(std::string_view text, std::vector<Detection>& out) {
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        char c = text[i];
        if (!(c == '+' || c == '(' || is_digit(c))) {
            continue;
        }
        if (i > 0) {
            char prev = text[i - 1];
            if (is_word_byte(prev) || prev == '.' || prev == '-' || prev == '+' || prev == '/' || prev == '@') {
                continue;
            }
        }
        auto scan = scan_phone(text, i);
        if (!scan) {
            continue;
        }
        bool dotted = std::find(scan->separators.begin(), scan->separators.end(), '.') != scan->separators.end();
        bool shaped = scan->plus || (scan->groups.size() >= 2 && scan->max_group >= 3 &&
                                     (!dotted || scan->groups.size() >= 3));
        if (scan->bare_spaces && !scan->plus && !scan->parens) {
            shaped = scan->groups == std::vector<std::size_t>{3, 3, 4};
        }
        if (scan->digits < 7 || scan->digits > 15 || !shaped || looks_like_date(*scan) || word_at(text, scan->end)) {
            continue;
        }
        out.push_back({EntityKind::phone, i, scan->end});
        i = scan->end;
    }
}

// --- long digit runs ----------------------------------------------------------------

void detect_id_numbers(std::string_view text, std::vector<Detection>& out) {
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        if (!is_digit(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && is_digit(text[j])) {
            ++j;
        }
        bool fraction = i >= 2 && text[i - 1] == '.' && is_digit(text[i - 2]);
        bool has_fraction = j + 1 < n && text[j] == '.' && is_digit(text[j + 1]);
        if (j - i >= 9 && !word_before(text, i) && !word_at(text, j) && !fraction && !has_fraction) {
            out.push_back({EntityKind::id_number, i, j});
        }
        i = j;
    }
}

// --- street addresses ---------------------------------------------------------------

const std::unordered_set<std::string_view>& street_suffixes() {
    static const std::unordered_set<std::string_view> suffixes{
        "Street", "St",     "Avenue", "Ave",    "Road",   "Rd",    "Boulevard", "Blvd",   "Lane",
        "Ln",     "Drive",  "Dr",     "Court",  "Ct",     "Way",   "Place",     "Pl",     "Terrace",
        "Ter",    "Parkway", "Pkwy",  "Circle", "Cir",    "Highway", "Hwy",     "Square", "Sq",
        "Trail",  "Trl",    "Alley",  "Row",    "Crescent", "Close"};
    return suffixes;
}

void detect_street_addresses(std::string_view text, std::vector<Detection>& out) {
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        if (!is_digit(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && is_digit(text[j])) {
            ++j;
        }
        const bool clean_start = !word_before(text, i) && !(i > 0 && (text[i - 1] == '.' || text[i - 1] == '-'));
        if (!clean_start || j - i > 6 || j >= n || text[j] != ' ') {
            i = j;
            continue;
        }

        std::size_t pos = j;
        std::size_t words = 0;
        std::size_t end = npos;
        for (int k = 0; k < 6; ++k) {
            if (pos >= n || text[pos] != ' ') {
                break;
            }
            ++pos;
            const std::size_t word_start = pos;
            if (pos < n && is_upper(text[pos])) {
                while (pos < n && is_alpha(text[pos])) {
                    ++pos;
                }
            } else if (pos < n && is_digit(text[pos])) {
                // Ordinal street names: 5th, 21st, 42nd, 3rd.
                while (pos < n && is_digit(text[pos])) {
                    ++pos;
                }
                auto tail = text.substr(pos, 2);
                if (tail != "st" && tail != "nd" && tail != "rd" && tail != "th") {
                    break;
                }
                pos += 2;
            } else {
                break;
            }
            if (word_at(text, pos)) {
                break;
            }
            auto word = text.substr(word_start, pos - word_start);
            if (words >= 1 && street_suffixes().count(word) != 0) {
                end = pos;
                break;
            }
            ++words;
        }
        if (end != npos) {
            out.push_back({EntityKind::street_address, i, end});
            i = end;
        } else {
            i = j;
        }
    }
}

// --- overlap resolution -------------------------------------------------------------

class SpanSet {
public:
    bool overlaps(std::size_t start, std::size_t end) const {
        auto it = spans_.lower_bound(start);
        if (it != spans_.end() && it->first < end) {
            return true;
        }
        if (it != spans_.begin()) {
            --it;
            if (it->second.end > start) {
                return true;
            }
        }
        return false;
    }

    void add(const Detection& d) { spans_.emplace(d.start, d); }

    std::vector<Detection> sorted() const {
        std::vector<Detection> out;
        out.reserve(spans_.size());
        for (const auto& [start, d] : spans_) {
            out.push_back(d);
        }
        return out;
    }

private:
    std::map<std::size_t, Detection> spans_;
};

void claim(SpanSet& taken, std::vector<Detection> candidates) {
    std::stable_sort(candidates.begin(), candidates.end(), [](const Detection& a, const Detection& b) {
        if (a.start != b.start) {
            return a.start < b.start;
        }
        return (a.end - a.start) > (b.end - b.start);
    });
    for (const auto& d : candidates) {
        if (d.end > d.start && !taken.overlaps(d.start, d.end)) {
            taken.add(d);
        }
    }
}

struct NameToken {
    std::size_t start;
    std::size_t end;
    bool ambiguous;
};

void detect_person_names(std::string_view text, SpanSet& taken) {
    const std::size_t n = text.size();
    std::vector<NameToken> tokens;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_upper(text[i]) || word_before(text, i)) {
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && is_lower(text[j])) {
            ++j;
        }
        if (j - i >= 2 && !word_at(text, j)) {
            auto word = text.substr(i, j - i);
            if (name_set().count(word) != 0 && !taken.overlaps(i, j)) {
                tokens.push_back({i, j, ambiguous_set().count(word) != 0});
            }
        }
        i = j - 1;
    }

    std::size_t k = 0;
    while (k < tokens.size()) {
        std::size_t last = k;
        bool anchored = !tokens[k].ambiguous;
        while (last + 1 < tokens.size() && tokens[last + 1].start == tokens[last].end + 1 &&
               text[tokens[last].end] == ' ') {
            ++last;
            anchored = anchored || !tokens[last].ambiguous;
        }
        if (anchored) {
            taken.add({EntityKind::person_name, tokens[k].start, tokens[last].end});
        }
        k = last + 1;
    }
}

}  // namespace

std::vector<Detection> detect_entities(std::string_view text) {
    SpanSet taken;
    std::vector<Detection> found;

    detect_userinfo_urls(text, found);
    claim(taken, std::move(found));
    found.clear();
    detect_emails(text, found);
    claim(taken, std::move(found));
    found.clear();
    detect_ipv4(text, found);
    claim(taken, std::move(found));
    found.clear();
    detect_phones(text, found);
    claim(taken, std::move(found));
    found.clear();
    detect_id_numbers(text, found);
    claim(taken, std::move(found));
    found.clear();
    detect_street_addresses(text, found);
    claim(taken, std::move(found));
    detect_person_names(text, taken);
    return taken.sorted();
}

bool is_dictionary_name(std::string_view word) {
    return name_set().count(word) != 0;
}

bool is_ambiguous_name(std::string_view word) {
    return ambiguous_set().count(word) != 0;
}

std::size_t dictionary_size() {
    return kPersonNameCount;
}

}  // namespace sharelm::anon
