#include "mfeval/text.hpp"

#include <cstdint>

namespace mfeval::text {
namespace {

struct Decoded {
    char32_t cp;
    std::size_t len;
};

// Malformed sequences decode as one byte each so they are never lost.
Decoded decode(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    auto byte = [&](std::size_t k) { return static_cast<char32_t>(s[i + k] & 0x3F); };
    if (b0 < 0x80) return {b0, 1};
    if ((b0 & 0xE0) == 0xC0 && cont(1))
        return {(static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1), 2};
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
        return {(static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2), 3};
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
        return {(static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) | (byte(2) << 6) |
                    byte(3),
                4};
    return {0xFFFD, 1};
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punct(char32_t cp) {
    if (cp < 0x80)
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    switch (cp) {
        case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
            return true;
        default:
            break;
    }
    return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x2E00 && cp <= 0x2E4F);
}

char32_t lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    // Latin-1 uppercase block, minus the multiplication sign.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    // Latin Extended-A alternates upper/lower in pairs, except the
    // 0x138..0x148 and 0x179..0x17E runs which start on odd code points.
    if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177))
        return (cp % 2 == 0) ? cp + 1 : cp;
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
        return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    return cp;
}

}  // namespace

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = std::string_view::npos;
    std::size_t i = 0;
    while (i < s.size()) {
        const Decoded d = decode(s, i);
        if (is_space(d.cp)) {
            if (start != std::string_view::npos) {
                out.push_back(s.substr(start, i - start));
                start = std::string_view::npos;
            }
        } else if (start == std::string_view::npos) {
            start = i;
        }
        i += d.len;
    }
    if (start != std::string_view::npos) out.push_back(s.substr(start));
    return out;
}

bool is_punctuation_only(std::string_view token) {
    for (std::size_t i = 0; i < token.size();) {
        const Decoded d = decode(token, i);
        if (!is_punct(d.cp)) return false;
        i += d.len;
    }
    return true;
}

std::size_t count_words(std::string_view s) {
    std::size_t n = 0;
    for (auto tok : split_whitespace(s))
        if (!is_punctuation_only(tok)) ++n;
    return n;
}

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        const Decoded d = decode(s, i);
        if (d.cp == 0xFFFD && d.len == 1 && static_cast<unsigned char>(s[i]) >= 0x80)
            out.push_back(s[i]);
        else
            encode(lower(d.cp), out);
        i += d.len;
    }
    return out;
}

std::string strip_punctuation(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        const Decoded d = decode(s, i);
        if (!is_punct(d.cp)) out.append(s.substr(i, d.len));
        i += d.len;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    auto tokens = split_whitespace(s);
    if (tokens.empty()) return {};
    const char* b = tokens.front().data();
    const char* e = tokens.back().data() + tokens.back().size();
    return {b, static_cast<std::size_t>(e - b)};
}

}  // namespace mfeval::text
