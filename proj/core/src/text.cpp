#include "akmine/text.hpp"

#include "akmine/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <string>

namespace akmine {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

// True when `html[pos..]` starts an opening tag for `name` ("<script" etc.)
// followed by a delimiter or end of tag.
bool starts_tag(std::string_view html, std::size_t pos, std::string_view name) {
    if (pos + 1 + name.size() > html.size()) return false;
    if (html[pos] != '<') return false;
    if (!iequals(html.substr(pos + 1, name.size()), name)) return false;
    std::size_t after = pos + 1 + name.size();
    if (after >= html.size()) return true;
    char c = html[after];
    return c == '>' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '/';
}

// Skips an element with raw text content (<script>...</script>); returns
// the index just past the closing tag, or end of input when unclosed.
std::size_t skip_raw_element(std::string_view html, std::size_t pos,
                             std::string_view name) {
    std::size_t i = html.find('>', pos);
    if (i == std::string_view::npos) return html.size();
    ++i;  // past the opening tag
    std::string close = "</";
    close.append(name);
    while (i < html.size()) {
        if (html[i] == '<' && starts_tag(html, i, close.substr(1))) {
            // treat "</name" as the closer
            if (i + 1 < html.size() && html[i + 1] == '/') {
                std::size_t end = html.find('>', i);
                return end == std::string_view::npos ? html.size() : end + 1;
            }
        }
        ++i;
    }
    return html.size();
}

void append_utf8(std::string& out, unsigned long cp) {
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

// Decodes the entity starting at html[pos] ('&'). Returns the index just
// past it and appends the decoded text; an unknown entity is kept verbatim.
std::size_t decode_entity(std::string_view html, std::size_t pos, std::string& out) {
    std::size_t semi = html.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 10) {
        out.push_back('&');
        return pos + 1;
    }
    std::string_view body = html.substr(pos + 1, semi - pos - 1);
    if (!body.empty() && body[0] == '#') {
        unsigned long cp = 0;
        bool ok = body.size() > 1;
        if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
            for (std::size_t i = 2; i < body.size(); ++i) {
                char c = body[i];
                if (!std::isxdigit(static_cast<unsigned char>(c))) { ok = false; break; }
                cp = cp * 16 + static_cast<unsigned long>(
                    std::isdigit(static_cast<unsigned char>(c))
                        ? c - '0'
                        : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
            }
        } else {
            for (std::size_t i = 1; i < body.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(body[i]))) { ok = false; break; }
                cp = cp * 10 + static_cast<unsigned long>(body[i] - '0');
            }
        }
        if (ok && cp > 0 && cp <= 0x10FFFF) {
            append_utf8(out, cp);
            return semi + 1;
        }
        out.push_back('&');
        return pos + 1;
    }
    struct Named { std::string_view name; std::string_view text; };
    static constexpr std::array<Named, 7> kNamed{{
        {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""},
        {"apos", "'"}, {"nbsp", " "}, {"mdash", "-"},
    }};
    for (const auto& e : kNamed) {
        if (body == e.name) {
            out.append(e.text);
            return semi + 1;
        }
    }
    out.push_back('&');
    return pos + 1;
}

bool is_ascii_alnum(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

std::string strip_html(std::string_view html) {
    std::string text;
    text.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c == '<') {
            if (starts_tag(html, i, "script")) {
                i = skip_raw_element(html, i, "script");
            } else if (starts_tag(html, i, "style")) {
                i = skip_raw_element(html, i, "style");
            } else if (html.compare(i, 4, "<!--") == 0) {
                std::size_t end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
            } else {
                std::size_t end = html.find('>', i);
                i = end == std::string_view::npos ? html.size() : end + 1;
            }
            text.push_back(' ');
        } else if (c == '&') {
            i = decode_entity(html, i, text);
        } else {
            text.push_back(c);
            ++i;
        }
    }
    // collapse whitespace runs and trim
    std::string out;
    out.reserve(text.size());
    bool in_space = true;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    bool has_alpha = false;
    auto flush = [&] {
        if (!current.empty() && has_alpha) tokens.push_back(current);
        current.clear();
        has_alpha = false;
    };
    for (unsigned char c : text) {
        if (is_ascii_alnum(c) || c >= 0x80) {
            if (!std::isdigit(c)) has_alpha = true;
            current.push_back(static_cast<char>(
                c < 0x80 ? std::tolower(c) : c));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

namespace {

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool has_vowel(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) { return is_vowel(c); });
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Cleanup after stripping -ing/-ed: undouble a final consonant
// ("planning" -> "plan", but "call" keeps its ll), then restore a dropped
// final 'e' for the stem endings where English verbs drop it
// ("decid" -> "decide", "creat" -> "create").
std::string post_strip(std::string stem) {
    if (stem.size() >= 4) {
        char last = stem[stem.size() - 1];
        char prev = stem[stem.size() - 2];
        if (last == prev && !is_vowel(last) && last != 'l' && last != 's' &&
            last != 'z') {
            stem.pop_back();
            return stem;
        }
    }
    static constexpr std::array<std::string_view, 5> kRestoreE{
        "at", "iz", "id", "ud", "av"};
    for (auto ending : kRestoreE) {
        if (stem.size() >= ending.size() + 1 && ends_with(stem, ending) &&
            !is_vowel(stem[stem.size() - ending.size() - 1])) {
            // e-dropping verbs look like ...C+at/iz/id/ud/av ("updat",
            // "optimiz", "decid"); a vowel before the ending means the
            // stem is already a full word ("treat", "avoid").
            stem.push_back('e');
            return stem;
        }
    }
    return stem;
}

// One pass of the suffix-rule table. Rules are ordered, first match wins;
// every rule shrinks the term, so iterating to a fixed point terminates.
//
//   -sses  -> -ss      processes -> process
//   -xes/-ches/-shes/-zes/-oes -> drop es   boxes -> box, goes -> go
//   -ies   -> -y       technologies -> technology     (term length >= 5)
//   -ility -> -le      scalability -> scalable        (term length >= 7)
//   -ing   -> drop     deciding -> decide             (stem >= 3, vowel,
//                                                      not -eing)
//   -ed    -> drop     decided -> decide              (stem >= 3, vowel,
//                                                      not -eed)
//   -s     -> drop     patterns -> pattern            (not -ss/-us/-is,
//                                                      length >= 4)
std::string apply_suffix_rules(const std::string& term) {
    const std::size_t n = term.size();
    if (ends_with(term, "sses") && n > 4) {
        return term.substr(0, n - 2);
    }
    if (n > 4 && (ends_with(term, "xes") || ends_with(term, "ches") ||
                  ends_with(term, "shes") || ends_with(term, "zes") ||
                  ends_with(term, "oes"))) {
        return term.substr(0, n - 2);
    }
    if (ends_with(term, "ies") && n >= 5) {
        return term.substr(0, n - 3) + "y";
    }
    if (ends_with(term, "ility") && n >= 7) {
        return term.substr(0, n - 5) + "le";
    }
    if (ends_with(term, "ing") && n >= 6 && term[n - 4] != 'e') {
        std::string stem = term.substr(0, n - 3);
        if (has_vowel(stem)) return post_strip(std::move(stem));
    }
    if (ends_with(term, "ed") && n >= 5 && term[n - 3] != 'e') {
        std::string stem = term.substr(0, n - 2);
        if (has_vowel(stem)) return post_strip(std::move(stem));
    }
    if (term.back() == 's' && n >= 4 && !ends_with(term, "ss") &&
        !ends_with(term, "us") && !ends_with(term, "is")) {
        return term.substr(0, n - 1);
    }
    return term;
}

}  // namespace

std::string lemmatize(const std::string& term, const LemmaDict& exceptions) {
    std::string current = term;
    for (int round = 0; round < 10; ++round) {
        auto it = exceptions.find(current);
        if (it != exceptions.end()) {
            if (it->second == current) break;  // identity entry: protected word
            current = it->second;
            continue;
        }
        std::string next = apply_suffix_rules(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

namespace {

// Reads non-empty, non-comment lines, whitespace-trimmed.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t");
        line = line.substr(start, end - start + 1);
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

}  // namespace

LemmaDict load_lemma_exceptions(const std::filesystem::path& path) {
    LemmaDict dict;
    for (const auto& line : read_lines(path)) {
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw InputError("malformed lemma exception line (expected "
                             "surface<TAB>lemma): " + line);
        }
        dict[to_lower(line.substr(0, tab))] = to_lower(line.substr(tab + 1));
    }
    return dict;
}

WordList load_word_list(const std::filesystem::path& path) {
    WordList list;
    for (const auto& line : read_lines(path)) {
        list.insert(to_lower(line));
    }
    return list;
}

void append_to_word_list(const std::filesystem::path& path,
                         const std::vector<std::string>& terms) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw RuntimeFailure("cannot open for append: " + path.string());
    for (const auto& t : terms) out << t << '\n';
    if (!out) throw RuntimeFailure("write failed: " + path.string());
}

double english_function_word_ratio(std::string_view text) {
    static const WordList kFunctionWords = {
        "the", "a",  "an",  "and",  "or",   "of",   "to",   "in",  "is",
        "are", "it", "this", "that", "for",  "with", "as",   "on",  "be",
        "by",  "we", "you",  "was",  "were", "from", "have", "has", "not",
        "at",  "but", "they", "his", "her",  "its",  "can",  "will"};
    auto tokens = tokenize(text);
    if (tokens.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (kFunctionWords.count(t) != 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

}  // namespace akmine
