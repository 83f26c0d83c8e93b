#include "awe/corpus.hpp"

#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>

#include "awe/common.hpp"

namespace awe {

std::string_view label_name(Label label) {
    switch (label) {
        case Label::Entailment: return "entailment";
        case Label::Neutral: return "neutral";
        case Label::Contradiction: return "contradiction";
    }
    return "?";
}

namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one UTF-8 sequence starting at text[pos]; malformed bytes decode
// to U+FFFD and consume a single byte.
char32_t decode(std::string_view text, std::size_t& pos) {
    const auto b0 = static_cast<unsigned char>(text[pos]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && b0 < 0xF8) {
        len = 4;
        cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
        len = b0 < 0xF0 ? 3 : 1;
        cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if (b0 >= 0x80) {
        ++pos;
        return kInvalid;
    }
    if (b0 >= 0xF8) {
        ++pos;
        return kInvalid;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(text[pos + k]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
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

bool is_space(char32_t c) {
    return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
           (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
           c == 0x205F || c == 0x3000;
}

// Letters and digits. Outside ASCII this is an approximation: the Latin-1
// symbol block, general punctuation, CJK punctuation, and the replacement
// character count as non-alphanumeric; everything else counts as a letter.
bool is_alnum(char32_t c) {
    if (c < 0x80) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
    if (c == 0xD7 || c == 0xF7) return false;
    if (c >= 0x2000 && c <= 0x2BFF) return false;
    if (c >= 0x3000 && c <= 0x303F) return false;
    if (c >= 0xFE30 && c <= 0xFE4F) return false;
    if (c >= 0xFF00 && c <= 0xFF0F) return false;
    if (c == kInvalid) return false;
    return true;
}

char32_t to_lower(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 32;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;          // Latin-1
    if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;       // Greek
    if (c >= 0x410 && c <= 0x42F) return c + 32;                     // Cyrillic
    if (c >= 0x400 && c <= 0x40F) return c + 80;
    if (c >= 0x100 && c <= 0x17F && c % 2 == 0 && c != 0x130 && c != 0x138) return c + 1;
    return c;
}

void flush_token(std::vector<char32_t>& cps, Tokens& out) {
    std::size_t begin = 0, end = cps.size();
    while (begin < end && !is_alnum(cps[begin])) ++begin;
    while (end > begin && !is_alnum(cps[end - 1])) --end;
    if (begin < end) {
        std::string token;
        for (std::size_t k = begin; k < end; ++k) encode(to_lower(cps[k]), token);
        out.push_back(std::move(token));
    }
    cps.clear();
}

Label parse_snli_label(const std::string& value, std::size_t lineno, bool& skip) {
    skip = false;
    if (value == "entailment") return Label::Entailment;
    if (value == "neutral") return Label::Neutral;
    if (value == "contradiction") return Label::Contradiction;
    if (value == "-") {
        skip = true;
        return Label::Neutral;
    }
    throw ParseError(lineno, "unknown gold_label '" + value + "'");
}

void push_or_skip(Corpus& corpus, Tokens premise, Tokens hypothesis, Label label) {
    if (premise.empty() || hypothesis.empty()) {
        ++corpus.skipped;
        return;
    }
    corpus.pairs.push_back({std::move(premise), std::move(hypothesis), label});
}

}  // namespace

Tokens tokenize(std::string_view text) {
    Tokens out;
    std::vector<char32_t> current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t c = decode(text, pos);
        if (is_space(c)) {
            flush_token(current, out);
        } else {
            current.push_back(c);
        }
    }
    flush_token(current, out);
    return out;
}

Corpus parse_snli(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) {
            ++corpus.skipped;
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) throw ParseError(lineno, "expected a JSON object");
        auto field = [&](const char* name) -> std::string {
            auto it = record.find(name);
            if (it == record.end() || !it->is_string()) {
                throw ParseError(lineno, std::string("missing string field '") + name + "'");
            }
            return it->get<std::string>();
        };
        bool skip = false;
        const Label label = parse_snli_label(field("gold_label"), lineno, skip);
        const std::string s1 = field("sentence1");
        const std::string s2 = field("sentence2");
        if (skip) {
            ++corpus.skipped;
            continue;
        }
        push_or_skip(corpus, tokenize(s1), tokenize(s2), label);
    }
    if (in.bad()) throw Error("read failure while parsing SNLI data");
    return corpus;
}

Corpus parse_scitail(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) {
            ++corpus.skipped;
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto tab = rest.find('\t');
            fields.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        if (fields.size() != 3) {
            throw ParseError(lineno, "expected 3 tab-separated fields, found " +
                                         std::to_string(fields.size()));
        }
        Label label;
        if (fields[2] == "entails") {
            label = Label::Entailment;
        } else if (fields[2] == "neutral") {
            label = Label::Neutral;
        } else {
            throw ParseError(lineno, "unknown label '" + std::string(fields[2]) + "'");
        }
        push_or_skip(corpus, tokenize(fields[0]), tokenize(fields[1]), label);
    }
    if (in.bad()) throw Error("read failure while parsing SciTail data");
    return corpus;
}

Corpus parse_corpus(std::istream& in, CorpusFormat format) {
    return format == CorpusFormat::Snli ? parse_snli(in) : parse_scitail(in);
}

CorpusFormat format_for_path(const std::string& path) {
    auto ends_with = [&](std::string_view suffix) {
        return path.size() >= suffix.size() &&
               path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return ends_with(".jsonl") || ends_with(".json") ? CorpusFormat::Snli : CorpusFormat::SciTail;
}

Corpus load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    try {
        return parse_corpus(in, format_for_path(path));
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path);
    }
}

}  // namespace awe
