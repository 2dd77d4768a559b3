#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toolchain/errors.hpp"

namespace toolchain {

inline constexpr const char* kDefaultFinishToken = "Finish";

/// One canonical action: either a single call "Tool(arg1=v1, arg2=v2)" or an
/// opaque statement (free-form reasoning step, multi-token code line).
/// Equality between actions is always decided on canonical_key.
struct ActionRecord {
    std::string tool_name;
    std::vector<std::pair<std::string, std::string>> args;  // (name, value); name empty when positional
    std::string raw_text;
    std::string canonical_key;
    bool is_finish = false;
};

namespace detail {

/// Trim and collapse internal whitespace runs to single spaces.
inline std::string normalize_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_run = !out.empty();
        } else {
            if (in_run) out.push_back(' ');
            in_run = false;
            out.push_back(c);
        }
    }
    return out;
}

inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

/// Paren balance scan. Quote-aware unless the quotes themselves never close
/// (prose apostrophes), in which case quotes are treated as plain characters.
inline bool parens_balanced(std::string_view s, bool quote_aware) {
    int depth = 0;
    char quote = 0;
    for (char c : s) {
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (quote_aware && (c == '\'' || c == '"')) {
            quote = c;
        } else if (c == '(') {
            ++depth;
        } else if (c == ')') {
            if (--depth < 0) return false;
        }
    }
    if (quote) return parens_balanced(s, false);
    return depth == 0;
}

inline bool has_unterminated_quote(std::string_view s) {
    char quote = 0;
    for (char c : s) {
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '\'' || c == '"') {
            quote = c;
        }
    }
    return quote != 0;
}

/// Split on top-level occurrences of delim (outside quotes and nested parens).
inline std::vector<std::string> split_top_level(std::string_view s, char delim, bool quote_aware) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    char quote = 0;
    for (char c : s) {
        if (quote) {
            cur.push_back(c);
            if (c == quote) quote = 0;
            continue;
        }
        if (quote_aware && (c == '\'' || c == '"')) {
            quote = c;
            cur.push_back(c);
        } else if (c == '(') {
            ++depth;
            cur.push_back(c);
        } else if (c == ')') {
            --depth;
            cur.push_back(c);
        } else if (c == delim && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::string build_key(const std::string& tool,
                             const std::vector<std::pair<std::string, std::string>>& args,
                             bool structured) {
    if (!structured) return tool;
    std::string key = tool;
    key.push_back('(');
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) key.push_back(',');
        if (!args[i].first.empty()) {
            key += args[i].first;
            key.push_back('=');
        }
        key += args[i].second;
    }
    key.push_back(')');
    return key;
}

}  // namespace detail

/// Parse raw proposer output into an ActionRecord.
///
/// Recognizes the single-call grammar "Tool(a=1, b=2)" / "Tool(v1, v2)".
/// Anything else that is paren-balanced is kept as one opaque action whose
/// canonical_key is the whitespace-normalized statement. Throws ParseError on
/// empty input, unbalanced parentheses, or an empty tool name like "(x)".
inline ActionRecord canonicalize_action(std::string_view raw_text,
                                        std::string_view finish_token = kDefaultFinishToken) {
    using namespace detail;

    std::size_t b = raw_text.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) throw ParseError("empty action text");
    std::size_t e = raw_text.find_last_not_of(" \t\r\n\f\v");
    std::string_view text = raw_text.substr(b, e - b + 1);

    ActionRecord rec;
    rec.raw_text = std::string(raw_text);

    if (text.front() == '(') throw ParseError("empty tool name in: " + std::string(text));
    if (!parens_balanced(text, true))
        throw ParseError("unbalanced parentheses in: " + std::string(text));

    // Structured form: identifier, optional whitespace, '(', body, final ')'.
    std::size_t i = 0;
    while (i < text.size() && is_ident_char(text[i])) ++i;
    std::size_t head_end = i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    bool structured = head_end > 0 && i < text.size() && text[i] == '(' && text.back() == ')';
    if (structured) {
        // The '(' after the head must pair with the final ')'.
        std::string_view body = text.substr(i + 1, text.size() - i - 2);
        bool qa = !has_unterminated_quote(body);
        if (!parens_balanced(body, qa)) {
            structured = false;
        } else {
            rec.tool_name = std::string(text.substr(0, head_end));
            if (!normalize_ws(body).empty()) {
                for (const std::string& piece : split_top_level(body, ',', qa)) {
                    auto halves = split_top_level(piece, '=', qa);
                    std::string name, value;
                    if (halves.size() >= 2) {
                        name = normalize_ws(halves[0]);
                        value = halves[1];
                        for (std::size_t h = 2; h < halves.size(); ++h) value += "=" + halves[h];
                        value = normalize_ws(value);
                        if (name.empty())
                            throw ParseError("empty argument name in: " + std::string(text));
                    } else {
                        value = normalize_ws(piece);
                        if (value.empty())
                            throw ParseError("empty argument in: " + std::string(text));
                    }
                    rec.args.emplace_back(std::move(name), std::move(value));
                }
            }
        }
    }
    if (!structured) {
        // Opaque statement; the normalized text doubles as the tool name so
        // canonical_key stays a pure function of (tool_name, args).
        rec.tool_name = normalize_ws(text);
        rec.args.clear();
    }
    rec.canonical_key = detail::build_key(rec.tool_name, rec.args, structured);
    rec.is_finish = rec.tool_name == finish_token;
    return rec;
}

/// Canonical keys of a whole action sequence, in order.
inline std::vector<std::string> canonical_keys(const std::vector<ActionRecord>& actions) {
    std::vector<std::string> keys;
    keys.reserve(actions.size());
    for (const ActionRecord& a : actions) keys.push_back(a.canonical_key);
    return keys;
}

}  // namespace toolchain
