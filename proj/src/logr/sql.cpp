#include "logr/sql.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "logr/errors.hpp"

namespace logr {

namespace {

enum class Tok {
    Ident,     // identifier or keyword, lowercased (may be dotted: a.b)
    Constant,  // any literal, already abstracted to `?`
    Star,      // *
    Op,        // operator / punctuation
};

struct Token {
    Tok kind;
    std::string text;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '.' || c == '$';
}

std::vector<Token> tokenize(const std::string& sql) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t len = sql.size();
    while (i < len) {
        char c = sql[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < len && sql[i + 1] == '-') {  // line comment
            while (i < len && sql[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < len && sql[i + 1] == '*') {  // block comment
            auto end = sql.find("*/", i + 2);
            if (end == std::string::npos)
                throw ParseError("unterminated block comment");
            i = end + 2;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < len && ident_char(sql[j])) ++j;
            std::string word = sql.substr(i, j - i);
            std::transform(word.begin(), word.end(), word.begin(),
                           [](unsigned char ch) { return std::tolower(ch); });
            out.push_back({Tok::Ident, std::move(word)});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < len && (std::isdigit(static_cast<unsigned char>(sql[j])) ||
                               sql[j] == '.'))
                ++j;
            // unary sign directly before a number folds into the constant
            if (!out.empty() && out.back().kind == Tok::Op &&
                (out.back().text == "-" || out.back().text == "+")) {
                bool unary = out.size() < 2;
                if (!unary) {
                    const Token& prev = out[out.size() - 2];
                    unary = (prev.kind == Tok::Op && prev.text != ")") ||
                            (prev.kind == Tok::Ident &&
                             (prev.text == "and" || prev.text == "or" ||
                              prev.text == "not" || prev.text == "where" ||
                              prev.text == "between" || prev.text == "in" ||
                              prev.text == "like" || prev.text == "select"));
                }
                if (unary) out.pop_back();
            }
            out.push_back({Tok::Constant, "?"});
            i = j;
            continue;
        }
        if (c == '\'') {  // string literal, '' escapes a quote
            std::size_t j = i + 1;
            while (j < len) {
                if (sql[j] == '\'') {
                    if (j + 1 < len && sql[j + 1] == '\'') {
                        j += 2;
                        continue;
                    }
                    break;
                }
                ++j;
            }
            if (j >= len) throw ParseError("unterminated string literal");
            out.push_back({Tok::Constant, "?"});
            i = j + 1;
            continue;
        }
        if (c == '"' || c == '`') {  // quoted identifier
            char quote = c;
            std::size_t j = i + 1;
            while (j < len && sql[j] != quote) ++j;
            if (j >= len) throw ParseError("unterminated quoted identifier");
            std::string word = sql.substr(i + 1, j - i - 1);
            if (word.empty()) throw ParseError("empty quoted identifier");
            std::transform(word.begin(), word.end(), word.begin(),
                           [](unsigned char ch) { return std::tolower(ch); });
            out.push_back({Tok::Ident, std::move(word)});
            i = j + 1;
            continue;
        }
        if (c == '?') {
            out.push_back({Tok::Constant, "?"});
            ++i;
            continue;
        }
        if (c == '*') {
            out.push_back({Tok::Star, "*"});
            ++i;
            continue;
        }
        // multi-char comparison operators
        static const char* two_char[] = {"<=", ">=", "<>", "!=", "||"};
        bool matched = false;
        for (const char* op : two_char) {
            if (sql.compare(i, 2, op) == 0) {
                out.push_back({Tok::Op, op});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        static const std::string single = "(),=<>+-/%;.";
        if (single.find(c) != std::string::npos) {
            if (c != ';')  // statement terminator carries no content
                out.push_back({Tok::Op, std::string(1, c)});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c +
                         "' in SQL");
    }
    return out;
}

using Span = std::pair<std::size_t, std::size_t>;  // [begin, end) into tokens

bool is_word(const std::vector<Token>& t, std::size_t i, const char* w) {
    return t[i].kind == Tok::Ident && t[i].text == w;
}

bool wordy(const Token& t) {
    return t.kind == Tok::Ident || t.kind == Tok::Constant;
}

// Canonical text: tokens joined with a space only between two word-like
// tokens, e.g. [status][=][?] -> "status=?", [x][is][null] -> "x is null".
std::string render(const std::vector<Token>& t, Span s) {
    std::string out;
    for (std::size_t i = s.first; i < s.second; ++i) {
        if (i > s.first && wordy(t[i - 1]) && wordy(t[i])) out += ' ';
        out += t[i].text;
    }
    return out;
}

// Splits [begin,end) at top-level commas.
std::vector<Span> split_commas(const std::vector<Token>& t, Span s) {
    std::vector<Span> parts;
    int depth = 0;
    std::size_t start = s.first;
    for (std::size_t i = s.first; i < s.second; ++i) {
        if (t[i].kind == Tok::Op) {
            if (t[i].text == "(") ++depth;
            else if (t[i].text == ")") --depth;
            else if (t[i].text == "," && depth == 0) {
                parts.push_back({start, i});
                start = i + 1;
            }
        }
    }
    parts.push_back({start, s.second});
    return parts;
}

bool has_top_level_word(const std::vector<Token>& t, Span s, const char* w) {
    int depth = 0;
    for (std::size_t i = s.first; i < s.second; ++i) {
        if (t[i].kind == Tok::Op) {
            if (t[i].text == "(") ++depth;
            else if (t[i].text == ")") --depth;
        } else if (depth == 0 && is_word(t, i, w)) {
            return true;
        }
    }
    return false;
}

// Repeatedly strips parentheses that enclose the whole span.
Span strip_outer_parens(const std::vector<Token>& t, Span s) {
    while (s.second - s.first >= 2 && t[s.first].kind == Tok::Op &&
           t[s.first].text == "(" && t[s.second - 1].kind == Tok::Op &&
           t[s.second - 1].text == ")") {
        int depth = 0;
        bool wraps = true;
        for (std::size_t i = s.first; i < s.second; ++i) {
            if (t[i].kind != Tok::Op) continue;
            if (t[i].text == "(") ++depth;
            else if (t[i].text == ")") {
                --depth;
                if (depth == 0 && i + 1 != s.second) {
                    wraps = false;
                    break;
                }
            }
        }
        if (!wraps) break;
        s = {s.first + 1, s.second - 1};
    }
    return s;
}

const char* const kJoinWords[] = {"join",  "inner", "outer",   "left",
                                  "right", "full",  "cross",   "natural",
                                  "on",    "using", "straight_join"};

void add_feature(std::vector<Feature>& out, FeatureCategory cat,
                 std::string text) {
    Feature f{cat, std::move(text)};
    if (std::find(out.begin(), out.end(), f) == out.end())
        out.push_back(std::move(f));
}

struct Sections {
    Span select{0, 0}, from{0, 0}, where{0, 0};
    int dropped = 0;  // GROUP BY / ORDER BY / HAVING / LIMIT / OFFSET
};

Sections split_sections(const std::vector<Token>& t) {
    Sections sec;
    if (t.empty()) throw ParseError("empty statement");
    if (!is_word(t, 0, "select"))
        throw UnsupportedQuery("only SELECT statements are supported",
                               t[0].text);
    enum Part { Select, From, Where, Dropped } cur = Select;
    std::size_t start = 1;
    int depth = 0;
    auto close = [&](std::size_t end) {
        Span s{start, end};
        switch (cur) {
            case Select: sec.select = s; break;
            case From: sec.from = s; break;
            case Where: sec.where = s; break;
            case Dropped: break;
        }
    };
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i].kind == Tok::Op) {
            if (t[i].text == "(") ++depth;
            else if (t[i].text == ")") --depth;
            continue;
        }
        if (depth != 0 || t[i].kind != Tok::Ident) continue;
        const std::string& w = t[i].text;
        if (w == "union" || w == "intersect" || w == "except")
            throw UnsupportedQuery("set operations are not supported", w);
        Part next;
        std::size_t skip = 0;
        if (w == "from") next = From;
        else if (w == "where") next = Where;
        else if ((w == "group" || w == "order") && i + 1 < t.size() &&
                 is_word(t, i + 1, "by")) {
            next = Dropped;
            skip = 1;
        } else if (w == "having" || w == "limit" || w == "offset") {
            next = Dropped;
        } else {
            continue;
        }
        close(i);
        if (next == Dropped) ++sec.dropped;
        cur = next;
        start = i + 1 + skip;
        i += skip;
    }
    if (depth != 0) throw ParseError("unbalanced parentheses");
    close(t.size());
    return sec;
}

void parse_select_list(const std::vector<Token>& t, Span s,
                       std::vector<Feature>& out) {
    if (s.first >= s.second) throw ParseError("empty SELECT list");
    // DISTINCT / ALL qualify the whole list
    if (is_word(t, s.first, "distinct") || is_word(t, s.first, "all"))
        ++s.first;
    for (Span item : split_commas(t, s)) {
        if (item.second - item.first >= 2 &&
            is_word(t, item.second - 2, "as"))
            item.second -= 2;  // strip "AS alias"
        if (item.first >= item.second)
            throw ParseError("empty SELECT list item");
        add_feature(out, FeatureCategory::Select, render(t, item));
    }
}

void parse_from_list(const std::vector<Token>& t, Span s,
                     std::vector<Feature>& out) {
    if (s.first >= s.second) throw ParseError("empty FROM clause");
    for (const char* w : kJoinWords) {
        if (has_top_level_word(t, s, w))
            throw UnsupportedQuery("explicit JOIN syntax is not supported",
                                   render(t, s));
    }
    for (Span item : split_commas(t, s)) {
        if (item.first >= item.second)
            throw ParseError("empty FROM list item");
        if (t[item.first].kind == Tok::Op && t[item.first].text == "(") {
            // subquery: fingerprint the parenthesized text as one feature
            int depth = 0;
            std::size_t close = item.first;
            for (std::size_t i = item.first; i < item.second; ++i) {
                if (t[i].kind != Tok::Op) continue;
                if (t[i].text == "(") ++depth;
                else if (t[i].text == ")" && --depth == 0) {
                    close = i;
                    break;
                }
            }
            if (close == item.first)
                throw ParseError("unterminated subquery in FROM");
            Span rest{close + 1, item.second};
            // optional [AS] alias after the subquery
            if (rest.second - rest.first > 2 ||
                (rest.second - rest.first == 2 && !is_word(t, rest.first, "as")))
                throw ParseError("unexpected tokens after subquery in FROM");
            add_feature(out, FeatureCategory::From,
                        render(t, {item.first, close + 1}));
            continue;
        }
        if (t[item.first].kind != Tok::Ident)
            throw ParseError("FROM source must be a table or subquery");
        std::size_t extra = item.second - item.first - 1;
        if (extra > 2 || (extra == 2 && !is_word(t, item.first + 1, "as")) ||
            (extra >= 1 && t[item.second - 1].kind != Tok::Ident))
            throw ParseError("malformed FROM list item");
        add_feature(out, FeatureCategory::From, t[item.first].text);
    }
}

void parse_where_clause(const std::vector<Token>& t, Span s,
                        std::vector<Feature>& out) {
    if (s.first >= s.second) throw ParseError("empty WHERE clause");
    if (has_top_level_word(t, s, "or"))
        throw UnsupportedQuery("WHERE clause must be a pure conjunction",
                               render(t, s));
    std::vector<Span> conjuncts;
    int depth = 0, pending_between = 0;
    std::size_t start = s.first;
    for (std::size_t i = s.first; i < s.second; ++i) {
        if (t[i].kind == Tok::Op) {
            if (t[i].text == "(") ++depth;
            else if (t[i].text == ")") --depth;
            continue;
        }
        if (depth != 0) continue;
        if (is_word(t, i, "between")) {
            ++pending_between;
        } else if (is_word(t, i, "and")) {
            if (pending_between > 0) {
                --pending_between;  // the AND inside x BETWEEN a AND b
            } else {
                conjuncts.push_back({start, i});
                start = i + 1;
            }
        }
    }
    conjuncts.push_back({start, s.second});
    for (Span atom : conjuncts) {
        atom = strip_outer_parens(t, atom);
        if (atom.first >= atom.second)
            throw ParseError("empty conjunct in WHERE clause");
        if (has_top_level_word(t, atom, "or"))
            throw UnsupportedQuery("WHERE clause must be a pure conjunction",
                                   render(t, atom));
        add_feature(out, FeatureCategory::Where, render(t, atom));
    }
}

std::vector<Feature> parse_tokens(const std::vector<Token>& t, int* dropped) {
    Sections sec = split_sections(t);
    std::vector<Feature> out;
    parse_select_list(t, sec.select, out);
    if (sec.from.second > sec.from.first) parse_from_list(t, sec.from, out);
    if (sec.where.second > sec.where.first)
        parse_where_clause(t, sec.where, out);
    if (dropped) *dropped = sec.dropped;
    return out;
}

}  // namespace

std::vector<Feature> parse_query(const std::string& sql) {
    return parse_tokens(tokenize(sql), nullptr);
}

LogBuildResult build_log(std::istream& in) {
    std::vector<std::pair<std::vector<Feature>, std::uint64_t>> rows;
    ParseStats stats;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::uint64_t mult = 1;
        std::string sql = line;
        auto tab = line.find('\t');
        if (tab != std::string::npos) {
            std::string prefix = line.substr(0, tab);
            if (!prefix.empty() &&
                std::all_of(prefix.begin(), prefix.end(), [](unsigned char c) {
                    return std::isdigit(c);
                })) {
                try {
                    mult = std::stoull(prefix);
                } catch (const std::exception&) {
                    throw ParseError("multiplicity out of range",
                                     static_cast<int>(lineno));
                }
                if (mult == 0)
                    throw ParseError("multiplicity must be >= 1",
                                     static_cast<int>(lineno));
                sql = line.substr(tab + 1);
            }
        }
        std::vector<Token> tokens;
        try {
            tokens = tokenize(sql);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), static_cast<int>(lineno));
        }
        if (tokens.empty()) continue;  // blank or comment-only line
        try {
            int dropped = 0;
            rows.emplace_back(parse_tokens(tokens, &dropped), mult);
            stats.dropped_clauses += dropped;
        } catch (const ParseError& e) {
            throw ParseError(e.what(), static_cast<int>(lineno));
        } catch (const UnsupportedQuery& e) {
            throw ParseError(e.what(), static_cast<int>(lineno));
        }
        ++stats.queries;
    }
    LogBuildResult result = build_log_from_features(rows);
    result.stats.dropped_clauses = stats.dropped_clauses;
    return result;
}

LogBuildResult build_log_from_string(const std::string& text) {
    std::istringstream in(text);
    return build_log(in);
}

LogBuildResult build_log_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open log file: " + path);
    return build_log(in);
}

LogBuildResult build_log_from_features(
    const std::vector<std::pair<std::vector<Feature>, std::uint64_t>>& rows) {
    if (rows.empty()) throw EmptyLog();
    LogBuildResult result;
    for (const auto& [features, mult] : rows)
        for (const auto& f : features) result.vocab.intern(f);
    const std::size_t n = result.vocab.size();

    Log log(n);
    std::unordered_map<Pattern, std::size_t, PatternHash> seen;
    std::vector<std::pair<Pattern, std::uint64_t>> ordered;
    for (const auto& [features, mult] : rows) {
        Pattern q(n);
        for (const auto& f : features) q.set(*result.vocab.id_of(f));
        auto [it, fresh] = seen.emplace(q, ordered.size());
        if (fresh) ordered.emplace_back(q, mult);
        else ordered[it->second].second += mult;
        log.total += mult;
    }
    log.rows = std::move(ordered);
    result.stats.queries = rows.size();
    result.log = std::move(log);
    return result;
}

}  // namespace logr
