#include "seqforge/store.hpp"

#include <algorithm>
#include <cctype>

namespace seqforge {

namespace {

bool word_byte(unsigned char c)
{
    return c >= 0x80 || std::isalnum(c);
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out)
        c = char(std::tolower((unsigned char)c));
    return out;
}

} // namespace

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (word_byte((unsigned char)c)) {
            cur += char(std::tolower((unsigned char)c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

bool is_field_tag(std::string_view tag)
{
    return std::find(std::begin(kFieldTags), std::end(kFieldTags), tag) != std::end(kFieldTags);
}

QueryPtr Query::term(std::string text, std::string field)
{
    auto q = std::shared_ptr<Query>(new Query(Kind::Term));
    q->words_.push_back(std::move(text));
    q->field_ = std::move(field);
    return q;
}

QueryPtr Query::phrase(std::vector<std::string> words, std::string field)
{
    auto q = std::shared_ptr<Query>(new Query(Kind::Phrase));
    q->words_ = std::move(words);
    q->field_ = std::move(field);
    return q;
}

QueryPtr Query::truncated(std::string prefix, std::string field)
{
    auto q = std::shared_ptr<Query>(new Query(Kind::Truncated));
    q->words_.push_back(std::move(prefix));
    q->field_ = std::move(field);
    return q;
}

QueryPtr Query::conj(QueryPtr l, QueryPtr r, bool implicit)
{
    auto q = std::shared_ptr<Query>(new Query(Kind::And));
    q->left_ = std::move(l);
    q->right_ = std::move(r);
    q->implicit_ = implicit;
    return q;
}

QueryPtr Query::disj(QueryPtr l, QueryPtr r)
{
    auto q = std::shared_ptr<Query>(new Query(Kind::Or));
    q->left_ = std::move(l);
    q->right_ = std::move(r);
    return q;
}

QueryPtr Query::negate(QueryPtr operand)
{
    auto q = std::shared_ptr<Query>(new Query(Kind::Not));
    q->left_ = std::move(operand);
    return q;
}

std::string Query::to_string() const
{
    auto leaf = [&](std::string_view name) {
        std::string words;
        for (std::size_t i = 0; i < words_.size(); ++i)
            words += (i ? " " : "") + words_[i];
        return std::string(name) + "(" + words + "," + field_ + ")";
    };
    switch (kind_) {
    case Kind::Term: return leaf("Term");
    case Kind::Phrase: return leaf("Phrase");
    case Kind::Truncated: return leaf("Truncated");
    case Kind::And: return "And(" + left_->to_string() + "," + right_->to_string() + ")";
    case Kind::Or: return "Or(" + left_->to_string() + "," + right_->to_string() + ")";
    case Kind::Not: return "Not(" + left_->to_string() + ")";
    }
    return {};
}

bool Query::operator==(const Query& other) const
{
    if (kind_ != other.kind_ || words_ != other.words_ || field_ != other.field_)
        return false;
    auto same = [](const QueryPtr& a, const QueryPtr& b) { return (!a && !b) || (a && b && *a == *b); };
    return same(left_, other.left_) && same(right_, other.right_);
}

namespace {

struct Lexeme {
    enum Kind { Word, Quoted, Tag, LParen, RParen, End } kind;
    std::string text;
    std::size_t pos;
};

std::string canonical_tag(std::string_view raw, std::size_t pos)
{
    std::string t = lower(raw);
    t.erase(0, t.find_first_not_of(' '));
    t.erase(t.find_last_not_of(' ') + 1);
    static const std::map<std::string, std::string, std::less<>> aliases{
        {"all fields", "all"}, {"author", "au"},     {"mesh", "mh"},     {"mesh terms", "mh"},
        {"pdat", "dp"},        {"publication date", "dp"}, {"publication type", "pt"},
        {"language", "la"},    {"title", "ti"}};
    if (auto it = aliases.find(t); it != aliases.end())
        return it->second;
    if (!is_field_tag(t))
        throw Error(ErrorCode::UnknownField, "unknown field tag [" + std::string(raw) + "]", pos);
    return t;
}

std::vector<Lexeme> lex(std::string_view s)
{
    std::vector<Lexeme> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace((unsigned char)c)) {
            ++i;
        } else if (c == '(' || c == ')') {
            out.push_back({c == '(' ? Lexeme::LParen : Lexeme::RParen, std::string(1, c), i});
            ++i;
        } else if (c == '[') {
            std::size_t close = s.find(']', i);
            if (close == std::string_view::npos)
                throw Error(ErrorCode::SyntaxError, "unterminated field tag", i);
            out.push_back({Lexeme::Tag, canonical_tag(s.substr(i + 1, close - i - 1), i), i});
            i = close + 1;
        } else if (c == ']') {
            throw Error(ErrorCode::SyntaxError, "unexpected ']'", i);
        } else if (c == '"') {
            std::size_t close = s.find('"', i + 1);
            if (close == std::string_view::npos)
                throw Error(ErrorCode::SyntaxError, "unterminated phrase", i);
            out.push_back({Lexeme::Quoted, std::string(s.substr(i + 1, close - i - 1)), i});
            i = close + 1;
        } else {
            std::size_t j = i;
            while (j < s.size() && !std::isspace((unsigned char)s[j]) && std::string_view("()[]\"").find(s[j]) == std::string_view::npos)
                ++j;
            out.push_back({Lexeme::Word, std::string(s.substr(i, j - i)), i});
            i = j;
        }
    }
    out.push_back({Lexeme::End, "", s.size()});
    return out;
}

class QueryParser {
public:
    explicit QueryParser(std::string_view text) : lex_(lex(text)) {}

    QueryPtr parse()
    {
        if (peek().kind == Lexeme::End)
            throw Error(ErrorCode::SyntaxError, "empty query", 0);
        QueryPtr q = expr();
        if (peek().kind != Lexeme::End)
            throw Error(ErrorCode::SyntaxError, "unexpected '" + peek().text + "'", peek().pos);
        return q;
    }

private:
    const Lexeme& peek() const { return lex_[at_]; }

    static bool is_op(const Lexeme& l, std::string_view op) { return l.kind == Lexeme::Word && l.text == op; }
    static bool is_binary(const Lexeme& l) { return is_op(l, "AND") || is_op(l, "OR") || is_op(l, "NOT"); }

    bool starts_unary() const
    {
        const Lexeme& l = peek();
        if (l.kind == Lexeme::Quoted || l.kind == Lexeme::LParen)
            return true;
        return l.kind == Lexeme::Word && !is_op(l, "AND") && !is_op(l, "OR");
    }

    QueryPtr expr()
    {
        QueryPtr q = seq();
        while (is_binary(peek())) {
            std::string op = lex_[at_++].text;
            QueryPtr r = seq();
            if (op == "AND")
                q = Query::conj(q, r);
            else if (op == "OR")
                q = Query::disj(q, r);
            else
                q = Query::conj(q, Query::negate(r));
        }
        return q;
    }

    QueryPtr seq()
    {
        QueryPtr q = unary();
        while (starts_unary() && !is_op(peek(), "NOT"))
            q = Query::conj(q, unary(), true);
        return q;
    }

    QueryPtr unary()
    {
        if (is_op(peek(), "NOT")) {
            ++at_;
            return Query::negate(unary());
        }
        return primary();
    }

    std::string tag()
    {
        if (peek().kind != Lexeme::Tag)
            return "all";
        return lex_[at_++].text;
    }

    QueryPtr primary()
    {
        const Lexeme l = peek();
        switch (l.kind) {
        case Lexeme::LParen: {
            ++at_;
            QueryPtr q = expr();
            if (peek().kind != Lexeme::RParen)
                throw Error(ErrorCode::SyntaxError, "expected ')'", peek().pos);
            ++at_;
            if (peek().kind == Lexeme::Tag)
                throw Error(ErrorCode::SyntaxError, "a field tag must follow a term", peek().pos);
            return q;
        }
        case Lexeme::Quoted: {
            ++at_;
            auto words = tokenize(l.text);
            if (words.empty())
                throw Error(ErrorCode::SyntaxError, "empty phrase", l.pos);
            return Query::phrase(std::move(words), tag());
        }
        case Lexeme::Word: {
            ++at_;
            if (is_op(l, "AND") || is_op(l, "OR"))
                throw Error(ErrorCode::SyntaxError, "operator " + l.text + " needs a left operand", l.pos);
            bool trunc = l.text.size() > 1 && l.text.back() == '*';
            auto words = tokenize(trunc ? std::string_view(l.text).substr(0, l.text.size() - 1) : l.text);
            if (words.empty())
                throw Error(ErrorCode::SyntaxError, "'" + l.text + "' contains no searchable characters", l.pos);
            if (trunc && words.size() > 1)
                throw Error(ErrorCode::SyntaxError, "truncation applies to a single word", l.pos);
            std::string field = tag();
            if (trunc)
                return Query::truncated(std::move(words.front()), std::move(field));
            if (words.size() > 1)
                return Query::phrase(std::move(words), std::move(field));
            return Query::term(std::move(words.front()), std::move(field));
        }
        case Lexeme::Tag:
            throw Error(ErrorCode::SyntaxError, "a field tag must follow a term", l.pos);
        case Lexeme::RParen:
            throw Error(ErrorCode::SyntaxError, "unexpected ')'", l.pos);
        case Lexeme::End:
            break;
        }
        throw Error(ErrorCode::SyntaxError, "unexpected end of query", l.pos);
    }

    std::vector<Lexeme> lex_;
    std::size_t at_ = 0;
};

} // namespace

QueryPtr parse_query(std::string_view text)
{
    return QueryParser(text).parse();
}

} // namespace seqforge
