#pragma once

#include <cctype>

#include "isoltest/dsl/diag.hpp"

namespace isoltest::dsl {

// Shared tokenizer for the three text DSLs. Identifiers, integers, a small
// fixed set of punctuation/operators, and // line comments.
struct Token {
    enum class Kind { ident, number, punct, eof } kind = Kind::eof;
    std::string text;
    SourceSpan span;

    bool is(const std::string& t) const { return text == t && kind != Kind::eof; }
};

class Lexer {
public:
    explicit Lexer(std::string text, std::string file = "<input>")
        : text_(std::move(text)), file_(std::move(file)) {
        tokenize();
    }

    const Token& peek(int ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    Token next() {
        Token t = peek();
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }
    bool accept(const std::string& text) {
        if (peek().is(text)) {
            next();
            return true;
        }
        return false;
    }
    Token expect(const std::string& text) {
        if (!peek().is(text)) fail("expected '" + text + "', got '" + describe(peek()) + "'");
        return next();
    }
    Token expect_ident() {
        if (peek().kind != Token::Kind::ident)
            fail("expected identifier, got '" + describe(peek()) + "'");
        return next();
    }
    bool at_eof() const { return peek().kind == Token::Kind::eof; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(Diagnostic{Severity::error, msg, peek().span});
    }
    [[noreturn]] void fail_at(const SourceSpan& span, const std::string& msg) const {
        throw ParseError(Diagnostic{Severity::error, msg, span});
    }

private:
    static std::string describe(const Token& t) {
        return t.kind == Token::Kind::eof ? "end of input" : t.text;
    }

    void tokenize() {
        static const char* two_char[] = {"==", "!=", "<=", ">=", "->", "&&", "||"};
        int line = 1, col = 1;
        size_t i = 0;
        auto span_here = [&] {
            SourceSpan s;
            s.file = file_;
            s.line = s.end_line = line;
            s.column = s.end_column = col;
            return s;
        };
        auto advance = [&](size_t n) {
            for (size_t k = 0; k < n; ++k, ++i) {
                if (text_[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
        };
        while (i < text_.size()) {
            char c = text_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
                continue;
            }
            if (c == '/' && i + 1 < text_.size() && text_[i + 1] == '/') {
                while (i < text_.size() && text_[i] != '\n') advance(1);
                continue;
            }
            SourceSpan span = span_here();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                size_t j = i;
                while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) ||
                                            text_[j] == '_'))
                    ++j;
                std::string word = text_.substr(i, j - i);
                advance(j - i);
                span.end_line = line;
                span.end_column = col > 1 ? col - 1 : 1;
                tokens_.push_back(Token{Token::Kind::ident, std::move(word), span});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                size_t j = i;
                while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
                std::string num = text_.substr(i, j - i);
                advance(j - i);
                span.end_column = col > 1 ? col - 1 : 1;
                tokens_.push_back(Token{Token::Kind::number, std::move(num), span});
                continue;
            }
            bool matched = false;
            for (const char* op : two_char) {
                if (text_.compare(i, 2, op) == 0) {
                    tokens_.push_back(Token{Token::Kind::punct, op, span});
                    advance(2);
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::string("{}(),;.?=<>!:").find(c) != std::string::npos) {
                tokens_.push_back(Token{Token::Kind::punct, std::string(1, c), span});
                advance(1);
                continue;
            }
            throw ParseError(
                Diagnostic{Severity::error, std::string("unexpected character '") + c + "'", span});
        }
        Token eof;
        eof.span = span_here();
        tokens_.push_back(eof);
    }

    std::string text_, file_;
    std::vector<Token> tokens_;
    size_t pos_ = 0;
};

}  // namespace isoltest::dsl
