#pragma once

#include "fb/errors.hpp"
#include "fb/poly.hpp"

#include <cctype>
#include <string>

namespace fb {

// Recursive-descent parser for the literal grammar, generic over the value
// type. Ops supplies constant/symbol/add/sub/mul/div/neg/pow.
template <class V, class Ops>
class ExprParser {
  public:
    ExprParser(const std::string &text, Ops &ops) : s_(text), ops_(ops) {}

    V parse()
    {
        skip();
        if (pos_ == s_.size()) fail("empty expression");
        V v = expr();
        skip();
        if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return v;
    }

  private:
    const std::string &s_;
    Ops &ops_;
    size_t pos_ = 0;

    void location(size_t at, int &line, int &col) const
    {
        line = 1, col = 1;
        for (size_t i = 0; i < at && i < s_.size(); ++i) {
            if (s_[i] == '\n')
                ++line, col = 1;
            else
                ++col;
        }
    }
    [[noreturn]] void fail(const std::string &msg) const { fail_at(pos_, msg); }
    [[noreturn]] void fail_at(size_t at, const std::string &msg) const
    {
        int line, col;
        location(at, line, col);
        throw ParseError(msg, line, col);
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    V expr()
    {
        V v = term();
        while (true) {
            if (eat('+'))
                v = ops_.add(v, term());
            else if (eat('-'))
                v = ops_.sub(v, term());
            else
                return v;
        }
    }
    V term()
    {
        V v = unary();
        while (true) {
            if (eat('*'))
                v = ops_.mul(v, unary());
            else if (eat('/')) {
                size_t at = pos_;
                V d = unary();
                int line, col;
                location(at, line, col);
                v = ops_.div(v, d, line, col);
            } else
                return v;
        }
    }
    V unary()
    {
        if (eat('-')) return ops_.neg(unary());
        if (eat('+')) return unary();
        return power();
    }
    V power()
    {
        V base = atom();
        if (eat('^')) {
            skip();
            size_t at = pos_;
            bool neg = eat('-');
            skip();
            if (pos_ >= s_.size() || !std::isdigit((unsigned char)s_[pos_])) fail("expected integer exponent");
            long k = 0;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
                k = k * 10 + (s_[pos_++] - '0');
                if (k > 100000) fail_at(at, "exponent too large");
            }
            int line, col;
            location(at, line, col);
            return ops_.pow(base, neg ? -(int)k : (int)k, line, col);
        }
        return base;
    }
    V atom()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            V v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit((unsigned char)c)) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            return ops_.constant(Rational(s_.substr(start, pos_ - start)));
        }
        if (std::isalpha((unsigned char)c)) {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_')) ++pos_;
            int line, col;
            location(start, line, col);
            return ops_.symbol(s_.substr(start, pos_ - start), line, col);
        }
        fail(std::string("unexpected '") + c + "'");
    }
};

template <class V, class Ops>
V parse_expression(const std::string &text, Ops &ops)
{
    return ExprParser<V, Ops>(text, ops).parse();
}

} // namespace fb
