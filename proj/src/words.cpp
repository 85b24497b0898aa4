#include "torpair/words.hpp"

#include <cctype>

#include "torpair/errors.hpp"

namespace torpair {

namespace {

struct Lexer {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    char take() {
        skip_ws();
        return s[pos++];
    }
    std::string ident() {
        skip_ws();
        const size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (pos == start) throw ConfigError("word parse: identifier expected at '" + s + "'");
        return s.substr(start, pos - start);
    }
    long integer() {
        skip_ws();
        const size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ConfigError("word parse: integer expected");
        return std::stol(s.substr(start, pos - start));
    }
};

GradedElement power(const GradedElement& a, long n) {
    const GradedElement base = (n < 0) ? a.adjoint() : a;
    GradedElement acc = a.model()->unit();
    for (long i = 0; i < std::labs(n); ++i) acc = acc * base;
    return acc;
}

GradedElement factor(Lexer& lx, const ModelPtr& model) {
    const std::string name = lx.ident();
    GradedElement a = (name == "1") ? model->unit() : model->generator(name);
    while (!lx.eof()) {
        const char c = lx.peek();
        if (c == '\'') {
            lx.take();
            a = a.adjoint();
        } else if (c == '^') {
            lx.take();
            a = power(a, lx.integer());
        } else {
            break;
        }
    }
    return a;
}

}  // namespace

GradedElement parse_word(const ModelPtr& model, const std::string& src) {
    Lexer lx{src};
    GradedElement acc = factor(lx, model);
    while (!lx.eof()) {
        if (lx.peek() != '*')
            throw ConfigError("word parse: expected '*' between factors in '" + src + "'");
        lx.take();
        acc = acc * factor(lx, model);
    }
    return acc;
}

}  // namespace torpair
