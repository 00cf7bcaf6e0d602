#include "altproj/poly_text.hpp"

#include <algorithm>
#include <cctype>

namespace altproj {

std::vector<std::string> default_var_names(std::size_t nvars) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= nvars; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& names) : text_(text), names_(names) {}

    MultiPoly parse() {
        MultiPoly p = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + msg + " in \"" +
                         std::string(text_) + "\"");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    MultiPoly expr() {
        MultiPoly acc = term();
        while (true) {
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    MultiPoly term() {
        MultiPoly acc = unary();
        while (true) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                MultiPoly d = unary();
                if (d.degree() != 0 || d.is_zero()) fail("division only by a nonzero constant");
                acc *= Rational(1) / d.terms().begin()->second;
            } else {
                return acc;
            }
        }
    }

    MultiPoly unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    MultiPoly power() {
        MultiPoly base = atom();
        if (accept('^')) {
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) fail("expected a nonnegative integer exponent");
            const auto e = std::stoul(std::string(text_.substr(start, pos_ - start)));
            return base.pow(static_cast<unsigned>(e));
        }
        return base;
    }

    MultiPoly atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            MultiPoly inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return variable();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    MultiPoly number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
        // Scientific suffix only when followed by digits.
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < text_.size() && (text_[q] == '-' || text_[q] == '+')) ++q;
            if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
                pos_ = q;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        try {
            return MultiPoly::constant(names_.size(), parse_rational(text_.substr(start, pos_ - start)));
        } catch (const ParseError& e) {
            fail(e.what());
        }
    }

    MultiPoly variable() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) {
            pos_ = start;
            fail("unknown variable '" + std::string(name) + "'");
        }
        return MultiPoly::variable(names_.size(), static_cast<std::size_t>(it - names_.begin()));
    }

    std::string_view text_;
    const std::vector<std::string>& names_;
    std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text, const std::vector<std::string>& var_names) {
    if (var_names.empty()) throw ParseError("no variables declared");
    return Parser(text, var_names).parse();
}

std::string format_poly(const MultiPoly& p, const std::vector<std::string>& var_names) {
    if (var_names.size() != p.nvars()) throw DimensionError("format_poly: variable name count mismatch");
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        const bool negative = c < 0;
        const Rational mag = negative ? Rational(-c) : c;
        if (first) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        std::string mono;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += var_names[i];
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty()) {
            out += format_rational(mag);
        } else if (mag == 1) {
            out += mono;
        } else {
            out += format_rational(mag) + "*" + mono;
        }
    }
    return out;
}

}  // namespace altproj
