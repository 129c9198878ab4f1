#include "nc/parse.hpp"

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "nc/error.hpp"

namespace nc {

namespace {

enum class Tok {
    Number, Ident, Plus, Minus, Star, LParen, RParen, LBracket, RBracket, Comma, End
};

struct Token {
    Tok type;
    double num = 0.0;
    bool imag = false;       // number carried an 'i' suffix
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }
    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && is_space(src_[pos_])) bump();
        cur_ = Token{};
        cur_.line = line_;
        cur_.col = col_;
        if (pos_ >= src_.size()) {
            cur_.type = Tok::End;
            return;
        }
        const char c = src_[pos_];
        switch (c) {
            case '+': cur_.type = Tok::Plus; bump(); return;
            case '-': cur_.type = Tok::Minus; bump(); return;
            case '*': cur_.type = Tok::Star; bump(); return;
            case '(': cur_.type = Tok::LParen; bump(); return;
            case ')': cur_.type = Tok::RParen; bump(); return;
            case '[': cur_.type = Tok::LBracket; bump(); return;
            case ']': cur_.type = Tok::RBracket; bump(); return;
            case ',': cur_.type = Tok::Comma; bump(); return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            lex_ident();
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    void lex_number() {
        const size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            bump();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t save = pos_;
            int save_col = col_;
            bump();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) bump();
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            } else {
                pos_ = save;  // 'e' was not an exponent
                col_ = save_col;
            }
        }
        const std::string body(src_.substr(start, pos_ - start));
        if (body == ".") throw ParseError("malformed number", cur_.line, cur_.col);
        cur_.type = Tok::Number;
        cur_.num = std::strtod(body.c_str(), nullptr);
        // 'i' suffix only when not the start of an identifier like "inv"
        if (pos_ < src_.size() && src_[pos_] == 'i' &&
            (pos_ + 1 >= src_.size() ||
             !std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
            cur_.imag = true;
            bump();
        }
    }

    void lex_ident() {
        const size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) bump();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
        cur_.type = Tok::Ident;
        cur_.text = std::string(src_.substr(start, pos_ - start));
    }

    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token cur_;
};

class Parser {
public:
    Parser(std::string_view src, int nvars) : lex_(src), nvars_(nvars) {}

    ExprPtr run() {
        ExprPtr e = expression();
        const Token& t = lex_.peek();
        if (t.type != Tok::End)
            throw ParseError("unexpected trailing input", t.line, t.col);
        return e;
    }

private:
    ExprPtr expression() {
        std::vector<ExprPtr> terms;
        terms.push_back(term());
        while (true) {
            const Tok t = lex_.peek().type;
            if (t == Tok::Plus) {
                lex_.take();
                terms.push_back(term());
            } else if (t == Tok::Minus) {
                lex_.take();
                terms.push_back(ExprNode::neg(term()));
            } else {
                break;
            }
        }
        return terms.size() == 1 ? terms[0] : ExprNode::sum(std::move(terms));
    }

    ExprPtr term() {
        std::vector<ExprPtr> factors;
        factors.push_back(factor());
        while (lex_.peek().type == Tok::Star) {
            lex_.take();
            factors.push_back(factor());
        }
        return factors.size() == 1 ? factors[0] : ExprNode::prod(std::move(factors));
    }

    ExprPtr factor() {
        if (lex_.peek().type == Tok::Minus) {
            lex_.take();
            return ExprNode::neg(factor());
        }
        return atom();
    }

    ExprPtr atom() {
        Token t = lex_.take();
        switch (t.type) {
            case Tok::Number:
                return ExprNode::constant(t.imag ? Complex(0.0, t.num) : Complex(t.num, 0.0));
            case Tok::LParen: {
                ExprPtr e = expression();
                expect(Tok::RParen, ")");
                return e;
            }
            case Tok::LBracket:
                return matrix(t);
            case Tok::Ident:
                return ident(t);
            default:
                throw ParseError("expected a value", t.line, t.col);
        }
    }

    ExprPtr ident(const Token& t) {
        if (t.text == "i") return ExprNode::constant(Complex(0.0, 1.0));
        if (t.text == "inv" || t.text == "exp") {
            expect(Tok::LParen, "(");
            ExprPtr arg = expression();
            expect(Tok::RParen, ")");
            return t.text == "inv" ? ExprNode::inv(std::move(arg))
                                   : ExprNode::exp(std::move(arg));
        }
        if (t.text.size() > 1 && t.text[0] == 'x' &&
            t.text.find_first_not_of("0123456789", 1) == std::string::npos) {
            const long idx = std::strtol(t.text.c_str() + 1, nullptr, 10);
            if (idx < 1 || idx > nvars_)
                throw ParseError("variable index out of range: " + t.text +
                                     " (d=" + std::to_string(nvars_) + ")",
                                 t.line, t.col);
            return ExprNode::var(static_cast<int>(idx));
        }
        throw ParseError("unknown identifier '" + t.text + "'", t.line, t.col);
    }

    ExprPtr matrix(const Token& open) {
        std::vector<std::vector<ExprPtr>> rows;
        rows.push_back(row());
        while (lex_.peek().type == Tok::Comma) {
            lex_.take();
            rows.push_back(row());
        }
        expect(Tok::RBracket, "]");
        const size_t cols = rows[0].size();
        for (const auto& r : rows)
            if (r.size() != cols)
                throw ParseError("ragged matricial literal", open.line, open.col);
        std::vector<ExprPtr> entries;
        entries.reserve(rows.size() * cols);
        for (auto& r : rows)
            for (auto& e : r) entries.push_back(std::move(e));
        return ExprNode::mat(static_cast<int>(rows.size()), static_cast<int>(cols),
                             std::move(entries));
    }

    std::vector<ExprPtr> row() {
        expect(Tok::LBracket, "[");
        std::vector<ExprPtr> entries;
        entries.push_back(expression());
        while (lex_.peek().type == Tok::Comma) {
            lex_.take();
            entries.push_back(expression());
        }
        expect(Tok::RBracket, "]");
        return entries;
    }

    void expect(Tok type, const char* what) {
        const Token t = lex_.take();
        if (t.type != type)
            throw ParseError(std::string("expected '") + what + "'", t.line, t.col);
    }

    Lexer lex_;
    int nvars_;
};

}  // namespace

NcExpr parse(std::string_view text, int nvars) {
    if (text.empty()) throw ParseError("empty expression", 1, 1);
    if (nvars < 1) throw ValidationError("parse: variable count must be >= 1");
    Parser p(text, nvars);
    return NcExpr{p.run(), nvars};
}

}  // namespace nc
