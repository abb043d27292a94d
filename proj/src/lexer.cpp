// Copyright 2026 The qhl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <fstream>
#include <sstream>

#include "qhl/parse.hpp"

namespace qhl {

ParseError::ParseError(const std::string &msg, int line, int col)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line(line), col(col) {
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dir_of(const std::string &path) {
    const size_t k = path.find_last_of('/');
    return k == std::string::npos ? "." : path.substr(0, k == 0 ? 1 : k);
}

namespace syntax {

namespace {

bool ident_start(char c) {
    return std::isalpha((unsigned char)c);
}

bool ident_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_';
}

class Lexer {
   public:
    explicit Lexer(const std::string &s) : s_(s) {
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            if (i_ >= s_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = s_[i_];
            if (ident_start(c)) {
                size_t j = i_;
                while (j < s_.size() && ident_char(s_[j])) {
                    j++;
                }
                while (j < s_.size() && s_[j] == '\'') {
                    j++;
                }
                t.kind = Tok::Ident;
                t.text = take(j);
            } else if (std::isdigit((unsigned char)c)) {
                number(t);
            } else if (c == '"') {
                size_t j = i_ + 1;
                while (j < s_.size() && s_[j] != '"' && s_[j] != '\n') {
                    j++;
                }
                if (j >= s_.size() || s_[j] != '"') {
                    throw ParseError("unterminated string", t.line, t.col);
                }
                t.kind = Tok::String;
                t.text = s_.substr(i_ + 1, j - i_ - 1);
                take(j + 1);
            } else if (c == '|' && ket_end() != 0) {
                const size_t j = ket_end();
                t.kind = Tok::Ket;
                t.text = s_.substr(i_ + 1, j - i_ - 2);
                take(j);
            } else if (c == '<' && bra_end() != 0) {
                const size_t j = bra_end();
                t.kind = Tok::Bra;
                t.text = s_.substr(i_ + 1, j - i_ - 2);
                take(j);
            } else {
                symbol(t);
            }
            out.push_back(t);
            // A subscript must touch the ket or closing parenthesis it annotates.
            if ((t.kind == Tok::Ket || (t.kind == Tok::Sym && t.text == ")")) && i_ < s_.size() && s_[i_] == '_') {
                out.push_back(subscript());
            }
        }
    }

   private:
    void skip_space() {
        while (i_ < s_.size()) {
            const char c = s_[i_];
            if (c == '#') {
                while (i_ < s_.size() && s_[i_] != '\n') {
                    advance();
                }
            } else if (std::isspace((unsigned char)c)) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (s_[i_] == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        i_++;
    }

    std::string take(size_t end) {
        std::string r = s_.substr(i_, end - i_);
        while (i_ < end) {
            advance();
        }
        return r;
    }

    /// End offset of a ket |[01+-]+> starting at i_, or 0.
    size_t ket_end() const {
        size_t j = i_ + 1;
        while (j < s_.size() && (s_[j] == '0' || s_[j] == '1' || s_[j] == '+' || s_[j] == '-')) {
            j++;
        }
        if (j == i_ + 1 || j >= s_.size() || s_[j] != '>') {
            return 0;
        }
        return j + 1;
    }

    size_t bra_end() const {
        size_t j = i_ + 1;
        while (j < s_.size() && (s_[j] == '0' || s_[j] == '1')) {
            j++;
        }
        if (j == i_ + 1 || j >= s_.size() || s_[j] != '|') {
            return 0;
        }
        return j + 1;
    }

    void number(Token &t) {
        size_t j = i_;
        bool real = false;
        while (j < s_.size() && std::isdigit((unsigned char)s_[j])) {
            j++;
        }
        if (j + 1 < s_.size() && s_[j] == '.' && std::isdigit((unsigned char)s_[j + 1])) {
            real = true;
            j++;
            while (j < s_.size() && std::isdigit((unsigned char)s_[j])) {
                j++;
            }
        }
        if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
            size_t k = j + 1;
            if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) {
                k++;
            }
            if (k < s_.size() && std::isdigit((unsigned char)s_[k])) {
                real = true;
                j = k;
                while (j < s_.size() && std::isdigit((unsigned char)s_[j])) {
                    j++;
                }
            }
        }
        t.kind = Tok::Num;
        if (j < s_.size() && s_[j] == 'j' && (j + 1 >= s_.size() || !ident_char(s_[j + 1]))) {
            t.kind = Tok::Imag;
            t.text = take(j);
            take(j + 1);
            return;
        }
        (void)real;
        t.text = take(j);
    }

    void symbol(Token &t) {
        static const char *syms[] = {"<=>", "(.)", "(+)", ":=", "/=", "<=", ">=", "/\\", "\\/", "->", "=>", ";",
                                     ",",   "(",   ")",   "[",  "]",  "{",  "}",  "+",   "-",   "*",  "/",  "=",
                                     "<",   ">",   "|",   "~",  ".",  "^"};
        for (const char *s : syms) {
            const std::string sym(s);
            if (s_.compare(i_, sym.size(), sym) == 0) {
                t.kind = Tok::Sym;
                t.text = take(i_ + sym.size());
                return;
            }
        }
        throw ParseError(std::string("unexpected character '") + s_[i_] + "'", line_, col_);
    }

    Token subscript() {
        Token t;
        t.kind = Tok::Sub;
        t.line = line_;
        t.col = col_;
        advance();  // '_'
        if (i_ < s_.size() && s_[i_] == '{') {
            advance();
            for (;;) {
                while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == ',')) {
                    advance();
                }
                if (i_ >= s_.size()) {
                    throw ParseError("unterminated subscript", t.line, t.col);
                }
                if (s_[i_] == '}') {
                    advance();
                    break;
                }
                if (!ident_start(s_[i_])) {
                    throw ParseError("expected qubit name in subscript", line_, col_);
                }
                size_t j = i_;
                while (j < s_.size() && ident_char(s_[j])) {
                    j++;
                }
                while (j < s_.size() && s_[j] == '\'') {
                    j++;
                }
                t.names.push_back(take(j));
            }
        } else if (i_ < s_.size() && ident_start(s_[i_])) {
            size_t j = i_;
            while (j < s_.size() && ident_char(s_[j])) {
                j++;
            }
            while (j < s_.size() && s_[j] == '\'') {
                j++;
            }
            t.names.push_back(take(j));
        } else {
            throw ParseError("expected subscript after '_'", t.line, t.col);
        }
        if (t.names.empty()) {
            throw ParseError("empty subscript", t.line, t.col);
        }
        return t;
    }

    const std::string &s_;
    size_t i_ = 0;
    int line_ = 1, col_ = 1;
};

}  // namespace

std::vector<Token> lex(const std::string &text) {
    return Lexer(text).run();
}

}  // namespace syntax

}  // namespace qhl
