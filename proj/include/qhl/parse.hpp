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

#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhl/ast.hpp"

namespace qhl {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string &msg, int line, int col);
};

/// Programs and assertions. Relative gate files resolve against base_dir.
Program parse_program(const std::string &text, const std::string &base_dir = ".");
Program load_program(const std::string &path);
Dist parse_dist(const std::string &text);
FormulaPtr parse_formula(const std::string &text);
PurePtr parse_pure(const std::string &text);
AexpPtr parse_aexp(const std::string &text);
std::string read_file(const std::string &path);
std::string dir_of(const std::string &path);

namespace syntax {

enum class Tok { End, Ident, Num, Imag, Ket, Bra, String, Sub, Sym };

struct Token {
    Tok kind;
    std::string text;
    int line = 0, col = 0;
    /// Qubit names of a subscript token.
    std::vector<std::string> names;
};

std::vector<Token> lex(const std::string &text);

/// Recursive-descent parser with explicit backtracking via mark/reset.
class Parser {
   public:
    Parser(std::vector<Token> toks, std::string base_dir = ".");

    const Token &peek(size_t ahead = 0) const;
    bool at_sym(const std::string &s, size_t ahead = 0) const;
    bool at_word(const std::string &w, size_t ahead = 0) const;
    bool at_end() const {
        return peek().kind == Tok::End;
    }
    const Token &next();
    void expect_sym(const std::string &s);
    void expect_word(const std::string &w);
    std::string expect_ident();
    int64_t expect_int();
    [[noreturn]] void fail(const std::string &what) const;
    size_t mark() const {
        return pos_;
    }
    void reset(size_t m) {
        pos_ = m;
    }

    AexpPtr aexp();
    FormulaPtr formula();
    PurePtr pure();
    Dist dist();
    Rational weight();
    bool at_weight() const;

    /// True when the next tokens begin a declaration; parses it and an optional trailing ';' into prog.
    bool declaration(Program &prog);
    bool declaration_item(Program &prog);
    /// Commands separated by ';' up to a closing keyword or the end.
    ComPtr commands(Program &prog);
    /// A single command, or nullptr when the next token cannot start one.
    ComPtr command(Program &prog);
    /// Records first appearance of qubits when nothing was declared.
    void note_qubits(Program &prog, const std::vector<std::string> &qs);
    bool declared_qubits = false;
    /// Reject weighted sums whose weights do not add up to 1. Proof outlines defer this to the checker.
    bool strict_weights = true;

   private:
    AexpPtr sum();
    AexpPtr term();
    AexpPtr unary();
    AexpPtr atom();
    FormulaPtr f_imp();
    FormulaPtr f_or();
    FormulaPtr f_and();
    FormulaPtr f_unary();
    FormulaPtr f_postfix(FormulaPtr f);
    FormulaPtr f_atom();
    bool try_ket(Ket &out);
    bool try_ket_factor(KetFactor &out);
    cplx amp_sum();
    cplx amp_prod();
    cplx amp_unary();
    cplx amp_atom();
    std::vector<std::string> qubit_list();
    std::vector<AexpPtr> arg_list();
    MatrixXc op_sum(int arity);
    cplx matrix_entry();
    bool is_keyword(const std::string &w) const;

    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::string base_dir_;
};

}  // namespace syntax

}  // namespace qhl
