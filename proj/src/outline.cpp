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

#include <filesystem>

#include "qhl/parse.hpp"
#include "qhl/prover.hpp"

namespace qhl {

namespace {

using syntax::Parser;
using syntax::Tok;

std::vector<Justification> parse_by(Parser &p) {
    std::vector<Justification> out;
    if (!p.at_word("by")) {
        return out;
    }
    p.next();
    for (;;) {
        Justification j;
        j.rule = p.expect_ident();
        if (p.at_sym("(")) {
            p.next();
            std::string arg;
            int depth = 0;
            while (!(depth == 0 && p.at_sym(")"))) {
                if (p.at_end()) {
                    p.fail("')'");
                }
                if (depth == 0 && p.at_sym(",")) {
                    p.next();
                    j.args.push_back(arg);
                    arg.clear();
                    continue;
                }
                if (p.at_sym("(")) {
                    depth++;
                } else if (p.at_sym(")")) {
                    depth--;
                }
                arg += p.next().text;
            }
            p.next();
            j.args.push_back(arg);
        }
        out.push_back(j);
        if (!(p.at_sym(",") && p.peek(1).kind == Tok::Ident)) {
            break;
        }
        p.next();
    }
    return out;
}

ComPtr spine(const std::vector<OutlineItem> &items) {
    std::vector<ComPtr> cs;
    for (const auto &it : items) {
        if (it.kind != OutlineItem::Kind::Assert && it.com) {
            cs.push_back(it.com);
        }
    }
    if (cs.empty()) {
        return cx::skip();
    }
    return cx::seq(cs);
}

std::vector<OutlineItem> parse_items(Parser &p, Program &prog) {
    std::vector<OutlineItem> items;
    for (;;) {
        while (p.at_sym(";")) {
            p.next();
        }
        if (p.at_end() || p.at_word("else") || p.at_word("fi") || p.at_word("od") ||
            (p.at_sym("<=") && p.at_sym("{", 1))) {
            return items;
        }
        OutlineItem it;
        it.line = p.peek().line;
        if (p.at_sym("{")) {
            p.next();
            it.kind = OutlineItem::Kind::Assert;
            it.dist = p.dist();
            p.expect_sym("}");
            it.by = parse_by(p);
        } else if (p.at_sym("=>")) {
            p.next();
            it.kind = OutlineItem::Kind::Frame;
            p.expect_sym("{");
            it.local_pre = p.formula();
            p.expect_sym("}");
            it.items = parse_items(p, prog);
            OutlineItem post;
            post.line = p.peek().line;
            p.expect_sym("<=");
            p.expect_sym("{");
            post.dist = p.dist();
            p.expect_sym("}");
            post.by = parse_by(p);
            it.items.push_back(post);
            it.com = spine(it.items);
        } else if (p.at_sym("<=>")) {
            p.next();
            it.kind = OutlineItem::Kind::Frame;
            p.expect_sym("{");
            it.local_pre = p.formula();
            p.expect_sym("}");
            OutlineItem c;
            c.kind = OutlineItem::Kind::Command;
            c.line = p.peek().line;
            c.com = p.command(prog);
            if (!c.com) {
                p.fail("command");
            }
            while (p.at_sym(";")) {
                p.next();
            }
            OutlineItem post;
            post.line = p.peek().line;
            p.expect_sym("{");
            post.dist = p.dist();
            p.expect_sym("}");
            post.by = parse_by(p);
            it.items = {c, post};
            it.com = c.com;
        } else if (p.at_word("if")) {
            p.next();
            it.kind = OutlineItem::Kind::If;
            it.guard = p.pure();
            p.expect_word("then");
            it.items = parse_items(p, prog);
            p.expect_word("else");
            it.else_items = parse_items(p, prog);
            p.expect_word("fi");
            it.com = cx::cond(it.guard, spine(it.items), spine(it.else_items));
        } else if (p.at_word("while")) {
            p.next();
            it.kind = OutlineItem::Kind::While;
            it.guard = p.pure();
            p.expect_word("do");
            it.items = parse_items(p, prog);
            p.expect_word("od");
            it.com = cx::loop(it.guard, spine(it.items));
        } else {
            it.kind = OutlineItem::Kind::Command;
            it.com = p.command(prog);
            if (!it.com) {
                p.fail("assertion, command or frame marker");
            }
        }
        items.push_back(std::move(it));
    }
}

}  // namespace

Outline parse_outline(const std::string &text, const std::string &base_dir) {
    Parser p(syntax::lex(text), base_dir);
    p.strict_weights = false;
    Outline out;
    if (p.at_word("program") && p.peek(1).kind == Tok::String) {
        p.next();
        const std::string file = p.next().text;
        const std::filesystem::path path = std::filesystem::path(base_dir) / file;
        out.program = load_program(path.string());
        out.external_program = true;
        p.declared_qubits = true;
        while (p.at_sym(";")) {
            p.next();
        }
    }
    while (p.declaration(out.program)) {
    }
    out.items = parse_items(p, out.program);
    if (!p.at_end()) {
        p.fail("end of outline");
    }
    if (!out.external_program) {
        out.program.body = spine(out.items);
    }
    return out;
}

Outline load_outline(const std::string &path) {
    return parse_outline(read_file(path), dir_of(path));
}

}  // namespace qhl
