#pragma once

#include <string>
#include <vector>

#include "ssl/diag.hpp"

namespace ssl {

enum class Tok {
    Ident,
    Number,
    KwType,
    KwProc,
    KwOrder,
    KwMain,
    KwMu,
    KwNu,
    KwCaseL,
    KwCaseR,
    KwCloseR,
    KwWaitL,
    KwFwd,
    KwCall,
    KwR,
    KwL,
    MuUnfold, // mu_<name>, name in text
    NuUnfold, // nu_<name>
    Plus,
    Amp,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Semi,
    Dot,
    Bar,
    Turnstile, // |-
    Arrow,     // <-
    FatArrow,  // =>
    Less,
    Tilde,
    Equal,
    Eof,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text; // identifier/unfold name
    long number = 0;  // Number
    Span span;
};

const char* tok_name(Tok t);

struct LexResultT {
    std::vector<Token> tokens; // always ends with Eof
    Diags errors;
};

LexResultT lex(const std::string& source);

} // namespace ssl
