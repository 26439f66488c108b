//! Token-level lexers for C, C++ and Java.
//!
//! Whitespace and comments are dropped. Preprocessor directives are not
//! special-cased: a line such as `#include <stdio.h>` lexes into ordinary
//! punctuator and identifier tokens, so directives stay in the stream.

use serde::{Deserialize, Serialize};

use crate::model::Language;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub tokens: Vec<String>,
    pub language: Language,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

// Longest first within each length class; matched by maximal munch.
const C_PUNCT: &[&str] = &[
    "%:%:", "<<=", ">>=", "...", "->*", "<=>", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "*=", "/=", "%=", "+=", "-=", "&=", "^=", "|=", "##", "::", ".*", "<:", ":>", "<%",
    "%>", "%:",
];

const JAVA_PUNCT: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "*=", "/=", "%=", "+=", "-=", "&=", "^=", "|=",
];

/// Splits `content` into tokens. Undecodable bytes are replaced with U+FFFD.
pub fn tokenize(content: &[u8], language: Language) -> TokenStream {
    let text = String::from_utf8_lossy(content);
    let chars: Vec<char> = text.chars().collect();
    let tokens = Lexer {
        chars: &chars,
        pos: 0,
        language,
    }
    .run();
    TokenStream { tokens, language }
}

struct Lexer<'a> {
    chars: &'a [char],
    pos: usize,
    language: Language,
}

impl Lexer<'_> {
    fn peek(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    fn slice(&self, start: usize) -> String {
        self.chars[start..self.pos].iter().collect()
    }

    fn run(mut self) -> Vec<String> {
        let mut tokens = Vec::new();
        while let Some(c) = self.peek(0) {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '\\' && matches!(self.peek(1), Some('\n') | Some('\r')) {
                // line splice
                self.pos += 2;
            } else if self.starts_with("//") {
                self.skip_line_comment();
            } else if self.starts_with("/*") {
                self.skip_block_comment();
            } else if let Some(tok) = self.raw_string() {
                tokens.push(tok);
            } else if let Some(tok) = self.text_block() {
                tokens.push(tok);
            } else if c == '"' || c == '\'' {
                let start = self.pos;
                self.quoted(c);
                tokens.push(self.slice(start));
            } else if is_ident_start(c) {
                let start = self.pos;
                self.pos += 1;
                while self.peek(0).is_some_and(|c| is_ident_continue(c)) {
                    self.pos += 1;
                }
                // Encoding prefixes glue onto the literal that follows.
                if let Some(q @ ('"' | '\'')) = self.peek(0) {
                    if self.language != Language::Java && is_encoding_prefix(&self.slice(start)) {
                        self.quoted(q);
                    }
                }
                tokens.push(self.slice(start));
            } else if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) {
                let start = self.pos;
                self.number();
                tokens.push(self.slice(start));
            } else {
                tokens.push(self.punctuator());
            }
        }
        tokens
    }

    fn skip_line_comment(&mut self) {
        while let Some(c) = self.peek(0) {
            if c == '\n' {
                // A spliced newline continues the comment in C/C++.
                let spliced = self.language != Language::Java
                    && self.pos > 0
                    && self.chars[self.pos - 1] == '\\';
                if !spliced {
                    break;
                }
            }
            self.pos += 1;
        }
    }

    fn skip_block_comment(&mut self) {
        self.pos += 2;
        while self.peek(0).is_some() {
            if self.starts_with("*/") {
                self.pos += 2;
                return;
            }
            self.pos += 1;
        }
    }

    /// Consumes a string or character literal opened by `quote`. Unterminated
    /// literals end at the line break.
    fn quoted(&mut self, quote: char) {
        self.pos += 1;
        while let Some(c) = self.peek(0) {
            match c {
                '\\' => self.pos += 2,
                '\n' => return,
                _ if c == quote => {
                    self.pos += 1;
                    return;
                }
                _ => self.pos += 1,
            }
        }
        self.pos = self.pos.min(self.chars.len());
    }

    /// C++11 raw string: `R"delim( ... )delim"` with optional encoding prefix.
    fn raw_string(&mut self) -> Option<String> {
        if self.language != Language::Cpp {
            return None;
        }
        let prefix_len = ["u8R\"", "uR\"", "UR\"", "LR\"", "R\""]
            .iter()
            .find(|p| self.starts_with(p))?
            .len();
        if self.pos > 0 && is_ident_continue(self.chars[self.pos - 1]) {
            return None;
        }
        let start = self.pos;
        let mut i = self.pos + prefix_len;
        let mut delim = String::new();
        while let Some(&c) = self.chars.get(i) {
            if c == '(' {
                break;
            }
            if c.is_whitespace() || c == ')' || c == '\\' || delim.len() > 16 {
                return None;
            }
            delim.push(c);
            i += 1;
        }
        if self.chars.get(i) != Some(&'(') {
            return None;
        }
        let close: Vec<char> = format!("){delim}\"").chars().collect();
        i += 1;
        while i < self.chars.len() {
            if self.chars[i..].starts_with(&close) {
                i += close.len();
                self.pos = i;
                return Some(self.slice(start));
            }
            i += 1;
        }
        self.pos = self.chars.len();
        Some(self.slice(start))
    }

    /// Java text block `"""..."""`.
    fn text_block(&mut self) -> Option<String> {
        if self.language != Language::Java || !self.starts_with("\"\"\"") {
            return None;
        }
        let start = self.pos;
        self.pos += 3;
        while self.peek(0).is_some() {
            if self.peek(0) == Some('\\') {
                self.pos += 2;
                continue;
            }
            if self.starts_with("\"\"\"") {
                self.pos += 3;
                return Some(self.slice(start));
            }
            self.pos += 1;
        }
        self.pos = self.chars.len();
        Some(self.slice(start))
    }

    /// pp-number style: digits, letters, `_`, `.`, digit separators and signed
    /// exponents.
    fn number(&mut self) {
        let start = self.pos;
        let hex = self.starts_with("0x") || self.starts_with("0X");
        self.pos += 1;
        while let Some(c) = self.peek(0) {
            let prev = self.chars[self.pos - 1];
            let exponent_sign = matches!(c, '+' | '-')
                && (matches!(prev, 'p' | 'P') || (!hex && matches!(prev, 'e' | 'E')));
            let separator = c == '\''
                && self.language != Language::Java
                && self.pos > start
                && self.peek(1).is_some_and(|d| d.is_ascii_alphanumeric());
            if exponent_sign || separator || c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn punctuator(&mut self) -> String {
        let table = match self.language {
            Language::Java => JAVA_PUNCT,
            Language::C | Language::Cpp => C_PUNCT,
        };
        let best = table
            .iter()
            .filter(|p| self.starts_with(p))
            .max_by_key(|p| p.len());
        match best {
            Some(p) => {
                self.pos += p.chars().count();
                (*p).to_owned()
            }
            None => {
                self.pos += 1;
                self.chars[self.pos - 1].to_string()
            }
        }
    }
}

// `$` is legal in Java and accepted by common C/C++ compilers.
fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    is_ident_start(c) || c.is_numeric()
}

fn is_encoding_prefix(s: &str) -> bool {
    matches!(s, "L" | "u" | "U" | "u8")
}
