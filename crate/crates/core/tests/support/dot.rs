//! Recursive-descent checker for the Graphviz DOT language grammar.

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let b: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && b.get(i + 1) == Some(&'/') || c == '#' {
            while i < b.len() && b[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && b.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < b.len() && !(b[i] == '*' && b[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= b.len() {
                return Err("unterminated comment".into());
            }
            i += 2;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match b.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if i + 1 < b.len() => {
                        s.push(b[i + 1]);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_alphanumeric() || b[i] == '_') {
                i += 1;
            }
            out.push(Tok::Id(b[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '.' || (c == '-' && b.get(i + 1).is_some_and(|n| n.is_ascii_digit() || *n == '.')) {
            let start = i;
            i += 1;
            let mut dot = c == '.';
            while i < b.len() && (b[i].is_ascii_digit() || (b[i] == '.' && !dot)) {
                dot |= b[i] == '.';
                i += 1;
            }
            out.push(Tok::Id(b[start..i].iter().collect()));
        } else if c == '-' && matches!(b.get(i + 1), Some('>') | Some('-')) {
            out.push(Tok::Sym(if b[i + 1] == '>' { "->" } else { "--" }));
            i += 2;
        } else {
            let sym = match c {
                '{' => "{",
                '}' => "}",
                '[' => "[",
                ']' => "]",
                ';' => ";",
                ',' => ",",
                '=' => "=",
                ':' => ":",
                other => return Err(format!("unexpected character {other:?}")),
            };
            out.push(Tok::Sym(sym));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    directed: bool,
}

fn keyword(t: &Tok, k: &str) -> bool {
    matches!(t, Tok::Id(s) if s.eq_ignore_ascii_case(k))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, sym: &'static str) -> bool {
        if self.peek() == Some(&Tok::Sym(sym)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &'static str) -> Result<(), String> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(format!("expected {sym} at token {}: {:?}", self.pos, self.peek()))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!("expected ID at token {}: {other:?}", self.pos)),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| keyword(t, "strict")) {
            self.pos += 1;
        }
        match self.peek() {
            Some(t) if keyword(t, "digraph") => self.directed = true,
            Some(t) if keyword(t, "graph") => self.directed = false,
            other => return Err(format!("expected graph or digraph, got {other:?}")),
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect("{")?;
        self.stmt_list()?;
        self.expect("}")?;
        if self.pos != self.toks.len() {
            return Err("trailing tokens after graph".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Sym("}")) | None) {
            self.stmt()?;
            self.eat(";");
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        let t = self.peek().cloned().ok_or("unexpected end")?;
        if ["graph", "node", "edge"].iter().any(|k| keyword(&t, k)) {
            self.pos += 1;
            return self.attr_list(true);
        }
        if matches!(self.toks.get(self.pos + 1), Some(Tok::Sym("="))) {
            self.id()?;
            self.expect("=")?;
            self.id()?;
            return Ok(());
        }
        self.endpoint()?;
        while matches!(self.peek(), Some(Tok::Sym("->")) | Some(Tok::Sym("--"))) {
            let op = self.peek().cloned().unwrap();
            if op != Tok::Sym(if self.directed { "->" } else { "--" }) {
                return Err("edge operator does not match graph type".into());
            }
            self.pos += 1;
            self.endpoint()?;
        }
        self.attr_list(false)
    }

    fn endpoint(&mut self) -> Result<(), String> {
        let t = self.peek().cloned().ok_or("unexpected end")?;
        if keyword(&t, "subgraph") || t == Tok::Sym("{") {
            return self.subgraph();
        }
        self.id()?;
        if self.eat(":") {
            self.id()?;
            if self.eat(":") {
                self.id()?;
            }
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| keyword(t, "subgraph")) {
            self.pos += 1;
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.pos += 1;
            }
        }
        self.expect("{")?;
        self.stmt_list()?;
        self.expect("}")
    }

    fn attr_list(&mut self, required: bool) -> Result<(), String> {
        if required && self.peek() != Some(&Tok::Sym("[")) {
            return Err("attribute statement needs a list".into());
        }
        while self.eat("[") {
            while !self.eat("]") {
                self.id()?;
                self.expect("=")?;
                self.id()?;
                if !self.eat(",") {
                    self.eat(";");
                }
            }
        }
        Ok(())
    }
}

/// Ok when `src` is a single well-formed DOT graph.
pub fn check(src: &str) -> Result<(), String> {
    let toks = lex(src)?;
    Parser {
        toks,
        pos: 0,
        directed: false,
    }
    .graph()
}
