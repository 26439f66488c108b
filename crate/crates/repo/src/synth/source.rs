//! Random but syntactically plausible C, C++ and Java sources, and
//! token-level mutations of them.
//!
//! Generated files put single spaces between tokens and one statement per
//! line, which keeps mutations simple: statement lines are the only lines
//! ever edited, inserted or removed.

use rand::seq::SliceRandom;
use rand::Rng;
use scmap_core::Language;
use serde::{Deserialize, Serialize};

const KEYWORDS: &[&str] = &[
    "int", "if", "for", "return", "static", "public", "class", "namespace", "void", "long", "final",
];

fn word<R: Rng>(rng: &mut R) -> String {
    const CONSONANTS: &[u8] = b"bcdfghjklmnprstvwxz";
    const VOWELS: &[u8] = b"aeiou";
    let syllables = rng.gen_range(2..=4);
    let mut s = String::with_capacity(syllables * 2 + 2);
    for _ in 0..syllables {
        s.push(*CONSONANTS.choose(rng).unwrap() as char);
        s.push(*VOWELS.choose(rng).unwrap() as char);
    }
    if rng.gen_bool(0.5) {
        s.push(*CONSONANTS.choose(rng).unwrap() as char);
    }
    s
}

/// A fresh identifier that is never a keyword.
pub fn identifier<R: Rng>(rng: &mut R) -> String {
    loop {
        let w = word(rng);
        if !KEYWORDS.contains(&w.as_str()) {
            return w;
        }
    }
}

fn statement<R: Rng>(rng: &mut R, locals: &[String], callees: &[String]) -> String {
    let mut v = || locals.choose(rng).unwrap().clone();
    let (a, b, c) = (v(), v(), v());
    let f = callees.choose(rng).unwrap();
    let n: u32 = rng.gen_range(0..1000);
    match rng.gen_range(0..6) {
        0 => format!("{a} = {b} + {n} ;"),
        1 => format!("if ( {a} > {n} ) {{ {a} = {f} ( {b} , {c} ) ; }}"),
        2 => format!("{a} = {b} ^ ( {c} << {} ) ;", n % 16),
        3 => format!("for ( int i = 0 ; i < {n} ; i ++ ) {{ {a} += {b} * i ; }}"),
        4 => format!("{a} = {f} ( {b} , {n} ) ;"),
        _ => format!("{a} -= {c} % {} ;", n + 1),
    }
}

fn function_lines<R: Rng>(rng: &mut R, language: Language, name: &str, statements: usize, callees: &[String], indent: &str) -> Vec<String> {
    let params = [identifier(rng), identifier(rng)];
    let mut locals: Vec<String> = params.to_vec();
    locals.extend((0..3).map(|_| identifier(rng)));
    let head = match language {
        Language::Java => format!("{indent}public static int {name} ( int {} , int {} ) {{", params[0], params[1]),
        Language::Cpp => format!("{indent}int {name} ( int {} , int {} ) {{", params[0], params[1]),
        Language::C => format!("{indent}static int {name} ( int {} , int {} ) {{", params[0], params[1]),
    };
    let mut lines = vec![head];
    for l in &locals[2..] {
        lines.push(format!("{indent}    int {l} = {} ;", rng.gen_range(0..100)));
    }
    for _ in 0..statements {
        lines.push(format!("{indent}    {}", statement(rng, &locals, callees)));
    }
    lines.push(format!("{indent}    return {} ;", locals[2]));
    lines.push(format!("{indent}}}"));
    lines
}

/// A random compilation unit with about `statements` statements.
pub fn random_source<R: Rng>(rng: &mut R, language: Language, statements: usize) -> String {
    let n_functions = (statements / 8).max(1);
    let names: Vec<String> = (0..n_functions).map(|_| identifier(rng)).collect();
    let mut callees = names.clone();
    callees.extend((0..3).map(|_| identifier(rng)));
    let per_function = (statements / n_functions).max(1);

    let mut lines = Vec::new();
    let indent = match language {
        Language::C => {
            lines.push(format!("#include \"{}.h\"", identifier(rng)));
            ""
        }
        Language::Cpp => {
            lines.push(format!("#include \"{}.hpp\"", identifier(rng)));
            lines.push(format!("namespace {} {{", identifier(rng)));
            "    "
        }
        Language::Java => {
            lines.push(format!("package {} ;", identifier(rng)));
            lines.push(format!("public class {} {{", identifier(rng)));
            "    "
        }
    };
    for name in &names {
        lines.extend(function_lines(rng, language, name, per_function, &callees, indent));
    }
    if language != Language::C {
        lines.push("}".into());
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    /// Replace identifiers and numbers in statements.
    #[default]
    Substitute,
    /// Add new statement lines.
    Insert,
    /// Remove statement lines.
    Delete,
    /// A third of the rate for each of the above.
    Mixed,
}

fn is_statement(line: &str) -> bool {
    let t = line.trim_start();
    let indent = line.len() - t.len();
    indent >= 4 && !t.starts_with("int ") && !t.starts_with("return ") && t != "}" && !t.ends_with('{')
}

fn is_word(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_alphanumeric()) && !KEYWORDS.contains(&token) && token != "i"
}

/// Applies `kind` at `rate`: the expected fraction of statement tokens
/// replaced, or of statement lines inserted or removed.
pub fn mutate<R: Rng>(rng: &mut R, text: &str, kind: MutationKind, rate: f64) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    match kind {
        MutationKind::Substitute => substitute(rng, &mut lines, rate),
        MutationKind::Insert => insert(rng, &mut lines, rate),
        MutationKind::Delete => delete(rng, &mut lines, rate),
        MutationKind::Mixed => {
            substitute(rng, &mut lines, rate / 3.0);
            insert(rng, &mut lines, rate / 3.0);
            delete(rng, &mut lines, rate / 3.0);
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn substitute<R: Rng>(rng: &mut R, lines: &mut [String], rate: f64) {
    for line in lines.iter_mut().filter(|l| is_statement(l)) {
        let indent = line.len() - line.trim_start().len();
        let tokens: Vec<String> = line
            .split_whitespace()
            .map(|t| {
                if is_word(t) && rng.gen_bool(rate.clamp(0.0, 1.0)) {
                    if t.starts_with(|c: char| c.is_ascii_digit()) {
                        rng.gen_range(0..1000u32).to_string()
                    } else {
                        identifier(rng)
                    }
                } else {
                    t.to_owned()
                }
            })
            .collect();
        *line = format!("{}{}", " ".repeat(indent), tokens.join(" "));
    }
}

fn statement_rows(lines: &[String]) -> Vec<usize> {
    (0..lines.len()).filter(|&i| is_statement(&lines[i])).collect()
}

fn count_for(rate: f64, n: usize) -> usize {
    if rate <= 0.0 || n == 0 {
        0
    } else {
        ((rate * n as f64).round() as usize).max(1)
    }
}

fn insert<R: Rng>(rng: &mut R, lines: &mut Vec<String>, rate: f64) {
    let rows = statement_rows(lines);
    let k = count_for(rate, rows.len());
    let locals: Vec<String> = lines
        .iter()
        .flat_map(|l| l.split_whitespace())
        .filter(|t| is_word(t) && !t.starts_with(|c: char| c.is_ascii_digit()))
        .map(str::to_owned)
        .collect();
    if locals.is_empty() {
        return;
    }
    for _ in 0..k {
        let rows = statement_rows(lines);
        let Some(&at) = rows.choose(rng) else { return };
        let indent = lines[at].len() - lines[at].trim_start().len();
        let s = statement(rng, &locals, &locals);
        lines.insert(at + 1, format!("{}{s}", " ".repeat(indent)));
    }
}

fn delete<R: Rng>(rng: &mut R, lines: &mut Vec<String>, rate: f64) {
    let rows = statement_rows(lines);
    let k = count_for(rate, rows.len()).min(rows.len().saturating_sub(1));
    let mut doomed: Vec<usize> = rows.choose_multiple(rng, k).copied().collect();
    doomed.sort_unstable_by(|a, b| b.cmp(a));
    for i in doomed {
        lines.remove(i);
    }
}
