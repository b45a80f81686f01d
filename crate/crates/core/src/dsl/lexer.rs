use super::ParseError;
use crate::document::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Names and dotted paths.
    Ident(String),
    Int(i64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Arrow,
    Squiggle,
    DotDot,
    Assign,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Str(_) => "string".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Arrow => "->",
            Tok::Squiggle => "~>",
            Tok::DotDot => "..",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    // byte offset of chars[i], or the end of input
    let at = |i: usize| chars.get(i).map_or(src.len(), |c| c.0);

    while i < chars.len() {
        let (off, c) = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i].1 == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        let peek = chars.get(i + 1).map(|c| c.1);
        let tok = if is_name_start(c) {
            let mut j = i + 1;
            while j < chars.len() {
                let d = chars[j].1;
                let dotted = d == '.' && chars.get(j + 1).is_some_and(|n| is_name_start(n.1));
                if is_name_char(d) || dotted {
                    j += 1;
                } else {
                    break;
                }
            }
            let text = src[off..at(j)].to_string();
            advance(j - i, &mut i);
            Tok::Ident(text)
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let text = &src[off..at(j)];
            let span = Span { offset: off, len: text.len(), line: start_line, column: start_col };
            let v = text.parse().map_err(|_| ParseError::Syntax {
                span,
                expected: "an integer that fits in 64 bits".into(),
                found: text.into(),
            })?;
            advance(j - i, &mut i);
            Tok::Int(v)
        } else if c == '"' {
            let mut j = i + 1;
            let mut text = String::new();
            loop {
                match chars.get(j).map(|c| c.1) {
                    None | Some('\n') => {
                        let span = Span { offset: off, len: at(j) - off, line: start_line, column: start_col };
                        return Err(ParseError::Syntax {
                            span,
                            expected: "closing `\"`".into(),
                            found: "end of line".into(),
                        });
                    }
                    Some('"') => break,
                    Some('\\') if matches!(chars.get(j + 1).map(|c| c.1), Some('"' | '\\')) => {
                        text.push(chars[j + 1].1);
                        j += 2;
                    }
                    Some(d) => {
                        text.push(d);
                        j += 1;
                    }
                }
            }
            advance(j + 1 - i, &mut i);
            Tok::Str(text)
        } else {
            let (tok, n) = match (c, peek) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('~', Some('>')) => (Tok::Squiggle, 2),
                ('.', Some('.')) => (Tok::DotDot, 2),
                ('=', Some('=')) => (Tok::EqEq, 2),
                ('!', Some('=')) => (Tok::Ne, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (':', _) => (Tok::Colon, 1),
                (',', _) => (Tok::Comma, 1),
                ('=', _) => (Tok::Assign, 1),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*' | '×', _) => (Tok::Star, 1),
                _ => {
                    let span = Span { offset: off, len: c.len_utf8(), line: start_line, column: start_col };
                    return Err(ParseError::Syntax { span, expected: "a token".into(), found: format!("`{c}`") });
                }
            };
            advance(n, &mut i);
            tok
        };
        let span = Span { offset: off, len: at(i) - off, line: start_line, column: start_col };
        out.push(Token { tok, span });
    }
    let end = src.len();
    out.push(Token { tok: Tok::Eof, span: Span { offset: end, len: 0, line, column: col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn dotted_paths_and_ranges() {
        assert_eq!(
            toks("Court.Create 0..3 # note\n"),
            vec![Tok::Ident("Court.Create".into()), Tok::Int(0), Tok::DotDot, Tok::Int(3), Tok::Eof]
        );
    }

    #[test]
    fn operators() {
        assert_eq!(
            toks("-> ~> == != <= >= × -"),
            vec![Tok::Arrow, Tok::Squiggle, Tok::EqEq, Tok::Ne, Tok::Le, Tok::Ge, Tok::Star, Tok::Minus, Tok::Eof]
        );
    }

    #[test]
    fn spans_track_lines() {
        let t = tokenize("model\n  M").unwrap();
        assert_eq!((t[1].span.line, t[1].span.column, t[1].span.offset), (2, 3, 8));
    }

    #[test]
    fn unterminated_string() {
        assert!(matches!(tokenize("\"abc"), Err(ParseError::Syntax { .. })));
    }
}
