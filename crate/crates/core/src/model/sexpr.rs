use super::error::PddlError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexpr {
    Atom(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Atom(..) => None,
        }
    }

    /// The leading keyword of a list, e.g. `and` for `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(|h| h.atom())
    }

    pub fn describe(&self) -> String {
        match self {
            Sexpr::Atom(s, _) => format!("`{s}`"),
            Sexpr::List(items, _) => match items.first().and_then(|h| h.atom()) {
                Some(h) => format!("`({h} ...)`"),
                None => "a list".to_string(),
            },
        }
    }
}

pub fn syntax(pos: Pos, expected: impl Into<String>, found: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        col: pos.col,
        expected: expected.into(),
        found: found.into(),
    }
}

/// Parses exactly one top-level s-expression. Atoms are lower-cased and
/// `;` starts a comment running to the end of the line.
pub fn parse(text: &str) -> Result<Sexpr, PddlError> {
    let mut stack: Vec<(Vec<Sexpr>, Pos)> = Vec::new();
    let mut result: Option<Sexpr> = None;
    let mut line = 1;
    let mut col = 0;
    let mut chars = text.chars().peekable();
    let mut atom = String::new();
    let mut atom_pos = Pos { line: 1, col: 1 };

    fn flush(atom: &mut String, pos: Pos, stack: &mut [(Vec<Sexpr>, Pos)]) -> Result<(), PddlError> {
        if atom.is_empty() {
            return Ok(());
        }
        let tok = std::mem::take(atom).to_lowercase();
        match stack.last_mut() {
            Some((items, _)) => {
                items.push(Sexpr::Atom(tok, pos));
                Ok(())
            }
            None => Err(syntax(pos, "`(`", format!("`{tok}`"))),
        }
    }

    while let Some(c) = chars.next() {
        col += 1;
        let here = Pos { line, col };
        match c {
            ';' => {
                flush(&mut atom, atom_pos, &mut stack)?;
                for d in chars.by_ref() {
                    if d == '\n' {
                        line += 1;
                        col = 0;
                        break;
                    }
                }
            }
            '(' => {
                flush(&mut atom, atom_pos, &mut stack)?;
                if result.is_some() {
                    return Err(syntax(here, "end of input", "`(`"));
                }
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut atom, atom_pos, &mut stack)?;
                let (items, start) = stack
                    .pop()
                    .ok_or_else(|| syntax(here, "`(` or an atom", "`)`"))?;
                let node = Sexpr::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => result = Some(node),
                }
            }
            c if c.is_whitespace() => {
                flush(&mut atom, atom_pos, &mut stack)?;
                if c == '\n' {
                    line += 1;
                    col = 0;
                }
            }
            c => {
                if atom.is_empty() {
                    atom_pos = here;
                }
                atom.push(c);
            }
        }
    }
    flush(&mut atom, atom_pos, &mut stack)?;
    if let Some((_, start)) = stack.last() {
        return Err(syntax(
            Pos { line, col: col + 1 },
            format!("`)` closing the list opened at {}:{}", start.line, start.col),
            "end of input",
        ));
    }
    result.ok_or_else(|| syntax(Pos { line, col: col + 1 }, "`(`", "end of input"))
}
