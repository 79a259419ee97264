use super::lex::{Cursor, Tok};
use super::{Ccs, Label, Name, ParseError, Term};

/// Parses a CCS term. `0` is the empty sum; a bare label `a` abbreviates `a.0`.
pub fn parse_ccs(text: &str) -> Result<Ccs, ParseError> {
    let mut cur = Cursor::new(text)?;
    let p = parse_proc(&mut cur)?;
    cur.finish()?;
    Ok(p)
}

pub(crate) fn parse_proc(cur: &mut Cursor) -> Result<Ccs, ParseError> {
    let mut p = parse_sum_level(cur)?;
    while *cur.peek() == Tok::Bar {
        cur.bump();
        let q = parse_sum_level(cur)?;
        p = Ccs::par(p, q);
    }
    Ok(p)
}

/// One operand of `|`: a guarded sum, or a single unit.
pub(crate) fn parse_sum_level(cur: &mut Cursor) -> Result<Ccs, ParseError> {
    let start = cur.here();
    let (first, guarded) = parse_unit(cur)?;
    if *cur.peek() != Tok::Plus {
        return Ok(first);
    }
    let not_guarded = |(line, col): (usize, usize)| ParseError::Syntax {
        line,
        col,
        msg: "operands of `+` must be prefixed terms".into(),
    };
    if !guarded {
        return Err(not_guarded(start));
    }
    let mut summands = into_summands(first);
    while *cur.peek() == Tok::Plus {
        cur.bump();
        let at = cur.here();
        let (next, guarded) = parse_unit(cur)?;
        if !guarded {
            return Err(not_guarded(at));
        }
        summands.extend(into_summands(next));
    }
    Ok(Ccs::sum(summands))
}

fn into_summands(p: Ccs) -> Vec<(Label, Ccs)> {
    match p {
        Ccs::Sum(s) => s,
        _ => unreachable!("guarded operand is a sum"),
    }
}

/// unit ::= base ("\" name)* ; returns whether the unit is a bare prefixed term.
fn parse_unit(cur: &mut Cursor) -> Result<(Ccs, bool), ParseError> {
    let (mut p, mut guarded) = match cur.peek().clone() {
        Tok::Num(0) => {
            cur.bump();
            (Ccs::nil(), false)
        }
        Tok::LParen => {
            cur.bump();
            let p = parse_proc(cur)?;
            cur.expect(Tok::RParen)?;
            // A parenthesised guarded sum may itself be a summand.
            let guarded = matches!(&p, Ccs::Sum(s) if !s.is_empty());
            (p, guarded)
        }
        Tok::Name(_) | Tok::Tilde => {
            let (line, col) = cur.here();
            let l = parse_label(cur)?;
            if l.is_tau() {
                return Err(ParseError::TauPrefix { line, col });
            }
            let cont = if *cur.peek() == Tok::Dot {
                cur.bump();
                parse_unit(cur)?.0
            } else {
                Ccs::nil()
            };
            (Ccs::prefix(l, cont), true)
        }
        other => return Err(cur.error(format!("expected a process, found {}", other.describe()))),
    };
    while *cur.peek() == Tok::Backslash {
        cur.bump();
        let (line, col) = cur.here();
        match cur.peek().clone() {
            Tok::Name(n) if n != "tau" => {
                cur.bump();
                p = Ccs::restrict(p, Name(n));
                guarded = false;
            }
            other => {
                let found = match other {
                    Tok::Name(n) => n,
                    t => t.describe(),
                };
                return Err(ParseError::RestrictNonName { line, col, found });
            }
        }
    }
    Ok((p, guarded))
}

/// label ::= name | "~" name ; the name `tau` reads as the silent action.
pub(crate) fn parse_label(cur: &mut Cursor) -> Result<Label, ParseError> {
    let out = if *cur.peek() == Tok::Tilde {
        cur.bump();
        true
    } else {
        false
    };
    match cur.peek().clone() {
        Tok::Name(n) if n == "tau" && !out => {
            cur.bump();
            Ok(Label::Tau)
        }
        Tok::Name(n) if n != "tau" => {
            cur.bump();
            let n = Name(n);
            Ok(if out { Label::Out(n) } else { Label::In(n) })
        }
        other => Err(cur.error(format!("expected a name, found {}", other.describe()))),
    }
}

/// Parses a term in which `+` may join arbitrary operands.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(text)?;
    let t = term_par(&mut cur)?;
    cur.finish()?;
    Ok(t)
}

fn term_par(cur: &mut Cursor) -> Result<Term, ParseError> {
    let mut t = term_sum(cur)?;
    while *cur.peek() == Tok::Bar {
        cur.bump();
        t = Term::Par(Box::new(t), Box::new(term_sum(cur)?));
    }
    Ok(t)
}

fn term_sum(cur: &mut Cursor) -> Result<Term, ParseError> {
    let mut t = term_unit(cur)?;
    while *cur.peek() == Tok::Plus {
        cur.bump();
        t = Term::Sum(Box::new(t), Box::new(term_unit(cur)?));
    }
    Ok(t)
}

fn term_unit(cur: &mut Cursor) -> Result<Term, ParseError> {
    let mut t = match cur.peek().clone() {
        Tok::Num(0) => {
            cur.bump();
            Term::Nil
        }
        Tok::LParen => {
            cur.bump();
            let t = term_par(cur)?;
            cur.expect(Tok::RParen)?;
            t
        }
        Tok::Name(_) | Tok::Tilde => {
            let (line, col) = cur.here();
            let l = parse_label(cur)?;
            if l.is_tau() {
                return Err(ParseError::TauPrefix { line, col });
            }
            let cont = if *cur.peek() == Tok::Dot {
                cur.bump();
                term_unit(cur)?
            } else {
                Term::Nil
            };
            Term::Prefix(l, Box::new(cont))
        }
        other => return Err(cur.error(format!("expected a process, found {}", other.describe()))),
    };
    while *cur.peek() == Tok::Backslash {
        cur.bump();
        let (line, col) = cur.here();
        match cur.peek().clone() {
            Tok::Name(n) if n != "tau" => {
                cur.bump();
                t = Term::Restrict(Box::new(t), Name(n));
            }
            other => {
                let found = match other {
                    Tok::Name(n) => n,
                    t => t.describe(),
                };
                return Err(ParseError::RestrictNonName { line, col, found });
            }
        }
    }
    Ok(t)
}
