use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TrainingSample;
use crate::algebra::Term;
use crate::error::{Error, Result};
use crate::obba::wire::WirePoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Infix,
    Monomial,
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scheme> {
        match s {
            "infix" => Ok(Scheme::Infix),
            "monomial" => Ok(Scheme::Monomial),
            _ => Err(Error::Parse(format!("unknown token scheme {s:?}"))),
        }
    }
}

/// What comes after a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Follow {
    Plus,
    Sep,
    SupSep,
    Eos,
}

impl Follow {
    fn text(self) -> &'static str {
        match self {
            Follow::Plus => "+",
            Follow::Sep => "<sep>",
            Follow::SupSep => "<supsep>",
            Follow::Eos => "<eos>",
        }
    }

    fn parse(s: &str) -> Option<Follow> {
        Some(match s {
            "+" => Follow::Plus,
            "<sep>" => Follow::Sep,
            "<supsep>" => Follow::SupSep,
            "<eos>" => Follow::Eos,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Coeff(u32),
    Exp(u32),
    /// A structural token on its own.
    Mark(Follow),
    /// A whole monomial with the token that follows it.
    Mono { coeff: u32, term: Term, follow: Follow },
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Coeff(c) => write!(f, "C{c}"),
            Token::Exp(e) => write!(f, "E{e}"),
            Token::Mark(m) => f.write_str(m.text()),
            Token::Mono { coeff, term, follow } => {
                let exps: Vec<String> = term.exponents().iter().map(|e| e.to_string()).collect();
                write!(f, "[{coeff}|{}|{}]", exps.join(","), follow.text())
            }
        }
    }
}

impl FromStr for Token {
    type Err = Error;
    fn from_str(s: &str) -> Result<Token> {
        let bad = || Error::Parse(format!("bad token {s:?}"));
        if let Some(m) = Follow::parse(s) {
            return Ok(Token::Mark(m));
        }
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let parts: Vec<&str> = inner.split('|').collect();
            let [c, e, m] = parts[..] else { return Err(bad()) };
            let exps: Vec<u32> = e.split(',').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            return Ok(Token::Mono {
                coeff: c.parse().map_err(|_| bad())?,
                term: Term::new(&exps)?,
                follow: Follow::parse(m).ok_or_else(bad)?,
            });
        }
        let num = |r: &str| r.parse::<u32>().map_err(|_| bad());
        match s.split_at(s.len().min(1)) {
            ("C", r) => Ok(Token::Coeff(num(r)?)),
            ("E", r) => Ok(Token::Exp(num(r)?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenStream {
    pub scheme: Scheme,
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.tokens.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn parse(scheme: Scheme, text: &str) -> Result<TokenStream> {
        let tokens = text.split_whitespace().map(Token::from_str).collect::<Result<_>>()?;
        Ok(TokenStream { scheme, tokens })
    }

    /// Monomial form of the same content.
    pub fn to_monomial(&self) -> Result<TokenStream> {
        match self.scheme {
            Scheme::Monomial => Ok(self.clone()),
            Scheme::Infix => Ok(TokenStream { scheme: Scheme::Monomial, tokens: group(&self.tokens)? }),
        }
    }

    /// Infix form of the same content.
    pub fn to_infix(&self) -> TokenStream {
        match self.scheme {
            Scheme::Infix => self.clone(),
            Scheme::Monomial => TokenStream { scheme: Scheme::Infix, tokens: expand(&self.tokens) },
        }
    }
}

/// Encodes a sequence of sets of polynomials.
pub fn tokenize(sets: &[Vec<WirePoly>], scheme: Scheme) -> TokenStream {
    let mut tokens = Vec::new();
    for (si, set) in sets.iter().enumerate() {
        let end = if si + 1 == sets.len() { Follow::Eos } else { Follow::SupSep };
        if set.is_empty() {
            tokens.push(Token::Mark(end));
        }
        for (pi, poly) in set.iter().enumerate() {
            for (mi, &(coeff, term)) in poly.iter().enumerate() {
                let follow = if mi + 1 < poly.len() {
                    Follow::Plus
                } else if pi + 1 < set.len() {
                    Follow::Sep
                } else {
                    end
                };
                tokens.push(Token::Mono { coeff, term, follow });
            }
        }
    }
    let mono = TokenStream { scheme: Scheme::Monomial, tokens };
    match scheme {
        Scheme::Monomial => mono,
        Scheme::Infix => mono.to_infix(),
    }
}

fn sample_sets(sample: &TrainingSample) -> [Vec<WirePoly>; 2] {
    let corners = sample.universe_corners.iter().map(|t| vec![(1, *t)]).collect();
    [corners, sample.generators.clone()]
}

/// `C<v>` and `E<v>` tokens with explicit separators.
pub fn tokenize_infix(sample: &TrainingSample) -> TokenStream {
    tokenize(&sample_sets(sample), Scheme::Infix)
}

/// One token per monomial.
pub fn tokenize_monomial(sample: &TrainingSample) -> TokenStream {
    tokenize(&sample_sets(sample), Scheme::Monomial)
}

fn expand(tokens: &[Token]) -> Vec<Token> {
    let mut out = Vec::new();
    for t in tokens {
        match *t {
            Token::Mono { coeff, term, follow } => {
                out.push(Token::Coeff(coeff));
                out.extend(term.exponents().into_iter().map(Token::Exp));
                out.push(Token::Mark(follow));
            }
            other => out.push(other),
        }
    }
    out
}

fn group(tokens: &[Token]) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match tokens[i] {
            Token::Coeff(coeff) => {
                let mut exps = Vec::new();
                i += 1;
                while let Some(Token::Exp(e)) = tokens.get(i) {
                    exps.push(*e);
                    i += 1;
                }
                let Some(Token::Mark(follow)) = tokens.get(i) else {
                    return Err(Error::Parse(format!("monomial not followed by a separator at token {i}")));
                };
                if exps.is_empty() {
                    return Err(Error::Parse(format!("monomial without exponents at token {i}")));
                }
                out.push(Token::Mono { coeff, term: Term::new(&exps)?, follow: *follow });
            }
            Token::Mark(m) => out.push(Token::Mark(m)),
            other => return Err(Error::Parse(format!("unexpected token {other} at {i}"))),
        }
        i += 1;
    }
    Ok(out)
}

/// Decodes either scheme back into sets of polynomials.
pub fn decode(stream: &TokenStream) -> Result<Vec<Vec<WirePoly>>> {
    let mono = stream.to_monomial()?;
    let mut sets = Vec::new();
    let mut set: Vec<WirePoly> = Vec::new();
    let mut poly: WirePoly = Vec::new();
    let mut done = false;
    let mut nvars = None;
    for (i, t) in mono.tokens.iter().enumerate() {
        if done {
            return Err(Error::Parse(format!("token after <eos> at {i}")));
        }
        let follow = match *t {
            Token::Mono { coeff, term, follow } => {
                if *nvars.get_or_insert(term.nvars()) != term.nvars() {
                    return Err(Error::Parse(format!("monomial {i} has the wrong number of exponents")));
                }
                poly.push((coeff, term));
                if follow != Follow::Plus {
                    set.push(std::mem::take(&mut poly));
                }
                follow
            }
            Token::Mark(m @ (Follow::SupSep | Follow::Eos)) if poly.is_empty() && set.is_empty() => m,
            _ => return Err(Error::Parse(format!("unexpected token {t} at {i}"))),
        };
        match follow {
            Follow::SupSep => sets.push(std::mem::take(&mut set)),
            Follow::Eos => {
                sets.push(std::mem::take(&mut set));
                done = true;
            }
            _ => {}
        }
    }
    if !done {
        return Err(Error::Parse("missing <eos>".into()));
    }
    Ok(sets)
}

/// Recovers (universe corners, generators) from a sample encoding.
pub fn decode_sample(stream: &TokenStream) -> Result<(Vec<Term>, Vec<WirePoly>)> {
    let mut sets = decode(stream)?;
    if sets.len() != 2 {
        return Err(Error::Parse(format!("expected 2 sets, found {}", sets.len())));
    }
    let gens = sets.pop().unwrap();
    let corners = sets
        .pop()
        .unwrap()
        .into_iter()
        .map(|p| match p[..] {
            [(1, t)] => Ok(t),
            _ => Err(Error::Parse("universe corner is not a monic monomial".into())),
        })
        .collect::<Result<_>>()?;
    Ok((corners, gens))
}
