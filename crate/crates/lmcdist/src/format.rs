//! The `.lmc` text format.
//!
//! A chain with two initial distributions is written as a UTF-8, line-oriented
//! file. `#` starts a comment, blank lines are ignored, and directives may
//! appear in any order:
//!
//! ```text
//! states: q1 q2 r1 r2
//! alphabet: a b c
//! init1: q1=1
//! init2: q2=1
//! trans: q1 a q1 1/2
//! trans: q1 b q1 1/4
//! trans: q1 c r1 1/4
//! ```
//!
//! Probability literals are `p/q` or integers. `init1`/`init2` list
//! `state=rational` pairs that must sum to exactly 1. Transitions not listed
//! are 0. State and letter identifiers are arbitrary non-whitespace tokens
//! that do not contain `#`, `=`, or `:`. Parsing validates the chain, so a
//! successfully parsed file is always a well-formed instance.

use crate::model::{Lmc, ModelError, ProblemInstance, SubDistribution, ValidationError};
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Zero};
use thiserror::Error;

/// Errors raised while reading the `.lmc` format. Line numbers are 1-based.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: expected `key: ...`")]
    MissingColon { line: usize, col: usize },
    #[error("line {line}: unknown directive `{key}`")]
    UnknownDirective { line: usize, key: String },
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("missing `{0}:` line")]
    MissingSection(&'static str),
    #[error("line {line}: duplicate `{key}:` line")]
    DuplicateSection { line: usize, key: &'static str },
    #[error("line {line}: duplicate state `{name}`")]
    DuplicateState { line: usize, name: String },
    #[error("line {line}: duplicate letter `{name}`")]
    DuplicateLetter { line: usize, name: String },
    #[error("line {line}: unknown state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: unknown letter `{name}`")]
    UnknownLetter { line: usize, name: String },
    #[error("line {line}: `{text}` is not a valid rational")]
    BadRational { line: usize, text: String },
    #[error("line {line}: duplicate transition `{from} {letter} {to}`")]
    DuplicateTransition {
        line: usize,
        from: String,
        letter: String,
        to: String,
    },
    #[error("line {line}: state `{name}` listed twice in {which}")]
    DuplicateInitEntry {
        line: usize,
        which: &'static str,
        name: String,
    },
    #[error("{which} has mass {mass}, must be exactly 1")]
    BadInitialMass { which: &'static str, mass: String },
    #[error("invalid chain: {0}")]
    Invalid(Box<ValidationError>),
}

struct Directive<'a> {
    line: usize,
    key: &'a str,
    /// Byte offset of `rest` within the original line, for column reporting.
    rest_col: usize,
    rest: &'a str,
}

/// Splits `rest` into whitespace-separated tokens with 1-based columns.
fn tokens(rest: &str, rest_col: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in rest.split_whitespace() {
        let found = rest[offset..].find(part).unwrap() + offset;
        out.push((rest_col + found, part));
        offset = found + part.len();
    }
    out
}

/// Parses the `.lmc` text format into a validated [`ProblemInstance`].
pub fn parse_lmc(text: &str) -> Result<ProblemInstance, ParseError> {
    let mut directives = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let colon = match content.find(':') {
            Some(c) => c,
            None => {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(ParseError::MissingColon { line, col });
            }
        };
        let key = content[..colon].trim();
        directives.push(Directive {
            line,
            key,
            rest_col: colon + 2,
            rest: &content[colon + 1..],
        });
    }

    let mut states_line: Option<&Directive> = None;
    let mut alphabet_line: Option<&Directive> = None;
    let mut init_lines: [Option<&Directive>; 2] = [None, None];
    let mut trans_lines: Vec<&Directive> = Vec::new();
    for d in &directives {
        match d.key {
            "states" => match states_line {
                None => states_line = Some(d),
                Some(_) => {
                    return Err(ParseError::DuplicateSection {
                        line: d.line,
                        key: "states",
                    })
                }
            },
            "alphabet" => match alphabet_line {
                None => alphabet_line = Some(d),
                Some(_) => {
                    return Err(ParseError::DuplicateSection {
                        line: d.line,
                        key: "alphabet",
                    })
                }
            },
            "init1" | "init2" => {
                let slot = if d.key == "init1" { 0 } else { 1 };
                if init_lines[slot].is_some() {
                    return Err(ParseError::DuplicateSection {
                        line: d.line,
                        key: if slot == 0 { "init1" } else { "init2" },
                    });
                }
                init_lines[slot] = Some(d);
            }
            "trans" => trans_lines.push(d),
            other => {
                return Err(ParseError::UnknownDirective {
                    line: d.line,
                    key: other.to_string(),
                })
            }
        }
    }

    let states_line = states_line.ok_or(ParseError::MissingSection("states"))?;
    let alphabet_line = alphabet_line.ok_or(ParseError::MissingSection("alphabet"))?;

    let mut state_names = Vec::new();
    for (_, tok) in tokens(states_line.rest, states_line.rest_col) {
        if state_names.iter().any(|s| s == tok) {
            return Err(ParseError::DuplicateState {
                line: states_line.line,
                name: tok.to_string(),
            });
        }
        state_names.push(tok.to_string());
    }
    if state_names.is_empty() {
        return Err(ParseError::Syntax {
            line: states_line.line,
            col: states_line.rest_col,
            msg: "at least one state is required".into(),
        });
    }
    let mut letter_names = Vec::new();
    for (_, tok) in tokens(alphabet_line.rest, alphabet_line.rest_col) {
        if letter_names.iter().any(|s| s == tok) {
            return Err(ParseError::DuplicateLetter {
                line: alphabet_line.line,
                name: tok.to_string(),
            });
        }
        letter_names.push(tok.to_string());
    }
    if letter_names.is_empty() {
        return Err(ParseError::Syntax {
            line: alphabet_line.line,
            col: alphabet_line.rest_col,
            msg: "at least one letter is required".into(),
        });
    }

    let mut lmc = Lmc::new(state_names, letter_names).expect("duplicates checked above");

    let mut seen = std::collections::HashSet::new();
    for d in trans_lines {
        let toks = tokens(d.rest, d.rest_col);
        if toks.len() != 4 {
            return Err(ParseError::Syntax {
                line: d.line,
                col: d.rest_col,
                msg: format!(
                    "expected `trans: FROM LETTER TO PROB`, got {} tokens",
                    toks.len()
                ),
            });
        }
        let from = lmc
            .state_index(toks[0].1)
            .ok_or_else(|| ParseError::UnknownState {
                line: d.line,
                name: toks[0].1.to_string(),
            })?;
        let letter = lmc
            .letter_index(toks[1].1)
            .ok_or_else(|| ParseError::UnknownLetter {
                line: d.line,
                name: toks[1].1.to_string(),
            })?;
        let to = lmc
            .state_index(toks[2].1)
            .ok_or_else(|| ParseError::UnknownState {
                line: d.line,
                name: toks[2].1.to_string(),
            })?;
        let prob = parse_rational(toks[3].1).ok_or_else(|| ParseError::BadRational {
            line: d.line,
            text: toks[3].1.to_string(),
        })?;
        if !seen.insert((from, letter, to)) {
            return Err(ParseError::DuplicateTransition {
                line: d.line,
                from: toks[0].1.to_string(),
                letter: toks[1].1.to_string(),
                to: toks[2].1.to_string(),
            });
        }
        lmc.set_prob(from, letter, to, prob);
    }

    let mut inits = Vec::new();
    for (slot, which) in [(0, "init1"), (1, "init2")] {
        let d = init_lines[slot].ok_or(ParseError::MissingSection(if slot == 0 {
            "init1"
        } else {
            "init2"
        }))?;
        let mut weights = vec![Rational::zero(); lmc.num_states()];
        let mut listed = std::collections::HashSet::new();
        for (col, tok) in tokens(d.rest, d.rest_col) {
            let (name, value) = tok.split_once('=').ok_or_else(|| ParseError::Syntax {
                line: d.line,
                col,
                msg: format!("expected `state=rational`, got `{tok}`"),
            })?;
            let q = lmc
                .state_index(name)
                .ok_or_else(|| ParseError::UnknownState {
                    line: d.line,
                    name: name.to_string(),
                })?;
            if !listed.insert(q) {
                return Err(ParseError::DuplicateInitEntry {
                    line: d.line,
                    which,
                    name: name.to_string(),
                });
            }
            let w = parse_rational(value).ok_or_else(|| ParseError::BadRational {
                line: d.line,
                text: value.to_string(),
            })?;
            weights[q] = w;
        }
        let mass: Rational = weights.iter().sum();
        if !mass.is_one() {
            return Err(ParseError::BadInitialMass {
                which,
                mass: format_rational(&mass),
            });
        }
        inits.push(weights);
    }

    let report = lmc.validate();
    if let Some(first) = report.errors.into_iter().next() {
        return Err(ParseError::Invalid(Box::new(first)));
    }
    let pi2 = inits.pop().unwrap();
    let pi1 = inits.pop().unwrap();
    let build = |weights: Vec<Rational>, which: &'static str| {
        SubDistribution::from_weights(weights).map_err(|e| match e {
            ModelError::NegativeWeight { weight, .. } => ParseError::Syntax {
                line: 0,
                col: 0,
                msg: format!("{which} has negative weight {weight}"),
            },
            _ => ParseError::BadInitialMass {
                which,
                mass: "out of range".into(),
            },
        })
    };
    let pi1 = build(pi1, "init1")?;
    let pi2 = build(pi2, "init2")?;
    ProblemInstance::new(lmc, pi1, pi2).map_err(|e| match e {
        ModelError::InvalidChain(v) => ParseError::Invalid(v),
        other => ParseError::Syntax {
            line: 0,
            col: 0,
            msg: other.to_string(),
        },
    })
}

/// Canonical text rendering; `parse_lmc(serialize_lmc(x))` reconstructs `x`
/// exactly.
pub fn serialize_lmc(inst: &ProblemInstance) -> String {
    let lmc = inst.lmc();
    let mut out = String::new();
    out.push_str("states:");
    for s in lmc.states() {
        out.push(' ');
        out.push_str(s);
    }
    out.push('\n');
    out.push_str("alphabet:");
    for a in lmc.alphabet() {
        out.push(' ');
        out.push_str(a);
    }
    out.push('\n');
    for (key, pi) in [("init1", inst.pi1()), ("init2", inst.pi2())] {
        out.push_str(key);
        out.push(':');
        for q in pi.support() {
            out.push(' ');
            out.push_str(lmc.state_name(q));
            out.push('=');
            out.push_str(&format_rational(pi.weight(q)));
        }
        out.push('\n');
    }
    for from in 0..lmc.num_states() {
        for letter in 0..lmc.num_letters() {
            for to in 0..lmc.num_states() {
                let p = lmc.prob(letter, from, to);
                if !p.is_zero() {
                    out.push_str(&format!(
                        "trans: {} {} {} {}\n",
                        lmc.state_name(from),
                        lmc.letter_name(letter),
                        lmc.state_name(to),
                        format_rational(p)
                    ));
                }
            }
        }
    }
    out
}
