//! Text serialization of SLPs and grammar constructions: balanced builder,
//! reversal, substring extraction, concatenation, sentinel wrapping.
//!
//! File format, one item per LF-terminated line:
//!
//! ```text
//! SLP v1
//! n=<rule count>
//! <i> T <code>        terminal rule, code in 0..=65535
//! <i> N <l> <r>       pair rule, l and r strictly below i
//! ```
//!
//! Rules appear in increasing order 1..=n and the last rule is the root.

use std::collections::HashMap;
use std::fmt;

use crate::slp_core::{Interval, Nav, Production, Slp, SlpError, VarId, MAX_LEN};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn perr(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        msg: msg.into(),
    }
}

pub fn parse_slp(input: &[u8]) -> Result<Slp, ParseError> {
    let text =
        std::str::from_utf8(input).map_err(|_| perr(1, "file is not valid UTF-8"))?;
    let lines: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();

    let header = *lines.first().ok_or_else(|| perr(1, "missing header"))?;
    if header != "SLP v1" {
        return Err(perr(1, "expected header \"SLP v1\""));
    }
    let nline = *lines.get(1).ok_or_else(|| perr(2, "missing rule count"))?;
    let n: usize = nline
        .strip_prefix("n=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| perr(2, "expected \"n=<rule count>\""))?;
    if n == 0 {
        return Err(perr(2, "no root: n must be at least 1"));
    }

    let mut rules: Vec<Production> = Vec::with_capacity(n);
    let mut lens: Vec<u64> = Vec::with_capacity(n);
    for i in 1..=n {
        let lineno = i + 2;
        let line = *lines
            .get(lineno - 1)
            .ok_or_else(|| perr(lineno, format!("expected rule {i}")))?;
        let mut it = line.split_ascii_whitespace();
        let idx: usize = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| perr(lineno, format!("expected rule {i}")))?;
        if idx != i {
            return Err(perr(lineno, format!("expected rule {i}, found {idx}")));
        }
        let kind = it.next().ok_or_else(|| perr(lineno, "missing rule kind"))?;
        let rule = match kind {
            "T" => {
                let code: u32 = it
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(lineno, "expected terminal code"))?;
                let code = u16::try_from(code)
                    .map_err(|_| perr(lineno, "terminal code exceeds 65535"))?;
                lens.push(1);
                Production::Terminal(code)
            }
            "N" => {
                let l: u32 = it
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(lineno, "expected two operands"))?;
                let r: u32 = it
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(lineno, "expected two operands"))?;
                for side in [l, r] {
                    if side == 0 || side as usize >= i {
                        return Err(perr(lineno, format!("forward reference at rule {i}")));
                    }
                }
                let len = lens[l as usize - 1]
                    .checked_add(lens[r as usize - 1])
                    .filter(|&v| v <= MAX_LEN)
                    .ok_or_else(|| perr(lineno, "derived length exceeds 2^63-1"))?;
                lens.push(len);
                Production::Nonterminal(l, r)
            }
            other => return Err(perr(lineno, format!("unknown rule kind \"{other}\""))),
        };
        if it.next().is_some() {
            return Err(perr(lineno, "trailing tokens after rule"));
        }
        rules.push(rule);
    }
    // Only the final newline's empty fragment may remain.
    let tail = &lines[n + 2..];
    if !(tail.is_empty() || tail == [""]) {
        return Err(perr(n + 3, "unexpected content after rule list"));
    }
    Slp::from_rules(rules).map_err(|e| perr(0, e.to_string()))
}

pub fn serialize_slp(slp: &Slp) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("SLP v1\n");
    out.push_str(&format!("n={}\n", slp.n()));
    for (idx, rule) in slp.rules().iter().enumerate() {
        let i = idx + 1;
        match *rule {
            Production::Terminal(c) => out.push_str(&format!("{i} T {c}\n")),
            Production::Nonterminal(l, r) => out.push_str(&format!("{i} N {l} {r}\n")),
        }
    }
    out.into_bytes()
}

/// Hash-consing rule arena used by the constructions below.
struct Builder {
    rules: Vec<Production>,
    terms: HashMap<u16, VarId>,
    pairs: HashMap<(VarId, VarId), VarId>,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            rules: Vec::new(),
            terms: HashMap::new(),
            pairs: HashMap::new(),
        }
    }

    fn term(&mut self, c: u16) -> VarId {
        if let Some(&v) = self.terms.get(&c) {
            return v;
        }
        self.rules.push(Production::Terminal(c));
        let v = self.rules.len() as VarId;
        self.terms.insert(c, v);
        v
    }

    fn pair(&mut self, l: VarId, r: VarId) -> VarId {
        if let Some(&v) = self.pairs.get(&(l, r)) {
            return v;
        }
        self.rules.push(Production::Nonterminal(l, r));
        let v = self.rules.len() as VarId;
        self.pairs.insert((l, r), v);
        v
    }

    /// Left-to-right pairwise rounds; an odd trailing element is carried
    /// into the next round unchanged, so heights stay logarithmic.
    fn balanced(&mut self, mut level: Vec<VarId>) -> VarId {
        assert!(!level.is_empty());
        while level.len() > 1 {
            let mut nextl = Vec::with_capacity(level.len() / 2 + 1);
            let mut it = level.chunks_exact(2);
            for ch in &mut it {
                nextl.push(self.pair(ch[0], ch[1]));
            }
            if let [last] = it.remainder() {
                nextl.push(*last);
            }
            level = nextl;
        }
        level[0]
    }
}

/// Builds an SLP for a nonempty byte string by hash-consed pairwise merge
/// rounds: height ≤ ⌈log₂ N⌉ + 1 and at most 2N − 1 rules.
pub fn build_balanced_slp(text: &[u8]) -> Result<Slp, SlpError> {
    if text.is_empty() {
        return Err(SlpError::Invalid(vec!["cannot compress empty text".into()]));
    }
    let mut b = Builder::new();
    let level: Vec<VarId> = text.iter().map(|&c| b.term(c as u16)).collect();
    b.balanced(level);
    Slp::from_rules(b.rules)
}

/// Same rule indices, every pair swapped: variable i derives the reversal
/// of the original val(X_i). An involution.
pub fn reverse_slp(slp: &Slp) -> Slp {
    let rules = slp
        .rules()
        .iter()
        .map(|rule| match *rule {
            Production::Terminal(c) => Production::Terminal(c),
            Production::Nonterminal(l, r) => Production::Nonterminal(r, l),
        })
        .collect();
    Slp::from_rules(rules).unwrap()
}

/// Renumbers the reachable closure of `roots` into a fresh rule list
/// (children before parents); returns the list and the new ids of `roots`.
fn extract_renumbered(slp: &Slp, roots: &[VarId]) -> (Vec<Production>, Vec<VarId>) {
    let mut newid: HashMap<VarId, VarId> = HashMap::new();
    let mut rules: Vec<Production> = Vec::new();
    // Iterative postorder: children are numbered before their parent.
    for &root in roots {
        if newid.contains_key(&root) {
            continue;
        }
        let mut stack: Vec<(VarId, bool)> = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if newid.contains_key(&v) {
                continue;
            }
            match slp.prod(v) {
                Production::Terminal(c) => {
                    rules.push(Production::Terminal(c));
                    newid.insert(v, rules.len() as VarId);
                }
                Production::Nonterminal(l, r) => {
                    if expanded {
                        rules.push(Production::Nonterminal(newid[&l], newid[&r]));
                        newid.insert(v, rules.len() as VarId);
                    } else {
                        stack.push((v, true));
                        stack.push((r, false));
                        stack.push((l, false));
                    }
                }
            }
        }
    }
    (rules, roots.iter().map(|v| newid[v]).collect())
}

/// SLP deriving exactly val(root)[iv.b..=iv.e]: the interval's decomposition
/// pieces recombined with fresh balanced merge rules.
pub fn substring_slp(slp: &Slp, iv: Interval) -> Result<Slp, SlpError> {
    let root = slp.root();
    let len = slp.metrics(root).unwrap().0;
    if iv.e > len {
        return Err(SlpError::BadInterval {
            var: root,
            b: iv.b,
            e: iv.e,
            len,
        });
    }
    let pieces: Vec<VarId> = slp
        .decompose_var(root, iv.b, iv.e)
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    let (rules, piece_ids) = extract_renumbered(slp, &pieces);
    let mut b = Builder::new();
    b.rules = rules;
    for (idx, rule) in b.rules.iter().enumerate() {
        match *rule {
            Production::Terminal(c) => {
                b.terms.entry(c).or_insert(idx as VarId + 1);
            }
            Production::Nonterminal(l, r) => {
                b.pairs.entry((l, r)).or_insert(idx as VarId + 1);
            }
        }
    }
    b.balanced(piece_ids);
    Slp::from_rules(b.rules)
}

/// Grammar for val(a)·val(b): a's rules, b's rules shifted, one fresh root.
pub fn concat_slps(a: &Slp, b: &Slp) -> Result<Slp, SlpError> {
    let na = a.n();
    let mut rules: Vec<Production> = a.rules().to_vec();
    rules.extend(b.rules().iter().map(|rule| match *rule {
        Production::Terminal(c) => Production::Terminal(c),
        Production::Nonterminal(l, r) => Production::Nonterminal(l + na, r + na),
    }));
    rules.push(Production::Nonterminal(na, na + b.n()));
    Slp::from_rules(rules)
}

/// Sentinel code placed before the text.
pub const SENTINEL_FRONT: u16 = 256;
/// Sentinel code placed after the text.
pub const SENTINEL_BACK: u16 = 257;

/// Wraps the derived string into 256·s·257 with four extra rules. The
/// sentinels are distinct from every byte and from each other, so no
/// regularity arm or period can reach across either end.
pub fn add_sentinels(slp: &Slp) -> Slp {
    let n = slp.n();
    let mut rules = slp.rules().to_vec();
    rules.push(Production::Terminal(SENTINEL_FRONT)); // n+1
    rules.push(Production::Terminal(SENTINEL_BACK)); // n+2
    rules.push(Production::Nonterminal(n + 1, n)); // n+3 = front·s
    rules.push(Production::Nonterminal(n + 3, n + 2)); // n+4 = front·s·back
    Slp::from_rules(rules).unwrap()
}
