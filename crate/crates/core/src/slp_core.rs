//! Straight-line programs and derivation-tree navigation.
//!
//! An SLP is a list of rules numbered 1..=n. Rule i is either a terminal
//! (a symbol code) or a pair of earlier rules; the last rule is the root.
//! String positions are 1-based throughout. Symbol codes 0..=255 are
//! literal bytes; larger codes are reserved for synthetic markers.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// 1-based rule index.
pub type VarId = u32;
/// 1-based string position.
pub type Pos = u64;

/// Derived lengths must stay below 2^63 so that position arithmetic
/// (sums and mirrored coordinates over a doubled universe) cannot wrap.
pub const MAX_LEN: u64 = (1u64 << 63) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Production {
    Terminal(u16),
    Nonterminal(VarId, VarId),
}

/// Closed interval of positions, 1 ≤ b ≤ e.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub b: Pos,
    pub e: Pos,
}

impl Interval {
    pub fn new(b: Pos, e: Pos) -> Result<Interval, SlpError> {
        if b == 0 || e < b {
            return Err(SlpError::EmptyInterval { b, e });
        }
        Ok(Interval { b, e })
    }

    // Intervals are nonempty by construction (b <= e enforced above), so
    // there is no is_empty to pair with len.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u64 {
        self.e - self.b + 1
    }
}

/// A node of a derivation tree: its label and the 1-based start position of
/// its span within the variable the query was asked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeLocator {
    pub label: VarId,
    pub position: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlpError {
    #[error("invalid grammar: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("variable {0} out of range")]
    BadVar(VarId),
    #[error("position {pos} out of range for variable {var} (length {len})")]
    BadPos { var: VarId, pos: Pos, len: u64 },
    #[error("interval {b}:{e} is empty or inverted")]
    EmptyInterval { b: Pos, e: Pos },
    #[error("interval {b}:{e} out of range for variable {var} (length {len})")]
    BadInterval { var: VarId, b: Pos, e: Pos, len: u64 },
    #[error("symbol code {0} is not a byte")]
    NonByteSymbol(u16),
}

/// Checks structural invariants of a rule list; returns human-readable
/// violations (empty means valid).
pub fn validate_rules(rules: &[Production]) -> Vec<String> {
    let mut out = Vec::new();
    if rules.is_empty() {
        out.push("no root: grammar has zero rules".to_string());
        return out;
    }
    if rules.len() > u32::MAX as usize - 1 {
        out.push("too many rules".to_string());
        return out;
    }
    let mut lens: Vec<u64> = Vec::with_capacity(rules.len());
    for (idx, rule) in rules.iter().enumerate() {
        let i = idx + 1;
        match *rule {
            Production::Terminal(_) => lens.push(1),
            Production::Nonterminal(l, r) => {
                let mut len = 0u64;
                for side in [l, r] {
                    if side == 0 || side as usize >= i {
                        out.push(format!("forward reference at rule {i}"));
                        len = 1;
                    } else {
                        len = len.saturating_add(lens[side as usize - 1]);
                    }
                }
                if len > MAX_LEN {
                    out.push(format!("derived length exceeds 2^63-1 at rule {i}"));
                    len = 1;
                }
                lens.push(len);
            }
        }
    }
    out
}

/// Derivation-tree navigation over anything that exposes rules and derived
/// lengths. Every algorithm below touches the grammar only through this
/// interface, so it works unchanged over extended rule sets.
pub(crate) trait Nav {
    fn rule(&self, i: VarId) -> Production;
    fn length(&self, i: VarId) -> u64;

    /// Symbol at position u of val(X_i); untracked.
    fn symbol_at(&self, mut i: VarId, mut u: Pos) -> u16 {
        loop {
            match self.rule(i) {
                Production::Terminal(c) => return c,
                Production::Nonterminal(l, r) => {
                    let gl = self.length(l);
                    if u <= gl {
                        i = l;
                    } else {
                        u -= gl;
                        i = r;
                    }
                }
            }
        }
    }

    /// Deepest node of T_i whose span contains [b, e]: the node at whose
    /// child boundary the interval splits, or the containing leaf if b = e.
    /// Returns (label, span start within X_i).
    fn crossing(&self, i: VarId, b: Pos, e: Pos) -> (VarId, Pos) {
        debug_assert!(b >= 1 && b <= e && e <= self.length(i));
        let mut v = i;
        let mut off: Pos = 1;
        let (mut b, mut e) = (b, e);
        loop {
            match self.rule(v) {
                Production::Terminal(_) => return (v, off),
                Production::Nonterminal(l, r) => {
                    let gl = self.length(l);
                    if e <= gl {
                        v = l;
                    } else if b > gl {
                        b -= gl;
                        e -= gl;
                        off += gl;
                        v = r;
                    } else {
                        return (v, off);
                    }
                }
            }
        }
    }

    /// Maximal subtree roots covering val(X_j)[from..], left to right,
    /// as (label, span start within X_j).
    fn suffix_pieces(&self, j: VarId, from: Pos) -> Vec<(VarId, Pos)> {
        debug_assert!(from >= 1 && from <= self.length(j));
        let mut out = Vec::new();
        let mut rights: Vec<(VarId, Pos)> = Vec::new();
        let mut v = j;
        let mut f = from;
        let mut pos: Pos = 1;
        loop {
            if f == 1 {
                out.push((v, pos));
                break;
            }
            match self.rule(v) {
                Production::Terminal(_) => unreachable!("descent past a leaf"),
                Production::Nonterminal(l, r) => {
                    let gl = self.length(l);
                    if f <= gl {
                        rights.push((r, pos + gl));
                        v = l;
                    } else {
                        pos += gl;
                        f -= gl;
                        v = r;
                    }
                }
            }
        }
        // Deeper pending right children sit closer to the split position.
        while let Some(p) = rights.pop() {
            out.push(p);
        }
        out
    }

    /// Maximal subtree roots covering val(X_j)[1..=upto], left to right.
    fn prefix_pieces(&self, j: VarId, upto: Pos) -> Vec<(VarId, Pos)> {
        debug_assert!(upto >= 1 && upto <= self.length(j));
        let mut out = Vec::new();
        let mut v = j;
        let mut u = upto;
        let mut pos: Pos = 1;
        loop {
            if u == self.length(v) {
                out.push((v, pos));
                break;
            }
            match self.rule(v) {
                Production::Terminal(_) => unreachable!("descent past a leaf"),
                Production::Nonterminal(l, r) => {
                    let gl = self.length(l);
                    if u > gl {
                        out.push((l, pos));
                        pos += gl;
                        u -= gl;
                        v = r;
                    } else {
                        v = l;
                    }
                }
            }
        }
        out
    }

    /// Maximal subtree roots covering val(X_i)[b..=e], left to right.
    fn decompose_var(&self, i: VarId, b: Pos, e: Pos) -> Vec<(VarId, Pos)> {
        debug_assert!(b >= 1 && b <= e && e <= self.length(i));
        let (v, off) = self.crossing(i, b, e);
        let (lb, le) = (b - off + 1, e - off + 1);
        if lb == 1 && le == self.length(v) {
            return vec![(v, off)];
        }
        match self.rule(v) {
            Production::Terminal(_) => vec![(v, off)],
            Production::Nonterminal(l, r) => {
                let gl = self.length(l);
                debug_assert!(lb <= gl && le > gl);
                let mut out: Vec<(VarId, Pos)> = self
                    .suffix_pieces(l, lb)
                    .into_iter()
                    .map(|(x, p)| (x, p + off - 1))
                    .collect();
                out.extend(
                    self.prefix_pieces(r, le - gl)
                        .into_iter()
                        .map(|(x, p)| (x, p + off - 1 + gl)),
                );
                out
            }
        }
    }

    /// Pieces covering val(X_i)[b..=e], each strictly shorter than `bound`,
    /// left to right. Oversized decomposition pieces are split further.
    fn decompose_bounded(&self, i: VarId, b: Pos, e: Pos, bound: u64) -> Vec<(VarId, Pos)> {
        debug_assert!(bound >= 2);
        let mut work = self.decompose_var(i, b, e);
        work.reverse();
        let mut out = Vec::new();
        while let Some((v, pos)) = work.pop() {
            if self.length(v) < bound {
                out.push((v, pos));
            } else if let Production::Nonterminal(l, r) = self.rule(v) {
                work.push((r, pos + self.length(l)));
                work.push((l, pos));
            }
        }
        out
    }

    /// Appends val(X_i) to `out`; untracked.
    fn materialize_into(&self, i: VarId, out: &mut Vec<u16>) {
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            match self.rule(v) {
                Production::Terminal(c) => out.push(c),
                Production::Nonterminal(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
    }
}

/// A validated SLP with precomputed per-variable lengths and heights.
#[derive(Debug, Clone)]
pub struct Slp {
    rules: Vec<Production>,
    lens: Vec<u64>,
    heights: Vec<u32>,
    ticks: Arc<AtomicU64>,
}

impl Nav for Slp {
    fn rule(&self, i: VarId) -> Production {
        self.rules[i as usize - 1]
    }

    fn length(&self, i: VarId) -> u64 {
        self.lens[i as usize - 1]
    }
}

impl Slp {
    pub fn from_rules(rules: Vec<Production>) -> Result<Slp, SlpError> {
        let violations = validate_rules(&rules);
        if !violations.is_empty() {
            return Err(SlpError::Invalid(violations));
        }
        let mut lens = Vec::with_capacity(rules.len());
        let mut heights = Vec::with_capacity(rules.len());
        for rule in &rules {
            match *rule {
                Production::Terminal(_) => {
                    lens.push(1u64);
                    heights.push(0u32);
                }
                Production::Nonterminal(l, r) => {
                    lens.push(lens[l as usize - 1] + lens[r as usize - 1]);
                    heights.push(1 + heights[l as usize - 1].max(heights[r as usize - 1]));
                }
            }
        }
        Ok(Slp {
            rules,
            lens,
            heights,
            ticks: Arc::new(AtomicU64::new(0)),
        })
    }

    /// Re-derives lengths and heights and re-checks structure; returns
    /// violations (always empty for values built through `from_rules`).
    pub fn validate(&self) -> Vec<String> {
        let mut out = validate_rules(&self.rules);
        if !out.is_empty() {
            return out;
        }
        let rebuilt = Slp::from_rules(self.rules.clone()).unwrap();
        if rebuilt.lens != self.lens {
            out.push("cached lengths disagree with rules".to_string());
        }
        if rebuilt.heights != self.heights {
            out.push("cached heights disagree with rules".to_string());
        }
        out
    }

    pub fn n(&self) -> u32 {
        self.rules.len() as u32
    }

    pub fn root(&self) -> VarId {
        self.rules.len() as u32
    }

    pub fn rules(&self) -> &[Production] {
        &self.rules
    }

    pub fn production(&self, i: VarId) -> Result<Production, SlpError> {
        self.check_var(i)?;
        Ok(self.rules[i as usize - 1])
    }

    /// (derived length, height) of variable i.
    pub fn metrics(&self, i: VarId) -> Result<(u64, u32), SlpError> {
        self.check_var(i)?;
        Ok((self.lens[i as usize - 1], self.heights[i as usize - 1]))
    }

    pub fn text_len(&self) -> u64 {
        self.lens[self.rules.len() - 1]
    }

    fn check_var(&self, i: VarId) -> Result<(), SlpError> {
        if i == 0 || i as usize > self.rules.len() {
            Err(SlpError::BadVar(i))
        } else {
            Ok(())
        }
    }

    pub(crate) fn prod(&self, i: VarId) -> Production {
        self.rules[i as usize - 1]
    }

    pub(crate) fn len(&self, i: VarId) -> u64 {
        self.lens[i as usize - 1]
    }

    /// Symbol at position u of val(X_i). Counts as materialization.
    pub fn char_at(&self, i: VarId, u: Pos) -> Result<u16, SlpError> {
        self.check_var(i)?;
        let len = self.len(i);
        if u == 0 || u > len {
            return Err(SlpError::BadPos { var: i, pos: u, len });
        }
        self.tick(1);
        Ok(self.symbol_at(i, u))
    }

    /// The deepest node of T_i whose span contains iv; for b < e this is the
    /// node at whose child boundary the interval is split, for b = e the
    /// containing leaf.
    pub fn crossing_node(&self, i: VarId, iv: Interval) -> Result<NodeLocator, SlpError> {
        self.check_var(i)?;
        let len = self.len(i);
        if iv.e > len {
            return Err(SlpError::BadInterval {
                var: i,
                b: iv.b,
                e: iv.e,
                len,
            });
        }
        let (label, position) = self.crossing(i, iv.b, iv.e);
        Ok(NodeLocator { label, position })
    }

    /// Maximal subtree roots of T_root covering exactly iv, left to right.
    pub fn decompose_interval(&self, iv: Interval) -> Result<Vec<NodeLocator>, SlpError> {
        let root = self.root();
        let len = self.len(root);
        if iv.e > len {
            return Err(SlpError::BadInterval {
                var: root,
                b: iv.b,
                e: iv.e,
                len,
            });
        }
        Ok(self
            .decompose_var(root, iv.b, iv.e)
            .into_iter()
            .map(|(label, position)| NodeLocator { label, position })
            .collect())
    }

    /// Full derived string as symbol codes. Counts as materialization.
    pub fn decompress(&self) -> Vec<u16> {
        self.decompress_variable(self.root())
    }

    /// val(X_i) as symbol codes. Counts as materialization.
    pub fn decompress_variable(&self, i: VarId) -> Vec<u16> {
        let mut out = Vec::with_capacity(self.len(i) as usize);
        self.materialize_into(i, &mut out);
        self.tick(out.len() as u64);
        out
    }

    /// Derived substring over iv. Counts as materialization.
    pub fn decompress_range(&self, iv: Interval) -> Result<Vec<u16>, SlpError> {
        let root = self.root();
        let len = self.len(root);
        if iv.e > len {
            return Err(SlpError::BadInterval {
                var: root,
                b: iv.b,
                e: iv.e,
                len,
            });
        }
        let mut out = Vec::with_capacity(iv.len() as usize);
        for (v, _) in self.decompose_var(root, iv.b, iv.e) {
            self.materialize_into(v, &mut out);
        }
        self.tick(out.len() as u64);
        Ok(out)
    }

    /// Full derived string as bytes; errors on synthetic (non-byte) codes.
    pub fn decompress_bytes(&self) -> Result<Vec<u8>, SlpError> {
        self.decompress()
            .into_iter()
            .map(|c| u8::try_from(c).map_err(|_| SlpError::NonByteSymbol(c)))
            .collect()
    }

    /// How many characters of derived text have been materialized through
    /// this value (shared across clones).
    pub fn materialization_ticks(&self) -> u64 {
        self.ticks.load(Ordering::Relaxed)
    }

    pub(crate) fn tick(&self, by: u64) {
        self.ticks.fetch_add(by, Ordering::Relaxed);
    }

    /// Number of nodes labeled by each variable in T_root (index 0 unused).
    pub(crate) fn occ_counts(&self) -> Vec<u64> {
        let n = self.rules.len();
        let mut out = vec![0u64; n + 1];
        out[n] = 1;
        for i in (1..=n).rev() {
            let k = out[i];
            if k == 0 {
                continue;
            }
            if let Production::Nonterminal(l, r) = self.rules[i - 1] {
                out[l as usize] += k;
                out[r as usize] += k;
            }
        }
        out
    }

    /// Start position of the leftmost occurrence of each variable in the
    /// root's derivation (index 0 unused; None = unreachable).
    #[cfg(test)]
    pub(crate) fn leftmost_offsets(&self) -> Vec<Option<Pos>> {
        let n = self.rules.len();
        let mut left: Vec<Option<Pos>> = vec![None; n + 1];
        left[n] = Some(1);
        for i in (1..=n).rev() {
            let Some(off) = left[i] else { continue };
            if let Production::Nonterminal(l, r) = self.rules[i - 1] {
                let gl = self.lens[l as usize - 1];
                left[l as usize] = Some(left[l as usize].map_or(off, |x| x.min(off)));
                let roff = off + gl;
                left[r as usize] = Some(left[r as usize].map_or(roff, |x| x.min(roff)));
            }
        }
        left
    }
}
