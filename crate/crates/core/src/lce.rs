//! Longest-common-extension queries answered on the grammar.
//!
//! The engine works over a universe holding the input grammar together with
//! its reversal, topped by one rule deriving s·reverse(s). Suffix
//! comparisons inside that doubled string answer all four directed
//! extension modes once clipped to the half they conceptually live in.

use crate::ap_match::{Ctx, Universe};
use crate::slp_core::{Pos, Slp, SlpError, VarId};

/// The four directed extension modes over a string s of length N.
///
/// - `Rr`: lcp(s[k1..], s[k2..]) — both extend right.
/// - `Ll`: lcs(s[1..=k1], s[1..=k2]) — both extend left.
/// - `Lr`: lcp(reverse(s[1..=k1]), s[k2..]) — left arm mirrored against a
///   right extension (outward palindrome growth around a gap).
/// - `Rl`: lcp(s[k1..], reverse(s[1..=k2])).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LceDirection {
    Rr,
    Ll,
    Lr,
    Rl,
}

impl std::str::FromStr for LceDirection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rr" => Ok(LceDirection::Rr),
            "ll" => Ok(LceDirection::Ll),
            "lr" => Ok(LceDirection::Lr),
            "rl" => Ok(LceDirection::Rl),
            other => Err(format!("unknown LCE mode: {other}")),
        }
    }
}

/// Extension and matching queries on one input grammar. Building the engine
/// is cheap; per-query work is memoized across the engine's lifetime.
pub struct LceEngine {
    ctx: Ctx,
    root: VarId,
    n: u64,
}

impl LceEngine {
    pub fn new(s: &Slp) -> LceEngine {
        let (mut uni, roots) = Universe::mirrored(&[s]);
        let fwd = roots[0];
        let twin = uni.twin_of(fwd);
        let root = uni.append_pair(fwd, twin);
        LceEngine { ctx: Ctx::new(uni), root, n: s.text_len() }
    }

    pub fn text_len(&self) -> u64 {
        self.n
    }

    fn check_pos(&self, k: Pos) -> Result<(), SlpError> {
        if k == 0 || k > self.n {
            return Err(SlpError::BadPos { var: self.root, pos: k, len: self.n });
        }
        Ok(())
    }

    /// Directed extension length from positions k1 and k2 of the text.
    pub fn lce(&self, mode: LceDirection, k1: Pos, k2: Pos) -> Result<u64, SlpError> {
        self.check_pos(k1)?;
        self.check_pos(k2)?;
        let n = self.n;
        // Position k read leftwards is position 2n+1-k of s·reverse(s).
        let mir = |k: Pos| 2 * n + 1 - k;
        let raw = match mode {
            LceDirection::Rr => self.ctx.lce_rr_var(self.root, k1, k2),
            LceDirection::Ll => self.ctx.lce_rr_var(self.root, mir(k1), mir(k2)),
            LceDirection::Lr => self.ctx.lce_rr_var(self.root, mir(k1), k2),
            LceDirection::Rl => self.ctx.lce_rr_var(self.root, k1, mir(k2)),
        };
        let cap = match mode {
            LceDirection::Rr => (n - k1 + 1).min(n - k2 + 1),
            LceDirection::Ll => k1.min(k2),
            LceDirection::Lr => k1.min(n - k2 + 1),
            LceDirection::Rl => (n - k1 + 1).min(k2),
        };
        Ok(raw.min(cap))
    }

    /// Does val(X_j) occur at position k of val(X_i)?
    pub fn match_at(&self, i: VarId, j: VarId, k: Pos) -> Result<bool, SlpError> {
        let (li, lj) = (self.var_len(i)?, self.var_len(j)?);
        if k == 0 || k > li {
            return Err(SlpError::BadPos { var: i, pos: k, len: li });
        }
        if k + lj - 1 > li {
            return Ok(false);
        }
        Ok(self.ctx.match_at(i, k, j))
    }

    /// Length matched when val(X_j) is laid at position k of val(X_i):
    /// lcp(val(X_i)[k..], val(X_j)).
    pub fn first_mismatch(&self, i: VarId, j: VarId, k: Pos) -> Result<u64, SlpError> {
        let li = self.var_len(i)?;
        self.var_len(j)?;
        if k == 0 || k > li {
            return Err(SlpError::BadPos { var: i, pos: k, len: li });
        }
        Ok(self.ctx.descend_lcp(i, k, j))
    }

    fn var_len(&self, i: VarId) -> Result<u64, SlpError> {
        // Only the input grammar's variables are addressable from outside.
        let base = (self.ctx.uni.n() - 1) / 2; // mirrored pair plus one root
        if i == 0 || i > base {
            return Err(SlpError::BadVar(i));
        }
        Ok(crate::slp_core::Nav::length(&self.ctx.uni, i))
    }
}
