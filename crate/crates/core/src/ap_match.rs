//! Crossing occurrences kept as arithmetic progressions.
//!
//! For a nonterminal X → X_l X_r, an occurrence of a pattern Y in val(X)
//! crosses the cut when it covers the boundary between the two parts. All
//! crossing occurrences of a fixed Y cover one common position, so they form
//! a single arithmetic progression. The engine below computes these
//! progressions for pairs of variables by recursion on the pattern,
//! settling candidate positions with periodicity arguments instead of
//! materializing text. Everything else — substring comparison, longest
//! common extensions, windowed occurrence search — is built on top.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::slp_core::{Nav, Pos, Production, Slp, SlpError, VarId};

/// Positions first, first+diff, ..., first+(count-1)*diff.
///
/// Canonical form: empty is all zeros, a singleton has diff 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArithProg {
    pub first: u64,
    pub diff: u64,
    pub count: u64,
}

impl ArithProg {
    pub fn empty() -> ArithProg {
        ArithProg { first: 0, diff: 0, count: 0 }
    }

    pub fn single(p: u64) -> ArithProg {
        ArithProg { first: p, diff: 0, count: 1 }
    }

    pub fn from_parts(first: u64, diff: u64, count: u64) -> ArithProg {
        match count {
            0 => ArithProg::empty(),
            1 => ArithProg::single(first),
            _ => {
                debug_assert!(diff > 0);
                debug_assert!(first.checked_add((count - 1).checked_mul(diff).unwrap()).is_some());
                ArithProg { first, diff, count }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn last(&self) -> u64 {
        debug_assert!(self.count > 0);
        self.first + (self.count - 1) * self.diff
    }

    pub fn nth(&self, j: u64) -> u64 {
        debug_assert!(j < self.count);
        self.first + j * self.diff
    }

    pub fn contains(&self, p: u64) -> bool {
        if self.count == 0 || p < self.first || p > self.last() {
            return false;
        }
        if self.diff == 0 {
            return p == self.first;
        }
        (p - self.first).is_multiple_of(self.diff)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let (f, d) = (self.first, self.diff);
        (0..self.count).map(move |j| f + j * d)
    }

    /// Members within the inclusive range [b, e].
    pub fn window(&self, b: u64, e: u64) -> ArithProg {
        if self.count == 0 || b > e || self.last() < b || self.first > e {
            return ArithProg::empty();
        }
        if self.diff == 0 {
            return ArithProg::single(self.first);
        }
        let lo = if self.first >= b {
            0
        } else {
            (b - self.first).div_ceil(self.diff)
        };
        let hi = if self.last() <= e {
            self.count - 1
        } else {
            (e - self.first) / self.diff
        };
        if hi < lo {
            return ArithProg::empty();
        }
        ArithProg::from_parts(self.first + lo * self.diff, self.diff, hi - lo + 1)
    }

    /// Image under p ↦ m - p, re-sorted ascending. Requires m ≥ last member.
    pub fn reflect(&self, m: u64) -> ArithProg {
        if self.count == 0 {
            return ArithProg::empty();
        }
        debug_assert!(m >= self.last());
        ArithProg::from_parts(m - self.last(), self.diff, self.count)
    }

    /// All members shifted up by delta.
    pub fn shift(&self, delta: u64) -> ArithProg {
        if self.count == 0 {
            return ArithProg::empty();
        }
        ArithProg::from_parts(self.first + delta, self.diff, self.count)
    }

    /// Members p with p ≡ parity (mod 2).
    pub fn with_parity(&self, parity: u64) -> ArithProg {
        debug_assert!(parity <= 1);
        if self.count == 0 {
            return ArithProg::empty();
        }
        if self.diff.is_multiple_of(2) {
            // All members share the parity of the first one.
            return if self.first % 2 == parity { *self } else { ArithProg::empty() };
        }
        // Odd step: parities alternate.
        let j0 = if self.first % 2 == parity { 0 } else { 1 };
        if j0 >= self.count {
            return ArithProg::empty();
        }
        ArithProg::from_parts(
            self.first + j0 * self.diff,
            self.diff * 2,
            (self.count - j0).div_ceil(2),
        )
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Merges disjoint progressions known to form one progression together
/// (occurrences of one string covering a common position always do).
/// Panics if the union is not a single progression.
pub(crate) fn merge_aps(parts: &[ArithProg]) -> ArithProg {
    let mut total = 0u64;
    let mut min_f = u64::MAX;
    let mut max_l = 0u64;
    for p in parts.iter().filter(|p| !p.is_empty()) {
        total += p.count;
        min_f = min_f.min(p.first);
        max_l = max_l.max(p.last());
    }
    if total == 0 {
        return ArithProg::empty();
    }
    if total == 1 {
        return ArithProg::single(min_f);
    }
    let mut g = 0u64;
    for p in parts.iter().filter(|p| !p.is_empty()) {
        if p.count >= 2 {
            g = gcd(g, p.diff);
        }
        g = gcd(g, p.first - min_f);
    }
    assert!(g > 0, "duplicate positions while merging progressions");
    let count = (max_l - min_f) / g + 1;
    assert!(
        count == total,
        "occurrences in a short window must form a single progression"
    );
    let merged = ArithProg::from_parts(min_f, g, count);
    #[cfg(debug_assertions)]
    if total <= 64 {
        let mut all: Vec<u64> = parts.iter().flat_map(|p| p.iter()).collect();
        all.sort_unstable();
        assert!(all.iter().copied().eq(merged.iter()));
    }
    merged
}

/// Exact non-negative rational, used for search-window widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den > 0, "zero denominator");
        Ratio { num, den }
    }

    pub fn floor_mul(&self, m: u64) -> u64 {
        ((self.num as u128 * m as u128) / self.den as u128) as u64
    }

    pub fn ceil(&self) -> u64 {
        self.num.div_ceil(self.den)
    }
}

/// A rule set holding some base grammars forwards and backwards, plus
/// appended pair rules. Every variable i has a twin deriving the reversed
/// string; the twin of an appended rule is appended automatically.
pub(crate) struct Universe {
    rules: Vec<Production>,
    lens: Vec<u64>,
    heights: Vec<u32>,
    twins: Vec<VarId>,
    cons: HashMap<(VarId, VarId), VarId>,
}

impl Nav for Universe {
    fn rule(&self, i: VarId) -> Production {
        self.rules[i as usize - 1]
    }

    fn length(&self, i: VarId) -> u64 {
        self.lens[i as usize - 1]
    }
}

impl Universe {
    /// Lays out the given grammars in order, then all of them reversed, so
    /// that part k's variables keep their ids shifted by the sizes of the
    /// parts before it. Returns the universe and the forward root ids.
    pub(crate) fn mirrored(parts: &[&Slp]) -> (Universe, Vec<VarId>) {
        let n_a: u32 = parts.iter().map(|p| p.n()).sum();
        let mut rules = Vec::with_capacity(2 * n_a as usize);
        let mut roots = Vec::with_capacity(parts.len());
        let mut off = 0u32;
        for p in parts {
            for rule in p.rules() {
                rules.push(match *rule {
                    Production::Terminal(c) => Production::Terminal(c),
                    Production::Nonterminal(l, r) => Production::Nonterminal(l + off, r + off),
                });
            }
            off += p.n();
            roots.push(off);
        }
        for i in 0..n_a as usize {
            rules.push(match rules[i] {
                Production::Terminal(c) => Production::Terminal(c),
                Production::Nonterminal(l, r) => Production::Nonterminal(r + n_a, l + n_a),
            });
        }
        let mut u = Universe {
            rules: Vec::new(),
            lens: Vec::new(),
            heights: Vec::new(),
            twins: (1..=2 * n_a).map(|i| if i <= n_a { i + n_a } else { i - n_a }).collect(),
            cons: HashMap::new(),
        };
        for rule in rules {
            let (len, h) = u.derive(rule);
            u.rules.push(rule);
            u.lens.push(len);
            u.heights.push(h);
        }
        (u, roots)
    }

    fn derive(&self, p: Production) -> (u64, u32) {
        match p {
            Production::Terminal(_) => (1, 0),
            Production::Nonterminal(l, r) => (
                self.lens[l as usize - 1] + self.lens[r as usize - 1],
                1 + self.heights[l as usize - 1].max(self.heights[r as usize - 1]),
            ),
        }
    }

    pub(crate) fn n(&self) -> u32 {
        self.rules.len() as u32
    }

    pub(crate) fn twin_of(&self, i: VarId) -> VarId {
        self.twins[i as usize - 1]
    }

    pub(crate) fn height_of(&self, i: VarId) -> u32 {
        self.heights[i as usize - 1]
    }

    fn push_raw(&mut self, p: Production) -> VarId {
        let (len, h) = self.derive(p);
        self.rules.push(p);
        self.lens.push(len);
        self.heights.push(h);
        self.twins.push(0);
        self.rules.len() as VarId
    }

    /// Appends the rule (l, r) and its reversed twin, hash-consed.
    pub(crate) fn append_pair(&mut self, l: VarId, r: VarId) -> VarId {
        if let Some(&id) = self.cons.get(&(l, r)) {
            return id;
        }
        let id = self.push_raw(Production::Nonterminal(l, r));
        let (tl, tr) = (self.twin_of(r), self.twin_of(l));
        if (tl, tr) == (l, r) {
            self.twins[id as usize - 1] = id;
        } else {
            let tid = self.push_raw(Production::Nonterminal(tl, tr));
            self.twins[id as usize - 1] = tid;
            self.twins[tid as usize - 1] = id;
            self.cons.insert((tl, tr), tid);
        }
        self.cons.insert((l, r), id);
        id
    }

    #[cfg(test)]
    pub(crate) fn value(&self, i: VarId) -> Vec<u16> {
        let mut out = Vec::new();
        self.materialize_into(i, &mut out);
        out
    }
}

/// Matching context: a universe plus the memo table of crossing-occurrence
/// progressions computed so far.
pub(crate) struct Ctx {
    pub(crate) uni: Universe,
    entries: RefCell<HashMap<(VarId, VarId), ArithProg>>,
}

impl Ctx {
    pub(crate) fn new(uni: Universe) -> Ctx {
        Ctx { uni, entries: RefCell::new(HashMap::new()) }
    }

    pub(crate) fn append_pair(&mut self, l: VarId, r: VarId) -> VarId {
        self.uni.append_pair(l, r)
    }


    /// Occurrences of val(y) in val(x) crossing x's cut, |y| ≥ 2.
    pub(crate) fn entry(&self, x: VarId, y: VarId) -> ArithProg {
        debug_assert!(self.uni.length(y) >= 2);
        if self.uni.length(y) > self.uni.length(x) {
            return ArithProg::empty();
        }
        if let Some(e) = self.entries.borrow().get(&(x, y)) {
            return *e;
        }
        let res = self.compute_entry(x, y);
        self.entries.borrow_mut().insert((x, y), res);
        res
    }

    fn compute_entry(&self, x: VarId, y: VarId) -> ArithProg {
        let Production::Nonterminal(xl, _) = self.uni.rule(x) else {
            return ArithProg::empty();
        };
        let Production::Nonterminal(ya, yb) = self.uni.rule(y) else {
            unreachable!("pattern of length >= 2 must be a pair");
        };
        let gamma = self.uni.length(xl);
        let n_x = self.uni.length(x);
        let m = self.uni.length(y);
        let ma = self.uni.length(ya);
        let mb = self.uni.length(yb);
        let w_lo = 1.max((gamma + 2).saturating_sub(m));
        let w_hi = gamma.min(n_x - m + 1);
        if w_lo > w_hi {
            return ArithProg::empty();
        }
        let mut results: Vec<ArithProg> = Vec::new();

        // Pattern cut at or to the right of the text cut: the pattern's left
        // part must itself cross the cut, or end exactly at it. Candidates
        // are verified occurrences of the left part; the tail is checked in
        // one periodicity probe.
        let a_lo = w_lo.max((gamma + 1).saturating_sub(ma));
        if a_lo <= w_hi {
            let mut cands: Vec<ArithProg> = Vec::new();
            if ma >= 2 {
                cands.push(self.entry(x, ya).window(a_lo, w_hi));
            }
            if gamma + 1 > ma {
                let w2 = gamma + 1 - ma;
                if w2 >= a_lo && w2 <= w_hi && self.match_at(x, w2, ya) {
                    cands.push(ArithProg::single(w2));
                }
            }
            let cand = merge_aps(&cands);
            if !cand.is_empty() {
                results.push(self.verify_tail(x, y, ma, cand));
            }
        }

        // Pattern cut strictly inside the text's right part: anchor on
        // crossing occurrences of the pattern's right part and check the
        // rest leftwards, which is the previous case on the twins.
        if mb >= 2 && gamma > ma {
            let b_hi = w_hi.min(gamma - ma);
            if w_lo <= b_hi {
                let u_lo = (w_lo + ma).max((gamma + 2).saturating_sub(mb));
                let u_hi = (b_hi + ma).min(gamma);
                if u_lo <= u_hi {
                    let anchors = self.entry(x, yb).window(u_lo, u_hi);
                    if !anchors.is_empty() {
                        let tx = self.uni.twin_of(x);
                        let ty = self.uni.twin_of(y);
                        let refl = anchors.reflect(n_x + 2 - mb);
                        let verified = self.verify_tail(tx, ty, mb, refl);
                        results.push(verified.reflect(n_x + 2 - m));
                    }
                }
            }
        }
        merge_aps(&results)
    }

    /// Given candidate positions whose first `prefix_len` pattern symbols
    /// are already verified, returns those where the whole pattern matches.
    /// Few candidates are checked one by one; five or more are settled by
    /// comparing the text's periodic stretch with the pattern's.
    fn verify_tail(&self, x: VarId, y: VarId, prefix_len: u64, cands: ArithProg) -> ArithProg {
        let m = self.uni.length(y);
        debug_assert!(prefix_len >= 1 && prefix_len < m);
        if cands.is_empty() {
            return ArithProg::empty();
        }
        let kappa = cands.count;
        let c = cands.diff;
        if kappa <= 4 {
            let mut singles = Vec::new();
            for w in cands.iter() {
                let got = self.pattern_lcp_from(x, w + prefix_len, y, prefix_len);
                if prefix_len + got >= m {
                    singles.push(ArithProg::single(w));
                }
            }
            return merge_aps(&singles);
        }
        debug_assert!(c >= 1 && c < prefix_len);
        let w0 = cands.first;
        // The candidates overlap in a verified stretch, so text from w0 is
        // c-periodic at least up to the last candidate's prefix. Measure how
        // far the periodicity really runs, capped at what decisions need.
        let cap = (kappa - 1) * c + m + 1 - c;
        let rep_text = c + self.text_lcp_capped(x, w0, w0 + c, cap, m);
        let rep_pat = c + self.pattern_lcp_from(y, c + 1, y, 0);
        if rep_pat == m {
            // Fully periodic pattern: matches form a prefix block.
            if rep_text < m {
                return ArithProg::empty();
            }
            let jmax = ((rep_text - m) / c).min(kappa - 1);
            return ArithProg::from_parts(w0, c, jmax + 1);
        }
        // The pattern's periodicity breaks first; only the candidate whose
        // text stretch ends exactly at the break can survive.
        let istar = rep_pat;
        if rep_text < istar || !(rep_text - istar).is_multiple_of(c) {
            return ArithProg::empty();
        }
        let jp = (rep_text - istar) / c;
        if jp > kappa - 1 {
            return ArithProg::empty();
        }
        let wj = w0 + jp * c;
        let ext = self.pattern_lcp_from(x, wj + istar, y, istar);
        if istar + ext >= m {
            ArithProg::single(wj)
        } else {
            ArithProg::empty()
        }
    }

    /// Does val(z) occur in val(x) at position pos? Requires the occurrence
    /// window to fit: pos + |z| - 1 ≤ |x|.
    pub(crate) fn match_at(&self, x: VarId, pos: Pos, z: VarId) -> bool {
        let lz = self.uni.length(z);
        debug_assert!(pos >= 1 && pos + lz - 1 <= self.uni.length(x));
        if lz == 1 {
            return self.uni.symbol_at(x, pos) == self.uni.symbol_at(z, 1);
        }
        let (v, off) = self.uni.crossing(x, pos, pos + lz - 1);
        self.entry(v, z).contains(pos - off + 1)
    }

    /// lcp(val(x)[pos..], val(v)), never reading past either end.
    pub(crate) fn descend_lcp(&self, x: VarId, pos: Pos, v: VarId) -> u64 {
        if pos > self.uni.length(x) {
            return 0;
        }
        let avail = self.uni.length(x) - pos + 1;
        let lv = self.uni.length(v);
        if lv == 1 {
            return (self.uni.symbol_at(x, pos) == self.uni.symbol_at(v, 1)) as u64;
        }
        let Production::Nonterminal(l, r) = self.uni.rule(v) else { unreachable!() };
        let ll = self.uni.length(l);
        if ll <= avail && self.match_at(x, pos, l) {
            ll + self.descend_lcp(x, pos + ll, r)
        } else {
            self.descend_lcp(x, pos, l)
        }
    }

    /// lcp(val(x)[pos..], val(p)[o+1..]).
    pub(crate) fn pattern_lcp_from(&self, x: VarId, pos: Pos, p: VarId, o: u64) -> u64 {
        if o >= self.uni.length(p) || pos > self.uni.length(x) {
            return 0;
        }
        if o == 0 {
            return self.descend_lcp(x, pos, p);
        }
        let len_x = self.uni.length(x);
        let mut acc = 0u64;
        let mut at = pos;
        for (v, _) in self.uni.suffix_pieces(p, o + 1) {
            let lv = self.uni.length(v);
            if at > len_x {
                break;
            }
            if at + lv - 1 <= len_x && self.match_at(x, at, v) {
                acc += lv;
                at += lv;
            } else {
                return acc + self.descend_lcp(x, at, v);
            }
        }
        acc
    }

    /// lcp(val(x)[p1..], val(x)[p2..]) with the second operand clipped to
    /// `cap` symbols; comparison pieces stay shorter than `bound`.
    pub(crate) fn text_lcp_capped(&self, x: VarId, p1: Pos, p2: Pos, cap: u64, bound: u64) -> u64 {
        let len_x = self.uni.length(x);
        debug_assert!(p1 < p2 && p2 <= len_x && cap >= 1);
        let e2 = (p2 + cap - 1).min(len_x);
        let mut acc = 0u64;
        let mut at = p1;
        for (v, _) in self.uni.decompose_bounded(x, p2, e2, bound.max(2)) {
            let lv = self.uni.length(v);
            if at > len_x {
                break;
            }
            if at + lv - 1 <= len_x && self.match_at(x, at, v) {
                acc += lv;
                at += lv;
            } else {
                return acc + self.descend_lcp(x, at, v);
            }
        }
        acc
    }

    /// lcp of the suffixes of val(x) starting at k1 and k2.
    pub(crate) fn lce_rr_var(&self, x: VarId, k1: Pos, k2: Pos) -> u64 {
        let len_x = self.uni.length(x);
        debug_assert!(k1 >= 1 && k1 <= len_x && k2 >= 1 && k2 <= len_x);
        if k1 == k2 {
            return len_x - k1 + 1;
        }
        let (a, b) = (k1.min(k2), k1.max(k2));
        let mut acc = 0u64;
        let mut at = a;
        for (v, _) in self.uni.suffix_pieces(x, b) {
            let lv = self.uni.length(v);
            if at + lv - 1 <= len_x && self.match_at(x, at, v) {
                acc += lv;
                at += lv;
            } else {
                return acc + self.descend_lcp(x, at, v);
            }
        }
        acc
    }
}

/// Crossing-occurrence progressions for all (text variable, pattern
/// variable) pairs with a nonempty progression.
pub struct ApTable {
    text_vars: u32,
    pattern_vars: u32,
    entries: HashMap<(VarId, VarId), ArithProg>,
}

impl ApTable {
    /// Progression for text variable x and pattern variable y (empty when
    /// no crossing occurrence exists or the pair is out of range).
    pub fn get(&self, x: VarId, y: VarId) -> ArithProg {
        self.entries.get(&(x, y)).copied().unwrap_or_else(ArithProg::empty)
    }

    pub fn text_vars(&self) -> u32 {
        self.text_vars
    }

    pub fn pattern_vars(&self) -> u32 {
        self.pattern_vars
    }

    /// Number of nonempty entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Computes the full table of crossing-occurrence progressions of pattern
/// variables (length ≥ 2) inside text variables.
pub fn compute_ap_table(text: &Slp, pattern: &Slp) -> ApTable {
    let (uni, _) = Universe::mirrored(&[text, pattern]);
    let ctx = Ctx::new(uni);
    let nt = text.n();
    let np = pattern.n();
    let mut entries = HashMap::new();
    for j in 1..=np {
        let yg = nt + j;
        let m = ctx.uni.length(yg);
        if m < 2 {
            continue;
        }
        for i in 1..=nt {
            if ctx.uni.length(i) < m {
                continue;
            }
            let e = ctx.entry(i, yg);
            if !e.is_empty() {
                entries.insert((i, j), e);
            }
        }
    }
    ApTable { text_vars: nt, pattern_vars: np, entries }
}

/// All occurrences of val(p) (a pattern variable) in the text starting in
/// the window [b, b + ⌊alpha·|p|⌋], as at most ⌈alpha⌉ + 1 disjoint
/// progressions in ascending order. No text is materialized.
pub fn local_search(
    text: &Slp,
    pattern: &Slp,
    table: &ApTable,
    p: VarId,
    b: Pos,
    alpha: Ratio,
) -> Result<Vec<ArithProg>, SlpError> {
    pattern.metrics(p)?;
    let n = text.text_len();
    if b == 0 || b > n {
        return Err(SlpError::BadPos { var: text.root(), pos: b, len: n });
    }
    let m = pattern.len(p);
    if m > n || b > n - m + 1 {
        return Ok(Vec::new());
    }
    let w_lo = b;
    let w_hi = (b + alpha.floor_mul(m)).min(n - m + 1);
    let mut bag: Vec<ArithProg> = Vec::new();
    if m == 1 {
        let code = pattern.symbol_at(p, 1);
        let mut stack: Vec<(VarId, Pos)> = vec![(text.root(), 1)];
        while let Some((v, off)) = stack.pop() {
            let end = off + text.len(v) - 1;
            if end < w_lo || off > w_hi {
                continue;
            }
            match text.prod(v) {
                Production::Terminal(c) => {
                    if c == code {
                        bag.push(ArithProg::single(off));
                    }
                }
                Production::Nonterminal(l, r) => {
                    stack.push((r, off + text.len(l)));
                    stack.push((l, off));
                }
            }
        }
    } else {
        let ext_hi = w_hi + m - 1;
        let mut stack: Vec<(VarId, Pos)> = vec![(text.root(), 1)];
        while let Some((v, off)) = stack.pop() {
            let lv = text.len(v);
            if lv < m || off + lv - 1 < w_lo || off > ext_hi {
                continue;
            }
            if off <= w_hi {
                let lo_u = w_lo.saturating_sub(off - 1).max(1);
                let hi_u = w_hi - off + 1;
                let e = table.get(v, p).window(lo_u, hi_u.min(lv));
                if !e.is_empty() {
                    bag.push(e.shift(off - 1));
                }
            }
            if let Production::Nonterminal(l, r) = text.prod(v) {
                stack.push((r, off + text.len(l)));
                stack.push((l, off));
            }
        }
    }
    Ok(canonical_progressions(&bag, w_lo, w_hi, m))
}

/// Splits the window into width-m chunks (each holds one progression),
/// merges per chunk, then joins adjacent chunks that continue each other.
fn canonical_progressions(bag: &[ArithProg], w_lo: u64, w_hi: u64, m: u64) -> Vec<ArithProg> {
    let mut out: Vec<ArithProg> = Vec::new();
    let mut c_lo = w_lo;
    while c_lo <= w_hi {
        let c_hi = w_hi.min(c_lo + m - 1);
        let parts: Vec<ArithProg> = bag
            .iter()
            .map(|ap| ap.window(c_lo, c_hi))
            .filter(|ap| !ap.is_empty())
            .collect();
        let merged = merge_aps(&parts);
        if !merged.is_empty() {
            match out.last_mut() {
                Some(prev) if joins(prev, &merged) => {
                    let d = merged.first - prev.last();
                    *prev = ArithProg::from_parts(
                        prev.first,
                        if prev.count == 1 && merged.count == 1 { d } else { prev.diff.max(merged.diff) },
                        prev.count + merged.count,
                    );
                }
                _ => out.push(merged),
            }
        }
        c_lo = c_hi + 1;
    }
    out
}

fn joins(prev: &ArithProg, next: &ArithProg) -> bool {
    let d = next.first - prev.last();
    let ok_prev = prev.count == 1 || prev.diff == d;
    let ok_next = next.count == 1 || next.diff == d;
    ok_prev && ok_next
}
