//! Runs (maximal periodic intervals), square occurrences, and gapped
//! palindromes, detected directly on the grammar.
//!
//! The text is first wrapped in unique end markers so no regularity touches
//! the ends. Every run (or palindrome) then has a unique attribution node
//! in the derivation tree: the deepest node containing the interval widened
//! by one position on each side. Per variable we therefore report the
//! regularities that are interior to its string and cover its cut, in
//! variable-local coordinates; the global answer set is the union over all
//! tree nodes, and global counts are plain weighted sums by node
//! multiplicity. Families are kept compact: runs as quintuplet blocks whose
//! members step linearly, palindromes as groups with linear endpoints.

use std::collections::{BTreeMap, HashMap};

use crate::ap_match::{merge_aps, ArithProg, Ctx, Universe};
use crate::doubling::{prefix_chain, suffix_chain};
use crate::grammar_io::add_sentinels;
use crate::slp_core::{Nav, Pos, Production, Slp, VarId};

/// A maximal periodic interval: val[b..=e] has smallest period c and
/// extends in neither direction, with e - b + 1 ≥ 2c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run {
    pub b: Pos,
    pub e: Pos,
    pub c: u64,
}

/// A block of runs stepping linearly: member j ∈ [0, k) is
/// ⟨d1 - c·j, d2 + c·j, d3 + c·j⟩ (interval and period in local
/// coordinates of the owning variable).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunQuintuplet {
    pub d1: Pos,
    pub d2: Pos,
    pub d3: u64,
    pub c: u64,
    pub k: u64,
}

impl RunQuintuplet {
    pub fn member(&self, j: u64) -> Run {
        debug_assert!(j < self.k);
        Run {
            b: self.d1 - self.c * j,
            e: self.d2 + self.c * j,
            c: self.d3 + self.c * j,
        }
    }
}

/// A maximal gapped palindrome: arms of length a ≥ 1 around a gap of g
/// symbols, val[b..b+a-1] reversed equals val[e-a+1..e], with
/// e - b + 1 = 2a + g and no longer arms possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GappedPal {
    pub b: Pos,
    pub e: Pos,
}

/// A family of palindromes with linearly moving endpoints: member
/// j ∈ [0, k) is ⟨b0 + db·j, e0 + de·j⟩ in local coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GPalGroup {
    pub b0: Pos,
    pub e0: Pos,
    pub db: i64,
    pub de: i64,
    pub k: u64,
}

impl GPalGroup {
    pub fn member(&self, j: u64) -> GappedPal {
        debug_assert!(j < self.k);
        GappedPal {
            b: (self.b0 as i128 + self.db as i128 * j as i128) as u64,
            e: (self.e0 as i128 + self.de as i128 * j as i128) as u64,
        }
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Shared detection state over the marker-wrapped grammar: the mirrored
/// universe, memoized doubling chains, and the matching context.
struct Detector {
    ctx: Ctx,
    pre_chains: HashMap<VarId, Vec<VarId>>,
    suf_chains: HashMap<VarId, Vec<VarId>>,
}

/// One emitted block in local coordinates, before filtering and regrouping.
#[derive(Debug, Clone, Copy)]
struct RawQ {
    d1: u64,
    d2: u64,
    d3: u64,
    c: u64,
    k: u64,
}

impl Detector {
    fn new(st: &Slp) -> Detector {
        let (uni, _) = Universe::mirrored(&[st]);
        Detector {
            ctx: Ctx::new(uni),
            pre_chains: HashMap::new(),
            suf_chains: HashMap::new(),
        }
    }

    fn len(&self, v: VarId) -> u64 {
        self.ctx.uni.length(v)
    }

    fn twin(&self, v: VarId) -> VarId {
        self.ctx.uni.twin_of(v)
    }

    fn prefix_chain_of(&mut self, v: VarId) -> Vec<VarId> {
        if let Some(ch) = self.pre_chains.get(&v) {
            return ch.clone();
        }
        let ch = prefix_chain(&mut self.ctx, v);
        self.pre_chains.insert(v, ch.clone());
        ch
    }

    fn suffix_chain_of(&mut self, v: VarId) -> Vec<VarId> {
        if let Some(ch) = self.suf_chains.get(&v) {
            return ch.clone();
        }
        let ch = suffix_chain(&mut self.ctx, v);
        self.suf_chains.insert(v, ch.clone());
        ch
    }

    /// lcp of suffixes k1, k2 of val(y); 0 when either is out of range.
    fn rr(&self, y: VarId, k1: u64, k2: u64) -> u64 {
        let n = self.len(y);
        if k1 == 0 || k2 == 0 || k1 > n || k2 > n {
            return 0;
        }
        self.ctx.lce_rr_var(y, k1, k2)
    }

    /// lcs of prefixes ending at k1, k2 of val(y); 0 when out of range.
    fn ll(&self, y: VarId, k1: u64, k2: u64) -> u64 {
        let n = self.len(y);
        if k1 == 0 || k2 == 0 || k1 > n || k2 > n {
            return 0;
        }
        let ty = self.twin(y);
        self.ctx.lce_rr_var(ty, n + 1 - k1, n + 1 - k2)
    }

    /// lcp(reverse(val(y)[..k_rev]), val(y)[k_fwd..]); 0 when out of range.
    fn lr(&self, y: VarId, k_rev: u64, k_fwd: u64) -> u64 {
        let n = self.len(y);
        if k_rev == 0 || k_rev > n || k_fwd == 0 || k_fwd > n {
            return 0;
        }
        let ty = self.twin(y);
        self.ctx.pattern_lcp_from(ty, n + 1 - k_rev, y, k_fwd - 1)
    }

    /// Occurrences of val(p) in val(y) starting within [w_lo, w_hi], as
    /// disjoint ascending progressions, each confined to a width-|p| chunk
    /// (so progression steps stay below |p|).
    fn window_occurrences(&self, y: VarId, p: VarId, w_lo: u64, w_hi: u64) -> Vec<ArithProg> {
        let n = self.len(y);
        let m = self.len(p);
        if m > n || w_lo > w_hi {
            return Vec::new();
        }
        let w_hi = w_hi.min(n - m + 1);
        if w_lo > w_hi {
            return Vec::new();
        }
        if m == 1 {
            // Tiny windows only; test positions directly.
            let sym = self.ctx.uni.symbol_at(p, 1);
            let mut out = Vec::new();
            for w in w_lo..=w_hi {
                if self.ctx.uni.symbol_at(y, w) == sym {
                    out.push(ArithProg::single(w));
                }
            }
            return out;
        }
        let mut bag: Vec<ArithProg> = Vec::new();
        let ext_hi = w_hi + m - 1;
        let mut stack: Vec<(VarId, u64)> = vec![(y, 1)];
        while let Some((v, off)) = stack.pop() {
            let lv = self.len(v);
            if lv < m || off + lv - 1 < w_lo || off > ext_hi {
                continue;
            }
            if off <= w_hi {
                let lo_u = w_lo.saturating_sub(off - 1).max(1);
                let hi_u = (w_hi - off + 1).min(lv);
                let e = self.ctx.entry(v, p).window(lo_u, hi_u);
                if !e.is_empty() {
                    bag.push(e.shift(off - 1));
                }
            }
            if let Production::Nonterminal(l, r) = self.ctx.uni.rule(v) {
                stack.push((r, off + self.len(l)));
                stack.push((l, off));
            }
        }
        // Chunk: occurrences within one width-m chunk cover a common
        // position, hence form a single progression.
        let mut out = Vec::new();
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
                out.push(merged);
            }
            c_lo = c_hi + 1;
        }
        out
    }

    // ----- runs -----

    /// Seed passes over one variable y (in y-local coordinates). Seeds are
    /// doubling-chain prefixes/suffixes around the cut; partners are seed
    /// occurrences at candidate period distances.
    fn runs_passes(&mut self, y: VarId, out: &mut Vec<RawQ>) {
        let Production::Nonterminal(yl, yr) = self.ctx.uni.rule(y) else {
            return;
        };
        let n_y = self.len(y);
        let gamma = self.len(yl);
        let pmax = n_y / 2;
        if pmax < 2 {
            return;
        }
        for pass_b in [false, true] {
            // A one-symbol side can host at most one period of any run
            // covering the cut, so the other side holds at least p + l of
            // it and the opposite pass finds the run. Skipping avoids the
            // degenerate single-bucket window [2, pmax] of a length-1 seed.
            if if pass_b { n_y - gamma == 1 } else { gamma == 1 } {
                continue;
            }
            let chain = if pass_b {
                self.prefix_chain_of(yr)
            } else {
                self.suffix_chain_of(yl)
            };
            for j in 0..chain.len() {
                let seed = chain[j];
                let l = self.len(seed);
                let p_lo = 2 * l;
                let p_hi = if j + 1 < chain.len() {
                    (2 * self.len(chain[j + 1]) - 1).min(pmax)
                } else {
                    pmax
                };
                if p_lo > p_hi {
                    continue;
                }
                let pi = if pass_b { gamma + 1 } else { gamma + 1 - l };
                let q_lo = pi + p_lo;
                let q_hi = pi + p_hi;
                for ap in self.window_occurrences(y, seed, q_lo, q_hi) {
                    self.run_ap(y, pi, l, ap, out);
                }
            }
        }
    }

    /// Evaluates one progression of partner occurrences: period candidates
    /// p_t = q_t - pi with seed val(y)[pi..pi+l-1].
    fn run_ap(&mut self, y: VarId, pi: u64, l: u64, ap: ArithProg, out: &mut Vec<RawQ>) {
        let kappa = ap.count;
        let c = ap.diff;
        let q0 = ap.first;
        if kappa <= 4 {
            for q in ap.iter() {
                self.run_single(y, pi, l, q, out);
            }
            return;
        }
        debug_assert!(c >= 1 && c < l);
        // Partner copies overlap at step c, so the seed string has period c.
        // Two periodic stretches bound every extension: the one through the
        // seed and the one through the partners.
        let e_seed = self.ll(y, pi - 1, pi + c - 1);
        let e_part = self.ll(y, q0 - 1, q0 + c - 1);
        let beta = c + self.rr(y, pi, pi + c) - l;
        let alpha = c + self.rr(y, q0, q0 + c) - l;
        let p0 = q0 - pi;
        let excess = e_part as i128 + beta as i128 + l as i128 - p0 as i128;
        if excess >= c as i128 {
            // Seed and partner stretches merge into one low-period region:
            // every candidate here is a harmonic of a shorter period found
            // in its own bucket.
            return;
        }
        let j1 = if alpha > beta { ceil_div(alpha - beta, c) } else { 0 };
        let j2 = if e_seed > e_part { ceil_div(e_seed - e_part, c) } else { 0 };
        let stable = j1.min(j2).min(kappa);
        if excess >= 0 && stable >= 1 {
            out.push(RawQ {
                d1: pi - e_part,
                d2: q0 + l - 1 + beta,
                d3: p0,
                c,
                k: stable,
            });
        }
        // Past the stable block the slack drops by at least c per step, so
        // only the first index beyond it can still satisfy the length test.
        let tstar = j1.min(j2);
        if tstar < kappa {
            self.run_single(y, pi, l, q0 + c * tstar, out);
        }
    }

    fn run_single(&self, y: VarId, pi: u64, l: u64, q: u64, out: &mut Vec<RawQ>) {
        let p = q - pi;
        let plen = self.ll(y, pi - 1, q - 1);
        let slen = self.rr(y, pi + l, q + l);
        if plen + slen + l >= p {
            out.push(RawQ {
                d1: pi - plen,
                d2: q + l - 1 + slen,
                d3: p,
                c: 0,
                k: 1,
            });
        }
    }

    /// Period-1 runs covering the cut of y.
    fn runs_period_one(&self, y: VarId, out: &mut Vec<RawQ>) {
        let Production::Nonterminal(yl, _) = self.ctx.uni.rule(y) else {
            return;
        };
        let n_y = self.len(y);
        let gamma = self.len(yl);
        let a = self.ctx.uni.symbol_at(y, gamma);
        let b = self.ctx.uni.symbol_at(y, gamma + 1);
        if a == b {
            let left = self.ll(y, gamma, gamma + 1);
            let right = self.rr(y, gamma, gamma + 1);
            out.push(RawQ { d1: gamma + 1 - left, d2: gamma + right, d3: 1, c: 0, k: 1 });
            return;
        }
        if gamma >= 2 && self.ctx.uni.symbol_at(y, gamma - 1) == a {
            let left = 1 + self.ll(y, gamma - 1, gamma);
            out.push(RawQ { d1: gamma + 1 - left, d2: gamma, d3: 1, c: 0, k: 1 });
        }
        if gamma + 2 <= n_y && self.ctx.uni.symbol_at(y, gamma + 2) == b {
            let right = 1 + self.rr(y, gamma + 1, gamma + 2);
            out.push(RawQ { d1: gamma + 1, d2: gamma + right, d3: 1, c: 0, k: 1 });
        }
    }

    /// All runs interior to val(x) that cover its cut, deduplicated and
    /// regrouped into canonical quintuplets.
    fn runs_for_var(&mut self, x: VarId) -> Vec<RunQuintuplet> {
        let Production::Nonterminal(xl, _) = self.ctx.uni.rule(x) else {
            return Vec::new();
        };
        let n_x = self.len(x);
        let gamma = self.len(xl);
        let tx = self.twin(x);
        let t_gamma = n_x - gamma;

        let mut fwd: Vec<RawQ> = Vec::new();
        self.runs_passes(x, &mut fwd);
        self.runs_period_one(x, &mut fwd);
        let mut raw: Vec<RawQ> = Vec::new();
        for q in fwd {
            if let Some(cl) = clip_quint(q, gamma, n_x) {
                raw.push(cl);
            }
        }
        let mut rev: Vec<RawQ> = Vec::new();
        self.runs_passes(tx, &mut rev);
        for q in rev {
            if let Some(cl) = clip_quint(q, t_gamma, n_x) {
                raw.push(RawQ {
                    d1: n_x + 1 - cl.d2,
                    d2: n_x + 1 - cl.d1,
                    d3: cl.d3,
                    c: cl.c,
                    k: cl.k,
                });
            }
        }

        // Expand, keep the smallest period per interval (harmonics share
        // their interval with the true run), regroup into blocks.
        let mut best: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for q in &raw {
            for t in 0..q.k {
                let b = q.d1 - q.c * t;
                let e = q.d2 + q.c * t;
                let p = q.d3 + q.c * t;
                debug_assert!(b >= 1 && e <= n_x && e + 1 >= b + 2 * p);
                best.entry((b, e)).and_modify(|x| *x = (*x).min(p)).or_insert(p);
            }
        }
        // Key: (b+e, e-p) — members of one arithmetic family share both.
        type FamilyKey = (u64, u64);
        let mut groups: BTreeMap<FamilyKey, Vec<(u64, u64, u64)>> = BTreeMap::new();
        for (&(b, e), &p) in &best {
            groups.entry((b + e, e - p)).or_default().push((p, b, e));
        }
        let mut quints = Vec::new();
        for members in groups.values() {
            // Sorted by period (b+e fixed, map order gives ascending b,
            // i.e. descending period); re-sort ascending to chain steps.
            let mut ms = members.clone();
            ms.sort_unstable();
            let mut i = 0;
            while i < ms.len() {
                let (p0, b0, e0) = ms[i];
                let mut k = 1u64;
                let mut step = 0u64;
                if i + 1 < ms.len() {
                    let cand = ms[i + 1].0 - p0;
                    let mut j = i + 1;
                    while j < ms.len() && ms[j].0 == p0 + cand * (j - i) as u64 {
                        j += 1;
                    }
                    if j > i + 1 {
                        step = cand;
                        k = (j - i) as u64;
                    }
                }
                quints.push(RunQuintuplet { d1: b0, d2: e0, d3: p0, c: step, k });
                i += k as usize;
            }
        }
        quints.sort_unstable_by_key(|q| (q.d1, q.d2, q.d3, q.c, q.k));
        quints
    }

    // ----- gapped palindromes -----

    /// Palindromes with gap g interior to val(x) covering its cut.
    /// A palindrome is identified by its slot x0 (last left-arm position):
    /// slots at the cut are tested directly; slots left of the gap region
    /// are found by searching reversed-seed occurrences; slots right of it
    /// are the mirror case on the twin.
    fn gpals_for_var(&mut self, x: VarId, g: u64) -> Vec<GPalGroup> {
        let Production::Nonterminal(xl, _) = self.ctx.uni.rule(x) else {
            return Vec::new();
        };
        let n_x = self.len(x);
        let gamma = self.len(xl);
        let tx = self.twin(x);
        let t_gamma = n_x - gamma;

        let mut groups: Vec<GPalGroup> = Vec::new();
        // Slots whose gap spans the cut.
        let lo = gamma.saturating_sub(g).max(1);
        let hi = gamma.min(n_x.saturating_sub(g + 1));
        if lo <= hi {
            for x0 in lo..=hi {
                let a = self.lr(x, x0, x0 + g + 1);
                if a >= 1 {
                    let b = x0 + 1 - a;
                    let e = x0 + g + a;
                    if b >= 2 && e < n_x {
                        groups.push(GPalGroup { b0: b, e0: e, db: 0, de: 0, k: 1 });
                    }
                }
            }
        }
        // Slots strictly left of the gap region.
        self.gpals_left(x, gamma, g, &mut groups);
        // Slots right of the cut: mirror case on the twin.
        let mut tgroups: Vec<GPalGroup> = Vec::new();
        self.gpals_left(tx, t_gamma, g, &mut tgroups);
        for tg in tgroups {
            let last_b = tg.b0 as i128 + tg.db as i128 * (tg.k as i128 - 1);
            let last_e = tg.e0 as i128 + tg.de as i128 * (tg.k as i128 - 1);
            debug_assert!(last_b >= 1 && last_e <= n_x as i128);
            groups.push(GPalGroup {
                b0: (n_x as i128 + 1 - tg.e0 as i128) as u64,
                e0: (n_x as i128 + 1 - tg.b0 as i128) as u64,
                db: -tg.de,
                de: -tg.db,
                k: tg.k,
            });
        }
        groups.sort_unstable_by_key(|gr| (gr.b0, gr.e0, gr.db, gr.de, gr.k));
        groups
    }

    /// Case: slot x0 ≤ gamma - g - 1, palindrome reaching the cut. Writing
    /// u = gamma - g - x0, the right arm's in-part mirrors the seed
    /// val[gamma-l+1..gamma], so the left arm contains the reversed seed at
    /// q = gamma - g - 2u + 1. Buckets over u follow the doubling chain.
    fn gpals_left(&mut self, y: VarId, gamma: u64, g: u64, out: &mut Vec<GPalGroup>) {
        let n_y = self.len(y);
        if gamma < g + 2 || n_y < g + 2 {
            return;
        }
        let u_max = (gamma - g) / 2;
        if u_max < 1 {
            return;
        }
        let Production::Nonterminal(yl, _) = self.ctx.uni.rule(y) else {
            return;
        };
        let chain = self.suffix_chain_of(yl);
        let parity = (gamma - g + 1) % 2;
        for j in 0..chain.len() {
            let seed = chain[j];
            let l = self.len(seed);
            let u_lo = l;
            let u_hi = if j + 1 < chain.len() {
                (self.len(chain[j + 1]) - 1).min(u_max)
            } else {
                u_max
            };
            if u_lo > u_hi {
                continue;
            }
            // q = gamma - g - 2u + 1 decreases as u grows.
            let q_lo = gamma - g - 2 * u_hi + 1;
            let q_hi = gamma - g - 2 * u_lo + 1;
            let pstar = self.twin(seed);
            for ap in self.window_occurrences(y, pstar, q_lo, q_hi) {
                let ap = ap.with_parity(parity);
                if ap.is_empty() {
                    continue;
                }
                self.gpal_ap(y, gamma, g, l, ap, out);
            }
        }
    }

    fn gpal_ap(
        &mut self,
        y: VarId,
        gamma: u64,
        g: u64,
        l: u64,
        ap: ArithProg,
        out: &mut Vec<GPalGroup>,
    ) {
        let kappa = ap.count;
        let c = ap.diff;
        if kappa <= 4 {
            for q in ap.iter() {
                self.gpal_single(y, gamma, g, l, q, out);
            }
            return;
        }
        debug_assert!(c >= 2 && c.is_multiple_of(2) && c < l);
        let cu = c / 2;
        let n_y = self.len(y);
        let q0 = ap.first;
        let u0 = (gamma - g + 1 - q0) / 2;
        // In-extension: fixed side is the reversed prefix ending at
        // gamma - l, anchored by the reversed seed; sliding side follows
        // the partner stretch.
        let beta_in = c + self.ll(y, gamma, gamma - c) - l;
        let alpha_in = c + self.rr(y, q0, q0 + c) - l;
        // Out-extension: fixed side is the suffix from gamma + 1, anchored
        // by the seed just before it; sliding reach grows with t.
        let beta_out = c + self.rr(y, gamma - l + 1, gamma - l + 1 + c) - l;
        let e_part = self.ll(y, q0 - 1, q0 + c - 1);

        // Validity: in-extension must reach u_t - l, u_t = u0 - cu·t.
        let j_in = if alpha_in > beta_in { ceil_div(alpha_in - beta_in, c) } else { 0 };
        let t_star = if u0 > l + beta_in { ceil_div(u0 - l - beta_in, cu) } else { 0 };
        // Stable range: [t_star, j_in) — in-extension constant at beta_in.
        // Moving range: (j_in, t2] — in-extension alpha_in - c·t, dropping
        // twice as fast as the threshold.
        let t2 = if alpha_in + l >= u0 {
            (alpha_in + l - u0) / cu
        } else {
            0
        };
        let j_out = if beta_out > e_part { ceil_div(beta_out - e_part, c) } else { 0 };

        // Member ranges where the in-extension regime is known; the regime
        // boundary index is always evaluated directly.
        let mut ranges: Vec<(u64, u64)> = Vec::new();
        let mut singles: Vec<u64> = Vec::new();
        if j_in >= 1 && t_star < j_in.min(kappa) {
            ranges.push((t_star, j_in.min(kappa) - 1));
        }
        if j_in < kappa {
            singles.push(j_in);
        }
        if t2 > j_in {
            let hi = t2.min(kappa - 1);
            if hi > j_in {
                ranges.push((j_in + 1, hi));
            }
        }

        for (t_lo, t_hi) in ranges {
            // Split by the out-extension regime; its boundary index goes
            // through direct evaluation as well.
            if j_out > t_lo {
                self.gpal_segment(y, gamma, n_y, q0, c, e_part, beta_out, t_lo, (j_out - 1).min(t_hi), true, out);
            }
            if j_out >= t_lo && j_out <= t_hi {
                singles.push(j_out);
            }
            if t_hi > j_out {
                self.gpal_segment(y, gamma, n_y, q0, c, e_part, beta_out, (j_out + 1).max(t_lo), t_hi, false, out);
            }
        }
        singles.sort_unstable();
        singles.dedup();
        for t in singles {
            if t < kappa {
                self.gpal_single(y, gamma, g, l, q0 + c * t, out);
            }
        }
    }

    /// Emits members t in [a, b] of one progression whose out-extension is
    /// in a fixed regime: growing (e_part + c·t) or saturated (beta_out).
    #[allow(clippy::too_many_arguments)]
    fn gpal_segment(
        &self,
        _y: VarId,
        gamma: u64,
        n_y: u64,
        q0: u64,
        c: u64,
        e_part: u64,
        beta_out: u64,
        a: u64,
        b: u64,
        growing: bool,
        out: &mut Vec<GPalGroup>,
    ) {
        if a > b {
            return;
        }
        let k = b - a + 1;
        let (b0, e0, db, de) = if growing {
            // out_t = e_part + c·t: left end pinned at q0 - e_part.
            (q0 - e_part, gamma + e_part + c * a, 0i64, c as i64)
        } else {
            // out_t = beta_out: left end follows q_t.
            (q0 + c * a - beta_out, gamma + beta_out, c as i64, 0i64)
        };
        // Interior filters, linear in the member index.
        let (mut a2, mut b2) = (0i128, k as i128 - 1);
        clip_linear(b0 as i128, db as i128, 2, i128::MAX, &mut a2, &mut b2);
        clip_linear(e0 as i128, de as i128, 1, n_y as i128 - 1, &mut a2, &mut b2);
        if a2 > b2 {
            return;
        }
        out.push(GPalGroup {
            b0: (b0 as i128 + db as i128 * a2) as u64,
            e0: (e0 as i128 + de as i128 * a2) as u64,
            db,
            de,
            k: (b2 - a2 + 1) as u64,
        });
    }

    fn gpal_single(&self, y: VarId, gamma: u64, g: u64, l: u64, q: u64, out: &mut Vec<GPalGroup>) {
        let n_y = self.len(y);
        let u = (gamma - g + 1 - q) / 2;
        debug_assert_eq!(gamma - g + 1 - q, 2 * u);
        let inn = if gamma > l { self.lr(y, gamma - l, q + l) } else { 0 };
        if inn + l < u {
            return;
        }
        let outx = self.lr(y, q.saturating_sub(1), gamma + 1);
        let b = q - outx;
        let e = gamma + outx;
        if b >= 2 && e < n_y {
            out.push(GPalGroup { b0: b, e0: e, db: 0, de: 0, k: 1 });
        }
    }
}

/// Clips a run block to members that are interior (b ≥ 2, e ≤ n-1) and
/// cover the cut widened by one (b ≤ gamma+1, e ≥ gamma).
fn clip_quint(q: RawQ, gamma: u64, n: u64) -> Option<RawQ> {
    let (d1, d2, c) = (q.d1 as i128, q.d2 as i128, q.c as i128);
    let mut lo = 0i128;
    let mut hi = q.k as i128 - 1;
    clip_linear(d1, -c, 2, gamma as i128 + 1, &mut lo, &mut hi);
    clip_linear(d2, c, gamma as i128, n as i128 - 1, &mut lo, &mut hi);
    if lo > hi {
        return None;
    }
    Some(RawQ {
        d1: (d1 - c * lo) as u64,
        d2: (d2 + c * lo) as u64,
        d3: (q.d3 as i128 + c * lo) as u64,
        c: q.c,
        k: (hi - lo + 1) as u64,
    })
}

/// Restricts [lo, hi] to indexes t with min_v ≤ base + step·t ≤ max_v.
fn clip_linear(base: i128, step: i128, min_v: i128, max_v: i128, lo: &mut i128, hi: &mut i128) {
    if step == 0 {
        if base < min_v || base > max_v {
            *lo = 1;
            *hi = 0;
        }
        return;
    }
    // t bounds from base + step·t ≥ min_v and ≤ max_v.
    let (a, b) = if step > 0 {
        (
            (min_v - base).div_euclid(step) + if (min_v - base).rem_euclid(step) > 0 { 1 } else { 0 },
            (max_v - base).div_euclid(step),
        )
    } else {
        (
            (max_v - base).div_euclid(step) + if (max_v - base).rem_euclid(step) > 0 { 1 } else { 0 },
            (min_v - base).div_euclid(step),
        )
    };
    *lo = (*lo).max(a);
    *hi = (*hi).min(b);
}

/// Compact per-variable run families over the marker-wrapped grammar,
/// with everything needed to count and expand globally.
pub struct CompactRuns {
    wrapped: Slp,
    families: Vec<Vec<RunQuintuplet>>,
    occ: Vec<u64>,
}

/// Detects all runs of the text; the result counts and expands on demand.
pub fn all_runs(s: &Slp) -> CompactRuns {
    let st = add_sentinels(s);
    let occ = st.occ_counts();
    let mut det = Detector::new(&st);
    let mut families: Vec<Vec<RunQuintuplet>> = vec![Vec::new(); st.n() as usize + 1];
    for i in 1..=st.n() {
        if occ[i as usize] == 0 {
            continue;
        }
        if matches!(st.prod(i), Production::Nonterminal(..)) {
            families[i as usize] = det.runs_for_var(i);
        }
    }
    CompactRuns { wrapped: st, families, occ }
}

impl CompactRuns {
    /// Total number of runs in the text.
    pub fn count_runs(&self) -> u128 {
        let mut total = 0u128;
        for i in 1..self.families.len() {
            let members: u128 = self.families[i].iter().map(|q| q.k as u128).sum();
            total += self.occ[i] as u128 * members;
        }
        total
    }

    /// Total number of square occurrences (position + arm pairs).
    pub fn count_square_occurrences(&self) -> u128 {
        let mut total = 0u128;
        for i in 1..self.families.len() {
            let mut per_node = 0u128;
            for q in &self.families[i] {
                for t in 0..q.k {
                    let r = q.member(t);
                    per_node += squares_in_interval(r.e - r.b + 1, r.c);
                }
            }
            total += self.occ[i] as u128 * per_node;
        }
        total
    }

    /// All runs in text coordinates, ascending by (b, e, c); truncated to
    /// `limit` entries after sorting when given.
    pub fn expand(&self, limit: Option<usize>) -> Vec<Run> {
        let mut out: Vec<Run> = Vec::new();
        let st = &self.wrapped;
        let n = st.n() as usize;
        let mut has = vec![false; n + 1];
        for i in 1..=n {
            has[i] = !self.families[i].is_empty()
                || match st.prod(i as VarId) {
                    Production::Nonterminal(l, r) => has[l as usize] || has[r as usize],
                    Production::Terminal(_) => false,
                };
        }
        let mut stack: Vec<(VarId, u64)> = vec![(st.root(), 1)];
        while let Some((v, off)) = stack.pop() {
            if !has[v as usize] {
                continue;
            }
            for q in &self.families[v as usize] {
                for t in 0..q.k {
                    let r = q.member(t);
                    // Wrapped position p maps to text position p - 1.
                    out.push(Run { b: off + r.b - 2, e: off + r.e - 2, c: r.c });
                }
            }
            if let Production::Nonterminal(l, r) = st.prod(v) {
                stack.push((r, off + st.len(l)));
                stack.push((l, off));
            }
        }
        out.sort_unstable();
        if let Some(m) = limit {
            out.truncate(m);
        }
        out
    }

    /// The compact families: (variable of the wrapped grammar, block).
    pub fn quintuplets(&self) -> Vec<(VarId, RunQuintuplet)> {
        let mut out = Vec::new();
        for i in 1..self.families.len() {
            for q in &self.families[i] {
                out.push((i as VarId, *q));
            }
        }
        out
    }

    pub fn total_blocks(&self) -> usize {
        self.families.iter().map(|f| f.len()).sum()
    }

    pub(crate) fn wrapped(&self) -> &Slp {
        &self.wrapped
    }

    pub(crate) fn families(&self) -> &[Vec<RunQuintuplet>] {
        &self.families
    }
}

/// Number of primitively-rooted square occurrences inside one interval of
/// length `len` within a run of smallest period `c`: the squares are
/// exactly the root-length-c ones, one per start position.
pub(crate) fn squares_in_interval(len: u64, c: u64) -> u128 {
    if len < 2 * c {
        return 0;
    }
    (len - 2 * c + 1) as u128
}

/// Detects all runs and expands them (convenience).
pub fn expand_runs(s: &Slp, limit: Option<usize>) -> Vec<Run> {
    all_runs(s).expand(limit)
}

/// Total square occurrences of the text.
pub fn count_square_occurrences(s: &Slp) -> u128 {
    all_runs(s).count_square_occurrences()
}

/// Compact per-variable palindrome families (gap g).
pub struct CompactGPals {
    wrapped: Slp,
    gap: u64,
    families: Vec<Vec<GPalGroup>>,
    occ: Vec<u64>,
}

/// Detects all maximal palindromes with gap g.
pub fn all_gpals(s: &Slp, g: u64) -> CompactGPals {
    let st = add_sentinels(s);
    let occ = st.occ_counts();
    let mut det = Detector::new(&st);
    let mut families: Vec<Vec<GPalGroup>> = vec![Vec::new(); st.n() as usize + 1];
    for i in 1..=st.n() {
        if occ[i as usize] == 0 {
            continue;
        }
        if matches!(st.prod(i), Production::Nonterminal(..)) {
            families[i as usize] = det.gpals_for_var(i, g);
        }
    }
    CompactGPals { wrapped: st, gap: g, families, occ }
}

impl CompactGPals {
    pub fn gap(&self) -> u64 {
        self.gap
    }

    pub fn count(&self) -> u128 {
        let mut total = 0u128;
        for i in 1..self.families.len() {
            let members: u128 = self.families[i].iter().map(|q| q.k as u128).sum();
            total += self.occ[i] as u128 * members;
        }
        total
    }

    /// All palindromes in text coordinates, ascending by (b, e).
    pub fn expand(&self, limit: Option<usize>) -> Vec<GappedPal> {
        let mut out: Vec<GappedPal> = Vec::new();
        let st = &self.wrapped;
        let n = st.n() as usize;
        let mut has = vec![false; n + 1];
        for i in 1..=n {
            has[i] = !self.families[i].is_empty()
                || match st.prod(i as VarId) {
                    Production::Nonterminal(l, r) => has[l as usize] || has[r as usize],
                    Production::Terminal(_) => false,
                };
        }
        let mut stack: Vec<(VarId, u64)> = vec![(st.root(), 1)];
        while let Some((v, off)) = stack.pop() {
            if !has[v as usize] {
                continue;
            }
            for gr in &self.families[v as usize] {
                for t in 0..gr.k {
                    let p = gr.member(t);
                    out.push(GappedPal { b: off + p.b - 2, e: off + p.e - 2 });
                }
            }
            if let Production::Nonterminal(l, r) = st.prod(v) {
                stack.push((r, off + st.len(l)));
                stack.push((l, off));
            }
        }
        out.sort_unstable();
        if let Some(m) = limit {
            out.truncate(m);
        }
        out
    }

    /// The compact families: (variable of the wrapped grammar, group).
    pub fn groups(&self) -> Vec<(VarId, GPalGroup)> {
        let mut out = Vec::new();
        for i in 1..self.families.len() {
            for gr in &self.families[i] {
                out.push((i as VarId, *gr));
            }
        }
        out
    }

    pub(crate) fn wrapped(&self) -> &Slp {
        &self.wrapped
    }

    pub(crate) fn families(&self) -> &[Vec<GPalGroup>] {
        &self.families
    }
}

/// Detects and expands palindromes with gap g (convenience).
pub fn expand_gpals(s: &Slp, g: u64, limit: Option<usize>) -> Vec<GappedPal> {
    all_gpals(s, g).expand(limit)
}
