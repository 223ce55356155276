//! Counting regularities inside an arbitrary substring s[b..e], straight
//! from the compact per-variable families — the text is never materialized.
//!
//! The derivation-tree walk visits only nodes whose span intersects the
//! query. A node fully inside contributes its precomputed subtree total in
//! one step; only the O(h) nodes straddling a query boundary evaluate
//! their family members one by one, clipping each to the query window.
//!
//! Clipping is exact, not heuristic: a run clipped to the window stays a
//! run of the substring iff the surviving length is at least twice the
//! period (the smallest period is preserved by the cut), and every run of
//! the substring arises from exactly one such clip. A gapped palindrome
//! survives iff its slot — the last left-arm position — keeps at least one
//! coupled pair inside the window; arms shrink to the tighter side.

use crate::regularities::{squares_in_interval, CompactGPals, CompactRuns};
use crate::slp_core::{Interval, Production, Slp, SlpError, VarId};

/// One count split by how the walk found the contributors: whole subtrees
/// inside the query, members of straddling nodes that still lie fully
/// inside, and members truncated at a query boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TypeBreakdown {
    pub subtree: u128,
    pub straddle: u128,
    pub truncated: u128,
}

impl TypeBreakdown {
    pub fn total(&self) -> u128 {
        self.subtree + self.straddle + self.truncated
    }
}

/// Counts for one interval; only the requested kinds are filled in.
#[derive(Debug, Clone, Copy)]
pub struct IntervalCountReport {
    pub interval: Interval,
    pub runs: Option<TypeBreakdown>,
    pub squares: Option<TypeBreakdown>,
    pub gpals: Option<TypeBreakdown>,
}

fn check_interval(s: &Slp, iv: Interval) -> Result<(), SlpError> {
    if iv.e > s.text_len() {
        return Err(SlpError::BadInterval { var: s.root(), b: iv.b, e: iv.e, len: s.text_len() });
    }
    Ok(())
}

/// Number of runs of s[iv.b..=iv.e].
pub fn count_runs_in(s: &Slp, cr: &CompactRuns, iv: Interval) -> Result<u128, SlpError> {
    Ok(runs_breakdown(s, cr, iv, false)?.total())
}

/// Number of primitively-rooted square occurrences inside s[iv.b..=iv.e].
pub fn count_squares_in(s: &Slp, cr: &CompactRuns, iv: Interval) -> Result<u128, SlpError> {
    Ok(runs_breakdown(s, cr, iv, true)?.total())
}

/// Number of maximal palindromes of s[iv.b..=iv.e] with cg's gap.
pub fn count_gpals_in(s: &Slp, cg: &CompactGPals, iv: Interval) -> Result<u128, SlpError> {
    Ok(gpals_breakdown(s, cg, iv)?.total())
}

/// All requested counts for one interval, with their breakdowns.
pub fn interval_report(
    s: &Slp,
    cr: Option<&CompactRuns>,
    cg: Option<&CompactGPals>,
    iv: Interval,
) -> Result<IntervalCountReport, SlpError> {
    let mut rep = IntervalCountReport { interval: iv, runs: None, squares: None, gpals: None };
    if let Some(cr) = cr {
        rep.runs = Some(runs_breakdown(s, cr, iv, false)?);
        rep.squares = Some(runs_breakdown(s, cr, iv, true)?);
    }
    if let Some(cg) = cg {
        rep.gpals = Some(gpals_breakdown(s, cg, iv)?);
    }
    Ok(rep)
}

/// Runs (or square occurrences) of the substring, split by type.
pub fn runs_breakdown(
    s: &Slp,
    cr: &CompactRuns,
    iv: Interval,
    squares: bool,
) -> Result<TypeBreakdown, SlpError> {
    check_interval(s, iv)?;
    let st = cr.wrapped();
    let fams = cr.families();
    let n = st.n() as usize;
    // Subtree totals, one bottom-up pass (rules only reference smaller ids).
    let mut cin = vec![0u128; n + 1];
    for i in 1..=n {
        let own: u128 = fams[i]
            .iter()
            .map(|q| {
                if squares {
                    (0..q.k)
                        .map(|t| {
                            let r = q.member(t);
                            squares_in_interval(r.e - r.b + 1, r.c)
                        })
                        .sum()
                } else {
                    q.k as u128
                }
            })
            .sum();
        cin[i] = own
            + match st.prod(i as VarId) {
                Production::Nonterminal(l, r) => cin[l as usize] + cin[r as usize],
                Production::Terminal(_) => 0,
            };
    }
    // Query in wrapped coordinates (text position p sits at p + 1).
    let (qb, qe) = (iv.b + 1, iv.e + 1);
    let mut out = TypeBreakdown::default();
    let mut stack: Vec<(VarId, u64)> = vec![(st.root(), 1)];
    while let Some((v, off)) = stack.pop() {
        let span_e = off + st.len(v) - 1;
        if span_e < qb || off > qe {
            continue;
        }
        if qb <= off && span_e <= qe {
            out.subtree += cin[v as usize];
            continue;
        }
        for q in &fams[v as usize] {
            for t in 0..q.k {
                let r = q.member(t);
                let gb = off + r.b - 1;
                let ge = off + r.e - 1;
                let lo = gb.max(qb);
                let hi = ge.min(qe);
                if hi < lo {
                    continue;
                }
                let clipped_len = hi - lo + 1;
                if clipped_len < 2 * r.c {
                    continue;
                }
                let amount = if squares { squares_in_interval(clipped_len, r.c) } else { 1 };
                if gb >= qb && ge <= qe {
                    out.straddle += amount;
                } else {
                    out.truncated += amount;
                }
            }
        }
        if let Production::Nonterminal(l, r) = st.prod(v) {
            stack.push((r, off + st.len(l)));
            stack.push((l, off));
        }
    }
    Ok(out)
}

/// Maximal palindromes of the substring, split by type. A stored
/// palindrome ⟨b, e⟩ has slot x0 = (b + e − gap − 1) / 2; it survives the
/// cut iff both x0 and the first right-arm position stay inside.
pub fn gpals_breakdown(s: &Slp, cg: &CompactGPals, iv: Interval) -> Result<TypeBreakdown, SlpError> {
    check_interval(s, iv)?;
    let g = cg.gap();
    let mut out = TypeBreakdown::default();
    if iv.e - iv.b + 1 < g + 2 {
        return Ok(out);
    }
    let st = cg.wrapped();
    let fams = cg.families();
    let n = st.n() as usize;
    let mut cin = vec![0u128; n + 1];
    for i in 1..=n {
        let own: u128 = fams[i].iter().map(|gr| gr.k as u128).sum();
        cin[i] = own
            + match st.prod(i as VarId) {
                Production::Nonterminal(l, r) => cin[l as usize] + cin[r as usize],
                Production::Terminal(_) => 0,
            };
    }
    let (qb, qe) = (iv.b + 1, iv.e + 1);
    let mut stack: Vec<(VarId, u64)> = vec![(st.root(), 1)];
    while let Some((v, off)) = stack.pop() {
        let span_e = off + st.len(v) - 1;
        if span_e < qb || off > qe {
            continue;
        }
        if qb <= off && span_e <= qe {
            out.subtree += cin[v as usize];
            continue;
        }
        for gr in &fams[v as usize] {
            for t in 0..gr.k {
                let p = gr.member(t);
                let gb = off + p.b - 1;
                let ge = off + p.e - 1;
                let x0 = (gb + ge - g - 1) / 2;
                if x0 < qb || x0 + g + 1 > qe {
                    continue;
                }
                if gb >= qb && ge <= qe {
                    out.straddle += 1;
                } else {
                    out.truncated += 1;
                }
            }
        }
        if let Production::Nonterminal(l, r) = st.prod(v) {
            stack.push((r, off + st.len(l)));
            stack.push((l, off));
        }
    }
    Ok(out)
}
