//! Doubling chains: grammar variables deriving the prefixes (or suffixes)
//! of a variable's string at lengths 1, 2, 4, ..., |X|.
//!
//! Chains drive the run search: seed lengths double, so O(log N) seeds per
//! variable cover every period. Chain variables are appended to the working
//! universe (together with their reversed twins) so the matching engine can
//! use them like any other variable.

use crate::ap_match::{Ctx, Universe};
use crate::slp_core::{Nav, Production, Slp, VarId};

/// Builds the prefix chain of x: variables whose strings are the prefixes
/// of val(x) of lengths 1, 2, 4, ..., |x| (last entry is x's full length).
pub(crate) fn prefix_chain(ctx: &mut Ctx, x: VarId) -> Vec<VarId> {
    // Left-spine descent: the stack holds the remaining suffix as maximal
    // subtrees, leftmost on top.
    let mut stack: Vec<VarId> = Vec::new();
    let mut v = x;
    loop {
        match ctx.uni.rule(v) {
            Production::Terminal(_) => break,
            Production::Nonterminal(l, r) => {
                stack.push(r);
                v = l;
            }
        }
    }
    let total = ctx.uni.length(x);
    let mut chain = vec![v];
    let mut cur = v;
    let mut cur_len = 1u64;
    while cur_len < total {
        let target = (2 * cur_len).min(total);
        let mut absorbed: Vec<VarId> = Vec::new();
        let mut got = 0u64;
        while cur_len + got < target {
            let need = target - cur_len - got;
            let top = stack.pop().expect("pieces must cover the remainder");
            let l_top = ctx.uni.length(top);
            if l_top <= need {
                absorbed.push(top);
                got += l_top;
            } else {
                // Split the crossing piece: keep its prefix, push the rest.
                for (pv, _) in ctx.uni.prefix_pieces(top, need) {
                    absorbed.push(pv);
                }
                let suffix = ctx.uni.suffix_pieces(top, need + 1);
                for (sv, _) in suffix.into_iter().rev() {
                    stack.push(sv);
                }
                got += need;
            }
        }
        let seg = balanced_merge(ctx, &absorbed);
        cur = ctx.append_pair(cur, seg);
        cur_len = target;
        chain.push(cur);
    }
    chain
}

/// Suffix chain of x: variables deriving the suffixes of val(x) of lengths
/// 1, 2, 4, ..., |x|. A suffix read backwards is a prefix of the reverse.
pub(crate) fn suffix_chain(ctx: &mut Ctx, x: VarId) -> Vec<VarId> {
    let tx = ctx.uni.twin_of(x);
    prefix_chain(ctx, tx)
        .into_iter()
        .map(|v| ctx.uni.twin_of(v))
        .collect()
}

fn balanced_merge(ctx: &mut Ctx, parts: &[VarId]) -> VarId {
    assert!(!parts.is_empty());
    let mut layer: Vec<VarId> = parts.to_vec();
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len() / 2 + 1);
        let mut it = layer.chunks_exact(2);
        for pair in it.by_ref() {
            next.push(ctx.append_pair(pair[0], pair[1]));
        }
        if let [odd] = it.remainder() {
            next.push(*odd);
        }
        layer = next;
    }
    layer[0]
}

/// Observable facts about one doubling chain, for validation: the chain's
/// derived strings, how many rules the construction appended, and the
/// tallest chain variable.
pub struct ChainStats {
    pub lengths: Vec<u64>,
    pub values: Vec<Vec<u16>>,
    pub appended_rules: usize,
    pub max_chain_height: u32,
}

fn chain_stats(s: &Slp, suffix: bool) -> ChainStats {
    let (uni, roots) = Universe::mirrored(&[s]);
    let before = uni.n() as usize;
    let mut ctx = Ctx::new(uni);
    let chain = if suffix {
        suffix_chain(&mut ctx, roots[0])
    } else {
        prefix_chain(&mut ctx, roots[0])
    };
    let mut values = Vec::with_capacity(chain.len());
    let mut lengths = Vec::with_capacity(chain.len());
    let mut max_h = 0;
    for &v in &chain {
        lengths.push(ctx.uni.length(v));
        max_h = max_h.max(ctx.uni.height_of(v));
        let mut val = Vec::new();
        ctx.uni.materialize_into(v, &mut val);
        values.push(val);
    }
    ChainStats {
        lengths,
        values,
        appended_rules: ctx.uni.n() as usize - before,
        max_chain_height: max_h,
    }
}

/// Prefix chain of the root, over a fresh universe.
pub fn prefix_chain_stats(s: &Slp) -> ChainStats {
    chain_stats(s, false)
}

/// Suffix chain of the root, over a fresh universe.
pub fn suffix_chain_stats(s: &Slp) -> ChainStats {
    chain_stats(s, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_slp, sample_slp, skewed_slp};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_prefix_chain() {
        let s = sample_slp();
        let stats = prefix_chain_stats(&s);
        assert_eq!(stats.lengths, vec![1, 2, 4, 8, 14]);
        let text = s.decompress();
        for (len, val) in stats.lengths.iter().zip(&stats.values) {
            assert_eq!(val[..], text[..*len as usize]);
        }
    }

    #[test]
    fn sample_suffix_chain() {
        let s = sample_slp();
        let stats = suffix_chain_stats(&s);
        assert_eq!(stats.lengths, vec![1, 2, 4, 8, 14]);
        let text = s.decompress();
        for (len, val) in stats.lengths.iter().zip(&stats.values) {
            assert_eq!(val[..], text[text.len() - *len as usize..]);
        }
    }

    fn check_chain(s: &Slp, suffix: bool) {
        let n = s.text_len();
        let stats = if suffix { suffix_chain_stats(s) } else { prefix_chain_stats(s) };
        let k_bound = 2 * (64 - (n - 1).max(1).leading_zeros() as u64) + 2;
        assert!(stats.lengths.len() as u64 <= k_bound.max(3));
        assert_eq!(stats.lengths[0], 1);
        assert_eq!(*stats.lengths.last().unwrap(), n);
        for w in stats.lengths.windows(2) {
            assert!(w[0] < w[1] && w[1] <= 2 * w[0], "ratio violated: {w:?}");
        }
        let text = s.decompress();
        for (len, val) in stats.lengths.iter().zip(&stats.values) {
            let want = if suffix {
                &text[text.len() - *len as usize..]
            } else {
                &text[..*len as usize]
            };
            assert_eq!(val[..], want[..]);
        }
    }

    #[test]
    fn random_chains_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for round in 0..40 {
            let s = if round % 2 == 0 {
                let len = rng.gen_range(1..=200);
                let bytes: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..3)).collect();
                skewed_slp(&bytes, &mut rng)
            } else {
                random_slp(&mut rng, 1 + (round % 3) as u16, 20, 500)
            };
            check_chain(&s, false);
            check_chain(&s, true);
        }
    }
}
