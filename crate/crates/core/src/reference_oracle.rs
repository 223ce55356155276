//! Brute-force reference implementations over plain symbol slices.
//!
//! Everything here is written for obviousness, not speed: quadratic scans,
//! no shared state. Compressed-domain results are exactly reproducible by
//! these functions, and the test suites hold the two sides equal.

use std::collections::BTreeMap;

use crate::lce::LceDirection;
use crate::regularities::{GappedPal, Run};

/// All maximal repetitions of s, sorted by (b, e); periods are smallest.
pub fn naive_runs(s: &[u16]) -> Vec<Run> {
    let n = s.len();
    // For each period c, maximal stretches of s[i] == s[i+c] of length L
    // give c-periodic intervals of length L + c; keep those with exponent
    // ≥ 2, then keep the smallest period per interval.
    let mut best: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for c in 1..=n / 2 {
        let mut i = 0;
        while i + c < n {
            if s[i] != s[i + c] {
                i += 1;
                continue;
            }
            let st = i;
            while i + c < n && s[i] == s[i + c] {
                i += 1;
            }
            let stretch = i - st;
            if stretch >= c {
                let b = st as u64 + 1;
                let e = (st + stretch + c) as u64;
                best.entry((b, e))
                    .and_modify(|p| *p = (*p).min(c as u64))
                    .or_insert(c as u64);
            }
        }
    }
    best.into_iter()
        .map(|((b, e), c)| Run { b, e, c })
        .collect()
}

/// Independent reconstruction of the run set from primitively-rooted square
/// occurrences (each extended to its maximal periodic interval). Used as a
/// self-check against `naive_runs`.
pub fn naive_runs_from_squares(s: &[u16]) -> Vec<Run> {
    let n = s.len();
    let mut set: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for (i, c) in naive_square_starts(s) {
        let (i, c) = (i as usize - 1, c as usize);
        let mut b = i;
        while b >= 1 && s[b - 1] == s[b - 1 + c] {
            b -= 1;
        }
        let mut e = i + 2 * c - 1;
        while e + 1 < n && s[e + 1] == s[e + 1 - c] {
            e += 1;
        }
        set.entry((b as u64 + 1, e as u64 + 1))
            .and_modify(|p| *p = (*p).min(c as u64))
            .or_insert(c as u64);
    }
    set.into_iter().map(|((b, e), c)| Run { b, e, c }).collect()
}

/// Occurrences of primitively-rooted squares as (start, root length),
/// 1-based starts, sorted.
pub fn naive_square_starts(s: &[u16]) -> Vec<(u64, u64)> {
    let n = s.len();
    let mut out = Vec::new();
    for i in 0..n {
        // Z-array of the suffix s[i..]: agreement of the suffix with itself
        // shifted by d.
        let suf = &s[i..];
        let m = suf.len();
        let mut z = vec![0usize; m];
        if m > 0 {
            z[0] = m;
            let (mut l, mut r) = (0usize, 0usize);
            for j in 1..m {
                let mut k = 0;
                if j < r {
                    k = z[j - l].min(r - j);
                }
                while j + k < m && suf[k] == suf[j + k] {
                    k += 1;
                }
                z[j] = k;
                if j + k > r {
                    l = j;
                    r = j + k;
                }
            }
        }
        for c in 1..=m / 2 {
            if z[c] < c {
                continue;
            }
            // Primitive root: no proper divisor of c is a period of the root.
            let mut primitive = true;
            let mut d = 1;
            while d * d <= c {
                if c % d == 0 {
                    for q in [d, c / d] {
                        if q < c && z[q] >= c - q {
                            primitive = false;
                        }
                    }
                }
                d += 1;
            }
            if primitive {
                out.push((i as u64 + 1, c as u64));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of occurrences of primitively-rooted squares.
pub fn naive_square_count(s: &[u16]) -> u128 {
    naive_square_starts(s).len() as u128
}

/// All maximal palindromes with gap exactly g, sorted by (b, e).
/// The slot x is the last position of the left arm; the gap occupies
/// [x+1, x+g] and the right arm starts at x+g+1. Arms must be nonempty.
pub fn naive_gpals(s: &[u16], g: u64) -> Vec<GappedPal> {
    let n = s.len() as u64;
    let mut out = Vec::new();
    if n < g + 2 {
        return out;
    }
    for x in 1..=n - g - 1 {
        let mut a = 0u64;
        while x > a && x + g + a < n {
            let left = s[(x - a) as usize - 1];
            let right = s[(x + g + a + 1) as usize - 1];
            if left != right {
                break;
            }
            a += 1;
        }
        if a >= 1 {
            out.push(GappedPal {
                b: x - a + 1,
                e: x + g + a,
            });
        }
    }
    out.sort_unstable();
    out
}

fn lcp_slices(a: &[u16], b: &[u16]) -> u64 {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count() as u64
}

/// Directed longest common extension; k1 and k2 are 1-based and must be
/// within s.
pub fn naive_lce(s: &[u16], mode: LceDirection, k1: u64, k2: u64) -> u64 {
    let n = s.len();
    assert!(k1 >= 1 && k2 >= 1 && k1 as usize <= n && k2 as usize <= n);
    let pre_rev = |k: u64| -> Vec<u16> {
        let mut v = s[..k as usize].to_vec();
        v.reverse();
        v
    };
    match mode {
        LceDirection::Rr => lcp_slices(&s[k1 as usize - 1..], &s[k2 as usize - 1..]),
        LceDirection::Ll => lcp_slices(&pre_rev(k1), &pre_rev(k2)),
        LceDirection::Lr => lcp_slices(&pre_rev(k1), &s[k2 as usize - 1..]),
        LceDirection::Rl => lcp_slices(&s[k1 as usize - 1..], &pre_rev(k2)),
    }
}

/// 1-based start positions of all occurrences of p in s.
pub fn naive_occurrences(s: &[u16], p: &[u16]) -> Vec<u64> {
    if p.is_empty() || p.len() > s.len() {
        return Vec::new();
    }
    (0..=s.len() - p.len())
        .filter(|&i| &s[i..i + p.len()] == p)
        .map(|i| i as u64 + 1)
        .collect()
}

/// Smallest period of w (w[i] = w[i+p] wherever both sides exist).
pub fn smallest_period(w: &[u16]) -> u64 {
    let m = w.len();
    assert!(m >= 1);
    // Failure function of w; the smallest period is m − π[m−1].
    let mut pi = vec![0usize; m];
    for i in 1..m {
        let mut k = pi[i - 1];
        while k > 0 && w[i] != w[k] {
            k = pi[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        pi[i] = k;
    }
    (m - pi[m - 1]) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sym(s: &[u8]) -> Vec<u16> {
        s.iter().map(|&c| c as u16).collect()
    }

    const SAMPLE: &[u8] = b"abbabbbabbabbb";

    #[test]
    fn runs_of_sample() {
        let runs = naive_runs(&sym(SAMPLE));
        let expect = [
            (1, 6, 3),
            (1, 14, 7),
            (2, 3, 1),
            (2, 10, 4),
            (5, 7, 1),
            (6, 13, 3),
            (9, 10, 1),
            (12, 14, 1),
        ];
        let got: Vec<(u64, u64, u64)> = runs.iter().map(|r| (r.b, r.e, r.c)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn square_count_of_sample() {
        assert_eq!(naive_square_count(&sym(SAMPLE)), 13);
        // Occurrence count equals the per-run sum of e−b+1 − 2c + 1.
        let runs = naive_runs(&sym(SAMPLE));
        let from_runs: u128 = runs
            .iter()
            .map(|r| (r.e - r.b + 1 - 2 * r.c + 1) as u128)
            .sum();
        assert_eq!(from_runs, 13);
    }

    #[test]
    fn gpals_of_sample() {
        let pals = naive_gpals(&sym(SAMPLE), 0);
        let expect = [(1, 4), (5, 6), (5, 14), (6, 7), (12, 13), (13, 14)];
        let got: Vec<(u64, u64)> = pals.iter().map(|p| (p.b, p.e)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn lce_examples() {
        let s = sym(SAMPLE);
        assert_eq!(naive_lce(&s, LceDirection::Rr, 1, 8), 7);
        assert_eq!(naive_lce(&s, LceDirection::Rr, 2, 5), 2);
        // lcs("abb", "abbabb") = "abb".
        assert_eq!(naive_lce(&s, LceDirection::Ll, 3, 6), 3);
        assert_eq!(naive_lce(&s, LceDirection::Rr, 4, 4), 11);
        let t = sym(b"abccba");
        assert_eq!(naive_lce(&t, LceDirection::Lr, 3, 4), 3);
        assert_eq!(naive_lce(&t, LceDirection::Rl, 4, 3), 3);
    }

    #[test]
    fn occurrences_of_sample() {
        let s = sym(SAMPLE);
        assert_eq!(naive_occurrences(&s, &sym(b"bb")), vec![2, 5, 6, 9, 12, 13]);
        assert_eq!(naive_occurrences(&s, &sym(b"abbabbb")), vec![1, 8]);
        assert_eq!(naive_occurrences(&s, &s), vec![1]);
        assert!(naive_occurrences(&s, &sym(b"bbbb")).is_empty());
    }

    #[test]
    fn periods() {
        assert_eq!(smallest_period(&sym(b"ababab")), 2);
        assert_eq!(smallest_period(&sym(b"aaaa")), 1);
        assert_eq!(smallest_period(&sym(b"abcab")), 3);
        assert_eq!(smallest_period(&sym(b"abc")), 3);
        assert_eq!(smallest_period(&sym(b"a")), 1);
    }

    #[test]
    fn run_oracles_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let len = rng.gen_range(1..=80);
            let sigma = rng.gen_range(1..=3u16);
            let s: Vec<u16> = (0..len)
                .map(|_| b'a' as u16 + rng.gen_range(0..sigma))
                .collect();
            let a = naive_runs(&s);
            let b = naive_runs_from_squares(&s);
            assert_eq!(a, b, "text: {s:?}");
            // Every reported period is the smallest period of its interval,
            // and the exponent is at least 2.
            for r in &a {
                let w = &s[r.b as usize - 1..r.e as usize];
                assert_eq!(smallest_period(w), r.c);
                assert!(w.len() as u64 >= 2 * r.c);
            }
            let sq: u128 = a
                .iter()
                .map(|r| (r.e - r.b + 1 - 2 * r.c + 1) as u128)
                .sum();
            assert_eq!(sq, naive_square_count(&s));
        }
    }

    #[test]
    fn small_strings_have_expected_regularities() {
        assert!(naive_runs(&sym(b"abc")).is_empty());
        assert_eq!(
            naive_runs(&sym(b"aaaaaaaa")),
            vec![Run { b: 1, e: 8, c: 1 }]
        );
        assert_eq!(
            naive_runs(&sym(b"abab")),
            vec![Run { b: 1, e: 4, c: 2 }]
        );
        assert_eq!(naive_gpals(&sym(b"aa"), 0), vec![GappedPal { b: 1, e: 2 }]);
        assert!(naive_gpals(&sym(b"ab"), 0).is_empty());
        assert_eq!(naive_gpals(&sym(b"abccba"), 2), vec![GappedPal { b: 1, e: 6 }]);
        assert!(naive_gpals(&sym(b"a"), 0).is_empty());
    }
}
