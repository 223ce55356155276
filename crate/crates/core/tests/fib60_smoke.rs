use slp_strings::{all_runs, Production, Slp};
use std::time::Instant;

#[test]
fn fib60_counts_fast() {
    let k = 60usize;
    let mut rules = vec![Production::Terminal(b'b' as u16), Production::Terminal(b'a' as u16)];
    for i in 3..=k {
        rules.push(Production::Nonterminal(i as u32 - 1, i as u32 - 2));
    }
    let s = Slp::from_rules(rules).unwrap();
    let n = s.text_len();
    let t0 = Instant::now();
    let rs = all_runs(&s);
    let runs = rs.count_runs();
    let squares = rs.count_square_occurrences();
    let blocks = rs.total_blocks();
    let el = t0.elapsed();
    let mut fib = vec![0u64; k + 1];
    fib[1] = 1;
    fib[2] = 1;
    for i in 3..=k {
        fib[i] = fib[i - 1] + fib[i - 2];
    }
    assert_eq!(n, fib[k]);
    assert_eq!(runs, (2 * fib[k - 2] - 3) as u128);
    println!("N={n} runs={runs} squares={squares} blocks={blocks} elapsed={el:?}");
    assert!(el.as_secs() < 60);
}

#[test]
fn fib50_gpals_fast() {
    let k = 50usize;
    let mut rules = vec![Production::Terminal(b'b' as u16), Production::Terminal(b'a' as u16)];
    for i in 3..=k {
        rules.push(Production::Nonterminal(i as u32 - 1, i as u32 - 2));
    }
    let s = Slp::from_rules(rules).unwrap();
    let t0 = Instant::now();
    for g in [0u64, 1, 2, 5] {
        let gp = slp_strings::all_gpals(&s, g);
        let cnt = gp.count();
        println!("g={g} count={cnt} groups={}", gp.groups().len());
    }
    let el = t0.elapsed();
    println!("gpals elapsed={el:?}");
    assert!(el.as_secs() < 60);
}
