//! Block-shape parsing and the bch/bup subcommands.

use sparsedirect::blockpar::{
    bch, bch_bounds, bch_exposed, bup, bup_bounds, classify, BlockAngular, BupCase, EnteringCol,
};
use sparsedirect::dense::DenseMat;

/// Parses "m1:n1,m2:n2,...;L" into block shapes plus the residual width.
pub fn parse_shape(spec: &str) -> Result<(Vec<usize>, Vec<usize>, usize), String> {
    let (blocks, resid) = spec
        .split_once(';')
        .ok_or_else(|| format!("shape '{spec}' must end with ';L' for the residual width"))?;
    let l: usize = resid.trim().parse().map_err(|_| format!("bad residual width '{resid}'"))?;
    let mut ms = Vec::new();
    let mut ns = Vec::new();
    for part in blocks.split(',') {
        let (m, n) = part
            .split_once(':')
            .ok_or_else(|| format!("block '{part}' must be m:n"))?;
        let m: usize = m.trim().parse().map_err(|_| format!("bad row count '{m}'"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("bad col count '{n}'"))?;
        if n == 0 || m < n {
            return Err(format!("block '{part}': need m >= n >= 1"));
        }
        ms.push(m);
        ns.push(n);
    }
    if ms.is_empty() {
        return Err("shape needs at least one block".into());
    }
    Ok((ms, ns, l))
}

fn seeded(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).max(1);
    move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }
}

pub fn random_instance(ms: &[usize], ns: &[usize], l: usize, seed: u64) -> BlockAngular {
    let mut r = seeded(seed);
    let mut blocks = Vec::new();
    let mut couplings = Vec::new();
    for (&m, &n) in ms.iter().zip(ns) {
        let mut b = DenseMat::zeros(m, n);
        for i in 1..=m {
            for j in 1..=n {
                b.set(i, j, r() + if i == j { 3.0 } else { 0.0 });
            }
        }
        let mut c = DenseMat::zeros(m, l.max(1));
        for i in 1..=m {
            for j in 1..=l.max(1) {
                c.set(i, j, r() + if i == j + n { 3.0 } else { 0.0 });
            }
        }
        blocks.push(b);
        couplings.push(c);
    }
    BlockAngular::new(blocks, couplings).expect("shapes validated")
}

pub fn run_bch(shape: &str, seed: u64, report: &str) -> Result<(), String> {
    let (ms, ns, l) = parse_shape(shape)?;
    let a = random_instance(&ms, &ns, l, seed);
    let (u, ledger) = bch(&a).map_err(|e| e.to_string())?;
    let (pt, inc) = bch_exposed(&ledger);
    let (ptb, incb) = bch_bounds(a.h(), a.dbmax());
    if report.eq_ignore_ascii_case("csv") {
        print!("{}", ledger.to_csv());
        println!("exposed_ptime,{pt},,");
        println!("exposed_inc,{inc},,");
        println!("bound_ptime,{ptb:.0},,");
        println!("bound_inc,{incb:.0},,");
    } else {
        println!("h = {}, dbmax = {}, residual width = {}", a.h(), a.dbmax(), l);
        for s in &ledger.steps {
            println!("{:26} ptime {:>8}  inc {:>6}", s.label, s.ptime, s.inc);
        }
        println!("exposed ptime {pt} (bound {ptb:.0}), exposed inc {inc} (bound {incb:.0})");
    }
    // the factor is only reported healthy when it reproduces the Gram matrix
    let utu = u.assemble().transpose().matmul(&u.assemble()).map_err(|e| e.to_string())?;
    let ata = a.assemble().transpose().matmul(&a.assemble()).map_err(|e| e.to_string())?;
    let mut err = 0.0f64;
    for i in 1..=utu.rows() {
        for j in 1..=utu.cols() {
            err = err.max((utu.get(i, j) - ata.get(i, j)).abs());
        }
    }
    let rel = err / ata.max_abs().max(1.0);
    if rel > 1e-8 {
        return Err(format!("gram residual {rel:.3e} exceeds 1e-8"));
    }
    Ok(())
}

fn parse_case(s: &str) -> Result<BupCase, String> {
    match s.to_ascii_uppercase().as_str() {
        "I" | "1" => Ok(BupCase::I),
        "II" | "2" => Ok(BupCase::II),
        "III" | "3" => Ok(BupCase::III),
        "IV" | "4" => Ok(BupCase::IV),
        "V" | "5" => Ok(BupCase::V),
        other => Err(format!("unknown case '{other}'")),
    }
}

pub fn run_bup(shape: &str, case: &str, times: usize, seed: u64, report: &str) -> Result<(), String> {
    let (ms, ns, l) = parse_shape(shape)?;
    if ms.iter().sum::<usize>() != ns.iter().sum::<usize>() + l {
        return Err(format!(
            "bup needs a square basis: sum(m) = {} but sum(n) + L = {}",
            ms.iter().sum::<usize>(),
            ns.iter().sum::<usize>() + l
        ));
    }
    let want = parse_case(case)?;
    let h = ms.len();
    if matches!(want, BupCase::I) && h < 2 {
        return Err("case I needs at least two blocks".into());
    }
    let mut a = random_instance(&ms, &ns, l, seed);
    let (mut u, _) = bch(&a).map_err(|e| e.to_string())?;
    let mut r = seeded(seed.wrapping_add(7));
    let csv = report.eq_ignore_ascii_case("csv");
    if csv {
        println!("round,case,ptime,inc,inc_parallel_comm,bound_ptime,bound_inc,gram_resid");
    }
    for round in 1..=times {
        let (ink, outk) = match want {
            BupCase::I => (1, 2),
            BupCase::II => (1, 1),
            BupCase::III => (1, h + 1),
            BupCase::IV => (h + 1, 1),
            BupCase::V => (h + 1, h + 1),
        };
        debug_assert_eq!(classify(h, ink, outk), want);
        let out_cols = if outk == h + 1 { a.l() } else { a.n(outk) };
        let outj = 1 + (round - 1) % out_cols;
        let entering = if ink == h + 1 {
            EnteringCol::Residual {
                per_block: (1..=h)
                    .map(|k| (0..a.m(k)).map(|i| r() + if i == 0 { 2.0 } else { 0.0 }).collect())
                    .collect(),
            }
        } else {
            EnteringCol::Block {
                k: ink,
                values: (0..a.m(ink)).map(|i| r() + if i == 0 { 2.0 } else { 0.0 }).collect(),
            }
        };
        let dbmax = a.dbmax();
        let ledger = bup(&mut u, &mut a, &entering, outk, outj).map_err(|e| e.to_string())?;
        let utu = u.assemble().transpose().matmul(&u.assemble()).map_err(|e| e.to_string())?;
        let ata = a.assemble().transpose().matmul(&a.assemble()).map_err(|e| e.to_string())?;
        let mut err = 0.0f64;
        for i in 1..=utu.rows() {
            for j in 1..=utu.cols() {
                err = err.max((utu.get(i, j) - ata.get(i, j)).abs());
            }
        }
        let rel = err / ata.max_abs().max(1.0);
        let (ptb, incb) = bup_bounds(want, h, dbmax);
        if csv {
            println!(
                "{round},{want:?},{},{},{},{ptb:.0},{incb:.0},{rel:.3e}",
                ledger.ptime_total(),
                ledger.inc_total(),
                ledger.inc_total_parallel_comm()
            );
        } else {
            println!(
                "round {round}: case {want:?}  ptime {} (bound {ptb:.0})  inc {} (bound {incb:.0})  gram {rel:.3e}",
                ledger.ptime_total(),
                ledger.inc_total()
            );
        }
        if rel > 1e-8 {
            return Err(format!("round {round}: gram residual {rel:.3e} exceeds 1e-8"));
        }
    }
    Ok(())
}
