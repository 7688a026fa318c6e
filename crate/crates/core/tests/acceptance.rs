//! Acceptance criteria, one `[PASS]`/`[FAIL]` line each.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mcalg::exparse::{parse_poly, parse_polyvector};
use mcalg::fdalg::{
    eigen_split, idempotent_check, parse_element, qh_intersection, qh_moduli_sigma2, qh_quadric, zero_eigenspace_rank,
    FiniteDimAlgebra,
};
use mcalg::koszul::{
    hh_ranks, invariant_hh, jacobian_ring, koszul_exactness, twisted_sector_ranks, HHOptions, MonomialOrder,
};
use mcalg::mcgauge::{normal_form, replay};
use mcalg::{CyclicAction, MCPair, Scalar, SeriesContext};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_hh_of_powers() -> Outcome {
    let mut slowest = Duration::ZERO;
    for k in 2..=8u32 {
        let ctx = SeriesContext::rational(1, 2 * k);
        let w = parse_poly(&format!("v1^{k}"), ctx).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let r = hh_ranks(&MCPair::function(w).map_err(|e| e.to_string())?, &HHOptions::default())
            .map_err(|e| e.to_string())?;
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        check((r.even, r.odd) == (k as usize - 1, 0), || format!("x^{k}: ({}, {})", r.even, r.odd))?;
        check(r.stabilized, || format!("x^{k}: not stabilized"))?;
        check(dt < Duration::from_secs(1), || format!("x^{k}: {dt:?}"))?;
    }
    Ok(format!("k = 2..8, slowest {slowest:?}"))
}

fn c2_invariant_hh() -> Outcome {
    let opts = HHOptions { window: None, with_basis: true };
    let mut notes = Vec::new();
    for (g, d) in [(2u32, 12u32), (2, 14), (3, 16)] {
        let p = MCPair::function(common::q(g, d)).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let r = invariant_hh(&p, &CyclicAction::canonical(g), &opts).map_err(|e| e.to_string())?;
        let dt = t.elapsed();
        check((r.even, r.odd) == (2, 0), || format!("g={g} D={d}: ({}, {})", r.even, r.odd))?;
        let ctx = p.context();
        let expected = vec![parse_polyvector("1", ctx).unwrap(), parse_polyvector("v1*v2*v3", ctx).unwrap()];
        check(r.even_basis.as_ref() == Some(&expected), || format!("g={g}: basis {:?}", r.even_basis))?;
        if g == 3 {
            check(dt < Duration::from_secs(30), || format!("g=3: {dt:?}"))?;
        }
        notes.push(format!("g={g} D={d} {dt:.2?}"));
    }
    Ok(notes.join(", "))
}

fn c3_twisted_totals() -> Outcome {
    let mut notes = Vec::new();
    for (g, d) in [(2u32, 12u32), (3, 16)] {
        let p = MCPair::function(common::q(g, d)).map_err(|e| e.to_string())?;
        let r =
            twisted_sector_ranks(&p, &CyclicAction::canonical(g), &HHOptions::default()).map_err(|e| e.to_string())?;
        check((r.even, r.odd) == (2, 2 * g as usize), || format!("g={g}: ({}, {})", r.even, r.odd))?;
        notes.push(format!("g={g}: ({}, {})", r.even, r.odd));
    }
    Ok(notes.join(", "))
}

fn c4_exactness() -> Outcome {
    let opts = HHOptions::default();
    for (g, d) in [(2u32, 12u32), (3, 16)] {
        let v = koszul_exactness(&common::q(g, d), &opts).map_err(|e| e.to_string())?;
        check(v.exact && v.stabilized, || format!("Q_{g} not exact"))?;
    }
    let r = &mut common::rng(4);
    let mut certified = 0;
    let mut drawn = 0;
    while certified < 20 {
        drawn += 1;
        check(drawn <= 200, || format!("only {certified} certified perturbations in 200 draws"))?;
        let w = common::q(2, 12).add(&common::random_series(r, SeriesContext::rational(3, 12), 4, 7, 3)).unwrap();
        let Ok(jac) = jacobian_ring(&w, MonomialOrder::GradedLex) else { continue };
        if !jac.stabilized {
            continue;
        }
        let v = koszul_exactness(&w, &opts).map_err(|e| e.to_string())?;
        check(v.exact, || format!("perturbation {drawn} with Milnor number {:?} not exact", jac.total))?;
        certified += 1;
    }
    let w = parse_poly("v1^2*v2^2", SeriesContext::rational(3, 8)).unwrap();
    let v = koszul_exactness(&w, &opts).map_err(|e| e.to_string())?;
    let f = v.failure.as_ref().ok_or("v1^2*v2^2 reported exact")?;
    check(!v.exact && !f.witness.is_zero(), || "no witness".into())?;
    Ok(format!("Q_2, Q_3, 20 perturbations ({drawn} drawn); v1^2*v2^2 witness {}", f.witness))
}

fn c5_normal_forms() -> Outcome {
    let g = 2;
    let d = 13;
    let action = CyclicAction::canonical(g);
    let opts = HHOptions::default();
    let r = &mut common::rng(5);
    for i in 0..50 {
        let w = common::q(g, d).add(&common::invariant_tail(r, g, d, 4, 11, 4)).unwrap();
        let rep = normal_form(&w, &action, g).map_err(|e| format!("case {i}: {e}"))?;
        check(rep.residual.is_zero(), || format!("case {i}: residual {}", rep.residual))?;
        let p = MCPair::function(w).unwrap();
        let out = replay(&rep.gauge_log, &p).map_err(|e| format!("case {i}: replay {e}"))?;
        check(out.w() == &rep.output, || format!("case {i}: replay differs"))?;
        let before = invariant_hh(&p, &action, &opts).map_err(|e| e.to_string())?;
        let after = invariant_hh(&out, &action, &opts).map_err(|e| e.to_string())?;
        check((before.even, before.odd) == (after.even, after.odd), || {
            format!("case {i}: ({}, {}) vs ({}, {})", before.even, before.odd, after.even, after.odd)
        })?;
    }
    Ok("50 tails at D = 13".into())
}

fn is_generalized_zero(alg: &FiniteDimAlgebra, h: &[Scalar], v: &[Scalar]) -> bool {
    let mut x = v.to_vec();
    for _ in 0..alg.dim() {
        x = alg.mul(h, &x);
    }
    x.iter().all(Scalar::is_zero)
}

fn c6_eigen_split() -> Outcome {
    let alg = qh_moduli_sigma2();
    let el = |s: &str| parse_element(&alg, s).map_err(|e| e.to_string());
    let h = el("h")?;
    let split = eigen_split(&alg, &h);
    let dims = split.value_dims();
    let expected: Vec<(String, usize)> = vec![("4".into(), 1), ("0".into(), 6), ("-4".into(), 1)];
    check(dims == expected, || format!("dims {dims:?}"))?;
    let e = el("1/128*h3 + 1/32*h2")?;
    check(idempotent_check(&alg, &e).pass, || "(h^3+4h^2)/128 not idempotent".into())?;
    check(split.block(&Scalar::from_int(4)).unwrap().idempotent == e, || "idempotent for 4 differs".into())?;
    for s in ["1 - 1/16*h2", "h3 - 16*h", "m1", "m2", "m3", "m4"] {
        check(is_generalized_zero(&alg, &h, &el(s)?), || format!("{s} outside the 0-block"))?;
    }
    let es: Vec<&Vec<Scalar>> = split.blocks.iter().map(|b| &b.idempotent).collect();
    let sum = es.iter().fold(alg.zero(), |acc, x| alg.add(&acc, x));
    check(sum == alg.unit(), || "idempotents do not sum to 1".into())?;
    for (i, a) in es.iter().enumerate() {
        for (j, b) in es.iter().enumerate() {
            let p = alg.mul(a, b);
            let ok = if i == j { &p == *a } else { p.iter().all(Scalar::is_zero) };
            check(ok, || format!("e_{i} e_{j}"))?;
        }
    }
    Ok(format!("{dims:?}"))
}

fn c7_intersection() -> Outcome {
    let mut notes = Vec::new();
    for g in [2u32, 3, 4] {
        let alg = qh_intersection(g).map_err(|e| e.to_string())?;
        alg.check_associative().map_err(|e| e.to_string())?;
        let h = parse_element(&alg, "h").map_err(|e| e.to_string())?;
        let r = zero_eigenspace_rank(&alg, &h);
        check(r == 2 * g as usize + 2, || format!("g={g}: rank {r}"))?;
        notes.push(format!("g={g}: {r}"));
    }
    Ok(notes.join(", "))
}

fn c8_odd_quadric() -> Outcome {
    for n in [3u32, 5] {
        let alg = qh_quadric(n).map_err(|e| e.to_string())?;
        alg.check_associative().map_err(|e| e.to_string())?;
        let h = parse_element(&alg, "h").map_err(|e| e.to_string())?;
        let r = zero_eigenspace_rank(&alg, &h);
        check(r == 1, || format!("n={n}: rank {r}"))?;
    }
    Ok("n = 3, 5".into())
}

fn c9_properties() -> Outcome {
    let suites = common::property_suites();
    for (name, f) in &suites {
        for seed in 0..100 {
            f(seed).map_err(|e| format!("{name} seed {seed}: {e}"))?;
        }
    }
    Ok(format!("{} suites x 100 seeds", suites.len()))
}

fn c10_cross_checks() -> Outcome {
    let w = common::q(2, 12);
    let a = jacobian_ring(&w, MonomialOrder::GradedLex).map_err(|e| e.to_string())?;
    let b = jacobian_ring(&w, MonomialOrder::ReverseLex).map_err(|e| e.to_string())?;
    check(a.total.is_some() && a.total == b.total, || format!("{:?} vs {:?}", a.total, b.total))?;
    let ctx = SeriesContext::rational(3, 10);
    let mut compared = 0;
    for src in ["v1^3 + v2^3 + v3^3", "v1^2 + v2^3 + v3^4", "v1^4 + v2^4 + v3^2 + v1*v2*v3", "v1^2*v2^2"] {
        let w = parse_poly(src, ctx).unwrap();
        let v = koszul_exactness(&w, &HHOptions::default()).map_err(|e| e.to_string())?;
        if !v.exact {
            continue;
        }
        let j = jacobian_ring(&w, MonomialOrder::ReverseLex).map_err(|e| e.to_string())?;
        let hh = hh_ranks(&MCPair::function(w).unwrap(), &HHOptions::default()).map_err(|e| e.to_string())?;
        check(Some(hh.even) == j.total, || format!("{src}: hh {} vs Jacobian {:?}", hh.even, j.total))?;
        compared += 1;
    }
    let full = hh_ranks(&MCPair::function(w).unwrap(), &HHOptions::default()).map_err(|e| e.to_string())?;
    check(Some(full.even) == a.total, || format!("Q_2: hh {} vs {:?}", full.even, a.total))?;
    Ok(format!("Q_2 total {:?}; {} exact examples agree", a.total, compared + 1))
}

fn main() -> std::process::ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("hh of x^k", c1_hh_of_powers),
        ("invariant hh of Q_g", c2_invariant_hh),
        ("twisted sector totals", c3_twisted_totals),
        ("Koszul exactness", c4_exactness),
        ("normal forms with random tails", c5_normal_forms),
        ("eigen split of the moduli ring", c6_eigen_split),
        ("zero eigenspace of the intersection ring", c7_intersection),
        ("zero eigenspace of odd quadrics", c8_odd_quadric),
        ("property suites", c9_properties),
        ("oracle cross-checks", c10_cross_checks),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(note) => println!("[PASS] {:>2} {name}: {note} ({:.2?})", i + 1, t.elapsed()),
            Err(why) => {
                println!("[FAIL] {:>2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", criteria.len(), criteria.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
