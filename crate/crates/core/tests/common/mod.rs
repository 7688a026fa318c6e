#![allow(dead_code)]

use mcalg::cyclic::{invariant_monomials_up_to, project_invariant, Reynolds};
use mcalg::exparse::{parse_poly, parse_polyvector};
use mcalg::fdalg::{self, eigen_split, FiniteDimAlgebra};
use mcalg::koszul::{check_square_zero, hh_ranks, HHOptions};
use mcalg::linalg::Matrix;
use mcalg::mcgauge::{exp_vector_field, mc_check, GaugeStep, MCPair};
use mcalg::polyvec::contract_dw;
use mcalg::series::monomials_of_degree;
use mcalg::{CyclicAction, Field, FormIndex, Monomial, Polyvector, Scalar, SeriesContext, TruncatedSeries};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform from `{±1, ±1/2, ±2}`.
pub fn coeff(r: &mut ChaCha8Rng) -> Scalar {
    let c = [Scalar::one(), Scalar::frac(1, 2), Scalar::from_int(2)][r.gen_range(0..3)].clone();
    if r.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

pub fn random_monomial(r: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32) -> Monomial {
    let d = r.gen_range(lo..=hi);
    monomials_of_degree(n, d).choose(r).expect("nonempty").clone()
}

pub fn random_series(r: &mut ChaCha8Rng, ctx: SeriesContext, lo: u32, hi: u32, terms: usize) -> TruncatedSeries {
    let mut f = TruncatedSeries::zero(ctx);
    for _ in 0..terms {
        f.add_term(random_monomial(r, ctx.num_vars, lo, hi), coeff(r));
    }
    f
}

/// Homogeneous in form degree `k`.
pub fn random_polyvector(
    r: &mut ChaCha8Rng,
    ctx: SeriesContext,
    k: usize,
    lo: u32,
    hi: u32,
    terms: usize,
) -> Polyvector {
    let idx = FormIndex::of_degree(ctx.num_vars, k);
    let mut p = Polyvector::zero(ctx);
    for _ in 0..terms {
        let i = *idx.choose(r).expect("form index");
        p.add_term(i, random_monomial(r, ctx.num_vars, lo, hi), coeff(r));
    }
    p
}

pub fn q(g: u32, d: u32) -> TruncatedSeries {
    let p = 2 * g + 1;
    parse_poly(&format!("-v1*v2*v3 + v1^{p} + v2^{p} + v3^{p}"), SeriesContext::rational(3, d)).unwrap()
}

/// Random invariant terms of degree `lo..=hi` avoiding `v1v2v3` and the
/// pure powers `v_i^{2g+1}`.
pub fn invariant_tail(r: &mut ChaCha8Rng, g: u32, d: u32, lo: u32, hi: u32, terms: usize) -> TruncatedSeries {
    let ctx = SeriesContext::rational(3, d);
    let a = CyclicAction::canonical(g);
    let p = 2 * g + 1;
    let excluded = [
        Monomial::new(vec![1, 1, 1]),
        Monomial::new(vec![p, 0, 0]),
        Monomial::new(vec![0, p, 0]),
        Monomial::new(vec![0, 0, p]),
    ];
    let pool: Vec<Monomial> =
        invariant_monomials_up_to(hi, &a).into_iter().filter(|m| m.degree() >= lo && !excluded.contains(m)).collect();
    let mut f = TruncatedSeries::zero(ctx);
    for _ in 0..terms {
        f.add_term(pool.choose(r).expect("pool").clone(), coeff(r));
    }
    f
}

fn sign(e: usize) -> Scalar {
    if e % 2 == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

fn low(p: &Polyvector, d: u32) -> Polyvector {
    p.map_series(|_, s| s.degree_range(0, d))
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

const PD: u32 = 10;

fn triple(r: &mut ChaCha8Rng) -> [(usize, Polyvector); 3] {
    let ctx = SeriesContext::rational(3, PD);
    std::array::from_fn(|_| {
        let k = r.gen_range(0..=3);
        let t = r.gen_range(1..=4);
        (k, random_polyvector(r, ctx, k, 0, 3, t))
    })
}

pub fn schouten_antisymmetry(seed: u64) -> Check {
    let [(k, a), (l, b), _] = triple(&mut rng(seed));
    let lhs = a.schouten(&b).unwrap();
    let rhs = b.schouten(&a).unwrap().scale(&-sign((k + 1) * (l + 1)));
    ensure(lhs == rhs, || format!("[a,b] != -(-1)^((k+1)(l+1)) [b,a] for a = {a}, b = {b}"))
}

pub fn schouten_jacobi(seed: u64) -> Check {
    let [(k, a), (l, b), (_, c)] = triple(&mut rng(seed));
    let lhs = a.schouten(&b.schouten(&c).unwrap()).unwrap();
    let r1 = a.schouten(&b).unwrap().schouten(&c).unwrap();
    let r2 = b.schouten(&a.schouten(&c).unwrap()).unwrap().scale(&sign((k + 1) * (l + 1)));
    let rhs = r1.add(&r2).unwrap();
    ensure(low(&lhs, PD - 2) == low(&rhs, PD - 2), || format!("Jacobi fails for {a}, {b}, {c}"))
}

pub fn schouten_leibniz(seed: u64) -> Check {
    let [(k, a), (l, b), (_, c)] = triple(&mut rng(seed));
    let lhs = a.schouten(&b.wedge(&c).unwrap()).unwrap();
    let t1 = a.schouten(&b).unwrap().wedge(&c).unwrap();
    let t2 = b.wedge(&a.schouten(&c).unwrap()).unwrap().scale(&sign((k + 1) * l));
    ensure(low(&lhs, PD - 1) == low(&t1.add(&t2).unwrap(), PD - 1), || format!("Leibniz fails for {a}, {b}, {c}"))
}

pub fn contraction_squares_to_zero(seed: u64) -> Check {
    let r = &mut rng(seed);
    let ctx = SeriesContext::rational(3, PD);
    let k = r.gen_range(0..=3);
    let a = random_polyvector(r, ctx, k, 0, 3, 3);
    let w = random_series(r, ctx, 2, 5, 3);
    let twice = contract_dw(&contract_dw(&a, &w).unwrap(), &w).unwrap();
    ensure(low(&twice, PD - 2).is_zero(), || format!("contraction twice is nonzero for {a}, W = {w}"))
}

/// A valid pair `(W, [g³, W])` with `W` of order ≥ 3.
pub fn random_mc_pair(r: &mut ChaCha8Rng, d: u32) -> MCPair {
    let ctx = SeriesContext::rational(3, d);
    let w = random_series(r, ctx, 3, 5, 4);
    let g = random_polyvector(r, ctx, 3, 0, 2, 2);
    MCPair::new(w.clone(), contract_dw(&g, &w).unwrap()).unwrap()
}

pub fn folded_square_zero(seed: u64) -> Check {
    let p = random_mc_pair(&mut rng(seed), 6);
    ensure(mc_check(&p).pass, || format!("pair fails the MC check: W = {}, eta = {}", p.w(), p.eta()))?;
    check_square_zero(&p).map_err(|e| e.to_string())
}

pub fn substitute_is_ring_morphism(seed: u64) -> Check {
    let r = &mut rng(seed);
    let ctx = SeriesContext::rational(3, 8);
    let f = random_series(r, ctx, 0, 4, 4);
    let g = random_series(r, ctx, 0, 4, 4);
    let phi: Vec<TruncatedSeries> = (0..3).map(|_| random_series(r, ctx, 1, 3, 3)).collect();
    let lhs = f.mul(&g).unwrap().substitute(&phi).unwrap();
    let rhs = f.substitute(&phi).unwrap().mul(&g.substitute(&phi).unwrap()).unwrap();
    let sum_l = f.add(&g).unwrap().substitute(&phi).unwrap();
    let sum_r = f.substitute(&phi).unwrap().add(&g.substitute(&phi).unwrap()).unwrap();
    ensure(lhs == rhs && sum_l == sum_r, || format!("substitution is not a morphism for f = {f}, g = {g}"))
}

fn random_field(r: &mut ChaCha8Rng, ctx: SeriesContext) -> Polyvector {
    let t = r.gen_range(1..=3);
    random_polyvector(r, ctx, 1, 2, 4, t)
}

pub fn exp_inverse_law(seed: u64) -> Check {
    let r = &mut rng(seed);
    let ctx = SeriesContext::rational(3, 9);
    let w = random_series(r, ctx, 2, 6, 5);
    let g = random_field(r, ctx);
    let there = exp_vector_field(&w, &g).unwrap();
    let back = exp_vector_field(&there, &g.neg()).unwrap();
    ensure(back == w, || format!("exp(-g) exp(g) W != W for W = {w}, g = {g}"))
}

pub fn exp_is_ring_morphism(seed: u64) -> Check {
    let r = &mut rng(seed);
    let ctx = SeriesContext::rational(3, 9);
    let a = random_series(r, ctx, 0, 4, 4);
    let b = random_series(r, ctx, 0, 4, 4);
    let g = random_field(r, ctx);
    let lhs = exp_vector_field(&a.mul(&b).unwrap(), &g).unwrap();
    let rhs = exp_vector_field(&a, &g).unwrap().mul(&exp_vector_field(&b, &g).unwrap()).unwrap();
    ensure(lhs == rhs, || format!("exp(g) is not multiplicative on {a}, {b} with g = {g}"))
}

pub fn random_action(r: &mut ChaCha8Rng, n: usize) -> CyclicAction {
    let order = r.gen_range(1..=7);
    CyclicAction::new(order, (0..n).map(|_| r.gen_range(0..order)).collect()).unwrap()
}

pub fn projection_is_idempotent(seed: u64) -> Check {
    let r = &mut rng(seed);
    let ctx = SeriesContext::rational(3, 8);
    let a = random_action(r, 3);
    let k = r.gen_range(0..=3);
    let x = random_polyvector(r, ctx, k, 0, 6, 8);
    let p = project_invariant(&x, &a);
    let f = random_series(r, ctx, 0, 6, 8);
    let pf = project_invariant(&f, &a);
    ensure(
        project_invariant(&p, &a) == p && p.is_invariant(&a) && project_invariant(&pf, &a) == pf && pf.is_invariant(&a),
        || format!("projection under {a} is not idempotent on {x}"),
    )?;
    let trivial = CyclicAction::trivial(3);
    ensure(project_invariant(&x, &trivial) == x, || "trivial action must fix everything".into())
}

fn sample_algebra(r: &mut ChaCha8Rng) -> FiniteDimAlgebra {
    let names =
        ["qh_moduli_sigma2", "qh_intersection(2)", "qh_quadric(3)", "qh_quadric(4)", "clifford(2)", "exterior(3)"];
    fdalg::builtin(names[r.gen_range(0..names.len())]).unwrap()
}

pub fn eigen_split_laws(seed: u64) -> Check {
    let r = &mut rng(seed);
    let alg = sample_algebra(r);
    let mut a = alg.zero();
    for x in a.iter_mut() {
        if r.gen_bool(0.5) {
            *x = Scalar::from_int(r.gen_range(-3..=3));
        }
    }
    let split = eigen_split(&alg, &a);
    let es: Vec<&Vec<Scalar>> = split.blocks.iter().map(|b| &b.idempotent).collect();
    let sum = es.iter().fold(alg.zero(), |acc, e| alg.add(&acc, e));
    ensure(sum == alg.unit(), || format!("idempotents do not sum to 1 for a = {}", alg.render(&a)))?;
    for (i, e) in es.iter().enumerate() {
        ensure(alg.mul(e, e) == **e, || format!("e_{i} is not idempotent"))?;
        for (j, f) in es.iter().enumerate() {
            if i != j {
                ensure(alg.mul(e, f).iter().all(Scalar::is_zero), || format!("e_{i} e_{j} != 0"))?;
            }
        }
    }
    let total: usize = split.blocks.iter().map(|b| b.dim).sum();
    ensure(total == alg.dim(), || format!("block dimensions sum to {total}, algebra has {}", alg.dim()))
}

pub fn random_gauge_step(r: &mut ChaCha8Rng, ctx: SeriesContext) -> GaugeStep {
    match r.gen_range(0..4) {
        0 => GaugeStep::VectorField(random_field(r, ctx)),
        1 => GaugeStep::ThreeForm(random_polyvector(r, ctx, 3, 0, 2, 2)),
        2 => {
            let n = ctx.num_vars;
            let mut m = Matrix::identity(n);
            for i in 0..n {
                m.set(i, i, coeff(r));
            }
            let i = r.gen_range(0..n - 1);
            m.set(i, r.gen_range(i + 1..n), coeff(r));
            let mut rows: Vec<Vec<Scalar>> = (0..n).map(|i| m.row(i).to_vec()).collect();
            rows.shuffle(r);
            GaugeStep::LinearChange(Matrix::from_rows(rows))
        }
        _ => GaugeStep::CStarRescale(coeff(r)),
    }
}

/// `v1³ + v2³ + v3²` plus noise of order 4, with a coboundary `η`.
pub fn gauge_test_pair(r: &mut ChaCha8Rng) -> MCPair {
    let ctx = SeriesContext::rational(3, 6);
    let w = parse_poly("v1^3 + v2^3 + v3^2", ctx).unwrap().add(&random_series(r, ctx, 4, 5, 2)).unwrap();
    let g = random_polyvector(r, ctx, 3, 1, 2, 2);
    MCPair::new(w.clone(), contract_dw(&g, &w).unwrap()).unwrap()
}

pub fn gauge_invariance(seed: u64) -> Check {
    let r = &mut rng(seed);
    let p = gauge_test_pair(r);
    let s = random_gauge_step(r, p.context());
    let q = s.apply(&p).map_err(|e| e.to_string())?;
    let before = hh_ranks(&p, &HHOptions::default()).map_err(|e| format!("before: {e}"))?;
    let after = hh_ranks(&q, &HHOptions::default()).map_err(|e| format!("after {}: {e}", s.kind()))?;
    ensure((before.even, before.odd) == (after.even, after.odd), || {
        format!("{} changed ranks {:?} -> {:?}", s.kind(), (before.even, before.odd), (after.even, after.odd))
    })
}

pub fn print_parse_roundtrip(seed: u64) -> Check {
    let r = &mut rng(seed);
    let ctx = SeriesContext::new(3, 7, Field::QI);
    let k = r.gen_range(0..=3);
    let mut p = random_polyvector(r, ctx, k, 0, 7, 5);
    p = p.add(&random_polyvector(r, ctx, 1, 0, 4, 2).scale(&Scalar::i())).unwrap();
    let back = parse_polyvector(&p.to_string(), ctx).map_err(|e| e.to_string())?;
    ensure(back == p, || format!("`{p}` parsed back as `{back}`"))
}

/// `(name, check)` pairs for the randomized suites.
pub fn property_suites() -> Vec<(&'static str, fn(u64) -> Check)> {
    vec![
        ("schouten antisymmetry", schouten_antisymmetry),
        ("schouten jacobi", schouten_jacobi),
        ("schouten leibniz over wedge", schouten_leibniz),
        ("contraction squares to zero", contraction_squares_to_zero),
        ("folded differential squares to zero", folded_square_zero),
        ("substitute is a ring morphism", substitute_is_ring_morphism),
        ("exp vector field inverse law", exp_inverse_law),
        ("exp vector field is multiplicative", exp_is_ring_morphism),
        ("invariant projection is idempotent", projection_is_idempotent),
        ("eigen-split idempotent laws", eigen_split_laws),
        ("gauge invariance of hh ranks", gauge_invariance),
        ("print/parse round trip", print_parse_roundtrip),
    ]
}
