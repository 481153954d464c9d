//! Exit criteria for the library, one line of output per criterion.
//!
//! Runs as a plain binary so the summary is always printed. Pass criterion
//! numbers as arguments to run a subset: `cargo test --test acceptance -- 3 5`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use nofic_core::achievability::{a1, a2, a3, a4, a5, a6, a7, a_coeff, achievable_bounds, b_basic};
use nofic_core::converse::{b_conv, classify_events, events_holding, kappa};
use nofic_core::gap::{exact_gap_value, sweep_symmetric, GapSurface};
use nofic_core::geometry::{convex_hull, deflation_gap, polytope_vertices, LinearBound, BISECTION_TOL};
use nofic_core::simulate::{simulate_block, InputMode, SimulationConfig};
use nofic_core::{
    achievable_region, converse_region, AchievabilityParams, ChannelCoefficients, ChannelParameters, EventPair,
    GridSpec, PerUser, Point, RateRegionPolytope, Region, SymmetricPoint, User,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAP_THEOREM: f64 = 4.4;
const GAP_SLACK: f64 = 0.1;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "gap theorem on random channels", gap_theorem),
        (2, "symmetric gap surface", symmetric_surface),
        (3, "inner frontier below outer frontier", sandwich),
        (4, "event partition and feasible scenarios", event_system),
        (5, "formula oracles at the reference channel", formula_oracles),
        (6, "geometry oracles", geometry_oracles),
        (7, "Monte-Carlo feedback variance and power", monte_carlo),
        (8, "grid refinement stability", stability),
    ];
    let mut failed = Vec::new();
    for (n, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} [{name}]: {verdict} ({}; {:.1}s)", o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn log_uniform_db(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo..=hi) / 10.0)
}

fn random_channel(rng: &mut impl Rng) -> ChannelParameters {
    let mut v = [0.0; 6];
    v.iter_mut().for_each(|x| *x = log_uniform_db(rng, -10.0, 60.0));
    ChannelParameters::from_array(v).unwrap()
}

fn gap_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid = GridSpec::default();
    let mut worst = (f64::NEG_INFINITY, None);
    let mut errors = 0;
    for _ in 0..200 {
        let p = random_channel(&mut rng);
        match exact_gap_value(&p, &grid) {
            Ok(g) if g > worst.0 => worst = (g, Some(p)),
            Ok(_) => {}
            Err(_) => errors += 1,
        }
    }
    let pass = errors == 0 && worst.0 <= GAP_THEOREM + GAP_SLACK;
    Outcome::new(
        pass,
        match worst.1 {
            Some(p) => format!("max gap {:.4} over 200 channels at {:?}, {errors} errors", worst.0, p.to_array()),
            None => format!("no channel evaluated, {errors} errors"),
        },
    )
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

fn surface_csv(s: &GapSurface) -> String {
    let mut out = String::from("alpha,beta,exact_gap\n");
    for (a, b, c) in s.iter() {
        let _ = writeln!(out, "{a:.6},{b:.6},{}", c.value().map_or("nan".into(), |v| format!("{v:.6}")));
    }
    out
}

fn symmetric_surface() -> Outcome {
    let alphas = steps(0.1, 1.6, 0.05);
    let betas = steps(0.1, 3.0, 0.05);
    let grid = GridSpec::default();
    let mut surfaces = Vec::new();
    for db in [40.0, 30.0] {
        surfaces.push((db, sweep_symmetric(10f64.powf(db / 10.0), &alphas, &betas, &grid).unwrap()));
    }

    let at_40 = &surfaces[0].1;
    let missing = at_40.cells.iter().filter(|c| c.value().is_none()).count();
    let hard_max = at_40.max().map_or(f64::NAN, |m| m.0);
    let hard = missing == 0 && hard_max <= GAP_THEOREM + GAP_SLACK;

    let mut soft = false;
    let mut notes = Vec::new();
    for (db, s) in &surfaces {
        let (v, a, b) = s.max().unwrap();
        let ok = (0.85..=1.35).contains(&v) && (a - 1.05).abs() <= 0.15 + 1e-9 && (b - 1.2).abs() <= 0.15 + 1e-9;
        soft |= ok;
        notes.push(format!("{db} dB max {v:.4} at ({a:.2}, {b:.2})"));
    }
    if !soft {
        let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
        for (db, s) in &surfaces {
            let path = dir.join(format!("gap_surface_{db}dB.csv"));
            if std::fs::write(&path, surface_csv(s)).is_ok() {
                notes.push(format!("surface written to {}", path.display()));
            }
        }
    }
    Outcome::new(
        hard && soft,
        format!(
            "hard: {} (40 dB max {hard_max:.4}, {missing} missing cells); soft: {} [{}]",
            if hard { "pass" } else { "fail" },
            if soft { "pass" } else { "fail" },
            notes.join("; ")
        ),
    )
}

fn sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = GridSpec::default();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for _ in 0..50 {
        let p = random_channel(&mut rng);
        let inner = achievable_region(&p, &grid).unwrap();
        let outer = converse_region(&p, &grid).unwrap();
        let fg = inner.frontier().grid();
        let mut excess = f64::NEG_INFINITY;
        for k in 0..fg.samples {
            let r1 = fg.r1(k);
            let lo = inner.max_r2_at(r1).unwrap();
            let hi = outer.max_r2_at(r1).unwrap_or(f64::NEG_INFINITY);
            excess = excess.max(lo - hi);
        }
        for v in inner.vertices() {
            let hi = outer.max_r2_at(v.r1).unwrap_or(f64::NEG_INFINITY);
            excess = excess.max(v.r2 - hi);
        }
        if excess > 1e-6 {
            let sub_unity = p.to_array().iter().any(|&x| x < 1.0);
            violations.push((excess, sub_unity));
        }
        worst = worst.max(excess);
    }
    let sub_unity = violations.iter().filter(|v| v.1).count();
    Outcome::new(
        worst <= 1e-6,
        format!(
            "largest excess of inner over outer {worst:.3e} bits, {} violating channels, {sub_unity} of them with a parameter below 1",
            violations.len()
        ),
    )
}

fn event_system() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0usize;
    let mut forbidden = 0usize;
    for _ in 0..100_000 {
        let p = random_channel(&mut rng);
        if User::BOTH.iter().any(|&u| events_holding(&p, u).len() != 1) {
            bad += 1;
        }
        let e = classify_events(&p);
        let pair = (e.event(User::One).index(), e.event(User::Two).index());
        if pair == (2, 2) || pair == (3, 3) {
            forbidden += 1;
        }
    }

    // Powers of sqrt(10) hit every strict and non-strict branch, ties included.
    let values: Vec<f64> = (-4..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect();
    let mut observed = BTreeSet::new();
    for &s1 in &values {
        for &s2 in &values {
            for &i12 in &values {
                for &i21 in &values {
                    let p = ChannelParameters::new(s1, s2, i12, i21, 1.0, 1.0).unwrap();
                    let e = classify_events(&p);
                    observed.insert((e.event(User::One).index(), e.event(User::Two).index()));
                }
            }
        }
    }
    let feasible: BTreeSet<(u8, u8)> = EventPair::all_feasible()
        .iter()
        .map(|e| (e.event(User::One).index(), e.event(User::Two).index()))
        .collect();
    let pass = bad == 0 && forbidden == 0 && feasible.len() == 23 && observed == feasible;
    Outcome::new(
        pass,
        format!(
            "{bad} tuples without a unique event, {forbidden} forbidden pairs, {} of 23 scenarios observed, {} unexpected",
            observed.intersection(&feasible).count(),
            observed.difference(&feasible).count()
        ),
    )
}

/// Straight-line evaluation of the bound formulas for a channel given as
/// `[snr_1, snr_2, inr_12, inr_21, snr_bwd_1, snr_bwd_2]`, users `0` and `1`.
mod oracle {
    fn hl(x: f64) -> f64 {
        0.5 * x.log2()
    }

    pub struct Ch {
        pub snr: [f64; 2],
        /// Interference power at receiver `i`.
        pub inr: [f64; 2],
        pub fb: [f64; 2],
    }

    impl Ch {
        pub fn new(v: [f64; 6]) -> Ch {
            Ch {
                snr: [v[0], v[1]],
                inr: [v[2], v[3]],
                fb: [v[4], v[5]],
            }
        }
        pub fn b1(&self, i: usize, r: f64) -> f64 {
            self.snr[i] + 2.0 * r * (self.snr[i] * self.inr[i]).sqrt() + self.inr[i]
        }
        pub fn b2(&self, i: usize, r: f64) -> f64 {
            (1.0 - r) * self.inr[i] - 1.0
        }
        pub fn b3(&self, i: usize) -> f64 {
            let (s, c) = (self.snr[i], self.inr[1 - i]);
            s - 2.0 * (s * c).sqrt() + c
        }
        pub fn b4(&self, i: usize, r: f64) -> f64 {
            (1.0 - r * r) * self.snr[i]
        }
        pub fn b5(&self, i: usize, r: f64) -> f64 {
            (1.0 - r * r) * self.inr[i]
        }
        pub fn b6(&self, i: usize, r: f64) -> f64 {
            let (s, a, c) = (self.snr[i], self.inr[i], self.inr[1 - i]);
            s + a + 2.0 * r * a.sqrt() * (s.sqrt() - c.sqrt()) + a * c.sqrt() / s * (c.sqrt() - 2.0 * s.sqrt())
        }

        pub fn a1(&self, i: usize) -> f64 {
            hl(2.0 + self.snr[i] / self.inr[1 - i]) - 0.5
        }
        pub fn a2(&self, i: usize, r: f64) -> f64 {
            hl(self.b1(i, r) + 1.0) - 0.5
        }
        pub fn a3(&self, i: usize, r: f64, m: f64) -> f64 {
            let (l, c) = (self.fb[i], self.b1(i, 1.0) + 1.0);
            hl((l * (self.b2(i, r) + 2.0) + c) / (l * ((1.0 - m) * self.b2(i, r) + 2.0) + c))
        }
        pub fn a4(&self, i: usize, r: f64, m: f64) -> f64 {
            hl((1.0 - m) * self.b2(i, r) + 2.0) - 0.5
        }
        pub fn a5(&self, i: usize, r: f64, m: f64) -> f64 {
            hl(2.0 + self.snr[i] / self.inr[1 - i] + (1.0 - m) * self.b2(i, r)) - 0.5
        }
        pub fn a6(&self, i: usize, r: f64, m: f64) -> f64 {
            hl(self.snr[i] / self.inr[1 - i] * ((1.0 - m) * self.b2(1 - i, r) + 1.0) + 2.0) - 0.5
        }
        pub fn a7(&self, i: usize, r: f64, mu: [f64; 2]) -> f64 {
            let j = 1 - i;
            hl(self.snr[i] / self.inr[j] * ((1.0 - mu[i]) * self.b2(j, r) + 1.0) + (1.0 - mu[j]) * self.b2(i, r) + 2.0)
                - 0.5
        }

        /// The 17 right-hand sides by family: R1, R2, R1+R2, 2R1+R2, R1+2R2.
        pub fn achievable_rhs(&self, r: f64, m1: f64, m2: f64) -> [Vec<f64>; 5] {
            let mu = [m1, m2];
            [
                vec![
                    self.a2(0, r),
                    self.a6(0, r, m1) + self.a3(1, r, m1),
                    self.a1(0) + self.a3(1, r, m1) + self.a4(1, r, m1),
                ],
                vec![
                    self.a2(1, r),
                    self.a3(0, r, m2) + self.a6(1, r, m2),
                    self.a3(0, r, m2) + self.a4(0, r, m2) + self.a1(1),
                ],
                vec![
                    self.a2(0, r) + self.a1(1),
                    self.a1(0) + self.a2(1, r),
                    self.a3(0, r, m2) + self.a1(0) + self.a3(1, r, m1) + self.a7(1, r, mu),
                    self.a3(0, r, m2) + self.a5(0, r, m2) + self.a3(1, r, m1) + self.a5(1, r, m1),
                    self.a3(0, r, m2) + self.a7(0, r, mu) + self.a3(1, r, m1) + self.a1(1),
                ],
                vec![
                    self.a2(0, r) + self.a1(0) + self.a3(1, r, m1) + self.a7(1, r, mu),
                    self.a3(0, r, m2) + self.a1(0) + self.a7(0, r, mu) + 2.0 * self.a3(1, r, m1) + self.a5(1, r, m1),
                    self.a2(0, r) + self.a1(0) + self.a3(1, r, m1) + self.a5(1, r, m1),
                ],
                vec![
                    self.a3(0, r, m2) + self.a5(0, r, m2) + self.a2(1, r) + self.a1(1),
                    self.a3(0, r, m2) + self.a7(0, r, mu) + self.a2(1, r) + self.a1(1),
                    2.0 * self.a3(0, r, m2) + self.a5(0, r, m2) + self.a3(1, r, m1) + self.a1(1) + self.a7(1, r, mu),
                ],
            ]
        }

        pub fn k1(&self, i: usize, r: f64) -> f64 {
            hl(self.b1(i, r) + 1.0)
        }
        pub fn k2(&self, i: usize, r: f64) -> f64 {
            let j = 1 - i;
            hl(1.0 + self.b5(j, r)) + hl(1.0 + self.b4(i, r) / (1.0 + self.b5(j, r)))
        }
        pub fn k3(&self, i: usize, r: f64) -> f64 {
            let j = 1 - i;
            let (b4, b5) = (self.b4(i, r), self.b5(j, r));
            hl(self.fb[j] * (b4 + b5 + 1.0) / ((self.b1(j, 1.0) + 1.0) * (b4 + 1.0)) + 1.0) + hl(b4 + 1.0)
        }
        pub fn k4(&self, r: f64) -> f64 {
            hl(1.0 + self.b4(0, r) / (1.0 + self.b5(1, r))) + hl(self.b1(1, r) + 1.0)
        }
        pub fn k5(&self, r: f64) -> f64 {
            hl(1.0 + self.b4(1, r) / (1.0 + self.b5(0, r))) + hl(self.b1(0, r) + 1.0)
        }

        /// Sum-rate bound for the case where both users are in the
        /// strong-crossover events.
        pub fn k6_both_outer(&self, r: f64) -> f64 {
            let c = (2.0 * std::f64::consts::PI * std::f64::consts::E).log2();
            let (s1, s2) = (self.snr[0], self.snr[1]);
            let (i12, i21) = (self.inr[0], self.inr[1]);
            let (l1, l2) = (self.fb[0], self.fb[1]);
            let (b51, b52) = (self.b5(0, r), self.b5(1, r));
            hl(self.b6(0, r) + b51 * i21 / s1 * (s1 + self.b3(0))) - hl(1.0 + i12) - hl(1.0 + i21)
                + hl(1.0 + b52 / s2 * (i12 + self.b3(1) * l2 / (self.b1(1, 1.0) + 1.0)))
                - hl(1.0 + b51 * i21 / s2)
                - hl(1.0 + b51 * i21 / s1)
                + hl(self.b6(1, r) + b51 * i21 / s2 * (s2 + self.b3(1)))
                + hl(1.0 + b51 / s1 * (i21 + self.b3(0) * l1 / (self.b1(0, 1.0) + 1.0)))
                + c
        }

        /// Weighted bound `2Ri + Rj` when user `i` is in a strong-crossover event.
        pub fn k7_outer(&self, i: usize, r: f64) -> f64 {
            let c = (2.0 * std::f64::consts::PI * std::f64::consts::E).log2();
            let j = 1 - i;
            let (iij, iji, sj, lj) = (self.inr[i], self.inr[j], self.snr[j], self.fb[j]);
            hl(self.b1(i, r) + 1.0) - hl(1.0 + iij) - hl(1.0 + self.b5(j, r))
                + hl(1.0 + self.b4(i, r) + self.b5(j, r))
                + hl(1.0 + (1.0 - r * r) * iji / sj * (iij + self.b3(j) * lj / (self.b1(j, 1.0) + 1.0)))
                - hl(1.0 + self.b5(i, r) * iji / sj)
                + hl(self.b6(j, r) + self.b5(i, r) * iji / sj * (sj + self.b3(j)))
                + 2.0 * c
        }
    }
}

#[derive(Default)]
struct RelLog {
    worst: f64,
    fails: Vec<String>,
}

impl RelLog {
    fn check(&mut self, name: String, got: f64, want: f64) {
        let rel = if got == want { 0.0 } else { (got - want).abs() / want.abs() };
        self.worst = self.worst.max(rel);
        if !(rel <= 1e-9) {
            self.fails.push(format!("{name}: {got} vs {want}"));
        }
    }
}

fn formula_oracles() -> Outcome {
    let raw = [10.0, 10.0, 5.0, 5.0, 10.0, 10.0];
    let p = ChannelParameters::from_array(raw).unwrap();
    let o = oracle::Ch::new(raw);
    let mut log = RelLog::default();

    // Printed values, to the digits given.
    let golden = [
        ("a1", a1(&p, User::One), 0.5, 1e-12),
        ("a2", a2(&p, User::One, 0.0), 1.5, 1e-12),
        ("a3(mu=1)", a3(&p, User::One, 0.0, 1.0), 0.4231, 5e-5),
        ("a4", a4(&p, User::One, 0.0, 0.5), 0.5, 1e-12),
        ("a5", a5(&p, User::One, 0.0, 0.5), 0.7925, 5e-5),
        ("a6", a6(&p, User::One, 0.0, 0.5), 1.0, 1e-12),
        ("a7", a7(&p, User::One, 0.0, PerUser::splat(0.5)), 1.1610, 5e-5),
        ("b1(1)", b_basic(&p, User::One, 1.0).0, 29.1421, 5e-5),
        ("b3", b_conv(&p, User::One, 0.0).unwrap().b3, 0.8579, 5e-5),
        ("b6", b_conv(&p, User::One, 0.0).unwrap().b6, 10.4289, 5e-5),
        ("k3", kappa(&p, 0.0, classify_events(&p)).unwrap().k3[User::One], 2.0138, 5e-5),
        ("k4", kappa(&p, 0.0, classify_events(&p)).unwrap().k4, 2.7075, 5e-5),
    ];
    let mut golden_misses = Vec::new();
    for (name, got, want, tol) in golden {
        if (got - want).abs() > tol {
            golden_misses.push(format!("{name}: {got} vs {want}"));
        }
    }

    let ev = classify_events(&p);
    for rho in [0.0, 0.3, 0.8] {
        for mu in [0.0, 0.5, 1.0] {
            for (i, u) in [(0, User::One), (1, User::Two)] {
                log.check(format!("a1_{i}"), a1(&p, u), o.a1(i));
                log.check(format!("a2_{i}"), a2(&p, u, rho), o.a2(i, rho));
                log.check(format!("a3_{i}"), a3(&p, u, rho, mu), o.a3(i, rho, mu));
                log.check(format!("a4_{i}"), a4(&p, u, rho, mu), o.a4(i, rho, mu));
                log.check(format!("a5_{i}"), a5(&p, u, rho, mu), o.a5(i, rho, mu));
                log.check(format!("a6_{i}"), a6(&p, u, rho, mu), o.a6(i, rho, mu));
                log.check(format!("a7_{i}"), a7(&p, u, rho, PerUser::new(mu, 0.5)), o.a7(i, rho, [mu, 0.5]));
                let (b1, b2) = b_basic(&p, u, rho);
                log.check(format!("b1_{i}"), b1, o.b1(i, rho));
                log.check(format!("b2_{i}"), b2 + 2.0, o.b2(i, rho) + 2.0);
                let b = b_conv(&p, u, rho).unwrap();
                log.check(format!("b3_{i}"), b.b3, o.b3(i));
                log.check(format!("b4_{i}"), b.b4, o.b4(i, rho));
                log.check(format!("b5_{i}"), b.b5 + 1.0, o.b5(i, rho) + 1.0);
                log.check(format!("b6_{i}"), b.b6, o.b6(i, rho));
            }
            let params = AchievabilityParams::new(&p, rho, mu, 1.0 - mu).unwrap();
            let bounds = achievable_bounds(&a_coeff(&p, &params).unwrap());
            let families = o.achievable_rhs(rho, mu, 1.0 - mu);
            let coeffs = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (1.0, 2.0)];
            for (f, want) in families.iter().enumerate() {
                let mut got: Vec<f64> = bounds
                    .iter()
                    .filter(|b| (b.c1, b.c2) == coeffs[f])
                    .map(|b| b.rhs)
                    .collect();
                let mut want = want.clone();
                got.sort_by(f64::total_cmp);
                want.sort_by(f64::total_cmp);
                if got.len() != want.len() {
                    log.fails.push(format!("family {f}: {} bounds, expected {}", got.len(), want.len()));
                    continue;
                }
                for (g, w) in got.iter().zip(&want) {
                    log.check(format!("family {f} at rho={rho}, mu={mu}"), *g, *w);
                }
            }
        }
        let k = kappa(&p, rho, ev).unwrap();
        for (i, u) in [(0, User::One), (1, User::Two)] {
            log.check(format!("k1_{i}"), k.k1[u], o.k1(i, rho));
            log.check(format!("k2_{i}"), k.k2[u] + 1.0, o.k2(i, rho) + 1.0);
            log.check(format!("k3_{i}"), k.k3[u], o.k3(i, rho));
            log.check(format!("k7_{i}"), k.k7[u], o.k7_outer(i, rho));
        }
        log.check("k4".into(), k.k4, o.k4(rho));
        log.check("k5".into(), k.k5, o.k5(rho));
        log.check("k6".into(), k.k6, o.k6_both_outer(rho));
        if k.k6_variant != 4 || k.k7_variant != PerUser::splat(2) {
            log.fails.push(format!("variants {} {:?}", k.k6_variant, k.k7_variant));
        }
    }
    let pass = log.fails.is_empty() && golden_misses.is_empty();
    let mut detail = format!("worst relative error {:.2e}, {} golden misses", log.worst, golden_misses.len());
    for f in log.fails.iter().chain(&golden_misses).take(5) {
        let _ = write!(detail, "; {f}");
    }
    Outcome::new(pass, detail)
}

fn random_polytope(rng: &mut impl Rng, extra: usize) -> RateRegionPolytope {
    let mut bounds = vec![
        LinearBound::new(1.0, 0.0, rng.random_range(0.3..3.0)).unwrap(),
        LinearBound::new(0.0, 1.0, rng.random_range(0.3..3.0)).unwrap(),
    ];
    for _ in 0..extra {
        let c1: f64 = rng.random_range(0.2..2.0);
        let c2: f64 = rng.random_range(0.2..2.0);
        bounds.push(LinearBound::new(c1, c2, rng.random_range(0.5..4.0)).unwrap());
    }
    RateRegionPolytope::new(bounds)
}

fn direct_contains(poly: &RateRegionPolytope, p: Point, tol: f64) -> bool {
    p.r1 >= -tol && p.r2 >= -tol && poly.bounds().iter().all(|b| b.c1 * p.r1 + b.c2 * p.r2 <= b.rhs + tol)
}

/// Smallest slack over all constraints, including the axes.
fn slack(poly: &RateRegionPolytope, p: Point) -> f64 {
    poly.bounds()
        .iter()
        .map(|b| (b.rhs - b.c1 * p.r1 - b.c2 * p.r2).abs() / (b.c1.hypot(b.c2)))
        .fold(p.r1.abs().min(p.r2.abs()), f64::min)
}

/// Hull vertices from the all-pairs orientation test.
fn hull_oracle(pts: &[Point]) -> BTreeSet<(u64, u64)> {
    let mut out = BTreeSet::new();
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let left = pts.iter().enumerate().all(|(k, c)| {
                k == i || k == j || (b.r1 - a.r1) * (c.r2 - a.r2) - (b.r2 - a.r2) * (c.r1 - a.r1) > 0.0
            });
            if left {
                out.insert((a.r1.to_bits(), a.r2.to_bits()));
                out.insert((b.r1.to_bits(), b.r2.to_bits()));
            }
        }
    }
    out
}

/// Largest `R2` of the polytope at `r1`, read off the constraints.
fn direct_max_r2(poly: &RateRegionPolytope, r1: f64) -> f64 {
    let mut y = f64::INFINITY;
    for b in poly.bounds() {
        if b.c2 > 0.0 {
            y = y.min((b.rhs - b.c1 * r1) / b.c2);
        } else if b.c1 * r1 > b.rhs {
            return f64::NEG_INFINITY;
        }
    }
    y
}

fn direct_deflation(inner: &RateRegionPolytope, outer: &RateRegionPolytope) -> f64 {
    let r1_max = outer
        .bounds()
        .iter()
        .filter(|b| b.c1 > 0.0)
        .map(|b| b.rhs / b.c1)
        .fold(f64::INFINITY, f64::min);
    let n = 2001;
    let mut worst = 0.0f64;
    for k in 0..n {
        let r1 = r1_max * k as f64 / (n - 1) as f64;
        let t = Point::new(r1, direct_max_r2(outer, r1).max(0.0));
        let (mut lo, mut hi) = (0.0, t.r1.max(t.r2));
        if direct_contains(inner, t, 1e-9) {
            continue;
        }
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if direct_contains(inner, t.deflate(mid), 1e-9) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        worst = worst.max(hi);
    }
    worst
}

fn geometry_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut issues = Vec::new();

    // Vertex enumeration against a support-function scan over a dense grid.
    let mut vertex_err = 0.0f64;
    for _ in 0..100 {
        let poly = random_polytope(&mut rng, 5);
        let verts = polytope_vertices(&poly);
        if verts.iter().any(|v| !direct_contains(&poly, *v, 1e-9)) {
            issues.push("infeasible vertex".to_string());
        }
        let cap = |c1: f64, c2: f64| {
            poly.bounds()
                .iter()
                .filter(|b| b.c1 == c1 && b.c2 == c2)
                .map(|b| b.rhs)
                .fold(f64::INFINITY, f64::min)
        };
        let (xm, ym) = (cap(1.0, 0.0), cap(0.0, 1.0));
        let n = 401;
        let h = xm.max(ym) / (n - 1) as f64;
        let mut grid_pts = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let q = Point::new(xm * a as f64 / (n - 1) as f64, ym * b as f64 / (n - 1) as f64);
                if direct_contains(&poly, q, 0.0) {
                    grid_pts.push(q);
                }
            }
        }
        for d in 0..=32 {
            let th = std::f64::consts::FRAC_PI_2 * d as f64 / 32.0;
            let (c, s) = (th.cos(), th.sin());
            let from_vertices = verts.iter().map(|v| c * v.r1 + s * v.r2).fold(f64::NEG_INFINITY, f64::max);
            let from_grid = grid_pts.iter().map(|v| c * v.r1 + s * v.r2).fold(f64::NEG_INFINITY, f64::max);
            let err = from_vertices - from_grid;
            vertex_err = vertex_err.max(err.abs());
            if err < -1e-12 || err > 2.0 * h {
                issues.push(format!("support mismatch {err:.2e}"));
            }
        }
    }

    // Hull against the all-pairs oracle.
    let mut hull_mismatch = 0;
    for _ in 0..100 {
        let pts: Vec<Point> = (0..40).map(|_| Point::new(rng.random(), rng.random())).collect();
        let got: BTreeSet<(u64, u64)> = convex_hull(&pts).iter().map(|p| (p.r1.to_bits(), p.r2.to_bits())).collect();
        if got != hull_oracle(&pts) {
            hull_mismatch += 1;
        }
    }

    // Membership against direct inequality evaluation.
    let mut member_mismatch = 0;
    for _ in 0..100 {
        let poly = random_polytope(&mut rng, 4);
        let region = Region::convex_hull(&polytope_vertices(&poly), 512).unwrap();
        for _ in 0..1000 {
            let q = Point::new(rng.random_range(-0.2..3.2), rng.random_range(-0.2..3.2));
            if slack(&poly, q) < 1e-7 {
                continue;
            }
            if region.contains(q, 1e-9) != direct_contains(&poly, q, 1e-9) {
                member_mismatch += 1;
            }
        }
    }

    // Deflation gap against exhaustive frontier search.
    let mut gap_err = 0.0f64;
    for _ in 0..100 {
        let a = random_polytope(&mut rng, 3);
        let b = random_polytope(&mut rng, 3);
        let inner = Region::convex_hull(&polytope_vertices(&a), 512).unwrap();
        let outer = Region::convex_hull(&polytope_vertices(&b), 512).unwrap();
        let got = deflation_gap(&inner, &outer, BISECTION_TOL).unwrap().gap;
        let want = direct_deflation(&a, &b);
        gap_err = gap_err.max((got - want).abs());
    }
    if gap_err > 2.0 * BISECTION_TOL {
        issues.push(format!("deflation error {gap_err:.2e}"));
    }

    let tri = |c: f64| LinearBound::new(1.0, 1.0, c).unwrap();
    let inner = Region::convex_hull(&polytope_vertices(&RateRegionPolytope::new(vec![tri(1.0)])), 512).unwrap();
    let outer = Region::convex_hull(&polytope_vertices(&RateRegionPolytope::new(vec![tri(2.0)])), 512).unwrap();
    let triangle = deflation_gap(&inner, &outer, BISECTION_TOL).unwrap().gap;
    if (triangle - 1.0).abs() > BISECTION_TOL {
        issues.push(format!("triangle gap {triangle}"));
    }

    let pass = issues.is_empty() && hull_mismatch == 0 && member_mismatch == 0;
    Outcome::new(
        pass,
        format!(
            "support error {vertex_err:.2e}, {hull_mismatch} hull and {member_mismatch} membership mismatches, \
             deflation error {gap_err:.2e}, triangle {triangle:.5}{}",
            issues.first().map_or(String::new(), |i| format!("; {i}"))
        ),
    )
}

fn monte_carlo() -> Outcome {
    let c = ChannelCoefficients::symmetric(1.0, 1.0, 1.0).unwrap();
    let n = 1_000_000;
    let cfg = SimulationConfig::new(n, 7, InputMode::FullyCorrelated);
    let block = simulate_block(&c, &cfg).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for u in User::BOTH {
        let y = &block.y_bwd[u][cfg.delay..];
        let m = y.len() as f64;
        let mean = y.iter().sum::<f64>() / m;
        let s = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let m4 = y.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / m;
        let se = ((m4 - s * s) / m).sqrt();
        let power = block.x[u].iter().map(|v| v * v).sum::<f64>() / n as f64;
        let ok = (s - 6.0).abs() <= 3.0 * se && power <= 1.0 + 1e-9;
        pass &= ok;
        notes.push(format!("user {u}: variance {s:.4} ± {se:.4}, input power {power:.12}"));
    }
    Outcome::new(pass, notes.join(", "))
}

fn reference_channels() -> Vec<ChannelParameters> {
    let mut out = vec![ChannelParameters::symmetric(10.0, 5.0, 10.0).unwrap()];
    for (db, a, b) in [
        (20.0, 0.5, 0.5),
        (20.0, 1.05, 1.2),
        (30.0, 0.45, 0.1),
        (30.0, 1.5, 2.0),
        (40.0, 0.8, 1.0),
        (40.0, 1.05, 1.2),
        (40.0, 1.2, 0.3),
        (40.0, 0.3, 2.5),
    ] {
        let s = SymmetricPoint::new(10f64.powf(db / 10.0), a, b).unwrap();
        out.push(nofic_core::channel::symmetric_params(&s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    while out.len() < 20 {
        out.push(random_channel(&mut rng));
    }
    out
}

fn stability() -> Outcome {
    let base = GridSpec::default();
    let fine = base.refined();
    let mut worst = (0.0f64, 0usize);
    for (k, p) in reference_channels().iter().enumerate() {
        let d = (exact_gap_value(p, &base).unwrap() - exact_gap_value(p, &fine).unwrap()).abs();
        if d > worst.0 {
            worst = (d, k);
        }
    }
    Outcome::new(
        worst.0 < 1e-2,
        format!("largest change {:.2e} bits (reference channel {}) going from {:?} to {:?}", worst.0, worst.1, base, fine),
    )
}
