//! Verification suites: named groups of exact checks, run in parallel and
//! reported in a fixed order.

use crate::bracket::{odot_all, qbracket, qbrackets};
use crate::cyclotomic::CycQ;
use crate::eisenstein::g_series;
use crate::families::{Family, PartitionFunction};
use crate::field::{fmt_rat, rat, rat_int, Rat};
use crate::fourier::Translate;
use crate::jet::{Jet, Shape};
use crate::npoint::{
    bloch_okounkov_brackets, bloch_okounkov_kernel_box, bloch_okounkov_one_point, double_moment_brackets, double_moment_kernel,
    double_moment_odot_brackets, klein_product, moment_brackets, moment_kernel_box, Truncs,
};
use crate::qj::{bloch_okounkov_recursion, commutator_relations, inverse_theta_of_sum, random_element, Generator, Orders};
use crate::qseries::QSeries;
use crate::quasimodular::{certify, equivalence_conditions, random_level_one, QMPoly, Status, DEFAULT_MARGIN};
use crate::structure::{bracket_law, h_k, t_projection_law, t_projection_stated, FormalPoly, TPoly};
use crate::taylor::{check_delta_identity, check_elliptic_transformation, xi, AtOrigin, InverseThetaAt, XiVariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::error::Error;
use std::time::Instant;
use thiserror::Error;

pub const SUITES: [&str; 8] = ["bloch-okounkov", "hooks", "moments", "double-moments", "taylor-xi", "level-N", "projections", "j-algebra"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        }
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    /// The identity being checked, in words and symbols.
    pub anchor: String,
    pub status: Outcome,
    pub orders: String,
    pub detail: String,
    /// Acceptance criterion this check belongs to, if any.
    pub criterion: Option<u8>,
    pub runtime_ms: u128,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    /// No check failed (inconclusive is allowed).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Outcome::Fail)
    }

    pub fn to_json(&self, timing: bool) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "name": c.name,
                    "anchor": c.anchor,
                    "status": c.status.as_str(),
                    "orders": c.orders,
                    "detail": c.detail,
                });
                if timing {
                    v["runtime_ms"] = json!(c.runtime_ms as u64);
                }
                v
            })
            .collect();
        json!({ "suite": self.suite, "seed": self.seed, "passed": self.passed(), "checks": checks })
    }

    pub fn to_csv(&self, timing: bool) -> String {
        let esc = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        let mut out = String::from(if timing { "suite,name,status,orders,anchor,detail,runtime_ms\n" } else { "suite,name,status,orders,anchor,detail\n" });
        for c in &self.checks {
            out.push_str(&[esc(&self.suite), esc(&c.name), c.status.as_str().to_string(), esc(&c.orders), esc(&c.anchor), esc(&c.detail)].join(","));
            if timing {
                out.push_str(&format!(",{}", c.runtime_ms));
            }
            out.push('\n');
        }
        out
    }
}

/// Orders and sampling for a run; `None` keeps each check's default.
#[derive(Clone, Debug)]
pub struct Settings {
    pub order: Option<u32>,
    pub jet_order: Option<i64>,
    pub margin: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { order: None, jet_order: None, margin: DEFAULT_MARGIN, seed: 7 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite '{0}' (known: {known})", known = SUITES.join(", "))]
    Unknown(String),
}

type Res = Result<(Outcome, String), Box<dyn Error + Send + Sync>>;
type Job = Box<dyn Fn() -> Check + Send + Sync>;

fn job(name: &str, anchor: &str, orders: String, criterion: Option<u8>, f: impl Fn() -> Res + Send + Sync + 'static) -> Job {
    let (name, anchor) = (name.to_string(), anchor.to_string());
    Box::new(move || {
        let start = Instant::now();
        let (status, detail) = match f() {
            Ok(x) => x,
            Err(e) => (Outcome::Fail, format!("error: {e}")),
        };
        Check { name: name.clone(), anchor: anchor.clone(), status, orders: orders.clone(), detail, criterion, runtime_ms: start.elapsed().as_millis() }
    })
}

fn verdict(ok: bool, detail: impl Into<String>) -> Res {
    Ok((Outcome::from_bool(ok), detail.into()))
}

pub fn run_suite(name: &str, s: &Settings) -> Result<SuiteReport, SuiteError> {
    let jobs = match name {
        "bloch-okounkov" => bloch_okounkov(s),
        "hooks" => hooks(s),
        "moments" => moments(s),
        "double-moments" => double_moments(s),
        "taylor-xi" => taylor_xi(s),
        "level-N" => level_n(s),
        "projections" => projections(s),
        "j-algebra" => j_algebra(s),
        _ => return Err(SuiteError::Unknown(name.to_string())),
    };
    let checks = jobs.par_iter().map(|j| j()).collect();
    Ok(SuiteReport { suite: name.to_string(), seed: s.seed, checks })
}

fn truncs(s: &Settings, q: u32, j: i64) -> Truncs {
    Truncs { q: s.order.unwrap_or(q), j: s.jet_order.unwrap_or(j) }
}

fn orders(t: Truncs) -> String {
    format!("q^{} w^{}", t.q, t.j)
}

fn q_order(s: &Settings, q: u32) -> u32 {
    s.order.unwrap_or(q)
}

/// ⟨f⟩ for f given as factors, with Q₀ read as 1.
fn q_product_bracket(ks: &[(i64, Rat)], t: u32) -> Result<QSeries, Box<dyn Error + Send + Sync>> {
    let fs = ks.iter().filter(|(k, _)| *k != 0).map(|(k, a)| Family::qa(*k, a.clone()).function()).collect::<Result<Vec<_>, _>>()?;
    Ok(qbracket(&PartitionFunction::product(&fs), t)?)
}

fn known_through(s: &QSeries, t: u32) -> bool {
    s.trunc().is_none_or(|x| x > &rat_int(t as i64))
}

fn bloch_okounkov(s: &Settings) -> Vec<Job> {
    let mut jobs = Vec::new();
    for a in [rat_int(0), rat(1, 3)] {
        let t = truncs(s, 8, 6);
        let name = format!("one-point jet, a = {}", fmt_rat(&a));
        jobs.push(job(&name, "⟨W(w; a)⟩_q = e(−a/2)/Θ(w + a)", orders(t), Some(1), move || {
            let br = bloch_okounkov_brackets(std::slice::from_ref(&a), t)?;
            let k = Jet::univariate(1, Shape::Box, 0, &bloch_okounkov_one_point(&a, t)?);
            verdict(br.equal_on_box(&k, &[-1], &[t.j], &t.q_order())?, format!("convention constant e({})", fmt_rat(&(-&a / rat_int(2)))))
        }));
    }
    let t = truncs(s, 6, 4);
    jobs.push(job("two-point function from the recursion", "symmetrized recursion for F₂ = ⟨W(z₁)W(z₂)⟩_q", orders(t), Some(2), move || {
        let br = bloch_okounkov_brackets(&[rat_int(0), rat_int(0)], t)?;
        // to_box refuses any nonzero coefficient beyond the simple poles
        let k = match bloch_okounkov_kernel_box(2, t) {
            Ok(k) => k,
            Err(e) => return verdict(false, format!("{e}")),
        };
        verdict(br.equal_on_box(&k, &[-1, -1], &[t.j, t.j], &t.q_order())?, "coefficients below the simple poles vanish")
    }));
    let m = s.margin;
    let tq = q_order(s, 24);
    jobs.push(job("level-1 quasimodularity of ⟨Q_aQ_b⟩", "⟨Q_aQ_b⟩_q is quasimodular of weight a+b", format!("q^{tq}"), Some(3), move || {
        let pairs: Vec<(i64, i64)> = (1..=9).flat_map(|a| (a..=10 - a).map(move |b| (a, b))).collect();
        let fs = pairs
            .iter()
            .map(|&(a, b)| Ok(PartitionFunction::product(&[Family::q(a).function()?, Family::q(b).function()?])))
            .collect::<Result<Vec<_>, crate::families::FamilyError>>()?;
        let series = qbrackets(&fs, tq)?;
        let mut bad = Vec::new();
        for (&(a, b), ser) in pairs.iter().zip(&series) {
            let w = a + b;
            let ok = if w % 2 == 1 { ser.is_zero() } else { certify(ser, w, 1, (w / 2) as u32, m)?.is_certified() };
            if !ok {
                bad.push(format!("Q{a}Q{b}"));
            }
        }
        verdict(bad.is_empty(), format!("{} products, odd weights vanish; failing: {:?}", pairs.len(), bad))
    }));
    let tk = q_order(s, 6);
    jobs.push(job("Klein form", "⟨Q₁(·,a)⟩_q · Θ(τ,a) is constant", format!("q^{tk}"), Some(5), move || {
        let mut ok = true;
        let mut notes = Vec::new();
        for a in [rat(1, 2), rat(1, 3), rat(1, 4)] {
            let c = klein_product(&a, tk)?;
            let c0 = c.coeff_int(0)?;
            let constant = known_through(&c, tk) && c.sub(&QSeries::constant(c0.clone())).is_zero();
            let den: u64 = a.denom().try_into().unwrap_or(1);
            ok &= constant && c0.lies_in(4 * den) && c0 == crate::cyclotomic::cyc_root(&(-&a / rat_int(2)));
            notes.push(format!("a={}: {} (modulus {})", fmt_rat(&a), c0, c0.minimal_modulus()));
        }
        verdict(ok, notes.join("; "))
    }));
    jobs
}

fn hooks(s: &Settings) -> Vec<Job> {
    let mut jobs = Vec::new();
    let t = q_order(s, 8);
    jobs.push(job("⟨H₂⟩ = 𝔾₂", "hook-length moment of weight 2", format!("q^{t}"), Some(6), move || {
        let b = qbracket(&Family::h(2).function()?, t)?;
        verdict(known_through(&b, t) && b.eq_common(&g_series(2, t as i64 + 1)), "")
    }));
    let t = q_order(s, 6);
    jobs.push(job("hook moments against ⟨W(z)W(−z)⟩", "⟨H_k⟩_q ∝ [z^{k−2}]⟨W(z)W(−z)⟩_q", format!("q^{t}"), Some(6), move || {
        let mut notes = Vec::new();
        let mut ok = true;
        for k in (2..=8i64).step_by(2) {
            let mut coeff = QSeries::big_o(rat_int(t as i64 + 1));
            for a in 0..=k {
                let sign = if (k - a) % 2 == 1 { rat_int(1) } else { rat_int(-1) };
                let br = q_product_bracket(&[(a, rat_int(0)), (k - a, rat_int(0))], t)?;
                coeff = coeff.add(&br.scale_rat(&sign));
            }
            let h = qbracket(&Family::h(k).function()?, t)?;
            let (c, proportional) = proportionality(&h, &coeff, t);
            ok &= proportional;
            notes.push(format!("k={k}: {}", c.map(|c| c.to_string()).unwrap_or_else(|| "none".into())));
        }
        verdict(ok, format!("constants {}; odd k excluded (the z-series is even)", notes.join(", ")))
    }));
    jobs
}

/// The c with a = c·b, if any, and whether it holds through q^t.
fn proportionality(a: &QSeries, b: &QSeries, t: u32) -> (Option<CycQ>, bool) {
    for n in 0..=t as i64 {
        let (Ok(x), Ok(y)) = (a.coeff_int(n), b.coeff_int(n)) else {
            return (None, false);
        };
        if y.is_zero() {
            if !x.is_zero() {
                return (None, false);
            }
            continue;
        }
        let c = &x * &y.inverse().expect("nonzero");
        let ok = known_through(a, t) && known_through(b, t) && a.eq_common(&b.scale(&c));
        return (Some(c), ok);
    }
    (None, a.truncate_int(t as i64 + 1).is_zero())
}

fn moments(s: &Settings) -> Vec<Job> {
    let t = truncs(s, 6, 4);
    (1..=2)
        .map(|n| {
            job(&format!("{n}-point moment function"), "⟨𝒮(z₁)⋯𝒮(z_n)⟩_q from the Ê₂ kernel", orders(t), Some(6), move || {
                let br = moment_brackets(n, t)?;
                let k = moment_kernel_box(n, t)?;
                verdict(br.equal_on_box(&k, &vec![-2; n], &vec![t.j; n], &t.q_order())?, "")
            })
        })
        .collect()
}

fn double_moments(s: &Settings) -> Vec<Job> {
    let mut jobs = Vec::new();
    let t = truncs(s, 6, 4);
    jobs.push(job("double-moment one-point jet", "⟨𝒯(z,w)⟩_q = −½Θ(z+w)/(Θ(z)Θ(w))", orders(t), Some(7), move || {
        let br = double_moment_brackets(t)?;
        let k = double_moment_kernel(1, t)?;
        verdict(br.equal_on_box(&k.base(), &[-1, -1], &[t.j, t.j], &t.q_order())?, "")
    }));
    let t2 = truncs(s, 4, 2);
    jobs.push(job("⊙ two-point function", "⟨𝒯⊙𝒯⟩_q = G₁(z₁,w₁)G₁(z₂,w₂)", orders(t2), None, move || {
        let br = double_moment_odot_brackets(2, t2)?;
        let k = double_moment_kernel(2, t2)?;
        verdict(br.equal_on_box(&k.base(), &[-1; 4], &[t2.j; 4], &t2.q_order())?, "")
    }));
    let t = q_order(s, 8);
    let sample = [(1u32, 3u32), (2, 2), (3, 1)];
    jobs.push(job("⟨π(T_{k,l})⟩ as stated", "ϑ^{k−1}𝔾_{l−k+2} (l ≥ k), ϑ^l𝔾_{k−l} (k ≥ l+2), ϑ = D − 𝕖₂W", format!("q^{t}"), Some(7), move || {
        let mut notes = Vec::new();
        let mut ok = true;
        for (k, l) in sample {
            let b = TPoly::t(k, l).pi().bracket(t)?;
            let target = t_projection_stated(k, l, t as i64).expect("sample lies in a branch");
            let hit = known_through(&b, t) && b.eq_common(&target);
            ok &= hit;
            notes.push(format!("({k},{l}) {}", if hit { "ok" } else { "differs" }));
        }
        verdict(ok, notes.join(", "))
    }));
    jobs.push(job("⟨π(T_{k,l})⟩ with k and l exchanged", "ϑ^{l−1}𝔾_{k−l+2} (k ≥ l), ϑ^k𝔾_{l−k} (l ≥ k+2), first step on 𝔾₂ = D + 2𝔾₂", format!("q^{t}"), Some(7), move || {
        let mut ok = true;
        for (k, l) in [(1, 3), (2, 2), (3, 1), (0, 4), (1, 5), (2, 4), (3, 3), (4, 2), (5, 1)] {
            let b = TPoly::t(k, l).pi().bracket(t)?;
            ok &= known_through(&b, t) && b.eq_common(&t_projection_law(k, l, t as i64).expect("weight ≥ 4"));
        }
        verdict(ok, "weights 4 and 6; the z,w symmetry gives ⟨T_{k,l}⟩ = ⟨T_{l−1,k+1}⟩")
    }));
    let samples = || -> Result<Vec<(String, PartitionFunction)>, crate::families::FamilyError> {
        Ok(vec![
            ("T(1,3)".to_string(), Family::t(1, 3).function()?),
            ("Q(2)".to_string(), Family::q(2).function()?),
            ("H(4)".to_string(), Family::h(4).function()?),
        ])
    };
    for (label, factor, anchor) in [("−2𝕖₂", rat_int(4), "⟨T_{1,1}⊙f⟩_q = −2𝕖₂⟨f⟩_q"), ("𝔾₂", rat_int(1), "⟨T_{1,1}⊙f⟩_q = 𝔾₂⟨f⟩_q")] {
        jobs.push(job(&format!("T_{{1,1}}⊙f = {label}·f"), anchor, format!("q^{t}"), Some(7), move || {
            let t11 = Family::t(1, 1).function()?;
            let mut notes = Vec::new();
            let mut ok = true;
            for (name, f) in samples()? {
                let lhs = qbracket(&odot_all(&[t11.clone(), f.clone()], t)?, t)?;
                let rhs = g_series(2, t as i64 + 1).scale_rat(&factor).mul(&qbracket(&f, t)?);
                let hit = known_through(&lhs, t) && lhs.eq_common(&rhs);
                ok &= hit;
                notes.push(format!("{name} {}", if hit { "ok" } else { "differs" }));
            }
            verdict(ok, notes.join(", "))
        }));
    }
    jobs
}

fn taylor_xi(s: &Settings) -> Vec<Job> {
    let mut jobs = Vec::new();
    let m = s.margin;
    let half = rat(1, 2);
    let translates = vec![
        Translate::single(rat_int(0), rat_int(0)),
        Translate::single(rat_int(0), half.clone()),
        Translate::single(half.clone(), rat_int(0)),
    ];
    let tq = q_order(s, 6);
    let j = s.jet_order.unwrap_or(4);
    for x in translates.clone() {
        let name = format!("elliptic transformation at X = ({}, {})", fmt_rat(&x.lambda[0]), fmt_rat(&x.mu[0]));
        jobs.push(job(&name, "ρ(X′)ζ_{X′,X} f^{X+X′} = f^X for 1/Θ", format!("q^{tq} w^{j}"), Some(9), move || {
            let res = check_elliptic_transformation(&x, &[-1, 0, 1], j, &rat_int(tq as i64))?;
            let bad: Vec<String> = res.iter().filter(|(_, ok)| !ok).map(|(xp, _)| format!("{xp:?}")).collect();
            verdict(bad.is_empty(), format!("{} shifts; failing {:?}", res.len(), bad))
        }));
    }
    let tq = q_order(s, 30);
    jobs.push(job("δ-identity for Taylor coefficients at the origin", "δ^r g_ℓ = Σ_s r!/(r−s)! g^{r−s}_{ℓ,s}", format!("q^{tq}"), Some(9), move || {
        let f1 = Generator::ThetaInv(0).build(1, Orders { q: tq as i64, w: 6 })?;
        let d = AtOrigin::new(&f1);
        let mut bad = Vec::new();
        for l in -1..=3 {
            for r in 0..=2 {
                if !check_delta_identity(&d, l, r, true, m)?.holds {
                    bad.push((l, r));
                }
            }
        }
        verdict(bad.is_empty(), format!("ℓ ≤ 3, r ≤ 2; failing (ℓ,r) {bad:?}"))
    }));
    let tq = q_order(s, 20);
    for x in translates.into_iter().skip(1) {
        let name = format!("δ-identity at X = ({}, {})", fmt_rat(&x.lambda[0]), fmt_rat(&x.mu[0]));
        jobs.push(job(&name, "δ^r g_ℓ^X = Σ_s r!/(r−s)! g^{X,r−s}_{ℓ,s}", format!("q^{tq}"), Some(9), move || {
            let d = InverseThetaAt::new(x.clone(), 5, &rat_int(tq as i64))?;
            let mut bad = Vec::new();
            for l in 0..=3 {
                for r in 0..=2 {
                    if !check_delta_identity(&d, l, r, false, m)?.holds {
                        bad.push((l, r));
                    }
                }
            }
            verdict(bad.is_empty(), format!("ratio to g_0 certified at level 2; failing (ℓ,r) {bad:?}"))
        }));
    }
    let tq = q_order(s, 24);
    jobs.push(job("ξ-combinations are modular", "ξ_ℓ with (D+𝔾₂) and half-integer Pochhammer symbols", format!("q^{tq}"), None, move || {
        let f1 = Generator::ThetaInv(0).build(1, Orders { q: tq as i64, w: 6 })?;
        let d = AtOrigin::new(&f1);
        let mut ok = true;
        for l in [1i64, 3] {
            let x = xi(&d, &[l], XiVariant::Shifted)?;
            ok &= certify(&x, 1 + l, 1, 0, m)?.is_certified();
        }
        let x3 = xi(&d, &[3], XiVariant::D)?;
        ok &= certify(&x3, 4, 1, 0, m)?.is_certified();
        verdict(ok, "shifted ℓ ∈ {1,3}; D-variant ℓ = 3")
    }));
    let seed = s.seed;
    jobs.push(job("equivalent conditions on δ-tuples", "δ^i g_k = g_{k−2i} ⇔ D-combinations modular ⇔ (D+𝔾₂)-combinations modular", "exact".into(), None, move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut count = 0;
        let mut ok = true;
        for k in (2..=10u32).step_by(2) {
            for p in 1..=3u32.min(k / 2) {
                let g = random_level_one(&mut rng, k, p);
                let mut tuple = vec![g];
                for i in 1..=p as usize {
                    tuple.push(tuple[i - 1].delta());
                }
                ok &= equivalence_conditions(&tuple, m)? == [true; 3];
                let jdx = p as usize;
                let w = tuple[jdx].weight();
                let bump = if w == 0 { QMPoly::constant(1, CycQ::one())? } else { QMPoly::generator(1, 0)?.mul(&random_level_one(&mut rng, (w - 2) as u32, 0))? };
                if bump.is_zero() {
                    continue;
                }
                tuple[jdx] = tuple[jdx].add(&bump)?;
                ok &= equivalence_conditions(&tuple, m)? == [false; 3];
                count += 1;
            }
        }
        verdict(ok, format!("{count} tuples and perturbations, seed {seed}"))
    }));
    jobs
}

fn level_n(s: &Settings) -> Vec<Job> {
    let mut jobs = Vec::new();
    let m = s.margin;
    let samples: Vec<(u64, Vec<(i64, Rat)>)> = vec![
        (2, vec![(1, rat(1, 2)), (1, rat(1, 2))]),
        (2, vec![(2, rat(1, 2)), (2, rat(1, 2))]),
        (2, vec![(1, rat(1, 2)), (3, rat(1, 2))]),
        (2, vec![(2, rat(1, 2)), (2, rat(1, 2)), (2, rat_int(0))]),
        (3, vec![(1, rat(1, 3)), (1, rat(2, 3))]),
        (3, vec![(2, rat(1, 3)), (2, rat(2, 3))]),
        (3, vec![(1, rat(1, 3)), (1, rat(1, 3)), (1, rat(1, 3))]),
        (3, vec![(3, rat(1, 3)), (1, rat(2, 3))]),
    ];
    let tq = q_order(s, 30);
    for (n, ks) in samples {
        let label = ks.iter().map(|(k, a)| format!("Q{k}({})", fmt_rat(a))).collect::<Vec<_>>().join("");
        let w: i64 = ks.iter().map(|(k, _)| k).sum();
        jobs.push(job(&format!("{label} at level {n}"), "⟨Q_k(·,a)⟩_q with Σa ∈ ℤ is quasimodular for Γ₁(N)", format!("q^{tq}"), Some(10), move || {
            let b = q_product_bracket(&ks, tq)?;
            let c = certify(&b, w, n, (w / 2) as u32, m)?;
            let outcome = match c.status {
                Status::Certified => Outcome::Pass,
                Status::Inconclusive => Outcome::Inconclusive,
                Status::Failed => Outcome::Fail,
            };
            Ok((outcome, format!("{} with {} basis elements, solve order {}", c.status.as_str(), c.basis.len(), c.solve_order)))
        }));
    }
    let ratios: Vec<(u64, Vec<(i64, Rat)>)> = vec![
        (2, vec![(2, rat(1, 2))]),
        (2, vec![(3, rat(1, 2))]),
        (2, vec![(1, rat(1, 2)), (2, rat_int(0))]),
        (3, vec![(2, rat(1, 3))]),
        (3, vec![(1, rat(1, 3)), (1, rat(1, 3))]),
        (3, vec![(2, rat(2, 3)), (2, rat_int(0))]),
    ];
    let tr = q_order(s, 6);
    for (n, ks) in ratios {
        let label = ks.iter().map(|(k, a)| format!("Q{k}({})", fmt_rat(a))).collect::<Vec<_>>().join("");
        let a: Rat = ks.iter().map(|(_, a)| a.clone()).sum();
        jobs.push(job(&format!("{label} / Q1({})", fmt_rat(&a)), "⟨Q_k(·,a)⟩_q / ⟨Q₁(·,Σa)⟩_q is a power series over ℚ(ζ_2N)", format!("q^{tr}"), Some(10), move || {
            let num = q_product_bracket(&ks, tr)?;
            let den = q_product_bracket(&[(1, a.clone())], tr)?;
            let r = num.div(&den)?;
            let holomorphic = r.valuation().is_none_or(|v| v >= Rat::from_integer(0.into()));
            let cyclotomic = r.terms().all(|(_, c)| c.lies_in(2 * n));
            verdict(holomorphic && cyclotomic && known_through(&r, tr), format!("valuation {:?}", r.valuation().map(|v| fmt_rat(&v))))
        }));
    }
    jobs
}

fn projections(s: &Settings) -> Vec<Job> {
    let mut jobs = Vec::new();
    let m = s.margin;
    let tq = q_order(s, 24);
    jobs.push(job("⟨h_k⟩ is modular", "π(Q_k) = h_k has modular bracket", format!("q^{tq}"), Some(4), move || {
        let mut ok = true;
        let mut notes = Vec::new();
        for k in [4u32, 6, 8] {
            let h = h_k(k).to_lambda();
            let c = certify(&h.bracket(tq)?, k as i64, 1, 0, m)?;
            ok &= c.is_certified();
            notes.push(format!("h{k} = {h}"));
        }
        verdict(ok, notes.join("; "))
    }));
    jobs.push(job("π kills Q₂·Λ*", "π(Q₂f) = 0", "exact".into(), Some(4), move || {
        let mut count = 0;
        let mut ok = true;
        for w in 0..=6 {
            for f in monomials(w) {
                ok &= FormalPoly::q0(2).mul(&f).pi()?.to_lambda().is_zero();
                count += 1;
            }
        }
        verdict(ok, format!("all {count} monomials of weight ≤ 6"))
    }));
    let tq2 = q_order(s, 20);
    jobs.push(job("⟨Q₂f⟩ is not modular", "⟨Q₂Λ*⟩_q ∩ M = {0}", format!("q^{tq2}"), Some(4), move || {
        let mut ok = true;
        for f in [FormalPoly::q0(2), FormalPoly::q0(4)] {
            let g = FormalPoly::q0(2).mul(&f);
            let w = g.weight()?.to_integer().try_into().unwrap_or(0);
            ok &= certify(&g.bracket(tq2)?, w, 1, 0, m)?.status == Status::Failed;
        }
        verdict(ok, "f ∈ {Q₂, Q₄} fail at depth 0")
    }));
    jobs.push(job("π is idempotent and splits Λ*", "Λ* = π(Λ*) ⊕ Q₂Λ*", "exact".into(), None, move || {
        let mut ok = true;
        for w in 0..=8 {
            for f in monomials(w) {
                let p = f.pi()?.to_lambda();
                ok &= p.pi()?.to_lambda() == p;
                let parts = f.split()?;
                let back = parts.iter().enumerate().fold(FormalPoly::zero(), |acc, (i, g)| acc.add(&g.mul(&FormalPoly::q0(2).pow(i as u32))));
                ok &= back == f.to_lambda();
                ok &= h_k(w).to_lambda() == FormalPoly::q0(w).pi()?.to_lambda();
            }
        }
        verdict(ok, "weights ≤ 8; h_k = π(Q_k)")
    }));
    jobs.push(job("π through the ∨ map", "π(f) = Q₂^{ℓ−3/2} f^∨(Q₂^{3/2}) / (3/2)^−_ℓ, Q_n ↦ Δ_n/n!", "exact".into(), None, move || {
        let mut ok = true;
        let mut undivided = 0;
        let mut total = 0;
        for w in 0..=6 {
            for f in monomials(w) {
                let p = f.pi()?.to_lambda();
                ok &= f.pi_via_vee()?.to_lambda() == p;
                undivided += usize::from(f.pi_via_vee_undivided()?.to_lambda() == p);
                total += 1;
            }
        }
        verdict(ok, format!("all {total} monomials of weight ≤ 6; undivided form with ℓ! agrees on {undivided}"))
    }));
    jobs.push(job("Δ-operators commute", "[Δ_m, Δ_n] = 0", "exact".into(), None, move || {
        let g = FormalPoly::q0(3).mul(&FormalPoly::q0(4)).add(&FormalPoly::q0(2).mul(&FormalPoly::q0(5)));
        let ok = (1..=4).all(|a| (a..=4).all(|b| g.delta_n(a).delta_n(b) == g.delta_n(b).delta_n(a)));
        verdict(ok, "m, n ≤ 4 on Q₃Q₄ + Q₂Q₅")
    }));
    jobs.push(job("index template gives the same π", "Σ(−1)^r Q₂^r ℳ^{r−s}𝒟^s f/((ℓ−r−3/2)_r (r−s)! s!), ℳ = −½∂², 𝒟 = 𝒟₂/2", "exact".into(), None, move || {
        let mut ok = true;
        for w in 0..=6 {
            for f in monomials(w) {
                ok &= f.pi_template(&rat(-1, 2))? == f.pi()?;
            }
        }
        verdict(ok, "weights ≤ 6")
    }));
    let tq3 = q_order(s, 20);
    jobs.push(job("projected brackets are modular", "⟨π(f)⟩_q ∈ M", format!("q^{tq3}"), None, move || {
        let q = FormalPoly::q0;
        let mut ok = true;
        for f in [q(4), q(6), q(3).mul(&q(3)), q(5).mul(&q(3))] {
            let w = f.weight()?.to_integer().try_into().unwrap_or(0);
            ok &= certify(&f.pi()?.to_lambda().bracket(tq3)?, w, 1, 0, m)?.is_certified();
        }
        verdict(ok, "Q₄, Q₆, Q₃Q₃, Q₅Q₃")
    }));
    let t = truncs(s, 5, 3);
    jobs.push(job("operator bracket law", "⟨𝒟_jW(z)⟩_q = j!(Σ z_iδ_{z_i}^{j−1})F_n", orders(t), None, move || {
        let mut ok = true;
        let mut count = 0;
        for n in 1..=2 {
            for jj in 1..=2 {
                let (c, holds) = bracket_law(jj, n, t)?;
                ok &= holds;
                count += c;
            }
        }
        verdict(ok, format!("j ≤ 2, n ≤ 2, {count} coefficients"))
    }));
    let seed = s.seed;
    jobs.push(job("π on ⊙-polynomials is multiplicative", "π(f⊙g) = π(f)⊙π(g)", "exact".into(), None, move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ok = true;
        for _ in 0..20 {
            let f = random_t_monomial(&mut rng, 5);
            let g = random_t_monomial(&mut rng, 5);
            ok &= f.odot(&g).pi() == f.pi().odot(&g.pi());
        }
        verdict(ok, format!("20 random pairs up to total weight 10, seed {seed}"))
    }));
    let tq4 = q_order(s, 8);
    jobs.push(job("⟨π(T_{1,1})⟩ = 0", "π(T_{1,1}) lies in the bracket kernel", format!("q^{tq4}"), None, move || {
        let b = TPoly::t(1, 1).pi().bracket(tq4)?;
        verdict(b.truncate_int(tq4 as i64 + 1).is_zero(), format!("π(T_{{1,1}}) = {}", TPoly::t(1, 1).pi()))
    }));
    jobs
}

/// All monomials of weight w in Q₂, Q₃, ….
fn monomials(w: u32) -> Vec<FormalPoly> {
    fn rec(w: u32, min: u32) -> Vec<FormalPoly> {
        if w == 0 {
            return vec![FormalPoly::one()];
        }
        (min.max(2)..=w).flat_map(|k| rec(w - k, k).into_iter().map(move |m| m.mul(&FormalPoly::q0(k)))).collect()
    }
    rec(w, 2)
}

/// A ⊙-monomial of weight ≤ max_weight in generators of weight ≥ 2.
fn random_t_monomial(rng: &mut ChaCha8Rng, max_weight: u32) -> TPoly {
    let mut f = TPoly::one();
    let mut left = max_weight;
    while left >= 2 {
        let w = rng.gen_range(2..=left);
        let k = rng.gen_range(0..w);
        f = f.odot(&TPoly::t(k, w - k));
        left -= w;
        if rng.gen_bool(0.4) {
            break;
        }
    }
    f
}

fn j_algebra(s: &Settings) -> Vec<Job> {
    let mut jobs = Vec::new();
    let seed = s.seed;
    let o = Orders { q: s.order.map(|x| x as i64).unwrap_or(4), w: s.jet_order.unwrap_or(7) };
    jobs.push(job("commutation relations", "the derivation algebra of δ_τ, δ_z, D_τ, D_z, W, I", format!("q^{} w^{}", o.q, o.w), Some(8), move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        let mut count = 0;
        for _ in 0..20 {
            let f = random_element(&mut rng, o)?;
            for (name, ok) in commutator_relations(&f) {
                count += 1;
                if !ok {
                    bad.push(name);
                }
            }
        }
        bad.sort();
        bad.dedup();
        verdict(bad.is_empty(), format!("20 elements, {count} relation instances, seed {seed}; failing {bad:?}"))
    }));
    jobs.push(job("n-point functions are δ_τ-closed", "δ_τF_n = 0", "q^4 w^4".into(), Some(8), move || {
        let mut ok = true;
        for (n, q, j) in [(1, 5, 5), (2, 4, 4), (3, 3, 3)] {
            ok &= bloch_okounkov_recursion(n, q, j)?.delta_tau().terms().next().is_none();
        }
        verdict(ok, "n ≤ 3")
    }));
    jobs.push(job("δ_{z₁}F₂ = F₁(z₁+z₂)", "lowering the two-point function", "q^4 w^4".into(), Some(8), move || {
        let f2 = bloch_okounkov_recursion(2, 4, 4)?;
        let lhs = f2.delta_z(0).base();
        let rhs = inverse_theta_of_sum(2, 4, 4)?;
        verdict(lhs.agrees_with(&rhs) && lhs.knows(&[-2, 3]), "")
    }));
    jobs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", &Settings::default()), Err(SuiteError::Unknown(_))));
    }

    #[test]
    fn report_codecs() {
        let r = SuiteReport {
            suite: "x".into(),
            seed: 1,
            checks: vec![Check {
                name: "a, \"b\"".into(),
                anchor: "f = g".into(),
                status: Outcome::Inconclusive,
                orders: "q^2".into(),
                detail: String::new(),
                criterion: None,
                runtime_ms: 5,
            }],
        };
        assert!(r.passed());
        let v = r.to_json(false);
        assert_eq!(v["checks"][0]["status"], "inconclusive");
        assert!(v["checks"][0].get("runtime_ms").is_none());
        assert!(r.to_csv(true).contains("\"a, \"\"b\"\"\",inconclusive"));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(6).len(), 4);
        assert_eq!(monomials(8).len(), 7);
    }
}
