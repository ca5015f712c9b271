//! Batch verification suites.
//!
//! Two entry points: [`verify_solution_suite`] runs the generic checks
//! (boundary values, vanishing residual, monotonicity, strictness where the
//! expression class implies it) for one expression over a full dyadic grid,
//! and [`verify_paper_suite`] runs the named family checks — power law,
//! zero sets, embedding, self-replication, moment diagnostics, recovery,
//! enclosure containment and the singularity probes — over a configured
//! parameter range. Reports are deterministic: the same configuration
//! produces the same bytes.

mod report;

pub use report::{CheckResult, CheckStatus, SuiteReport, Witness};

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derham::DeRhamParam;
use crate::error::{Error, Result};
use crate::ifs::{threshold_sequences, ProbabilityVector};
use crate::moments::{
    difference, dyadic_samples, limit_condition_partial_sums,
    moments_of_measure, recover_discrete_measure, MomentSequence,
};
use crate::numerics::{pow2, rat, rational_pow, DyadicPoint, Rational};
use crate::solutions::{
    strict_nonintegral_witness, tensor_square, top_pair_flat_threshold, top_pair_half_value,
    MeasureSpec, SolutionExpr,
};

/// Deliberate oracle corruption for negative-control runs: the run must end
/// in a FAIL, proving the harness can see failures at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Compare the half-point value of the top-pair family against p/(m+1)
    /// instead of p/m.
    HalfValue,
}

impl Mutation {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "half-value" => Some(Mutation::HalfValue),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Mutation::HalfValue => "half-value",
        }
    }
}

/// Parameter ranges for the family suite. The defaults cover every named
/// check at desk scale.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Grid level for residual, embedding and self-replication scans.
    pub grid_level: u32,
    /// Grid level for the zero-set scans.
    pub zero_grid_level: u32,
    /// Scales m of the top-pair family value checks.
    pub family_m: Vec<u32>,
    /// Scales m of the zero-set checks.
    pub zero_set_m: Vec<u32>,
    /// Scales m of the tensor-square embedding check.
    pub embed_m: Vec<u32>,
    /// Parameters p shared by the family checks.
    pub p_values: Vec<Rational>,
    /// Parameters p of the power-law check.
    pub power_p_values: Vec<Rational>,
    /// Largest n in the power-law check.
    pub power_n_max: u32,
    /// Largest j in the flat-sample check of the top-pair family.
    pub flat_j_max: u32,
    /// Length of the threshold bracketing sequences.
    pub bracket_q_max: u32,
    /// Order of the moment tables and limit sums.
    pub moment_order: u32,
    /// Length of the probe sequences.
    pub probe_len: u32,
    /// Number of random points in the enclosure-containment check.
    pub enclosure_samples: u32,
    /// Number and level of the deep random dyadic residual samples.
    pub deep_samples: u32,
    pub deep_level: u32,
    /// Seed of the deterministic sampler.
    pub seed: u64,
    /// Optional negative control.
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid_level: 8,
            zero_grid_level: 10,
            family_m: vec![2, 3, 4],
            zero_set_m: vec![2, 3],
            embed_m: vec![1, 2],
            p_values: vec![rat(1, 3), rat(1, 2), rat(3, 4)],
            power_p_values: vec![rat(1, 3), rat(2, 5), rat(1, 2), rat(3, 4)],
            power_n_max: 64,
            flat_j_max: 20,
            bracket_q_max: 10,
            moment_order: 24,
            probe_len: 32,
            enclosure_samples: 200,
            deep_samples: 12,
            deep_level: 40,
            seed: 0x6d77,
            mutation: None,
        }
    }
}

impl SuiteConfig {
    fn params(&self) -> Vec<(String, String)> {
        let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let rats = |v: &[Rational]| v.iter().map(Rational::to_string).collect::<Vec<_>>().join(",");
        vec![
            ("grid_level".into(), self.grid_level.to_string()),
            ("zero_grid_level".into(), self.zero_grid_level.to_string()),
            ("family_m".into(), list(&self.family_m)),
            ("zero_set_m".into(), list(&self.zero_set_m)),
            ("embed_m".into(), list(&self.embed_m)),
            ("p_values".into(), rats(&self.p_values)),
            ("power_p_values".into(), rats(&self.power_p_values)),
            ("power_n_max".into(), self.power_n_max.to_string()),
            ("flat_j_max".into(), self.flat_j_max.to_string()),
            ("bracket_q_max".into(), self.bracket_q_max.to_string()),
            ("moment_order".into(), self.moment_order.to_string()),
            ("probe_len".into(), self.probe_len.to_string()),
            ("enclosure_samples".into(), self.enclosure_samples.to_string()),
            ("deep_samples".into(), self.deep_samples.to_string()),
            ("deep_level".into(), self.deep_level.to_string()),
            ("seed".into(), self.seed.to_string()),
            (
                "mutation".into(),
                self.mutation.map_or("none".to_string(), |m| m.id().to_string()),
            ),
        ]
    }
}

/// Generic per-expression suite over the full dyadic grid of one level.
pub fn verify_solution_suite(s: &SolutionExpr, grid_level: u32) -> Result<SuiteReport> {
    let mut checks = Vec::new();

    let zero = s.eval(&DyadicPoint::zero())?;
    checks.push(equality_check(
        "boundary-zero",
        format!("value at 0 of {s}"),
        "0",
        &Rational::zero(),
        &zero,
    ));
    let one = s.eval(&DyadicPoint::one())?;
    checks.push(equality_check(
        "boundary-one",
        format!("value at 1 of {s}"),
        "1",
        &Rational::one(),
        &one,
    ));

    let detail = format!("residual at all {} grid points", (1u64 << grid_level) + 1);
    let mut residual = CheckResult::pass("residual-grid", detail.clone());
    for x in DyadicPoint::grid(grid_level) {
        let r = s.mw_residual(&x)?;
        if !r.is_zero() {
            residual = CheckResult::fail(
                "residual-grid",
                detail,
                Witness { location: x.to_string(), expected: "0".into(), got: r.to_string() },
            );
            break;
        }
    }
    checks.push(residual);

    let strict = s.implies_strict();
    let detail = format!("adjacent pairs at level {grid_level}");
    let mut monotone = CheckResult::pass("monotone-grid", detail.clone());
    let mut strict_check = strict.then(|| CheckResult::pass("strict-grid", detail.clone()));
    let mut prev: Option<(DyadicPoint, Rational)> = None;
    for x in DyadicPoint::grid(grid_level) {
        let v = s.eval(&x)?;
        if let Some((px, pv)) = prev {
            if pv > v {
                monotone = CheckResult::fail(
                    "monotone-grid",
                    detail.clone(),
                    Witness {
                        location: format!("{px} -> {x}"),
                        expected: "nondecreasing".into(),
                        got: format!("{pv} > {v}"),
                    },
                );
                break;
            }
            if strict && pv == v {
                if let Some(sc) = &mut strict_check {
                    if sc.status == CheckStatus::Pass {
                        *sc = CheckResult::fail(
                            "strict-grid",
                            detail.clone(),
                            Witness {
                                location: format!("{px} -> {x}"),
                                expected: "strictly increasing".into(),
                                got: format!("both {v}"),
                            },
                        );
                    }
                }
            }
        }
        prev = Some((x, v));
    }
    checks.push(monotone);
    checks.extend(strict_check);

    let params = vec![
        ("expression".into(), s.to_string()),
        ("grid_level".into(), grid_level.to_string()),
        ("strictness_checked".into(), strict.to_string()),
    ];
    Ok(SuiteReport::new("solution", params, checks))
}

/// The full family suite.
pub fn verify_paper_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut checks = vec![
        check_curve_power_law(config)?,
        check_residual_core(config)?,
        check_top_pair_half_value(config)?,
        check_phi_zero_set(config)?,
        check_avg_zero_set(config)?,
        check_tensor_embedding(config)?,
        check_self_replication(config)?,
        check_enclosure_containment(config)?,
        check_singularity_probes(config)?,
        check_deep_residuals(config)?,
    ];
    checks.extend(moment_checks(config)?);
    Ok(SuiteReport::new("paper", config.params(), checks))
}

/// Only the moment diagnostics, for focused runs.
pub fn verify_moments_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    Ok(SuiteReport::new("moments", config.params(), moment_checks(config)?))
}

fn moment_checks(config: &SuiteConfig) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_integral_moment_tables(config)?,
        check_cantor_moment_divergence(config)?,
        check_measure_recovery(config)?,
    ])
}

fn equality_check(
    id: &str,
    detail: String,
    location: &str,
    expected: &Rational,
    got: &Rational,
) -> CheckResult {
    if expected == got {
        CheckResult::pass(id, detail)
    } else {
        CheckResult::fail(
            id,
            detail,
            Witness {
                location: location.into(),
                expected: expected.to_string(),
                got: got.to_string(),
            },
        )
    }
}

/// The five expressions every core scan runs over.
fn core_expressions(p: &Rational) -> Result<Vec<SolutionExpr>> {
    Ok(vec![
        SolutionExpr::derham(p.clone())?,
        SolutionExpr::averaged(ProbabilityVector::top_pair(2, p.clone())?),
        SolutionExpr::averaged(ProbabilityVector::top_pair(3, p.clone())?),
        SolutionExpr::integral(MeasureSpec::atomic(vec![
            (rat(1, 4), rat(1, 2)),
            (rat(3, 4), rat(1, 2)),
        ])?),
        strict_nonintegral_witness(2, p.clone(), rat(1, 2))?,
    ])
}

fn check_curve_power_law(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "01-curve-power-law";
    let detail = format!(
        "curve_p(1/2^n) = p^n for p in {{{}}}, n <= {}",
        config
            .power_p_values
            .iter()
            .map(Rational::to_string)
            .collect::<Vec<_>>()
            .join(", "),
        config.power_n_max
    );
    for p in &config.power_p_values {
        let curve = DeRhamParam::new(p.clone())?;
        for n in 0..=config.power_n_max {
            let x = DyadicPoint::from_ints(1, n).expect("1/2^n");
            let got = curve.eval(&x);
            let expected = rational_pow(p, n);
            if got != expected {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("p={p}, x={x}"),
                        expected: expected.to_string(),
                        got: got.to_string(),
                    },
                ));
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_residual_core(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "02-residual-core-family";
    let p = rat(1, 3);
    let exprs = core_expressions(&p)?;
    let detail = format!(
        "residual of {} expressions at all {} level-{} points",
        exprs.len(),
        (1u64 << config.grid_level) + 1,
        config.grid_level
    );
    for s in &exprs {
        for x in DyadicPoint::grid(config.grid_level) {
            let r = s.mw_residual(&x)?;
            if !r.is_zero() {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("{s} at {x}"),
                        expected: "0".into(),
                        got: r.to_string(),
                    },
                ));
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_top_pair_half_value(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "03-top-pair-half-value";
    let mutated = config.mutation == Some(Mutation::HalfValue);
    let detail = format!(
        "avg_P(1/2) = p/m and avg_P(1/2^(j+1)) = 0 for m in {{{}}}, j <= {}{}",
        config.family_m.iter().map(u32::to_string).collect::<Vec<_>>().join(", "),
        config.flat_j_max,
        if mutated { " [mutated oracle p/(m+1)]" } else { "" }
    );
    let half = DyadicPoint::from_ints(1, 1).expect("1/2");
    for &m in &config.family_m {
        for p in &config.p_values {
            let s = SolutionExpr::averaged(ProbabilityVector::top_pair(m, p.clone())?);
            let divisor = if mutated { m + 1 } else { m };
            let expected = top_pair_half_value(divisor, p);
            let got = s.eval(&half)?;
            if got != expected {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("m={m}, p={p}, x={half}"),
                        expected: expected.to_string(),
                        got: got.to_string(),
                    },
                ));
            }
            for j in 1..=config.flat_j_max {
                let x = DyadicPoint::from_ints(1, j + 1).expect("1/2^(j+1)");
                let got = s.eval(&x)?;
                if !got.is_zero() {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("m={m}, p={p}, x={x}"),
                            expected: "0".into(),
                            got: got.to_string(),
                        },
                    ));
                }
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_phi_zero_set(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "04-invariant-cdf-zero-set";
    let detail = format!(
        "Phi_P zero exactly up to (2^m-2)/(2^m-1) on the level-{} grid, bracketing sequences to q = {}",
        config.zero_grid_level, config.bracket_q_max
    );
    for &m in &config.zero_set_m {
        for p in &config.p_values {
            let vector = ProbabilityVector::top_pair(m, p.clone())?;
            let threshold = vector.phi_zero_threshold()?;
            for x in DyadicPoint::grid(config.zero_grid_level) {
                let v = vector.eval_phi(&x);
                let should_vanish = x.value() <= threshold;
                if v.is_zero() != should_vanish {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("m={m}, p={p}, x={x}"),
                            expected: if should_vanish { "0" } else { "> 0" }.into(),
                            got: v.to_string(),
                        },
                    ));
                }
            }
            let (xs, ys) = threshold_sequences(m, config.bracket_q_max)?;
            for (q, x) in xs.iter().enumerate() {
                let v = vector.eval_phi(x);
                if !v.is_zero() {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("m={m}, p={p}, x_{q}={x}"),
                            expected: "0".into(),
                            got: v.to_string(),
                        },
                    ));
                }
            }
            for (q, y) in ys.iter().enumerate() {
                let v = vector.eval_phi(y);
                let expected = rational_pow(p, q as u32 + 1);
                if v != expected {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("m={m}, p={p}, y_{q}={y}"),
                            expected: expected.to_string(),
                            got: v.to_string(),
                        },
                    ));
                }
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_avg_zero_set(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "05-averaged-zero-set";
    let detail = format!(
        "avg_P zero exactly up to (2^(m-1)-1)/(2^m-1) on the level-{} grid",
        config.zero_grid_level
    );
    for &m in &config.zero_set_m {
        for p in &config.p_values {
            let s = SolutionExpr::averaged(ProbabilityVector::top_pair(m, p.clone())?);
            let threshold = top_pair_flat_threshold(m);
            for x in DyadicPoint::grid(config.zero_grid_level) {
                let v = s.eval(&x)?;
                let should_vanish = x.value() <= threshold;
                if v.is_zero() != should_vanish {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("m={m}, p={p}, x={x}"),
                            expected: if should_vanish { "0" } else { "> 0" }.into(),
                            got: v.to_string(),
                        },
                    ));
                }
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_tensor_embedding(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "06-tensor-square-embedding";
    let detail = format!(
        "avg_P = avg_(P tensor P) at every level-{} point for m in {{{}}}",
        config.grid_level,
        config.embed_m.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")
    );
    for &m in &config.embed_m {
        for p in &config.p_values {
            let vector = if m == 1 {
                ProbabilityVector::new(1, vec![p.clone(), Rational::one() - p])?
            } else {
                ProbabilityVector::top_pair(m, p.clone())?
            };
            let squared = tensor_square(&vector)?;
            let a = SolutionExpr::averaged(vector);
            let b = SolutionExpr::averaged(squared);
            for x in DyadicPoint::grid(config.grid_level) {
                let va = a.eval(&x)?;
                let vb = b.eval(&x)?;
                if va != vb {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("m={m}, p={p}, x={x}"),
                            expected: va.to_string(),
                            got: vb.to_string(),
                        },
                    ));
                }
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_self_replication(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "07-self-replication";
    let p0 = config.p_values.first().cloned().unwrap_or_else(|| rat(1, 3));
    let vectors = vec![
        ProbabilityVector::new(2, vec![rat(1, 4); 4])?, // full support
        ProbabilityVector::top_pair(2, p0.clone())?,
        ProbabilityVector::top_pair(3, p0)?,
    ];
    let detail = format!(
        "replication residual of {} vectors at all level-{} points (one full-support)",
        vectors.len(),
        config.grid_level
    );
    for (i, vector) in vectors.iter().enumerate() {
        for x in DyadicPoint::grid(config.grid_level) {
            let r = vector.self_replication_residual(&x);
            if !r.is_zero() {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("vector #{i}, x={x}"),
                        expected: "0".into(),
                        got: r.to_string(),
                    },
                ));
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_integral_moment_tables(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "08-integral-moment-tables";
    let order = config.moment_order;
    let detail = format!(
        "differences nonnegative for k+n <= {order}, limit sums exact and below 1/1000 by n = {order}"
    );
    let measures = vec![
        MeasureSpec::point_mass(rat(1, 3))?,
        MeasureSpec::atomic(vec![(rat(1, 4), rat(1, 2)), (rat(3, 4), rat(1, 2))])?,
    ];
    for mu in &measures {
        let s = SolutionExpr::integral(mu.clone());
        let c = dyadic_samples(&s, order)?;
        for k in 0..=order {
            for n in 0..=(order - k) {
                let delta = difference(&c, k, n)?;
                if delta.is_negative() {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("{s}, delta({k},{n})"),
                            expected: ">= 0".into(),
                            got: delta.to_string(),
                        },
                    ));
                }
            }
        }
        let sums = limit_condition_partial_sums(&c);
        for (n, l) in sums.iter().enumerate() {
            let mut expected = Rational::zero();
            for (loc, mass) in mu.atoms() {
                expected += mass * rational_pow(&(Rational::one() - loc), n as u32);
            }
            if *l != expected {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("{s}, L({n})"),
                        expected: expected.to_string(),
                        got: l.to_string(),
                    },
                ));
            }
        }
        let last = &sums[order as usize];
        if *last >= rat(1, 1000) {
            return Ok(CheckResult::fail(
                id,
                detail,
                Witness {
                    location: format!("{s}, L({order})"),
                    expected: "< 1/1000".into(),
                    got: last.to_string(),
                },
            ));
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_cantor_moment_divergence(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "09-cantor-moment-divergence";
    let order = config.moment_order.max(12);
    let detail = format!(
        "limit sums 1 - n/6 exactly (so -1 at n = 12) for the m=2, p=1/3 family; witness crosses below -1 by n = {order}"
    );
    let gap = SolutionExpr::averaged(ProbabilityVector::top_pair(2, rat(1, 3))?);
    let c = dyadic_samples(&gap, order)?;
    let sums = limit_condition_partial_sums(&c);
    for (n, l) in sums.iter().enumerate() {
        let expected = Rational::one() - rat(n as i64, 6);
        if *l != expected {
            return Ok(CheckResult::fail(
                id,
                detail,
                Witness {
                    location: format!("{gap}, L({n})"),
                    expected: expected.to_string(),
                    got: l.to_string(),
                },
            ));
        }
    }
    if sums[12] != rat(-1, 1) {
        return Ok(CheckResult::fail(
            id,
            detail,
            Witness {
                location: format!("{gap}, L(12)"),
                expected: "-1".into(),
                got: sums[12].to_string(),
            },
        ));
    }
    let witness = strict_nonintegral_witness(2, rat(1, 3), rat(1, 2))?;
    let c = dyadic_samples(&witness, order)?;
    let sums = limit_condition_partial_sums(&c);
    if !sums.iter().any(|l| *l < rat(-1, 1)) {
        return Ok(CheckResult::fail(
            id,
            detail,
            Witness {
                location: format!("{witness}, L(n) for n <= {order}"),
                expected: "some value < -1".into(),
                got: format!("minimum {}", sums.iter().min().expect("nonempty")),
            },
        ));
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_measure_recovery(_config: &SuiteConfig) -> Result<CheckResult> {
    let id = "10-measure-recovery";
    let detail =
        "two-atom round trip from 5 moments; non-realizable sequence rejected for r = 1, 2".to_string();
    let mu = MeasureSpec::atomic(vec![(rat(1, 4), rat(1, 2)), (rat(3, 4), rat(1, 2))])?;
    let (c, _) = moments_of_measure(&mu, 4);
    match recover_discrete_measure(&c, 2) {
        Ok(back) if back.atoms() == mu.atoms() => {}
        Ok(back) => {
            return Ok(CheckResult::fail(
                id,
                detail,
                Witness {
                    location: "round trip".into(),
                    expected: format!("{:?}", mu.atoms()),
                    got: format!("{:?}", back.atoms()),
                },
            ))
        }
        Err(e) => {
            return Ok(CheckResult::fail(
                id,
                detail,
                Witness {
                    location: "round trip".into(),
                    expected: "recovery".into(),
                    got: e.to_string(),
                },
            ))
        }
    }
    let bad = MomentSequence::new(vec![rat(1, 1), rat(1, 6), rat(0, 1), rat(0, 1)]);
    for r in [1usize, 2] {
        match recover_discrete_measure(&bad, r) {
            Err(Error::NotAtomic(_)) => {}
            other => {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("non-realizable sequence, r = {r}"),
                        expected: "rejection".into(),
                        got: format!("{other:?}"),
                    },
                ))
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

fn check_enclosure_containment(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "11-enclosure-containment";
    let detail = format!(
        "{} seeded random rationals: refined exact value inside every coarser enclosure, widths nonincreasing",
        config.enclosure_samples
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let budgets = [2u32, 5, 9, 14, 20];
    let refine_level = 48; // beyond every budget in any base used here
    for sample in 0..config.enclosure_samples {
        let denom = rng.gen_range(2u64..10_000);
        let numer = rng.gen_range(0..=denom);
        let x = rat(numer as i64, denom as i64);
        let pk = rng.gen_range(1u64..97);
        let p = rat(pk as i64, 97);
        let refined = binary_truncation(&x, refine_level);

        // rotate through the evaluator families
        let xc = x.clone();
        let (enclose, exact): (Box<dyn Fn(u32) -> Result<crate::numerics::Enclosure>>, Rational) =
            match sample % 3 {
                0 => {
                    let curve = DeRhamParam::new(p.clone())?;
                    let c2 = curve.clone();
                    (
                        Box::new(move |d| c2.eval_enclosed(&xc, d)),
                        curve.eval(&refined),
                    )
                }
                1 => {
                    let vector = ProbabilityVector::top_pair(2, p.clone())?;
                    let v2 = vector.clone();
                    (
                        Box::new(move |d| v2.eval_phi_enclosed(&xc, d)),
                        vector.eval_phi(&refined),
                    )
                }
                _ => {
                    let q = Rational::one() - &p;
                    let mu = MeasureSpec::atomic(vec![(p.clone(), rat(1, 2)), (q, rat(1, 2))])
                        .or_else(|_| MeasureSpec::point_mass(p.clone()))?;
                    let s = SolutionExpr::integral(mu);
                    let s2 = s.clone();
                    (
                        Box::new(move |d| Ok(s2.eval_enclosed(&xc, d)?.enclosure)),
                        s.eval(&refined)?,
                    )
                }
            };

        let mut prev_width: Option<Rational> = None;
        for d in budgets {
            let e = enclose(d)?;
            if !e.contains(&exact) {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("sample {sample}: x={x}, p={p}, digits={d}"),
                        expected: format!("{exact} inside"),
                        got: e.to_string(),
                    },
                ));
            }
            let w = e.width();
            if let Some(pw) = prev_width {
                if w > pw {
                    return Ok(CheckResult::fail(
                        id,
                        detail,
                        Witness {
                            location: format!("sample {sample}: x={x}, p={p}, digits={d}"),
                            expected: format!("width <= {pw}"),
                            got: w.to_string(),
                        },
                    ));
                }
            }
            prev_width = Some(w);
        }
    }
    Ok(CheckResult::pass(id, detail))
}

/// floor(x 2^level) / 2^level as a dyadic point.
fn binary_truncation(x: &Rational, level: u32) -> DyadicPoint {
    let scaled = (x * Rational::new(pow2(level), 1.into())).floor().to_integer();
    DyadicPoint::new(scaled.to_biguint().expect("nonnegative"), level).expect("within [0,1]")
}

fn check_singularity_probes(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "12-singularity-probes";
    let len = config.probe_len;
    let detail = format!(
        "2^n curve_(1/4)(1/2^n) and reflected 2^n (1 - curve_(3/4)(1 - 1/2^n)) equal (1/2)^n for n <= {len}; values reported, no singularity asserted"
    );
    let curve_low = DeRhamParam::new(rat(1, 4))?;
    let curve_high = DeRhamParam::new(rat(3, 4))?;
    let mut origin = Vec::new();
    let mut reflected = Vec::new();
    for n in 0..=len {
        let x = DyadicPoint::from_ints(1, n).expect("1/2^n");
        let two_n = Rational::new(pow2(n), 1.into());
        let at_zero = &two_n * curve_low.eval(&x);
        let at_one = &two_n * (Rational::one() - curve_high.eval(&x.complement()));
        let expected = rational_pow(&rat(1, 2), n);
        if at_zero != expected {
            return Ok(CheckResult::fail(
                id,
                detail,
                Witness {
                    location: format!("origin probe, n={n}"),
                    expected: expected.to_string(),
                    got: at_zero.to_string(),
                },
            ));
        }
        if at_one != expected {
            return Ok(CheckResult::fail(
                id,
                detail,
                Witness {
                    location: format!("reflected probe, n={n}"),
                    expected: expected.to_string(),
                    got: at_one.to_string(),
                },
            ));
        }
        origin.push(at_zero);
        reflected.push(at_one);
    }
    let trend = |v: &[Rational]| {
        if v.windows(2).all(|w| w[1] <= w[0]) {
            "nonincreasing"
        } else {
            "not monotone"
        }
    };
    let fmt = |v: &[Rational]| v.iter().map(Rational::to_string).collect::<Vec<_>>().join(",");
    let data = vec![
        format!("origin probe ({}): {}", trend(&origin), fmt(&origin)),
        format!("reflected probe ({}): {}", trend(&reflected), fmt(&reflected)),
    ];
    Ok(CheckResult::pass(id, detail).with_data(data))
}

fn check_deep_residuals(config: &SuiteConfig) -> Result<CheckResult> {
    let id = "13-deep-random-residuals";
    let level = config.deep_level.min(60);
    let detail = format!(
        "residual at {} seeded random level-{level} points for three core expressions",
        config.deep_samples
    );
    // separate stream from the enclosure sampler
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xdeef);
    let exprs = vec![
        SolutionExpr::derham(rat(1, 3))?,
        SolutionExpr::averaged(ProbabilityVector::top_pair(2, rat(1, 3))?),
        strict_nonintegral_witness(2, rat(1, 3), rat(1, 2))?,
    ];
    for _ in 0..config.deep_samples {
        let numer = rng.gen_range(0..=(1u64 << level));
        let x = DyadicPoint::from_ints(numer, level).expect("within [0,1]");
        for s in &exprs {
            let r = s.mw_residual(&x)?;
            if !r.is_zero() {
                return Ok(CheckResult::fail(
                    id,
                    detail,
                    Witness {
                        location: format!("{s} at {x}"),
                        expected: "0".into(),
                        got: r.to_string(),
                    },
                ));
            }
        }
    }
    Ok(CheckResult::pass(id, detail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_paper_suite_passes() {
        let report = verify_paper_suite(&SuiteConfig::default()).unwrap();
        for c in &report.checks {
            assert_eq!(c.status, CheckStatus::Pass, "{}: {:?}", c.id, c.witness);
        }
        assert_eq!(report.checks.len(), 13);
    }

    #[test]
    fn mutated_suite_fails_with_witness() {
        let config = SuiteConfig {
            mutation: Some(Mutation::HalfValue),
            ..SuiteConfig::default()
        };
        let report = verify_paper_suite(&config).unwrap();
        assert!(!report.all_pass());
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].id, "03-top-pair-half-value");
        let w = failed[0].witness.as_ref().expect("failures carry witnesses");
        assert!(w.location.contains("m=2"));
    }

    #[test]
    fn reports_are_byte_deterministic() {
        let a = verify_moments_suite(&SuiteConfig::default()).unwrap();
        let b = verify_moments_suite(&SuiteConfig::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn solution_suite_covers_strictness_only_when_implied() {
        let strictly = SolutionExpr::derham(rat(2, 5)).unwrap();
        let report = verify_solution_suite(&strictly, 6).unwrap();
        assert!(report.all_pass());
        assert!(report.checks.iter().any(|c| c.id == "strict-grid"));

        let flat = SolutionExpr::averaged(ProbabilityVector::top_pair(2, rat(1, 3)).unwrap());
        let report = verify_solution_suite(&flat, 6).unwrap();
        assert!(report.all_pass());
        assert!(report.checks.iter().all(|c| c.id != "strict-grid"));
    }

    #[test]
    fn witness_expression_passes_with_strictness() {
        let s = strict_nonintegral_witness(2, rat(1, 3), rat(1, 2)).unwrap();
        let report = verify_solution_suite(&s, 7).unwrap();
        assert!(report.all_pass());
        assert!(report.checks.iter().any(|c| c.id == "strict-grid"));
    }
}
