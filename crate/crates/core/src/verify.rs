//! Lemma-by-lemma verification of a product instance, with a structured report.
//!
//! Every check evaluates an identity over all admissible index tuples, or over
//! a seeded sample of [`SAMPLE_LIMIT`] tuples when the family is larger. A
//! failing check records the first failing tuple in canonical order.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gwreath::{family_defect, ProductScheme, ProductSpec, Triple, MATCH_TOL};
use crate::linalg::{orthonormalize, CMatrix};
use crate::poset::{AntiChain, DIndex, EIndex, PointSet};
use crate::scheme::check_axioms;
use crate::terwilliger::{
    central_decomposition_seeded, terwilliger_algebra_capped, CentralDecomposition,
    TerwilligerData, DEFAULT_CLOSURE_MAX,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Index families larger than this are sampled.
pub const SAMPLE_LIMIT: usize = 10_000;

/// Largest `|X_P|` accepted at the lemma level.
pub const LEMMAS_MAX: usize = 512;

/// Largest `|X_P|` accepted at the full oracle level.
pub const FULL_ORACLE_MAX: usize = DEFAULT_CLOSURE_MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    ClosedForms,
    Lemmas,
    FullOracle,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::ClosedForms => "closed_forms",
            Level::Lemmas => "lemmas",
            Level::FullOracle => "full_oracle",
        }
    }

    fn cap(self, max_dim: usize) -> usize {
        match self {
            Level::ClosedForms => max_dim,
            Level::Lemmas => LEMMAS_MAX.min(max_dim),
            Level::FullOracle => FULL_ORACLE_MAX.min(max_dim),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub instance: String,
    pub status: Status,
    pub max_residual: f64,
    pub cases: usize,
    pub sampled: bool,
    /// Present iff the check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Kept out of the JSON so that reports are byte-stable.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    /// SHA-256 of the canonical product JSON.
    pub spec_digest: String,
    pub instance: String,
    pub level: Level,
    pub tolerance: f64,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check_id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_table(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.check_id.len())
            .max()
            .unwrap_or(8);
        let mut out = format!(
            "{}  level={}  tol={:e}  seed={}\n",
            self.instance,
            self.level.name(),
            self.tolerance,
            self.seed
        );
        out.push_str(&format!(
            "{:<width$}  {:<7}  {:>12}  {:>7}  {:>9}\n",
            "check", "status", "residual", "cases", "ms"
        ));
        for c in &self.checks {
            let status = match c.status {
                Status::Pass if c.sampled => "pass*",
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            out.push_str(&format!(
                "{:<width$}  {:<7}  {:>12.5e}  {:>7}  {:>9.1}\n",
                c.check_id,
                status,
                c.max_residual,
                c.cases,
                c.elapsed.as_secs_f64() * 1e3
            ));
            if let Some(ce) = &c.counterexample {
                out.push_str(&format!("{:<width$}    counterexample: {ce}\n", ""));
            }
            if let Some(note) = &c.note {
                out.push_str(&format!("{:<width$}    note: {note}\n", ""));
            }
        }
        out.push_str(&format!(
            "{} checks: {} passed, {} failed, {} skipped",
            self.summary.total, self.summary.passed, self.summary.failed, self.summary.skipped
        ));
        if self.checks.iter().any(|c| c.sampled) {
            out.push_str(" (* sampled)");
        }
        out.push('\n');
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub tol: f64,
    pub seed: u64,
}

/// Short description of a product instance.
pub fn describe_spec(spec: &ProductSpec) -> String {
    let poset = spec.poset();
    let covers: Vec<String> = poset
        .covers()
        .iter()
        .map(|(a, b)| format!("{a}<{b}"))
        .collect();
    let comps: Vec<String> = spec
        .components()
        .iter()
        .map(|c| format!("{}:{}", c.size(), c.d()))
        .collect();
    format!(
        "P(n={}; {}) X=[{}] |X_P|={}",
        poset.len(),
        if covers.is_empty() {
            "discrete".to_string()
        } else {
            covers.join(",")
        },
        comps.join(" "),
        spec.size().map_or("overflow".into(), |s| s.to_string())
    )
}

pub fn spec_digest(spec: &ProductSpec) -> Result<String> {
    let canonical = serde_json::to_string(&spec.to_json())?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

/// Outcome of one case: a residual, or a structural violation.
type Case = std::result::Result<f64, String>;

struct Runner {
    cfg: SuiteConfig,
    instance: String,
    checks: Vec<CheckResult>,
}

impl Runner {
    fn tol(&self) -> f64 {
        self.cfg.tol
    }

    /// Runs `eval` over `cases` (sampled if needed) and records the result.
    fn check<T>(
        &mut self,
        id: &str,
        cases: Vec<T>,
        describe: impl Fn(&T) -> String,
        mut eval: impl FnMut(&T) -> Case,
    ) {
        let start = Instant::now();
        let total = cases.len();
        let (chosen, sampled) = sample_indices(total, self.cfg.seed, id);
        let mut max_residual = 0.0_f64;
        let mut counterexample = None;
        for k in chosen.iter().copied() {
            let case = &cases[k];
            let failure = match eval(case) {
                Ok(r) => {
                    max_residual = max_residual.max(r);
                    (r > self.tol() || r.is_nan()).then(|| format!("residual {r:e}"))
                }
                Err(why) => {
                    max_residual = max_residual.max(1.0);
                    Some(why)
                }
            };
            if let (Some(why), None) = (failure, &counterexample) {
                counterexample = Some(format!("{}: {why}", describe(case)));
            }
        }
        let status = if counterexample.is_some() {
            Status::Fail
        } else {
            Status::Pass
        };
        self.checks.push(CheckResult {
            check_id: id.to_string(),
            instance: self.instance.clone(),
            status,
            max_residual,
            cases: chosen.len(),
            sampled,
            counterexample,
            note: None,
            elapsed: start.elapsed(),
        });
    }

    fn skip(&mut self, id: &str, why: &str) {
        self.checks.push(CheckResult {
            check_id: id.to_string(),
            instance: self.instance.clone(),
            status: Status::Skipped,
            max_residual: 0.0,
            cases: 0,
            sampled: false,
            counterexample: None,
            note: Some(why.to_string()),
            elapsed: Duration::ZERO,
        });
    }

    fn push(&mut self, mut c: CheckResult) {
        c.instance = self.instance.clone();
        self.checks.push(c);
    }
}

fn sample_indices(total: usize, seed: u64, id: &str) -> (Vec<usize>, bool) {
    if total <= SAMPLE_LIMIT {
        return ((0..total).collect(), false);
    }
    // per-check stream so that results do not depend on check order
    let salt = id.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    let mut chosen = rand::seq::index::sample(&mut rng, total, SAMPLE_LIMIT).into_vec();
    chosen.sort_unstable();
    (chosen, true)
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.dist(b) / b.norm().max(1.0)
}

fn zero_residual(m: &CMatrix, scale: f64) -> f64 {
    m.norm() / scale.max(1.0)
}

fn err(e: Error) -> String {
    e.to_string()
}

/// Runs the checks of `level` and all lower levels.
pub fn run_suite(ps: &ProductScheme, level: Level, cfg: SuiteConfig) -> Result<VerificationReport> {
    let cap = level.cap(ps.options().max_dim);
    if ps.size() > cap {
        let fits = [Level::FullOracle, Level::Lemmas, Level::ClosedForms]
            .into_iter()
            .find(|l| ps.size() <= l.cap(ps.options().max_dim))
            .map_or("none", Level::name);
        return Err(Error::Resource(format!(
            "level {} allows |X_P| <= {cap}, got {}; the largest level that fits is {fits}",
            level.name(),
            ps.size()
        )));
    }
    let mut run = Runner {
        cfg,
        instance: describe_spec(ps.spec()),
        checks: Vec::new(),
    };
    let ctx = Context::new(ps, level)?;

    closed_form_checks(&mut run, &ctx)?;
    if level >= Level::Lemmas {
        lemma_checks(&mut run, &ctx)?;
    }
    if level >= Level::FullOracle {
        oracle_checks(&mut run, &ctx)?;
    }

    let mut checks = run.checks;
    checks.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    let summary = Summary {
        total: checks.len(),
        passed: checks.iter().filter(|c| c.status == Status::Pass).count(),
        failed: checks.iter().filter(|c| c.status == Status::Fail).count(),
        skipped: checks
            .iter()
            .filter(|c| c.status == Status::Skipped)
            .count(),
    };
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        spec_digest: spec_digest(ps.spec())?,
        instance: describe_spec(ps.spec()),
        level,
        tolerance: cfg.tol,
        seed: cfg.seed,
        checks,
        summary,
    })
}

/// Matrices shared by many checks.
struct Context<'a> {
    ps: &'a ProductScheme,
    e: Vec<CMatrix>,
    es: Vec<CMatrix>,
    antichains: Vec<AntiChain>,
    /// The algebra itself, when small enough to close.
    terwilliger: Option<TerwilligerData>,
}

impl<'a> Context<'a> {
    fn new(ps: &'a ProductScheme, level: Level) -> Result<Self> {
        let want_t = level >= Level::Lemmas && ps.size() <= DEFAULT_CLOSURE_MAX;
        let terwilliger = if want_t {
            Some(terwilliger_algebra_capped(
                &ps.as_scheme()?,
                ps.base_point(),
                ps.options().tol,
                DEFAULT_CLOSURE_MAX,
            )?)
        } else {
            None
        };
        Ok(Context {
            ps,
            e: ps.idempotents_all()?,
            es: ps.duals_all()?,
            antichains: ps.poset().enumerate_antichains(),
            terwilliger,
        })
    }

    fn d(&self) -> &[DIndex] {
        self.ps.d_indices()
    }

    fn up(&self, s: PointSet) -> PointSet {
        self.ps.poset().up_set(s)
    }

    fn down(&self, s: PointSet) -> PointSet {
        self.ps.poset().down_set(s)
    }

    /// Relative commutator with every `E_j` and `E_i*`.
    fn centrality(&self, m: &CMatrix) -> f64 {
        let scale = m.norm().max(1.0);
        self.e
            .iter()
            .chain(&self.es)
            .map(|g| m.commutator(g).norm() / scale)
            .fold(0.0, f64::max)
    }

    fn membership(&self, m: &CMatrix) -> Option<f64> {
        self.terwilliger.as_ref().map(|t| t.membership_defect(m))
    }

    /// `(Q, j)` with `Supp(j) ⊆ Down(Q)`.
    fn down_pairs(&self) -> Vec<(AntiChain, usize)> {
        let mut out = Vec::new();
        for &q in &self.antichains {
            let dq = self.down(q.points());
            for (k, j) in self.d().iter().enumerate() {
                if j.support_set().is_subset(dq) {
                    out.push((q, k));
                }
            }
        }
        out
    }

    /// `(R, i)` with `Supp(i) ⊆ Up(R)`.
    fn up_pairs(&self) -> Vec<(AntiChain, usize)> {
        let mut out = Vec::new();
        for &r in &self.antichains {
            let ur = self.up(r.points());
            for (k, i) in self.d().iter().enumerate() {
                if i.support_set().is_subset(ur) {
                    out.push((r, k));
                }
            }
        }
        out
    }
}

fn show_pair(ctx: &Context, set: AntiChain, k: usize) -> String {
    format!("({}, {})", set.points(), ctx.d()[k])
}

fn show_triple(ps: &ProductScheme, t: &Triple) -> String {
    format!(
        "({}, {}, {})",
        ps.d_indices()[t.i],
        ps.d_indices()[t.j],
        t.ell
    )
}

fn closed_form_checks(run: &mut Runner, ctx: &Context) -> Result<()> {
    let ps = ctx.ps;
    let tol = run.tol();
    let n = ps.size();
    let adjacency = ps.adjacency_all()?;

    let report = check_axioms(&adjacency, tol);
    run.check(
        "scheme.axioms",
        report.axioms.clone(),
        |a| format!("axiom {} ({})", a.axiom, a.name),
        |a| {
            if a.passed {
                Ok(a.residual)
            } else {
                Err(format!("residual {:e}", a.residual))
            }
        },
    );

    run.check(
        "scheme.valency_formula",
        (0..adjacency.len()).collect(),
        |&k| format!("{}", ctx.d()[k]),
        |&k| {
            let row: f64 = (0..n).map(|y| adjacency[k][(0, y)].re).sum();
            let constant = (0..n).all(|x| {
                let r: f64 = (0..n).map(|y| adjacency[k][(x, y)].re).sum();
                r == row
            });
            if !constant || row != ps.valencies()[k] as f64 {
                return Err(format!("row sum {row} against k = {}", ps.valencies()[k]));
            }
            Ok(0.0)
        },
    );

    run.check(
        "scheme.multiplicity_formula",
        (0..ctx.e.len()).collect(),
        |&k| format!("{}", ctx.d()[k]),
        |&k| {
            let tr = ctx.e[k].trace().re;
            if tr.round() as u64 != ps.multiplicities()[k] {
                return Err(format!("trace {tr} against m = {}", ps.multiplicities()[k]));
            }
            Ok((tr - tr.round()).abs())
        },
    );

    run.check(
        "scheme.size_identities",
        vec![()],
        |_| "sums".to_string(),
        |_| {
            let k: u64 = ps.valencies().iter().sum();
            let m: u64 = ps.multiplicities().iter().sum();
            if k as usize != n || m as usize != n {
                return Err(format!("sum k = {k}, sum m = {m}, |X_P| = {n}"));
            }
            Ok(0.0)
        },
    );

    if n <= ps
        .options()
        .oracle_max
        .max(crate::gwreath::DEFAULT_ORACLE_MAX)
    {
        let oracle = crate::scheme::scheme_from_matrices(&adjacency, tol, run.cfg.seed);
        match oracle {
            Ok(oracle) => {
                let eig = oracle.idempotents().to_vec();
                run.check(
                    "scheme.idempotents_are_eigenprojections",
                    (0..ctx.e.len()).collect(),
                    |&k| format!("{}", ctx.d()[k]),
                    |&k| {
                        let best = eig
                            .iter()
                            .map(|f| f.dist(&ctx.e[k]))
                            .fold(f64::INFINITY, f64::min);
                        if best < MATCH_TOL {
                            Ok(best)
                        } else {
                            Err(format!("nearest eigenprojection at distance {best:e}"))
                        }
                    },
                );
                let duals = crate::scheme::dual_idempotents(&oracle, ps.base_point())?;
                run.check(
                    "scheme.dual_idempotents",
                    (0..ctx.es.len()).collect(),
                    |&k| format!("{}", ctx.d()[k]),
                    |&k| Ok(ctx.es[k].dist(&duals[k])),
                );
            }
            Err(e) => {
                let why = e.to_string();
                run.check(
                    "scheme.idempotents_are_eigenprojections",
                    vec![()],
                    |_| "all".into(),
                    |_| Err(why.clone()),
                );
            }
        }
    } else {
        run.skip(
            "scheme.idempotents_are_eigenprojections",
            "above the oracle cap",
        );
        run.skip("scheme.dual_idempotents", "above the oracle cap");
    }

    let by_duals = ps.primary_from_duals()?;
    let by_idempotents = ps.primary_from_idempotents()?;
    run.check(
        "primary.two_expressions",
        vec![()],
        |_| "dual form against idempotent form".into(),
        |_| Ok(rel(&by_duals, &by_idempotents)),
    );
    run.check(
        "primary.rank",
        vec![()],
        |_| "rank".into(),
        |_| {
            let rank = by_duals.rank(1e-8);
            if rank == ctx.d().len() {
                Ok(0.0)
            } else {
                Err(format!("rank {rank} against |D| = {}", ctx.d().len()))
            }
        },
    );

    if ps.poset().is_discrete() {
        let c = compare_against_direct_product(ps)?;
        run.push(c);
    } else {
        run.skip("reduction.direct_product", "poset is not an anti-chain");
    }
    if ps.poset().is_total() {
        let c = compare_against_wreath(ps)?;
        run.push(c);
    } else {
        run.skip("reduction.wreath_product", "poset is not a chain");
    }
    Ok(())
}

fn lemma_checks(run: &mut Runner, ctx: &Context) -> Result<()> {
    let ps = ctx.ps;
    let d = ctx.d();
    let nd = d.len();
    let n = ps.size();
    let id = CMatrix::identity(n);
    let e_span = orthonormalize(&ctx.e, run.tol())?;
    let es_span = orthonormalize(&ctx.es, run.tol())?;

    run.check(
        "lemma.e_prime.in_bose_mesner",
        (0..nd).collect(),
        |&k| format!("{}", d[k]),
        |&k| ps.e_prime(k).map(|m| e_span.residual(&m)).map_err(err),
    );
    run.check(
        "lemma.estar_prime.in_dual_bose_mesner",
        (0..nd).collect(),
        |&k| format!("{}", d[k]),
        |&k| ps.estar_prime(k).map(|m| es_span.residual(&m)).map_err(err),
    );

    let down_pairs = ctx.down_pairs();
    let up_pairs = ctx.up_pairs();

    run.check(
        "lemma.f_down.sum_of_idempotents",
        down_pairs.clone(),
        |&(q, k)| show_pair(ctx, q, k),
        |&(q, k)| {
            let f = ps.f_down(q, k).map_err(err)?;
            let dq = ctx.down(q.points());
            let mut sum = CMatrix::zeros(n);
            for (t, jp) in d.iter().enumerate() {
                if d[k].is_contained_in(jp)
                    && d[k].support_set() == jp.support_set().intersection(dq)
                {
                    sum += &ctx.e[t];
                }
            }
            Ok(rel(&f, &sum))
        },
    );
    run.check(
        "lemma.f_up_star.sum_of_dual_idempotents",
        up_pairs.clone(),
        |&(r, k)| show_pair(ctx, r, k),
        |&(r, k)| {
            let f = ps.f_up_star(r, k).map_err(err)?;
            let ur = ctx.up(r.points());
            let mut sum = CMatrix::zeros(n);
            for (t, ip) in d.iter().enumerate() {
                if d[k].is_contained_in(ip)
                    && d[k].support_set() == ip.support_set().intersection(ur)
                {
                    sum += &ctx.es[t];
                }
            }
            Ok(rel(&f, &sum))
        },
    );

    run.check(
        "lemma.f_down.partition_of_unity",
        ctx.antichains.clone(),
        |q| format!("Q={}", q.points()),
        |&q| {
            let mut sum = CMatrix::zeros(n);
            for &(q2, k) in &down_pairs {
                if q2 == q {
                    sum += &ps.f_down(q, k).map_err(err)?;
                }
            }
            Ok(rel(&sum, &id))
        },
    );
    run.check(
        "lemma.f_up_star.partition_of_unity",
        ctx.antichains.clone(),
        |r| format!("R={}", r.points()),
        |&r| {
            let mut sum = CMatrix::zeros(n);
            for &(r2, k) in &up_pairs {
                if r2 == r {
                    sum += &ps.f_up_star(r, k).map_err(err)?;
                }
            }
            Ok(rel(&sum, &id))
        },
    );

    let poset = ps.poset();
    let pairs_of = |v: &[(AntiChain, usize)]| -> Vec<((AntiChain, usize), (AntiChain, usize))> {
        v.iter()
            .flat_map(|&a| v.iter().map(move |&b| (a, b)))
            .collect()
    };
    run.check(
        "lemma.f_down.product_law",
        pairs_of(&down_pairs),
        |&((q, j), (q2, j2))| format!("{} * {}", show_pair(ctx, q, j), show_pair(ctx, q2, j2)),
        |&((q, j), (q2, j2))| {
            let prod = &ps.f_down(q, j).map_err(err)? * &ps.f_down(q2, j2).map_err(err)?;
            let (r, r2) = (d[j].support_set(), d[j2].support_set());
            let same =
                r.intersection(ctx.down(q2.points())) == r2.intersection(ctx.down(q.points()));
            match d[j].union(&d[j2], poset) {
                Some(u) if same => {
                    let q3 = poset.maximal_elements(q.points().union(q2.points()));
                    let k = ps.position(&u).ok_or("union is not a class index")?;
                    Ok(rel(&prod, &ps.f_down(q3, k).map_err(err)?))
                }
                _ => Ok(zero_residual(&prod, 1.0)),
            }
        },
    );
    run.check(
        "lemma.f_up_star.product_law",
        pairs_of(&up_pairs),
        |&((r, i), (r2, i2))| format!("{} * {}", show_pair(ctx, r, i), show_pair(ctx, r2, i2)),
        |&((r, i), (r2, i2))| {
            let prod = &ps.f_up_star(r, i).map_err(err)? * &ps.f_up_star(r2, i2).map_err(err)?;
            let (q, q2) = (d[i].support_set(), d[i2].support_set());
            let same = q.intersection(ctx.up(r2.points())) == q2.intersection(ctx.up(r.points()));
            match d[i].union(&d[i2], poset) {
                Some(u) if same => {
                    let r3 = poset.minimal_elements(r.points().union(r2.points()));
                    let k = ps.position(&u).ok_or("union is not a class index")?;
                    Ok(rel(&prod, &ps.f_up_star(r3, k).map_err(err)?))
                }
                _ => Ok(zero_residual(&prod, 1.0)),
            }
        },
    );

    // (Q, j, R, i) with the support preconditions of both families
    let mut mixed = Vec::new();
    for &(q, j) in &down_pairs {
        for &(r, i) in &up_pairs {
            mixed.push((q, j, r, i));
        }
    }
    let commute_cases: Vec<_> = mixed
        .iter()
        .copied()
        .filter(|&(q, j, r, i)| {
            q.points().is_subset(d[i].support_set()) || r.points().is_subset(d[j].support_set())
        })
        .collect();
    let central_cases: Vec<_> = mixed
        .iter()
        .copied()
        .filter(|&(q, j, r, i)| {
            q.points().is_subset(d[i].support_set()) && r.points().is_subset(d[j].support_set())
        })
        .collect();
    let show_mixed = |&(q, j, r, i): &(AntiChain, usize, AntiChain, usize)| {
        format!("F{} F*{}", show_pair(ctx, q, j), show_pair(ctx, r, i))
    };
    run.check(
        "lemma.f_mixed.commute",
        commute_cases,
        show_mixed,
        |&(q, j, r, i)| {
            let f = ps.f_down(q, j).map_err(err)?;
            let fs = ps.f_up_star(r, i).map_err(err)?;
            let ab = &f * &fs;
            if ab.norm() < 1e-6 {
                return Err("product vanishes".into());
            }
            Ok(rel(&ab, &(&fs * &f)))
        },
    );
    run.check(
        "lemma.f_mixed.central",
        central_cases,
        show_mixed,
        |&(q, j, r, i)| {
            let m = &ps.f_down(q, j).map_err(err)? * &ps.f_up_star(r, i).map_err(err)?;
            Ok(ctx.centrality(&m).max(ctx.membership(&m).unwrap_or(0.0)))
        },
    );

    let psi = ps.psi().to_vec();
    run.check(
        "prop.f_star.factor_order",
        psi.clone(),
        |&(i, j)| format!("({}, {})", d[i], d[j]),
        |&(i, j)| {
            let (q, r) = (d[i].support(), d[j].support());
            let fs = ps.f_up_star(r, i).map_err(err)?;
            let f = ps.f_down(q, j).map_err(err)?;
            let closed = ps.f_star(i, j).map_err(err)?;
            Ok(rel(&(&fs * &f), &closed).max(rel(&(&f * &fs), &closed)))
        },
    );
    run.check(
        "prop.f_star.central",
        psi.clone(),
        |&(i, j)| format!("({}, {})", d[i], d[j]),
        |&(i, j)| {
            let m = ps.f_star(i, j).map_err(err)?;
            Ok(ctx.centrality(&m).max(ctx.membership(&m).unwrap_or(0.0)))
        },
    );
    let psi_pairs: Vec<_> = psi
        .iter()
        .flat_map(|&a| psi.iter().map(move |&b| (a, b)))
        .collect();
    run.check(
        "lemma.f_star.product_law",
        psi_pairs,
        |&((i, j), (i2, j2))| format!("({}, {}) * ({}, {})", d[i], d[j], d[i2], d[j2]),
        |&((i, j), (i2, j2))| {
            let prod = &ps.f_star(i, j).map_err(err)? * &ps.f_star(i2, j2).map_err(err)?;
            let (q, r, q2, r2) = (
                d[i].support_set(),
                d[j].support_set(),
                d[i2].support_set(),
                d[j2].support_set(),
            );
            let cond_up = q.intersection(ctx.up(r2)) == q2.intersection(ctx.up(r));
            let cond_down = r.intersection(ctx.down(q2)) == r2.intersection(ctx.down(q));
            match (d[i].union(&d[i2], poset), d[j].union(&d[j2], poset)) {
                (Some(iu), Some(ju)) if cond_up && cond_down => {
                    let (a, b) = (
                        ps.position(&iu).ok_or("union is not a class index")?,
                        ps.position(&ju).ok_or("union is not a class index")?,
                    );
                    Ok(rel(&prod, &ps.f_star(a, b).map_err(err)?))
                }
                _ => Ok(zero_residual(&prod, 1.0)),
            }
        },
    );

    let e_all = ps.e_indices().to_vec();
    let e_ge1 = ps.e_ge1().to_vec();
    let show_e = |l: &EIndex| format!("{l}");
    if ctx.terwilliger.is_some() {
        run.check("prop.hat_f.in_terwilliger", e_all.clone(), show_e, |l| {
            let m = ps.hat_f(l).map_err(err)?;
            Ok(ctx.membership(&m).unwrap_or(0.0))
        });
    } else {
        run.skip("prop.hat_f.in_terwilliger", "algebra too large to close");
    }

    let mut ann_e = Vec::new();
    let mut ann_es = Vec::new();
    for (a, l) in e_ge1.iter().enumerate() {
        for (k, x) in d.iter().enumerate() {
            if !l.support_set().is_subset(x.support_set()) {
                ann_e.push((a, k));
                ann_es.push((a, k));
            }
        }
    }
    run.check(
        "lemma.hat_f.annihilates_idempotents",
        ann_e,
        |&(a, k)| format!("{} E_{}", e_ge1[a], d[k]),
        |&(a, k)| {
            let h = ps.hat_f(&e_ge1[a]).map_err(err)?;
            Ok(zero_residual(&(&h * &ctx.e[k]), 1.0).max(zero_residual(&(&ctx.e[k] * &h), 1.0)))
        },
    );
    run.check(
        "lemma.hat_f.annihilates_dual_idempotents",
        ann_es,
        |&(a, k)| format!("{} E*_{}", e_ge1[a], d[k]),
        |&(a, k)| {
            let h = ps.hat_f(&e_ge1[a]).map_err(err)?;
            Ok(zero_residual(&(&h * &ctx.es[k]), 1.0).max(zero_residual(&(&ctx.es[k] * &h), 1.0)))
        },
    );
    run.check("prop.hat_f.central", e_ge1.clone(), show_e, |l| {
        let m = ps.hat_f(l).map_err(err)?;
        Ok(ctx.centrality(&m).max(ctx.membership(&m).unwrap_or(0.0)))
    });

    let ge1: HashSet<&EIndex> = e_ge1.iter().collect();
    let hat_pairs: Vec<(usize, usize)> = (0..e_all.len())
        .flat_map(|a| (0..e_all.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            e_all[a].union(&e_all[b], poset).is_some()
                || (ge1.contains(&e_all[a]) && ge1.contains(&e_all[b]))
        })
        .collect();
    run.check(
        "lemma.hat_f.product_law",
        hat_pairs,
        |&(a, b)| format!("{} * {}", e_all[a], e_all[b]),
        |&(a, b)| {
            let prod = &ps.hat_f(&e_all[a]).map_err(err)? * &ps.hat_f(&e_all[b]).map_err(err)?;
            match e_all[a].union(&e_all[b], poset) {
                Some(u) => Ok(rel(&prod, &ps.hat_f(&u).map_err(err)?)),
                None => Ok(zero_residual(&prod, 1.0)),
            }
        },
    );

    let mut hf_down = Vec::new();
    for (a, l) in e_all.iter().enumerate() {
        let below = ctx.down(l.support_set());
        for &(q, j) in &down_pairs {
            if !below.is_disjoint(d[j].support_set()) {
                hf_down.push((a, q, j));
            }
        }
    }
    run.check(
        "lemma.hat_f.annihilates_f_down",
        hf_down,
        |&(a, q, j)| format!("F{} {}", show_pair(ctx, q, j), e_all[a]),
        |&(a, q, j)| {
            let prod = &ps.f_down(q, j).map_err(err)? * &ps.hat_f(&e_all[a]).map_err(err)?;
            Ok(zero_residual(&prod, 1.0))
        },
    );
    let mut hf_up = Vec::new();
    for (a, l) in e_all.iter().enumerate() {
        let above = ctx.up(l.support_set());
        for &(r, i) in &up_pairs {
            if !above.is_disjoint(d[i].support_set()) {
                hf_up.push((a, r, i));
            }
        }
    }
    run.check(
        "lemma.hat_f.annihilates_f_up_star",
        hf_up,
        |&(a, r, i)| format!("F*{} {}", show_pair(ctx, r, i), e_all[a]),
        |&(a, r, i)| {
            let prod = &ps.f_up_star(r, i).map_err(err)? * &ps.hat_f(&e_all[a]).map_err(err)?;
            Ok(zero_residual(&prod, 1.0))
        },
    );
    let mut hf_star = Vec::new();
    for (a, l) in e_all.iter().enumerate() {
        let (above, below) = (ctx.up(l.support_set()), ctx.down(l.support_set()));
        for &(i, j) in &psi {
            if !below.is_disjoint(d[j].support_set()) || !above.is_disjoint(d[i].support_set()) {
                hf_star.push((a, i, j));
            }
        }
    }
    run.check(
        "lemma.hat_f.annihilates_f_star",
        hf_star,
        |&(a, i, j)| format!("F({}, {}) {}", d[i], d[j], e_all[a]),
        |&(a, i, j)| {
            let prod = &ps.f_star(i, j).map_err(err)? * &ps.hat_f(&e_all[a]).map_err(err)?;
            Ok(zero_residual(&prod, 1.0))
        },
    );

    tilde_checks(run, ctx)
}

fn tilde_checks(run: &mut Runner, ctx: &Context) -> Result<()> {
    let ps = ctx.ps;
    let d = ctx.d();
    let candidates = ps.phi_candidates();
    let show = |t: &Triple| show_triple(ps, t);
    let supports = |t: &Triple| {
        let (q, r, s) = (
            d[t.i].support_set(),
            d[t.j].support_set(),
            t.ell.support_set(),
        );
        (q, r, s, ps.p_prime(q, r, s))
    };

    if ctx.terwilliger.is_some() {
        run.check(
            "lemma.tilde_f.in_terwilliger",
            candidates.clone(),
            show,
            |t| {
                let m = ps.tilde_f(t).map_err(err)?;
                Ok(ctx.membership(&m).unwrap_or(0.0))
            },
        );
    } else {
        run.skip("lemma.tilde_f.in_terwilliger", "algebra too large to close");
    }

    let mut with_e = Vec::new();
    let mut with_es = Vec::new();
    let mut with_fstar = Vec::new();
    let mut with_hat = Vec::new();
    for (c, t) in candidates.iter().enumerate() {
        let (q, r, s, pp) = supports(t);
        for (k, x) in d.iter().enumerate() {
            if r.union(s).is_subset(x.support_set()) {
                with_e.push((c, k));
            }
            if q.union(s).is_subset(x.support_set()) {
                with_es.push((c, k));
            }
        }
        for &(i2, j2) in ps.psi() {
            if !pp.is_disjoint(d[i2].support_set()) || !pp.is_disjoint(d[j2].support_set()) {
                with_fstar.push((c, i2, j2));
            }
        }
        for (a, l) in ps.e_ge1().iter().enumerate() {
            if !pp.is_disjoint(l.support_set()) {
                with_hat.push((c, a));
            }
        }
    }
    let tilde_f: Vec<CMatrix> = candidates
        .iter()
        .map(|t| ps.tilde_f(t))
        .collect::<Result<_>>()?;
    run.check(
        "lemma.tilde_f.commutes_with_idempotents",
        with_e,
        |&(c, k)| format!("{} E_{}", show(&candidates[c]), d[k]),
        |&(c, k)| {
            Ok(rel(
                &tilde_f[c].commutator(&ctx.e[k]),
                &CMatrix::zeros(ps.size()),
            ))
        },
    );
    run.check(
        "lemma.tilde_f.commutes_with_dual_idempotents",
        with_es,
        |&(c, k)| format!("{} E*_{}", show(&candidates[c]), d[k]),
        |&(c, k)| {
            Ok(rel(
                &tilde_f[c].commutator(&ctx.es[k]),
                &CMatrix::zeros(ps.size()),
            ))
        },
    );
    run.check(
        "lemma.tilde_f.annihilated_by_f_star",
        with_fstar,
        |&(c, i, j)| format!("F({}, {}) {}", d[i], d[j], show(&candidates[c])),
        |&(c, i, j)| {
            let prod = &ps.f_star(i, j).map_err(err)? * &tilde_f[c];
            Ok(zero_residual(&prod, 1.0))
        },
    );
    let e_ge1 = ps.e_ge1();
    run.check(
        "lemma.tilde_f.annihilated_by_hat_f",
        with_hat,
        |&(c, a)| format!("{} {}", e_ge1[a], show(&candidates[c])),
        |&(c, a)| {
            let prod = &ps.hat_f(&e_ge1[a]).map_err(err)? * &tilde_f[c];
            Ok(zero_residual(&prod, 1.0))
        },
    );
    run.check(
        "theorem.tilde_e.factorization",
        (0..candidates.len()).collect(),
        |&c| show(&candidates[c]),
        |&c| {
            let t = &candidates[c];
            let closed = ps.tilde_e(t).map_err(err)?;
            let fstar = ps.f_star(t.i, t.j).map_err(err)?;
            let hat = ps.hat_f(&t.ell).map_err(err)?;
            Ok(rel(&(&(&tilde_f[c] * &fstar) * &hat), &closed))
        },
    );
    Ok(())
}

fn oracle_checks(run: &mut Runner, ctx: &Context) -> Result<()> {
    let ps = ctx.ps;
    let td = ctx
        .terwilliger
        .as_ref()
        .ok_or_else(|| Error::Resource("algebra closure unavailable".into()))?;

    let start = Instant::now();
    let mut gens_defect = 0.0_f64;
    for g in td.generators() {
        gens_defect = gens_defect.max(td.membership_defect(g));
    }
    let closure_defect = td.algebra().product_closure_defect();
    let center_defect = center_defect(td);
    let mut c = residual_check(
        "oracle.terwilliger.closure",
        gens_defect.max(closure_defect).max(center_defect),
        run.tol().max(1e-8),
    );
    c.cases = td.dim();
    c.elapsed = start.elapsed();
    run.push(c);

    let start = Instant::now();
    let cd = central_decomposition_seeded(td, run.tol(), run.cfg.seed);
    let cd = match cd {
        Ok(cd) => cd,
        Err(e) => {
            run.check(
                "oracle.center.decomposition",
                vec![()],
                |_| "center".into(),
                |_| Err(e.to_string()),
            );
            return Ok(());
        }
    };
    let elapsed = start.elapsed();

    let by_duals = ps.primary_from_duals()?;
    run.check(
        "oracle.center.primary_match",
        vec![()],
        |_| "primary".into(),
        |_| {
            let dist = by_duals.dist(&cd.idempotents[0]);
            if dist >= MATCH_TOL {
                return Err(format!("distance {dist:e}"));
            }
            if cd.dims[0] != ctx.d().len() {
                return Err(format!(
                    "n_0 = {} against |D| = {}",
                    cd.dims[0],
                    ctx.d().len()
                ));
            }
            Ok(dist)
        },
    );

    let summary = cd.summary(td);
    run.check(
        "theorem.wedderburn.accounting",
        vec![()],
        |_| format!("{summary:?}"),
        |_| {
            if summary.is_consistent() {
                Ok(0.0)
            } else {
                Err(format!(
                    "dim T = {}, sum n^2 = {}, sum ranks = {}",
                    summary.algebra_dim, summary.sum_of_squares, summary.sum_of_ranks
                ))
            }
        },
    );

    let start_phi = Instant::now();
    let phi = ps.enumerate_phi();
    let phi = match phi {
        Ok(p) => p,
        Err(e) => {
            run.check(
                "theorem.phi.validation",
                vec![()],
                |_| "phi".into(),
                |_| Err(e.to_string()),
            );
            return Ok(());
        }
    };
    let mut c = residual_check("theorem.phi.validation", 0.0, run.tol());
    if !phi.validated {
        c.status = Status::Fail;
        c.max_residual = 1.0;
        c.counterexample = phi.fallback.clone();
    } else if let Some(why) = family_defect(&phi.idempotents, 1e-8) {
        c.status = Status::Fail;
        c.max_residual = 1.0;
        c.counterexample = Some(why);
    }
    c.cases = phi.triples.len() + phi.rejected_zero;
    c.note = Some(format!(
        "{} triples, {} rejected as zero",
        phi.triples.len(),
        phi.rejected_zero
    ));
    c.elapsed = start_phi.elapsed() + elapsed;
    run.push(c);

    let matching = match_to_oracle(&phi.idempotents, &cd);
    run.check(
        "theorem.tilde_e.match",
        (0..phi.triples.len().max(cd.len())).collect(),
        |&k| match phi.triples.get(k) {
            Some(t) => show_triple(ps, t),
            None => format!("oracle idempotent {k}"),
        },
        |&k| {
            if phi.triples.len() != cd.len() {
                return Err(format!(
                    "{} closed forms against {} central idempotents",
                    phi.triples.len(),
                    cd.len()
                ));
            }
            match matching[k] {
                Some((_, dist)) => Ok(dist),
                None => Err("no central idempotent within tolerance".into()),
            }
        },
    );
    run.check(
        "theorem.tilde_e.central",
        (0..phi.triples.len()).collect(),
        |&k| show_triple(ps, &phi.triples[k]),
        |&k| {
            let m = &phi.idempotents[k];
            Ok(td.centrality_defect(m).max(td.membership_defect(m)))
        },
    );
    run.check(
        "theorem.dimension_law",
        (0..phi.triples.len()).collect(),
        |&k| show_triple(ps, &phi.triples[k]),
        |&k| {
            let predicted = ps.predicted_module_dim(&phi.triples[k]);
            let (idx, _) = matching[k].ok_or("unmatched idempotent")?;
            let n = cd.dims[idx];
            let rank = phi.idempotents[k].rank(1e-8);
            if predicted != n {
                return Err(format!("predicted n = {predicted}, oracle n = {n}"));
            }
            if rank != n * cd.mults[idx] {
                return Err(format!(
                    "rank {rank} against n * mult = {}",
                    n * cd.mults[idx]
                ));
            }
            Ok(0.0)
        },
    );
    Ok(())
}

fn residual_check(id: &str, residual: f64, tol: f64) -> CheckResult {
    let pass = residual <= tol;
    CheckResult {
        check_id: id.to_string(),
        instance: String::new(),
        status: if pass { Status::Pass } else { Status::Fail },
        max_residual: residual,
        cases: 1,
        sampled: false,
        counterexample: (!pass).then(|| format!("residual {residual:e}")),
        note: None,
        elapsed: Duration::ZERO,
    }
}

fn center_defect(td: &TerwilligerData) -> f64 {
    let mut worst = 0.0_f64;
    for c in td.center().basis() {
        for b in td.algebra().basis() {
            worst = worst.max(c.commutator(b).norm());
        }
    }
    worst
}

/// For each closed form, the oracle idempotent within [`MATCH_TOL`] and its
/// distance. Each oracle idempotent is used at most once.
pub fn match_to_oracle(closed: &[CMatrix], cd: &CentralDecomposition) -> Vec<Option<(usize, f64)>> {
    let mut used = BTreeSet::new();
    closed
        .iter()
        .map(|m| {
            let hit = cd
                .idempotents
                .iter()
                .enumerate()
                .filter(|(k, _)| !used.contains(k))
                .map(|(k, e)| (k, e.dist(m)))
                .filter(|&(_, dist)| dist < MATCH_TOL)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((k, _)) = hit {
                used.insert(k);
            }
            hit
        })
        .collect()
}

/// Class label matrix of a product: `labels[x][y]` is the position in
/// `classes` of the class containing `(x, y)`.
fn label_matrix(classes: &[CMatrix]) -> Vec<Vec<usize>> {
    let n = classes[0].dim();
    let mut labels = vec![vec![usize::MAX; n]; n];
    for (k, a) in classes.iter().enumerate() {
        for (x, row) in labels.iter_mut().enumerate() {
            for (y, l) in row.iter_mut().enumerate() {
                if a[(x, y)].re == 1.0 {
                    *l = k;
                }
            }
        }
    }
    labels
}

/// Coordinates of a global index, point 0 slowest.
fn coordinates(mut x: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for p in (0..sizes.len()).rev() {
        out[p] = x % sizes[p];
        x /= sizes[p];
    }
    out
}

/// Compares the product classes with classes written down directly from a
/// rule on coordinate tuples. Both sides are sets of 0/1 patterns.
fn compare_patterns(
    id: &str,
    ps: &ProductScheme,
    rule: impl Fn(&[usize], &[usize]) -> Vec<usize>,
) -> Result<CheckResult> {
    let start = Instant::now();
    let sizes: Vec<usize> = ps.spec().components().iter().map(|c| c.size()).collect();
    let n = ps.size();
    let coords: Vec<Vec<usize>> = (0..n).map(|x| coordinates(x, &sizes)).collect();
    let mut expected: std::collections::BTreeMap<Vec<usize>, Vec<bool>> = Default::default();
    for x in 0..n {
        for y in 0..n {
            let key = rule(&coords[x], &coords[y]);
            expected.entry(key).or_insert_with(|| vec![false; n * n])[x * n + y] = true;
        }
    }
    let expected: BTreeSet<Vec<bool>> = expected.into_values().collect();
    let adjacency = ps.adjacency_all()?;
    let labels = label_matrix(&adjacency);
    let mut got = BTreeSet::new();
    for (k, a) in adjacency.iter().enumerate() {
        let pattern: Vec<bool> = (0..n * n).map(|t| labels[t / n][t % n] == k).collect();
        let exact = (0..n * n).all(|t| {
            let v = a[(t / n, t % n)];
            v.im == 0.0 && (v.re == 0.0 || v.re == 1.0) && ((v.re == 1.0) == pattern[t])
        });
        if !exact {
            return Ok(failed(
                id,
                format!("class {} is not 0/1", ps.d_indices()[k]),
                start,
            ));
        }
        got.insert(pattern);
    }
    let mut c = if got == expected {
        CheckResult {
            check_id: id.to_string(),
            instance: String::new(),
            status: Status::Pass,
            max_residual: 0.0,
            cases: expected.len(),
            sampled: false,
            counterexample: None,
            note: None,
            elapsed: Duration::ZERO,
        }
    } else {
        failed(
            id,
            format!(
                "{} product classes against {} expected, {} in common",
                got.len(),
                expected.len(),
                got.intersection(&expected).count()
            ),
            start,
        )
    };
    c.elapsed = start.elapsed();
    Ok(c)
}

fn failed(id: &str, why: String, start: Instant) -> CheckResult {
    CheckResult {
        check_id: id.to_string(),
        instance: String::new(),
        status: Status::Fail,
        max_residual: 1.0,
        cases: 1,
        sampled: false,
        counterexample: Some(why),
        note: None,
        elapsed: start.elapsed(),
    }
}

/// On an anti-chain the product classes are all tensor products of component
/// classes: `(x, y)` is labelled by the tuple of component labels.
pub fn compare_against_direct_product(ps: &ProductScheme) -> Result<CheckResult> {
    if !ps.poset().is_discrete() {
        return Err(Error::Contract(
            "direct product comparison needs an anti-chain".into(),
        ));
    }
    let label = component_labels(ps);
    compare_patterns("reduction.direct_product", ps, |x, y| {
        (0..x.len()).map(|p| label[p][x[p]][y[p]]).collect()
    })
}

/// On a chain `0 < 1 < ...` the classes are those of the iterated wreath
/// product: `(x, y)` is labelled by the highest coordinate where they differ
/// and the component class there; equal tuples form the diagonal.
pub fn compare_against_wreath(ps: &ProductScheme) -> Result<CheckResult> {
    let poset = ps.poset();
    let chain = (1..poset.len()).all(|p| poset.lt(p - 1, p));
    if !chain {
        return Err(Error::Contract(
            "wreath comparison needs the chain 0 < 1 < ...".into(),
        ));
    }
    let label = component_labels(ps);
    compare_patterns("reduction.wreath_product", ps, |x, y| {
        match (0..x.len()).rev().find(|&p| x[p] != y[p]) {
            Some(p) => vec![p, label[p][x[p]][y[p]]],
            None => vec![],
        }
    })
}

fn component_labels(ps: &ProductScheme) -> Vec<Vec<Vec<usize>>> {
    ps.spec()
        .components()
        .iter()
        .map(|c| c.scheme().to_json().classes)
        .collect()
}

/// Convenience for callers holding only a spec.
pub fn run_suite_for_spec(
    spec: &ProductSpec,
    level: Level,
    cfg: SuiteConfig,
    opts: crate::gwreath::BuildOptions,
) -> Result<VerificationReport> {
    let cap = level.cap(opts.max_dim);
    match spec.size() {
        Some(s) if s <= cap => {}
        other => {
            return Err(Error::Resource(format!(
                "level {} allows |X_P| <= {cap}, got {}",
                level.name(),
                other.map_or("overflow".into(), |s| s.to_string())
            )))
        }
    }
    let ps = crate::gwreath::build_product(spec, opts)?;
    run_suite(&ps, level, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gwreath::{build_product, BuildOptions};
    use crate::linalg::DEFAULT_TOL;
    use crate::poset::Poset;
    use crate::scheme::{complete_graph_scheme, Scheme, DEFAULT_SEED};

    fn k(n: usize) -> Scheme {
        complete_graph_scheme(n, DEFAULT_TOL, DEFAULT_SEED).unwrap()
    }

    fn product(poset: Poset, schemes: Vec<Scheme>) -> ProductScheme {
        let spec = ProductSpec::new(poset, schemes, vec![], DEFAULT_TOL, DEFAULT_SEED).unwrap();
        build_product(&spec, BuildOptions::default()).unwrap()
    }

    fn cfg() -> SuiteConfig {
        SuiteConfig {
            tol: DEFAULT_TOL,
            seed: 7,
        }
    }

    fn assert_all_pass(report: &VerificationReport) {
        assert!(report.all_passed(), "{}", report.to_table());
    }

    #[test]
    fn chain_of_two_full_oracle() {
        let ps = product(Poset::chain(2).unwrap(), vec![k(2), k(2)]);
        let report = run_suite(&ps, Level::FullOracle, cfg()).unwrap();
        assert_all_pass(&report);
        assert_eq!(
            report.check("reduction.wreath_product").unwrap().status,
            Status::Pass
        );
    }

    #[test]
    fn antichain_full_oracle() {
        let ps = product(Poset::antichain(2).unwrap(), vec![k(2), k(2)]);
        let report = run_suite(&ps, Level::FullOracle, cfg()).unwrap();
        assert_all_pass(&report);
        assert_eq!(
            report.check("reduction.direct_product").unwrap().status,
            Status::Pass
        );
    }

    #[test]
    fn report_ids_are_sorted_and_counts_consistent() {
        let ps = product(Poset::chain(2).unwrap(), vec![k(3), k(2)]);
        let report = run_suite(&ps, Level::Lemmas, cfg()).unwrap();
        let ids: Vec<&str> = report.checks.iter().map(|c| c.check_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        let s = &report.summary;
        assert_eq!(s.total, s.passed + s.failed + s.skipped);
        for c in &report.checks {
            assert!(c.max_residual >= 0.0);
            assert_eq!(c.counterexample.is_some(), c.status == Status::Fail);
        }
    }

    #[test]
    fn direct_product_counts() {
        let one = product(Poset::antichain(1).unwrap(), vec![k(3)]);
        assert_eq!(compare_against_direct_product(&one).unwrap().cases, 2);
        let three = product(Poset::antichain(3).unwrap(), vec![k(2), k(2), k(2)]);
        let c = compare_against_direct_product(&three).unwrap();
        assert_eq!((c.status, c.cases), (Status::Pass, 8));
        let two = product(Poset::antichain(2).unwrap(), vec![k(2), k(3)]);
        assert_eq!(compare_against_direct_product(&two).unwrap().cases, 4);
    }

    #[test]
    fn level_caps_name_a_fitting_level() {
        let ps = product(Poset::antichain(2).unwrap(), vec![k(2), k(2)]);
        let small = BuildOptions {
            max_dim: 4,
            ..BuildOptions::default()
        };
        let spec = ps.spec().clone();
        assert!(run_suite_for_spec(&spec, Level::FullOracle, cfg(), small).is_ok());
        let tiny = BuildOptions {
            max_dim: 3,
            ..BuildOptions::default()
        };
        let err = run_suite_for_spec(&spec, Level::Lemmas, cfg(), tiny).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn sampling_is_seeded_and_sorted() {
        let (a, sa) = sample_indices(20_000, 3, "x");
        let (b, _) = sample_indices(20_000, 3, "x");
        assert!(sa);
        assert_eq!(a, b);
        assert_eq!(a.len(), SAMPLE_LIMIT);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        let (c, sc) = sample_indices(5, 3, "x");
        assert_eq!((c, sc), ((0..5).collect(), false));
    }
}
