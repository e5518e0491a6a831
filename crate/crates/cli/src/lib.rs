//! Command implementations behind the `iwahori` binary.
//!
//! Every command produces a JSON value with a `schema` tag and a pass flag;
//! `main` prints it, optionally writes it under `--json`, and maps the flag
//! to the exit code.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use iwahori_core::chevalley::{Chevalley, PadicMatrix};
use iwahori_core::matrix::Matrix;
use iwahori_core::pvaluation::{self, AxiomReport};
use iwahori_core::rigid::{
    self, constants_limit_check, haar_obstruction, hida_projector, projector_step, slope_exact, slope_split, Character,
    LieVector, PadicSeries, SeriesContext,
};
use iwahori_core::root_datum::{GroupType, RootDatum};
use iwahori_core::scalar::{fmt_rational, int, parse_rational};
use iwahori_core::verma::{self, bgg_simple, bgg_simple_twisted, summand_inventory, weight_multiplicity};
use iwahori_core::{Error, Rational, ScalarRing};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "iwahori", version, about = "p-valuations on pro-p Iwahori subgroups, rigid series slopes and BGG checks")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Shared run configuration; every flag has an `IWAHORI_*` environment override.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[arg(long, global = true, env = "IWAHORI_GROUP", default_value = "sl2")]
    pub group: GroupType,
    #[arg(long, global = true, env = "IWAHORI_P", default_value_t = 7)]
    pub p: u64,
    #[arg(long, visible_alias = "n", global = true, env = "IWAHORI_PRECISION", default_value_t = 12)]
    pub precision: u32,
    #[arg(long, global = true, env = "IWAHORI_DEGREE", default_value_t = 30)]
    pub degree: u32,
    #[arg(long, global = true, env = "IWAHORI_SAMPLES", default_value_t = 200)]
    pub n_samples: u64,
    #[arg(long, global = true, env = "IWAHORI_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Directory receiving `<command>.json` reports.
    #[arg(long, global = true, env = "IWAHORI_JSON")]
    pub json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Roots, heights, Weyl group and the adapted cocharacters.
    Rootdata {
        #[arg(value_enum, default_value = "info")]
        action: RootdataAction,
    },
    /// omega(g) by the factorization formula and by the extension oracle.
    Omega(MatrixArg),
    /// Factorization of g attached to a Weyl element.
    Factorize {
        #[command(flatten)]
        m: MatrixArg,
        #[arg(long, default_value = "1")]
        w: String,
    },
    /// Ordered basis attached to a Weyl element.
    Basis {
        #[arg(long, default_value = "1")]
        w: String,
    },
    /// Sampled property suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Slope decomposition of a truncated series.
    Slope {
        #[arg(value_enum)]
        action: SlopeAction,
        #[arg(long, default_value = "1")]
        w: String,
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// Iteration index n of the projector `U_s^{n!}`.
        #[arg(long, default_value_t = 3)]
        iterations: u64,
        /// d chi in epsilon coordinates, comma separated.
        #[arg(long = "char", allow_hyphen_values = true)]
        chi: Option<String>,
        /// Series file: list of {index: [...], coeff: "..."}; random if absent.
        #[arg(long = "series")]
        series: Option<PathBuf>,
    },
    /// BGG simplicity test for d chi (epsilon coordinates).
    Bgg {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Use the lower-triangular positive system instead of the upper one.
        #[arg(long)]
        lower: bool,
    },
    /// Weight multiplicity of the Verma module.
    VermaMult {
        #[arg(long = "chi", allow_hyphen_values = true)]
        chi: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value = "1")]
        w: String,
    },
    /// Summands indexed by W with pairwise witnesses.
    Summands,
    /// Linear system obstructing an invariant functional.
    Haar,
    /// The Sp4 worked example.
    Sp4Golden,
    /// Every suite for one configuration.
    VerifyAll,
}

#[derive(Args, Debug)]
pub struct MatrixArg {
    /// Rows separated by ';', entries by ','; entries are integers, a/b, or digit strings.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// JSON matrix: array of rows of integers or strings.
    #[arg(long, allow_hyphen_values = true)]
    pub element: Option<String>,
    /// Coordinates in the identity ordered basis, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub coords: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum RootdataAction {
    Info,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Suite {
    Axioms,
    Compat,
    Oracle,
    Basis,
    Et,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SlopeAction {
    Split,
    Project,
}

/// A finished command: report plus verdict.
pub struct Outcome {
    pub name: String,
    pub report: Value,
    pub passed: bool,
    pub timings: Option<Value>,
}

impl Outcome {
    fn new(name: &str, schema: &str, passed: bool, body: Value) -> Self {
        let mut report = json!({ "schema": schema, "passed": passed });
        if let (Value::Object(dst), Value::Object(src)) = (&mut report, body) {
            dst.extend(src);
        }
        Outcome { name: name.into(), report, passed, timings: None }
    }
}

/// Gate and configuration errors map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(e: Error) -> anyhow::Error {
    match e {
        Error::Gate { .. } | Error::InvalidRing(_) | Error::Parse(_) | Error::Invalid(_) => ConfigError(e.to_string()).into(),
        other => other.into(),
    }
}

impl RunConfig {
    fn ring(&self) -> anyhow::Result<ScalarRing> {
        ScalarRing::rational(self.p, self.precision).map_err(config_err)
    }

    fn gated(&self) -> anyhow::Result<Chevalley> {
        Chevalley::gated(self.group, self.ring()?).map_err(config_err)
    }

    fn datum(&self) -> RootDatum {
        RootDatum::new(self.group)
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn parse_list(s: &str) -> anyhow::Result<Vec<Rational>> {
    s.split(',').map(|t| parse_rational(t).map_err(config_err)).collect()
}

fn parse_matrix(g: &Chevalley, m: &MatrixArg) -> anyhow::Result<PadicMatrix> {
    let element = match &m.element {
        Some(text) => {
            let rows: Vec<Vec<Value>> = serde_json::from_str(text).map_err(|e| ConfigError(format!("--element: {e}")))?;
            let cell = |v: &Value| match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(ConfigError("--element entries must be strings or integers".into())),
            };
            let rows = rows.iter().map(|r| r.iter().map(cell).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
            Some(rows)
        }
        None => None,
    };
    let text_rows = m.matrix.as_ref().map(|t| t.split(';').map(|r| r.split(',').map(str::to_string).collect::<Vec<_>>()).collect::<Vec<_>>());
    let given = [element.is_some(), text_rows.is_some(), m.coords.is_some()].iter().filter(|b| **b).count();
    if given != 1 {
        bail!(ConfigError("give exactly one of --element, --matrix or --coords".into()));
    }
    match (element.or(text_rows), &m.coords) {
        (Some(cells), None) => {
            let rows = cells
                .iter()
                .map(|row| row.iter().map(|e| g.ring.parse(e).map_err(config_err)).collect::<anyhow::Result<Vec<_>>>())
                .collect::<anyhow::Result<Vec<_>>>()?;
            if rows.len() != g.n() || rows.iter().any(|r| r.len() != g.n()) {
                bail!(ConfigError(format!("expected a {0}x{0} matrix", g.n())));
            }
            Ok(Matrix::from_rows(rows))
        }
        (None, Some(text)) => {
            let x = text.split(',').map(|e| g.ring.parse(e).map_err(config_err)).collect::<anyhow::Result<Vec<_>>>()?;
            if x.len() != g.dimension() {
                bail!(ConfigError(format!("expected {} coordinates", g.dimension())));
            }
            Ok(g.from_coordinates(&x, g.datum.identity())?)
        }
        _ => unreachable!("exactly one input form"),
    }
}

fn show_matrix(m: &PadicMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect()
}

fn weyl(d: &RootDatum, w: &str) -> anyhow::Result<iwahori_core::root_datum::WeylElement> {
    d.weyl_by_word(w).map_err(config_err)
}

pub fn run(cfg: &RunConfig, cmd: &Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Rootdata { action: RootdataAction::Info } => {
            cfg.ring()?;
            Ok(rootdata(cfg))
        }
        Command::Omega(m) => {
            let g = cfg.gated()?;
            let x = parse_matrix(&g, m)?;
            if !g.in_iwahori(&x) {
                bail!(ConfigError("matrix is not in the pro-p Iwahori subgroup".into()));
            }
            let formula = g.omega_formula(&x)?;
            let oracle = g.omega_oracle(&x)?;
            let agree = pvaluation::exact_agreement(&formula, &oracle);
            Ok(Outcome::new(
                "omega",
                "iwahori.omega/1",
                agree != Some(false),
                json!({ "group": cfg.group, "p": cfg.p, "precision": cfg.precision, "matrix": show_matrix(&x),
                        "omega_formula": formula.to_string(), "omega_oracle": oracle.to_string() }),
            ))
        }
        Command::Factorize { m, w } => {
            let g = cfg.gated()?;
            let x = parse_matrix(&g, m)?;
            let w = weyl(&g.datum, w)?;
            let f = g.factorize(&x, &w)?;
            let named = |v: &[(usize, iwahori_core::Padic)]| -> Vec<Value> {
                v.iter().map(|(r, a)| json!({ "root": g.datum.roots[*r].name, "parameter": a.to_string(), "valuation": a.val().to_string() })).collect()
            };
            let round_trip = g.multiply_factors(&f) == x;
            Ok(Outcome::new(
                "factorize",
                "iwahori.factorize/1",
                round_trip,
                json!({ "group": cfg.group, "w": w.word_string(), "minus": named(&f.minus),
                        "torus": f.torus.iter().map(|t| t.to_string()).collect::<Vec<_>>(), "plus": named(&f.plus),
                        "omega": g.omega_of_factorization(&f).to_string(), "round_trip": round_trip }),
            ))
        }
        Command::Basis { w } => {
            let g = cfg.gated()?;
            let w = weyl(&g.datum, w)?;
            let b = g.ordered_basis(&w)?;
            let elems: Vec<Value> = b
                .elements
                .iter()
                .map(|e| json!({ "label": e.label, "omega": fmt_rational(&e.omega), "generator": show_matrix(&e.generator) }))
                .collect();
            Ok(Outcome::new("basis", "iwahori.basis/1", true, json!({ "group": cfg.group, "w": w.word_string(), "dimension": b.len(), "elements": elems })))
        }
        Command::Verify { suite } => {
            let r = run_suite(cfg, *suite)?;
            Ok(Outcome::new(&format!("verify-{}", r.suite), "iwahori.axioms/1", r.passed(), to_json(&r)))
        }
        Command::Slope { action, w, s, iterations, chi, series } => slope(cfg, *action, w, *s, *iterations, chi.as_deref(), series.as_deref()),
        Command::Bgg { c, lower } => {
            let d = cfg.datum();
            let chi = Character::new(parse_list(c)?);
            if chi.eps.len() != d.dim {
                bail!(ConfigError(format!("expected {} values for --c", d.dim)));
            }
            let system = if *lower { d.positive.clone() } else { d.upper_positive() };
            let cert = bgg_simple(&d, &chi, &system);
            let invariant = d.weyl.iter().all(|w| bgg_simple_twisted(&d, &chi, &system, w).simple == cert.simple);
            Ok(Outcome::new(
                "bgg",
                "iwahori.bgg/1",
                invariant,
                json!({ "group": cfg.group, "system": if *lower { "lower" } else { "upper" }, "values": cert.values,
                        "simple": cert.simple, "conclusion": cert.conclusion, "twist_invariant": invariant }),
            ))
        }
        Command::VermaMult { chi, lambda, w } => {
            let d = cfg.datum();
            let w = weyl(&d, w)?;
            let chi = Character::new(parse_list(chi)?);
            let lambda = parse_list(lambda)?;
            if chi.eps.len() != d.dim || lambda.len() != d.dim {
                bail!(ConfigError(format!("expected {} values", d.dim)));
            }
            let m = weight_multiplicity(&d, &chi, &lambda, &w);
            Ok(Outcome::new("verma-mult", "iwahori.verma-mult/1", true, json!({ "group": cfg.group, "w": w.word_string(), "multiplicity": m })))
        }
        Command::Summands => {
            let inv = summand_inventory(&cfg.datum());
            Ok(Outcome::new("summands", "iwahori.summands/1", inv.all_pairs_witnessed, to_json(&inv)))
        }
        Command::Haar => {
            let r = haar_obstruction(cfg.degree);
            Ok(Outcome::new("haar", "iwahori.haar/1", r.only_zero, to_json(&r)))
        }
        Command::Sp4Golden => {
            let g = verma::sp4_golden(&mut ChaCha8Rng::seed_from_u64(cfg.seed), 100)?;
            Ok(Outcome::new("sp4-golden", "iwahori.sp4-golden/1", g.passed, to_json(&g)))
        }
        Command::VerifyAll => verify_all(cfg),
    }
}

fn rootdata(cfg: &RunConfig) -> Outcome {
    let d = cfg.datum();
    let roots: Vec<Value> = d
        .roots
        .iter()
        .map(|r| json!({ "name": r.name, "eps": r.eps, "coroot": r.coroot, "height": r.height, "positive": r.is_positive() }))
        .collect();
    let weyl: Vec<Value> = d
        .weyl
        .iter()
        .map(|w| {
            let (mu, a) = d.adapted_cocharacter(w);
            json!({ "w": w.word_string(), "length": d.weyl_length(w), "adapted_mu": mu, "a": a })
        })
        .collect();
    let gate = d.gate(cfg.p).err().map(|e| e.to_string());
    Outcome::new(
        "rootdata",
        "iwahori.rootdata/1",
        true,
        json!({ "group": cfg.group, "cartan_type": cfg.group.cartan_type(), "coxeter_number": d.coxeter_number(), "weyl_order": d.weyl.len(),
                "roots": roots, "weyl": weyl,
                "delta_lower": d.delta_for(&d.positive).iter().map(fmt_rational).collect::<Vec<_>>(),
                "delta_upper": d.delta_for(&d.upper_positive()).iter().map(fmt_rational).collect::<Vec<_>>(),
                "gate": { "p": cfg.p, "ok": gate.is_none(), "message": gate } }),
    )
}

fn run_suite(cfg: &RunConfig, suite: Suite) -> anyhow::Result<AxiomReport> {
    cfg.gated()?;
    let (g, p, n, k, seed) = (cfg.group, cfg.p, cfg.precision, cfg.n_samples, cfg.seed);
    let r = match suite {
        Suite::Axioms => pvaluation::check_pvaluation_axioms(g, p, n, k, seed),
        Suite::Compat => pvaluation::check_compatibility_all_w(g, p, n, k, seed),
        Suite::Oracle => pvaluation::check_oracle_agreement(g, p, n, k, seed),
        Suite::Basis => pvaluation::check_basis_roundtrip(g, p, n, k, seed),
        Suite::Et => pvaluation::check_et_embedding(g, p),
    };
    r.map_err(config_err)
}

#[derive(serde::Deserialize)]
struct SeriesTerm {
    index: Vec<u32>,
    coeff: String,
}

pub fn read_series(path: &Path, ring: ScalarRing, vars: usize, degree: u32) -> anyhow::Result<PadicSeries> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let terms: Vec<SeriesTerm> = serde_json::from_str(&text).map_err(|e| ConfigError(format!("series file: {e}")))?;
    let degree = terms.iter().map(|t| rigid::degree(&t.index)).max().unwrap_or(0).max(degree);
    let mut f = PadicSeries::zero(vars, degree);
    for t in terms {
        let c = ring.parse(&t.coeff).map_err(config_err)?;
        f.insert(t.index, c).map_err(config_err)?;
    }
    Ok(f)
}

fn series_json(f: &PadicSeries) -> Vec<Value> {
    f.terms().map(|(i, c)| json!({ "index": i, "coeff": c.to_string() })).collect()
}

fn slope(cfg: &RunConfig, action: SlopeAction, w: &str, s: u32, n: u64, chi: Option<&str>, series: Option<&Path>) -> anyhow::Result<Outcome> {
    let d = cfg.datum();
    let ring = cfg.ring()?;
    let w = weyl(&d, w)?;
    let ctx = SeriesContext::new(&d, &w, None, cfg.p).map_err(config_err)?;
    let chi = match chi {
        Some(c) => Character::new(parse_list(c)?),
        None => Character::trivial(d.dim),
    };
    if chi.eps.len() != d.dim {
        bail!(ConfigError(format!("expected {} values for --char", d.dim)));
    }
    chi.check_rigid(cfg.p).map_err(|e| ConfigError(e.to_string()))?;
    let f = match series {
        Some(path) => read_series(path, ring, ctx.vars(), cfg.degree)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rigid::RationalSeries::random(&mut rng, ctx.vars(), cfg.degree, 40, cfg.p).to_padic(ring)?
        }
    };
    let h = LieVector::from_cocharacter(&ctx, &chi, &ctx.mu);
    let common = json!({ "group": cfg.group, "w": w.word_string(), "mu": ctx.mu, "s": s,
                         "d_chi_at_h_mu": fmt_rational(&h.chi_value),
                         "gauss_valuation": f.gauss_valuation(cfg.p).to_string() });
    match action {
        SlopeAction::Split => {
            let (lt, ge) = slope_split(&ctx, &f, s);
            let eq = slope_exact(&ctx, &f, s);
            let ok = lt.add(&ge) == f;
            let mut body = common;
            body["below"] = json!(series_json(&lt));
            body["at_least"] = json!(series_json(&ge));
            body["exact"] = json!(series_json(&eq));
            Ok(Outcome::new("slope-split", "iwahori.slope/1", ok, body))
        }
        SlopeAction::Project => {
            let (_, ge) = slope_split(&ctx, &f, s);
            let steps = (1..=n).map(|k| projector_step(&ctx, &ge, s, k)).collect::<iwahori_core::Result<Vec<_>>>()?;
            let projected = hida_projector(&ctx, &ge, s, n)?;
            let ok = steps.iter().all(|st| st.ok == Some(true));
            let mut body = common;
            body["table"] = to_json(&steps);
            body["projected"] = json!(series_json(&projected));
            Ok(Outcome::new("slope-project", "iwahori.slope/1", ok, body))
        }
    }
}

/// Deterministic self-checks of the scalar layer against rational oracles.
fn padic_self_test(ring: ScalarRing, rng: &mut ChaCha8Rng, samples: u64) -> anyhow::Result<(bool, Value)> {
    let p = ring.p();
    let mut failures = Vec::new();
    for k in 0..samples {
        let a = ring.random(rng);
        let b = ring.random(rng);
        if &(&a + &b) - &b != a {
            failures.push(format!("sample {k}: (a+b)-b"));
        }
        if a.is_unit() && &a * &a.inv()? != ring.one() {
            failures.push(format!("sample {k}: a * a^-1"));
        }
        let x = &ring.from_u64(p) * &ring.random(rng);
        if x.exp()?.log()? != x {
            failures.push(format!("sample {k}: log exp"));
        }
        // exp(p m) against the rational partial sum of its series
        let m: i64 = rng.gen_range(-50..50);
        let mut term = int(1);
        let mut sum = int(1);
        for j in 1..(4 * ring.precision() as i64) {
            term = term * int(p as i64 * m) / int(j);
            sum += &term;
        }
        if ring.from_i64(p as i64 * m).exp()? != ring.from_rational(&sum)? {
            failures.push(format!("sample {k}: exp series"));
        }
    }
    Ok((failures.is_empty(), json!({ "samples": samples, "failures": failures })))
}

fn rigid_invariants(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> anyhow::Result<(bool, Value)> {
    let d = cfg.datum();
    let ring = cfg.ring()?;
    let mut failures = Vec::new();
    let mut projector_rows = 0;
    for w in &d.weyl {
        let ctx = SeriesContext::new(&d, w, None, cfg.p)?;
        let chi = Character::random(rng, d.dim, cfg.p);
        let h = LieVector::from_cocharacter(&ctx, &chi, &ctx.mu);
        for i in rigid::indices_up_to(ctx.vars(), 6) {
            let f = rigid::RationalSeries::monomial(ctx.vars(), 6, i.clone(), int(1))?;
            if rigid::lie_action(&h, &f)? != f.scale(&h.eigenvalue(&i)) || &h.chi_value - h.eigenvalue(&i) != int(ctx.lambda(&i) as i64) {
                failures.push(format!("eigenvalue w={} I={i:?}", w.word_string()));
            }
        }
        let mut f = rigid::RationalSeries::random(rng, ctx.vars(), cfg.degree, 40, cfg.p);
        f.insert(vec![0; ctx.vars()], int(1))?;
        let c = constants_limit_check(&ctx, &f, 0)?;
        if !(c.monotone && c.exact_from_bound) {
            failures.push(format!("constants w={}", w.word_string()));
        }
        let fp = f.to_padic(ring)?;
        for s in 0..=2 {
            let (lt, ge) = slope_split(&ctx, &fp, s);
            if lt.add(&ge) != fp {
                failures.push(format!("split w={} s={s}", w.word_string()));
            }
            for n in 1..=4 {
                projector_rows += 1;
                if projector_step(&ctx, &ge, s, n)?.ok != Some(true) {
                    failures.push(format!("projector w={} s={s} n={n}", w.word_string()));
                }
            }
        }
    }
    let haar = haar_obstruction(cfg.degree.min(25));
    if !haar.only_zero {
        failures.push("haar".into());
    }
    Ok((failures.is_empty(), json!({ "projector_rows": projector_rows, "haar_degree": haar.degree, "failures": failures })))
}

fn verma_checks(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> anyhow::Result<(bool, Value)> {
    let d = cfg.datum();
    let inv = summand_inventory(&d);
    let mut ok = inv.all_pairs_witnessed;
    let mut body = json!({ "summands": inv.summands.len(), "pairs_witnessed": inv.witnesses.len(), "pairs": inv.pairs });
    let mut mismatches = 0;
    for w in &d.weyl {
        let chi = Character::new((0..d.dim).map(|_| verma::random_rational(rng)).collect());
        for (v, &n) in &verma::brute_force_multiplicities(&d, w, 6) {
            let lambda: Vec<Rational> = chi.eps.iter().zip(v).map(|(c, &x)| c - int(x)).collect();
            if weight_multiplicity(&d, &chi, &lambda, w) != n {
                mismatches += 1;
            }
        }
    }
    ok &= mismatches == 0;
    body["multiplicity_mismatches"] = json!(mismatches);
    if cfg.group == GroupType::Sp4 {
        let g = verma::sp4_golden(rng, 100)?;
        ok &= g.passed;
        body["sp4_golden"] = to_json(&g);
    }
    Ok((ok, body))
}

fn verify_all(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    cfg.gated()?;
    let mut suites = serde_json::Map::new();
    let mut timings = serde_json::Map::new();
    let mut all = true;
    let mut record = |name: &str, start: Instant, passed: bool, body: Value| {
        all &= passed;
        suites.insert(name.into(), json!({ "passed": passed, "report": body }));
        timings.insert(name.into(), json!(format!("{:.3}", start.elapsed().as_secs_f64())));
    };

    let t = Instant::now();
    let (ok, body) = padic_self_test(cfg.ring()?, &mut ChaCha8Rng::seed_from_u64(cfg.seed), cfg.n_samples)?;
    record("padic", t, ok, body);
    for suite in [Suite::Axioms, Suite::Basis, Suite::Compat, Suite::Et, Suite::Oracle] {
        let t = Instant::now();
        let r = run_suite(cfg, suite)?;
        record(&format!("pvaluation-{}", r.suite), t, r.passed(), to_json(&r));
    }
    let t = Instant::now();
    let (ok, body) = rigid_invariants(cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
    record("rigid", t, ok, body);
    let t = Instant::now();
    let (ok, body) = verma_checks(cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
    record("verma", t, ok, body);

    let config = json!({ "group": cfg.group, "p": cfg.p, "precision": cfg.precision, "degree": cfg.degree,
                         "n_samples": cfg.n_samples, "seed": cfg.seed });
    let mut out = Outcome::new("verify-all", "iwahori.verify-all/1", all, json!({ "config": config, "suites": suites }));
    out.timings = Some(json!({ "schema": "iwahori.timings/1", "seconds": timings }));
    Ok(out)
}

/// Pretty JSON with a trailing newline; identical inputs give identical bytes.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

pub fn write_reports(dir: &Path, out: &Outcome) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join(format!("{}.json", out.name)), render(&out.report))?;
    if let Some(t) = &out.timings {
        std::fs::write(dir.join("timings.json"), render(t))?;
    }
    Ok(())
}

/// Exit code for an error raised while running a command.
pub fn error_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<ConfigError>().is_some() {
        EXIT_CONFIG
    } else {
        EXIT_FAIL
    }
}
