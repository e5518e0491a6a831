//! Truncated power series on the coordinates of `U_w^+`.
//!
//! A series is a finitely supported map from multi-indices (one exponent per
//! positive root, in the order of `RootDatum::positive`) to coefficients,
//! together with a total-degree cap. The norm is the Gauss norm, reported as
//! its valuation `min_I v(c_I)`.

mod haar;
mod slope;
mod translate;

pub use haar::{haar_obstruction, HaarReport};
pub use slope::{
    constants_limit_check, hida_literal, hida_projector, projector_step, slope_exact, slope_of, slope_split,
    ConstantsReport, ConstantsStep, ProjectorStep,
};
pub use translate::{translate_action, Poly, UnipotentChart};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::chevalley::{Chevalley, PadicMatrix};
use crate::padic::{rational_val, Padic};
use crate::root_datum::{dot, pair_q, RootDatum, RootId, Vector, WeylElement};
use crate::scalar::{fmt_rational, int, Scalar, Valuation};
use crate::{Error, Rational, Result};

pub type MultiIndex = Vec<u32>;

pub fn degree(i: &[u32]) -> u32 {
    i.iter().sum()
}

/// Coefficients that carry a p-adic valuation and accept rational constants.
pub trait Coefficient: Scalar {
    fn valuation(&self, p: u64) -> Valuation;
    fn from_rational_like(&self, q: &Rational) -> Result<Self>;
}

impl Coefficient for Rational {
    fn valuation(&self, p: u64) -> Valuation {
        rational_val(self, p)
    }

    fn from_rational_like(&self, q: &Rational) -> Result<Self> {
        Ok(q.clone())
    }
}

impl Coefficient for Padic {
    fn valuation(&self, _p: u64) -> Valuation {
        self.val()
    }

    fn from_rational_like(&self, q: &Rational) -> Result<Self> {
        self.ring().from_rational(q)
    }
}

/// Weyl element, adapted cocharacter and the roots `w alpha_r` that index
/// the coordinates.
#[derive(Clone, Debug)]
pub struct SeriesContext {
    pub datum: RootDatum,
    pub w: WeylElement,
    pub mu: Vector,
    pub roots: Vec<RootId>,
    /// `<w alpha_r, mu>`, all positive.
    pub pairings: Vec<i64>,
    /// Dimension of each per-root block; always 1 over `Q_p`.
    pub block_dim: usize,
    pub p: u64,
}

impl SeriesContext {
    /// Uses the adapted cocharacter `w(a mu0)` when `mu` is `None`.
    pub fn new(datum: &RootDatum, w: &WeylElement, mu: Option<Vector>, p: u64) -> Result<Self> {
        let mu = mu.unwrap_or_else(|| datum.adapted_cocharacter(w).0);
        let roots: Vec<RootId> = datum.positive.iter().map(|&a| datum.weyl_act(w, a)).collect();
        let pairings: Vec<i64> = roots.iter().map(|&r| dot(&datum.roots[r].eps, &mu)).collect();
        if let Some(k) = pairings.iter().position(|&x| x <= 0) {
            return Err(Error::Invalid(format!(
                "cocharacter {mu:?} is not adapted to w = {}: <{}, mu> = {}",
                w.word_string(),
                datum.roots[roots[k]].name,
                pairings[k]
            )));
        }
        Ok(SeriesContext { datum: datum.clone(), w: w.clone(), mu, roots, pairings, block_dim: 1, p })
    }

    pub fn vars(&self) -> usize {
        self.roots.len()
    }

    /// `lambda_I = sum_r <w alpha_r, mu> i_r`.
    pub fn lambda(&self, i: &[u32]) -> u64 {
        i.iter().zip(&self.pairings).map(|(&e, &q)| e as u64 * q as u64).sum()
    }

    pub fn max_pairing(&self) -> i64 {
        self.pairings.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    vars: usize,
    degree: u32,
    coeffs: BTreeMap<MultiIndex, C>,
}

pub type RationalSeries = TruncatedSeries<Rational>;
pub type PadicSeries = TruncatedSeries<Padic>;

impl<C: fmt::Display> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(D={}; ", self.degree)?;
        for (k, (i, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})z^{i:?}")?;
        }
        write!(f, ")")
    }
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn zero(vars: usize, degree: u32) -> Self {
        TruncatedSeries { vars, degree, coeffs: BTreeMap::new() }
    }

    pub fn monomial(vars: usize, degree: u32, index: MultiIndex, c: C) -> Result<Self> {
        let mut f = Self::zero(vars, degree);
        f.insert(index, c)?;
        Ok(f)
    }

    pub fn from_terms(vars: usize, degree: u32, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Result<Self> {
        let mut f = Self::zero(vars, degree);
        for (i, c) in terms {
            let c = match f.coeffs.remove(&i) {
                Some(old) => old + c,
                None => c,
            };
            f.insert(i, c)?;
        }
        Ok(f)
    }

    /// Sets a coefficient; certified zeros are not stored.
    pub fn insert(&mut self, index: MultiIndex, c: C) -> Result<()> {
        if index.len() != self.vars {
            return Err(Error::Invalid(format!("index {index:?} has {} entries, expected {}", index.len(), self.vars)));
        }
        if degree(&index) > self.degree {
            return Err(Error::Invalid(format!("index {index:?} exceeds the degree cap {}", self.degree)));
        }
        if c.vanishes() {
            self.coeffs.remove(&index);
        } else {
            self.coeffs.insert(index, c);
        }
        Ok(())
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree
    }

    pub fn get(&self, i: &[u32]) -> Option<&C> {
        self.coeffs.get(i)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.coeffs.get(&vec![0; self.vars])
    }

    /// Valuation of the Gauss norm: `||f|| = p^(-gauss_valuation)`.
    pub fn gauss_valuation(&self, p: u64) -> Valuation {
        Valuation::min_all(self.coeffs.values().map(|c| c.valuation(p)))
    }

    pub fn filter(&self, keep: impl Fn(&MultiIndex) -> bool) -> Self {
        let coeffs = self.coeffs.iter().filter(|(i, _)| keep(i)).map(|(i, c)| (i.clone(), c.clone())).collect();
        TruncatedSeries { vars: self.vars, degree: self.degree, coeffs }
    }

    /// Coefficientwise `c_I -> m(I, c_I)`; zero results are dropped.
    pub fn map_terms(&self, m: impl Fn(&MultiIndex, &C) -> Result<C>) -> Result<Self> {
        let mut out = Self::zero(self.vars, self.degree);
        for (i, c) in &self.coeffs {
            let v = m(i, c)?;
            if !v.vanishes() {
                out.coeffs.insert(i.clone(), v);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.degree = self.degree.max(other.degree);
        for (i, c) in &other.coeffs {
            let v = match out.coeffs.remove(i) {
                Some(a) => a + c.clone(),
                None => c.clone(),
            };
            if !v.vanishes() {
                out.coeffs.insert(i.clone(), v);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(i, c)| (i.clone(), -c.clone())).collect();
        TruncatedSeries { vars: self.vars, degree: self.degree, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.vars, self.degree);
        for (i, c) in &self.coeffs {
            let v = s.clone() * c.clone();
            if !v.vanishes() {
                out.coeffs.insert(i.clone(), v);
            }
        }
        out
    }

    /// Product truncated at the smaller of the two degree caps.
    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.degree.min(other.degree);
        let mut acc: BTreeMap<MultiIndex, C> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let k: MultiIndex = i.iter().zip(j).map(|(x, y)| x + y).collect();
                if degree(&k) > cap {
                    continue;
                }
                let t = a.clone() * b.clone();
                let v = match acc.remove(&k) {
                    Some(s) => s + t,
                    None => t,
                };
                acc.insert(k, v);
            }
        }
        acc.retain(|_, c| !c.vanishes());
        TruncatedSeries { vars: self.vars, degree: cap, coeffs: acc }
    }

    /// `z_r d/dz_r`.
    pub fn euler(&self, r: usize) -> Result<Self> {
        self.map_terms(|i, c| c.from_rational_like(&int(i[r] as i64)).map(|k| k * c.clone()))
    }

    pub fn partial(&self, r: usize) -> Result<Self> {
        let mut out = Self::zero(self.vars, self.degree);
        for (i, c) in &self.coeffs {
            if i[r] == 0 {
                continue;
            }
            let mut j = i.clone();
            j[r] -= 1;
            out.coeffs.insert(j, c.from_rational_like(&int(i[r] as i64))? * c.clone());
        }
        Ok(out)
    }

    pub fn mul_var(&self, r: usize) -> Result<Self> {
        let mut out = Self::zero(self.vars, self.degree);
        for (i, c) in &self.coeffs {
            let mut j = i.clone();
            j[r] += 1;
            out.insert(j, c.clone())?;
        }
        Ok(out)
    }
}

impl RationalSeries {
    pub fn to_padic(&self, ring: crate::ScalarRing) -> Result<PadicSeries> {
        let mut out = PadicSeries::zero(self.vars, self.degree);
        for (i, c) in &self.coeffs {
            out.insert(i.clone(), ring.from_rational(c)?)?;
        }
        Ok(out)
    }

    /// Sparse random series: `terms` random indices of degree at most `d`,
    /// coefficients `p^k a / b` with `a, b` prime to `p` and small `k >= 0`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, vars: usize, d: u32, terms: usize, p: u64) -> Self {
        let mut f = Self::zero(vars, d);
        for _ in 0..terms {
            let idx = random_index(rng, vars, d);
            let _ = f.insert(idx, random_coefficient(rng, p));
        }
        f
    }
}

pub fn random_index<R: Rng + ?Sized>(rng: &mut R, vars: usize, d: u32) -> MultiIndex {
    let total = rng.gen_range(0..=d);
    let mut idx = vec![0u32; vars];
    for _ in 0..total {
        idx[rng.gen_range(0..vars)] += 1;
    }
    idx
}

pub fn random_coefficient<R: Rng + ?Sized>(rng: &mut R, p: u64) -> Rational {
    let unit = |rng: &mut R| loop {
        let a: i64 = rng.gen_range(1..200);
        if !(a as u64).is_multiple_of(p) {
            return a;
        }
    };
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let k = rng.gen_range(0..3u32);
    Rational::new((sign * unit(rng) * (p as i64).pow(k)).into(), unit(rng).into())
}

/// Expansion `chi(exp(p x)) = sum_r gamma_r x^r` of `x -> exp(p c x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterExpansion {
    pub gammas: Vec<Rational>,
    pub c_valuation: Valuation,
    /// `gamma_r -> 0`, equivalently `v_p(c) > 1/(p-1) - 1`.
    pub rigid: bool,
}

pub fn character_expand(c: &Rational, p: u64, r_max: usize) -> CharacterExpansion {
    let mut gammas = Vec::with_capacity(r_max + 1);
    let mut g = Rational::one();
    let pc = c * int(p as i64);
    for r in 0..=r_max {
        if r > 0 {
            g = g * &pc / int(r as i64);
        }
        gammas.push(g.clone());
    }
    let c_valuation = rational_val(c, p);
    CharacterExpansion { gammas, rigid: is_rigid(c, p), c_valuation }
}

pub fn is_rigid(c: &Rational, p: u64) -> bool {
    match rational_val(c, p) {
        Valuation::Exact(v) => v > Rational::new(1.into(), ((p - 1) as i64).into()) - int(1),
        _ => true,
    }
}

/// `d chi` in epsilon coordinates (for SL_n modulo the all-ones vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub eps: Vec<Rational>,
}

impl Character {
    pub fn new(eps: Vec<Rational>) -> Self {
        Character { eps }
    }

    pub fn trivial(dim: usize) -> Self {
        Character { eps: vec![Rational::zero(); dim] }
    }

    /// `(w chi)(t) = chi(w^-1 t w)`.
    pub fn twist(&self, w: &WeylElement) -> Character {
        Character { eps: w.apply_q(&self.eps) }
    }

    pub fn pair(&self, cocharacter: &[i64]) -> Rational {
        pair_q(&self.eps, cocharacter)
    }

    pub fn check_rigid(&self, p: u64) -> Result<()> {
        for c in &self.eps {
            if !is_rigid(c, p) {
                return Err(Error::NonRigid { value: fmt_rational(c), valuation: rational_val(c, p).to_string() });
            }
        }
        Ok(())
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, p: u64) -> Self {
        Character { eps: (0..dim).map(|_| random_coefficient(rng, p)).collect() }
    }
}

/// A torus Lie vector `H`, recorded through `d(w chi)(H)` and `d(w alpha_r)(H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieVector {
    pub chi_value: Rational,
    pub root_values: Vec<Rational>,
}

impl LieVector {
    /// `H_mu = Lie(mu)(1)` for a cocharacter `mu`.
    pub fn from_cocharacter(ctx: &SeriesContext, chi: &Character, mu: &[i64]) -> Self {
        let chi_value = chi.twist(&ctx.w).pair(mu);
        let root_values = ctx.roots.iter().map(|&r| int(dot(&ctx.datum.roots[r].eps, mu))).collect();
        LieVector { chi_value, root_values }
    }

    /// Eigenvalue `d(w chi)(H) - sum_r d(w alpha_r)(H) i_r` on `z^I`.
    pub fn eigenvalue(&self, i: &[u32]) -> Rational {
        let mut v = self.chi_value.clone();
        for (r, &e) in i.iter().enumerate() {
            v -= &self.root_values[r] * int(e as i64);
        }
        v
    }
}

/// `H f = d(w chi)(H) f - sum_r d(w alpha_r)(H) z_r df/dz_r`.
pub fn lie_action<C: Coefficient>(h: &LieVector, f: &TruncatedSeries<C>) -> Result<TruncatedSeries<C>> {
    let Some(proto) = f.coeffs.values().next() else {
        return Ok(f.clone());
    };
    let mut out = f.scale(&proto.from_rational_like(&h.chi_value)?);
    for (r, a) in h.root_values.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = f.euler(r)?.scale(&proto.from_rational_like(a)?);
        out = out.sub(&term);
    }
    Ok(out)
}

/// `t` is diagonal and congruent to 1 modulo `p`.
fn check_torus_one(g: &Chevalley, t: &PadicMatrix) -> Result<()> {
    let off_diagonal = t.entries().any(|((i, j), x)| i != j && !x.is_exact_zero() && !x.is_zero());
    if off_diagonal || !g.in_congruence(t, 1)? {
        return Err(Error::Domain("torus element must be diagonal and congruent to 1 mod p".into()));
    }
    Ok(())
}

/// `(w chi)(t) = exp(sum_k c_k log t_kk)` for `t` in `T_0^1`.
pub fn character_at(g: &Chevalley, chi: &Character, t: &PadicMatrix) -> Result<Padic> {
    chi.check_rigid(g.ring.p())?;
    let mut acc = g.ring.zero();
    for (k, c) in chi.eps.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = &acc + &(&g.ring.from_rational(c)? * &t[(k, k)].log()?);
    }
    if acc.is_exact_zero() {
        return Ok(g.ring.one());
    }
    acc.exp()
}

/// `(t f)(z) = (w chi)(t) f((w alpha_1)(t^-1) z_1, ...)`, monomial-diagonal.
pub fn torus_action(
    g: &Chevalley,
    ctx: &SeriesContext,
    chi: &Character,
    t: &PadicMatrix,
    f: &PadicSeries,
) -> Result<PadicSeries> {
    check_torus_one(g, t)?;
    let scale = character_at(g, &chi.twist(&ctx.w), t)?;
    let inv_roots = ctx
        .roots
        .iter()
        .map(|&r| {
            let neg: Vec<i64> = ctx.datum.roots[r].eps.iter().map(|x| -x).collect();
            g.character_value(&neg, t)
        })
        .collect::<Result<Vec<_>>>()?;
    f.map_terms(|i, c| {
        let mut m = scale.clone();
        for (r, &e) in i.iter().enumerate() {
            if e > 0 {
                m = &m * &inv_roots[r].pow(e as u64);
            }
        }
        Ok(&m * c)
    })
}

/// Valuation of `(mu(exp p^k) f - f) / p^k - H_mu f`, with `mu` the context
/// cocharacter. Tends to infinity with `k`.
pub fn finite_difference_error(
    g: &Chevalley,
    ctx: &SeriesContext,
    chi: &Character,
    f: &RationalSeries,
    k: u32,
) -> Result<Valuation> {
    let p = g.ring.p();
    let step = g.ring.from_u64(p.pow(k)).exp()?;
    let t = g.torus_element(&ctx.mu, &step)?;
    let fp = f.to_padic(g.ring)?;
    let diff = torus_action(g, ctx, chi, &t, &fp)?.sub(&fp);
    let quotient = diff.map_terms(|_, c| c.div_pi_pow(k))?;
    let h = LieVector::from_cocharacter(ctx, chi, &ctx.mu);
    let err = quotient.sub(&lie_action(&h, &fp)?);
    Ok(err.gauss_valuation(p))
}

/// All multi-indices in `vars` variables with `|I| <= d`.
pub fn indices_up_to(vars: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; vars];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out
}
