//! Slope decomposition by `v_p(lambda_I)` and the `U_s` projector.
//!
//! `lambda_0 = 0` has valuation `+inf`, so the constant monomial lies in
//! every `f^{>=s}` and in no `f^{=s}`.

use num_traits::Zero;
use serde::Serialize;

use super::{lie_action, Character, Coefficient, LieVector, PadicSeries, RationalSeries, SeriesContext, TruncatedSeries};
use crate::scalar::{int, vp_factorial, vp_u64, Scalar, Valuation};
use crate::{Error, Rational, Result};

/// `v_p(lambda_I)`, `None` for `I = 0`.
pub fn slope_of(ctx: &SeriesContext, i: &[u32]) -> Option<u32> {
    match ctx.lambda(i) {
        0 => None,
        l => Some(vp_u64(l, ctx.p)),
    }
}

fn at_least(ctx: &SeriesContext, i: &[u32], s: u32) -> bool {
    slope_of(ctx, i).is_none_or(|v| v >= s)
}

/// `(f^{<s}, f^{>=s})`.
pub fn slope_split<C: Coefficient>(ctx: &SeriesContext, f: &TruncatedSeries<C>, s: u32) -> (TruncatedSeries<C>, TruncatedSeries<C>) {
    (f.filter(|i| !at_least(ctx, i, s)), f.filter(|i| at_least(ctx, i, s)))
}

/// `f^{=s}`.
pub fn slope_exact<C: Coefficient>(ctx: &SeriesContext, f: &TruncatedSeries<C>, s: u32) -> TruncatedSeries<C> {
    f.filter(|i| slope_of(ctx, i) == Some(s))
}

/// `U_s^{n!} f` through the coefficient multipliers `(p^-s lambda_I)^((p-1) n!)`.
pub fn hida_projector(ctx: &SeriesContext, f: &PadicSeries, s: u32, n: u64) -> Result<PadicSeries> {
    if let Some((i, _)) = f.terms().find(|(i, _)| !at_least(ctx, i, s)) {
        return Err(Error::Domain(format!("z^{i:?} has slope {:?} < {s}", slope_of(ctx, i))));
    }
    let fact: u64 = (1..=n).try_fold(1u64, |a, k| a.checked_mul(k)).ok_or_else(|| Error::Invalid("n! overflows".into()))?;
    let e = (ctx.p - 1) * fact;
    let ps = Rational::from_integer((ctx.p as i64).pow(s).into());
    f.map_terms(|i, c| {
        let l = ctx.lambda(i);
        if l == 0 {
            return Ok(c.zero_like());
        }
        let u = c.from_rational_like(&(int(l as i64) / &ps))?;
        Ok(&u.pow(e) * c)
    })
}

/// `U_s` applied `iterations` times, each time as
/// `(p^-s (d(w chi)(H_mu) Id - H_mu))^(p-1)` built from [`lie_action`].
pub fn hida_literal(ctx: &SeriesContext, chi: &Character, f: &RationalSeries, s: u32, iterations: u64) -> Result<RationalSeries> {
    let h = LieVector::from_cocharacter(ctx, chi, &ctx.mu);
    let d = h.chi_value.clone();
    let inv_ps = Rational::new(1.into(), (ctx.p as i64).pow(s).into());
    let mut g = f.clone();
    for _ in 0..iterations {
        for _ in 0..ctx.p - 1 {
            let step = g.scale(&d).sub(&lie_action(&h, &g)?);
            g = step.scale(&inv_ps);
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectorStep {
    pub n: u64,
    /// `v(U_s^{n!} f^{>=s} - f^{=s})`
    pub distance: String,
    /// Required lower bound `1 + v_p(n!) + v(f^{>=s})`.
    pub bound: String,
    pub ok: Option<bool>,
}

/// One row of the convergence table for `f^{>=s}`.
pub fn projector_step(ctx: &SeriesContext, f_ge: &PadicSeries, s: u32, n: u64) -> Result<ProjectorStep> {
    let p = ctx.p;
    let projected = hida_projector(ctx, f_ge, s, n)?;
    let target = slope_exact(ctx, f_ge, s);
    let distance = projected.sub(&target).gauss_valuation(p);
    let bound = f_ge.gauss_valuation(p).shift(&int(1 + vp_factorial(n, p) as i64));
    let ok = if f_ge.is_zero() { Some(true) } else { distance.ge_certain(&bound) };
    Ok(ProjectorStep { n, distance: distance.to_string(), bound: bound.to_string(), ok })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsStep {
    pub s: u32,
    /// `v(f^{>=s} - c_0)`
    pub distance: String,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub c0: String,
    pub steps: Vec<ConstantsStep>,
    /// Distances are non-decreasing in valuation.
    pub monotone: bool,
    /// Least `s` with `p^s > D max <w alpha, mu>`.
    pub bound_s: u32,
    /// `f^{>=s} = c_0` for every `s >= bound_s` checked.
    pub exact_from_bound: bool,
}

/// Truncated form of "the constants are reached by the slope cuts".
pub fn constants_limit_check(ctx: &SeriesContext, f: &RationalSeries, s_max: u32) -> Result<ConstantsReport> {
    let p = ctx.p;
    let c0 = f.constant_term().cloned().filter(|c| !c.is_zero()).ok_or_else(|| Error::Domain("c_0 = 0".into()))?;
    let constant = RationalSeries::monomial(f.vars(), f.degree_cap(), vec![0; f.vars()], c0.clone())?;
    let limit = f.degree_cap() as u128 * ctx.max_pairing() as u128;
    let mut bound_s = 0;
    while (p as u128).pow(bound_s) <= limit {
        bound_s += 1;
    }
    let mut steps = Vec::new();
    let mut prev: Option<Valuation> = None;
    let mut monotone = true;
    let mut exact_from_bound = true;
    for s in 0..=s_max.max(bound_s) {
        let (_, ge) = slope_split(ctx, f, s);
        let diff = ge.sub(&constant);
        let v = diff.gauss_valuation(p);
        if let Some(pv) = &prev {
            if v.ge_certain(pv) != Some(true) {
                monotone = false;
            }
        }
        if s >= bound_s && !diff.is_zero() {
            exact_from_bound = false;
        }
        steps.push(ConstantsStep { s, distance: v.to_string(), support: ge.len() });
        prev = Some(v);
    }
    Ok(ConstantsReport { c0: crate::scalar::fmt_rational(&c0), steps, monotone, bound_s, exact_from_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_datum::{GroupType, RootDatum};
    use crate::ScalarRing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sl2() -> SeriesContext {
        let d = RootDatum::new(GroupType::Sl2);
        SeriesContext::new(&d, d.identity(), None, 7).unwrap()
    }

    #[test]
    fn split_examples() {
        let c = sl2();
        let f = RationalSeries::from_terms(1, 30, (0..=30).map(|k| (vec![k], int(1)))).unwrap();
        let (lt, ge) = slope_split(&c, &f, 0);
        assert!(lt.is_zero());
        assert_eq!(ge, f);
        // z^7: lambda = 14, v = 1
        assert_eq!(slope_of(&c, &[7]), Some(1));
        let (_, ge1) = slope_split(&c, &f, 1);
        let (_, ge2) = slope_split(&c, &f, 2);
        assert!(ge1.get(&[7]).is_some() && ge2.get(&[7]).is_none());
        assert_eq!(slope_split(&c, &f, 1).0.add(&ge1), f);
    }

    #[test]
    fn projector_multiplier_valuations() {
        let c = sl2();
        let ring = ScalarRing::rational(7, 16).unwrap();
        // slope 1: z^7, lambda = 14; slope 2: z^49 would exceed, use mu scaled context
        let f = RationalSeries::monomial(1, 30, vec![7], int(1)).unwrap().to_padic(ring).unwrap();
        let out = hida_projector(&c, &f, 1, 1).unwrap();
        let m = out.get(&[7]).unwrap();
        assert_eq!(m.residue() % 7, 1);
        let out0 = hida_projector(&c, &f, 0, 1).unwrap();
        assert_eq!(out0.gauss_valuation(7), Valuation::exact_int(6));
        assert!(hida_projector(&c, &f, 2, 1).is_err());
    }

    #[test]
    fn literal_iteration_agrees() {
        let c = sl2();
        let ring = ScalarRing::rational(7, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let chi = Character::new(vec![int(3), int(0)]);
        let f = RationalSeries::random(&mut rng, 1, 30, 12, 7);
        for s in 0..=1 {
            let ge = slope_split(&c, &f, s).1;
            for n in 1..=2u64 {
                let lit = hida_literal(&c, &chi, &ge, s, (1..=n).product()).unwrap().to_padic(ring).unwrap();
                let fast = hida_projector(&c, &ge.to_padic(ring).unwrap(), s, n).unwrap();
                assert_eq!(lit, fast);
            }
        }
    }

    #[test]
    fn constants_bound() {
        let c = sl2();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut f = RationalSeries::random(&mut rng, 1, 30, 25, 7);
        f.insert(vec![0], int(5)).unwrap();
        let r = constants_limit_check(&c, &f, 4).unwrap();
        assert_eq!(r.bound_s, 3);
        assert!(r.monotone && r.exact_from_bound);
        let k = RationalSeries::monomial(1, 30, vec![0], int(2)).unwrap();
        for s in 0..5 {
            assert_eq!(slope_split(&c, &k, s).1, k);
        }
    }
}
