//! Right translation by `U_w^+` on polynomial functions, through symbolic
//! coordinate changes over `Q[z_1, ..., z_N]`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{degree, MultiIndex, RationalSeries, SeriesContext};
use crate::matrix::Matrix;
use crate::root_datum::RootId;
use crate::scalar::{int, Scalar};
use crate::{Error, Rational, Result};

/// Multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    vars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Poly {
    pub fn constant(vars: usize, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars], c);
        }
        Poly { vars, terms }
    }

    pub fn var(vars: usize, r: usize) -> Self {
        let mut i = vec![0; vars];
        i[r] = 1;
        Poly { vars, terms: BTreeMap::from([(i, Rational::one())]) }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|i| degree(i)).max().unwrap_or(0)
    }

    fn combine(mut self, other: &Poly, sign: i64) -> Poly {
        for (i, c) in &other.terms {
            let v = self.terms.remove(i).unwrap_or_else(Rational::zero) + c * int(sign);
            if !v.is_zero() {
                self.terms.insert(i.clone(), v);
            }
        }
        self
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.vars, Rational::one());
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        self.combine(&o, 1)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        self.combine(&o, -1)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { vars: self.vars, terms: self.terms.into_iter().map(|(i, c)| (i, -c)).collect() }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        let mut terms: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                let k: MultiIndex = i.iter().zip(j).map(|(x, y)| x + y).collect();
                *terms.entry(k).or_insert_with(Rational::zero) += a * b;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { vars: self.vars, terms }
    }
}

impl Scalar for Poly {
    fn zero_like(&self) -> Self {
        Poly::constant(self.vars, Rational::zero())
    }
    fn one_like(&self) -> Self {
        Poly::constant(self.vars, Rational::one())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Poly::constant(self.vars, int(n))
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_inv(&self) -> Option<Self> {
        match self.terms.iter().next() {
            Some((i, c)) if self.terms.len() == 1 && degree(i) == 0 => Some(Poly::constant(self.vars, c.recip())),
            _ => None,
        }
    }
}

/// Coordinates `z -> prod_r u_{w alpha_r}(z_r)` on `U_w^+`, factors in
/// increasing height of `alpha_r`.
#[derive(Clone, Debug)]
pub struct UnipotentChart {
    n: usize,
    roots: Vec<RootId>,
    vectors: Vec<Vec<(usize, usize, i64)>>,
}

impl UnipotentChart {
    pub fn new(g: &crate::chevalley::Chevalley, ctx: &SeriesContext) -> Self {
        let vectors = ctx.roots.iter().map(|&r| g.root_vector(r).to_vec()).collect();
        UnipotentChart { n: g.n(), roots: ctx.roots.clone(), vectors }
    }

    pub fn vars(&self) -> usize {
        self.roots.len()
    }

    fn factor<S: Scalar>(&self, r: usize, x: &S) -> Matrix<S> {
        let mut m = Matrix::identity_like(self.n, x);
        for &(i, j, c) in &self.vectors[r] {
            m[(i, j)] = x.from_i64_like(c) * x.clone();
        }
        m
    }

    pub fn from_coordinates<S: Scalar>(&self, z: &[S]) -> Matrix<S> {
        let mut m = Matrix::identity_like(self.n, &z[0]);
        for (r, x) in z.iter().enumerate() {
            m = m.mul(&self.factor(r, x));
        }
        m
    }

    /// Peels factors off the left; the entry at the first position of each
    /// root vector is linear in that root's coordinate once lower heights
    /// are removed.
    pub fn coordinates<S: Scalar>(&self, g: &Matrix<S>) -> Result<Vec<S>> {
        let proto = &g[(0, 0)];
        let mut m = g.clone();
        let mut out = Vec::with_capacity(self.vars());
        for r in 0..self.vars() {
            let (i, j, c) = self.vectors[r][0];
            let x = m[(i, j)].clone() * proto.from_i64_like(c);
            let inv = self.factor(r, &(-x.clone()));
            m = inv.mul(&m);
            out.push(x);
        }
        let id = Matrix::identity_like(self.n, proto);
        if m != id {
            return Err(Error::Domain("matrix is not in the unipotent chart".into()));
        }
        Ok(out)
    }
}

/// `(u0 f)(z) = f(coords(from_coords(z) u0))` for a polynomial `f` and
/// `u0` given by rational coordinates. The output is not truncated.
pub fn translate_action(chart: &UnipotentChart, u0: &[Rational], f: &RationalSeries) -> Result<RationalSeries> {
    let n = chart.vars();
    if u0.len() != n || f.vars() != n {
        return Err(Error::Invalid(format!("expected {n} coordinates")));
    }
    let z: Vec<Poly> = (0..n).map(|r| Poly::var(n, r)).collect();
    let c: Vec<Poly> = u0.iter().map(|a| Poly::constant(n, a.clone())).collect();
    let phi = chart.coordinates(&chart.from_coordinates(&z).mul(&chart.from_coordinates(&c)))?;
    let mut acc = Poly::constant(n, Rational::zero());
    for (i, a) in f.terms() {
        let mut t = Poly::constant(n, a.clone());
        for (r, &e) in i.iter().enumerate() {
            if e > 0 {
                t = t * phi[r].pow(e);
            }
        }
        acc = acc + t;
    }
    let d = acc.total_degree().max(f.degree_cap());
    RationalSeries::from_terms(n, d, acc.terms)
}
