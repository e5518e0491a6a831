//! Matrix models of SL2, SL3 and Sp4 over `Z_p`: root groups, torus elements,
//! the pro-p Iwahori subgroup, its Weyl-conjugate factorizations, the
//! p-valuation and an ordered basis.

use rand::Rng;

use crate::matrix::Matrix;
use crate::padic::{Padic, ScalarRing};
use crate::root_datum::{dot, GroupType, RootDatum, RootId, Vector, WeylElement};
use crate::scalar::{int, Scalar, Valuation};
use crate::{Error, PValue, Rational, Result};

pub type PadicMatrix = Matrix<Padic>;
/// Group elements are matrices over the scalar ring; the group is carried by
/// the [`Chevalley`] context that produced them.
pub type GroupElement = PadicMatrix;

/// Order of the roots inside each factorization batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RootOrder {
    /// Increasing height, then lexicographic on simple-root coefficients.
    #[default]
    HeightLex,
    /// Increasing height, reverse lexicographic within a height.
    HeightReverseLex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    /// Factors in `U_w^-` (roots in `w Phi^-`), left to right.
    pub minus: Vec<(RootId, Padic)>,
    /// Diagonal entries of the `T^1` factor.
    pub torus: Vec<Padic>,
    /// Factors in `U_w^+` (roots in `w Phi^+`), left to right.
    pub plus: Vec<(RootId, Padic)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Root(RootId),
    /// Index into the simple roots.
    Coroot(usize),
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub label: String,
    pub kind: BasisKind,
    pub generator: PadicMatrix,
    pub omega: Rational,
}

#[derive(Clone, Debug)]
pub struct OrderedBasis {
    pub w: WeylElement,
    pub elements: Vec<BasisElement>,
}

impl OrderedBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The conjugating pair `(E, t = mu(pi))`, `pi^m = p`, `m = a e h`.
#[derive(Clone, Debug)]
pub struct EtData {
    pub extension: ScalarRing,
    pub mu: Vector,
    pub a: i64,
    /// Smallest integer `r > e_E / (p - 1)`.
    pub r: u32,
}

#[derive(Clone, Debug)]
pub struct Chevalley {
    pub datum: RootDatum,
    pub ring: ScalarRing,
    root_vectors: Vec<Vec<(usize, usize, i64)>>,
    torus_rows: Vec<usize>,
    torus_solve: Vec<Vector>,
}

impl Chevalley {
    pub fn new(group: GroupType, ring: ScalarRing) -> Result<Self> {
        if ring.ramification() != 1 {
            return Err(Error::Invalid("group elements live over Z_p".into()));
        }
        let datum = RootDatum::new(group);
        let root_vectors = (0..datum.roots.len()).map(|r| root_vector(&datum, r)).collect();
        let (torus_rows, torus_solve) = torus_left_inverse(&datum);
        Ok(Chevalley { datum, ring, root_vectors, torus_rows, torus_solve })
    }

    /// Like [`Chevalley::new`] but refuses parameters with `p - 1 <= e h`.
    pub fn gated(group: GroupType, ring: ScalarRing) -> Result<Self> {
        let g = Chevalley::new(group, ring)?;
        g.datum.gate(ring.p())?;
        Ok(g)
    }

    pub fn group(&self) -> GroupType {
        self.datum.group
    }

    pub fn n(&self) -> usize {
        self.datum.n
    }

    pub fn h(&self) -> i64 {
        self.datum.coxeter_number()
    }

    pub fn identity(&self) -> PadicMatrix {
        Matrix::identity_like(self.n(), &self.ring.one())
    }

    /// Sparse Lie algebra vector `X_gamma` with `u_gamma(x) = 1 + x X_gamma`.
    pub fn root_vector(&self, r: RootId) -> &[(usize, usize, i64)] {
        &self.root_vectors[r]
    }

    pub fn root_unipotent(&self, r: RootId, x: &Padic) -> PadicMatrix {
        let mut g = self.identity();
        for &(i, j, c) in &self.root_vectors[r] {
            g[(i, j)] = &self.ring.from_i64(c) * x;
        }
        g
    }

    /// `mu(c) = diag(c^<wt_k, mu>)`; negative exponents need a unit.
    pub fn torus_element(&self, mu: &[i64], c: &Padic) -> Result<PadicMatrix> {
        let inv = if self.datum.diag_weights.iter().any(|wt| dot(wt, mu) < 0) { Some(c.inv()?) } else { None };
        let mut g = self.identity();
        for (k, wt) in self.datum.diag_weights.iter().enumerate() {
            let e = dot(wt, mu);
            g[(k, k)] = if e >= 0 { c.pow(e as u64) } else { inv.as_ref().unwrap().pow((-e) as u64) };
        }
        Ok(g)
    }

    /// `alpha^vee(c)` for the simple root with index `k`.
    pub fn simple_coroot_torus(&self, k: usize, c: &Padic) -> Result<PadicMatrix> {
        let cr = self.datum.roots[self.datum.simple[k]].coroot.clone();
        self.torus_element(&cr, c)
    }

    /// Character value `alpha(t)` of a diagonal matrix.
    pub fn character_value(&self, eps: &[i64], t: &PadicMatrix) -> Result<Padic> {
        // t_kk carries the k-th epsilon coordinate (the first two for Sp4)
        let mut acc = self.ring.one();
        for (k, &e) in eps.iter().enumerate() {
            if e > 0 {
                acc = &acc * &t[(k, k)].pow(e as u64);
            } else if e < 0 {
                acc = &acc * &t[(k, k)].inv()?.pow((-e) as u64);
            }
        }
        Ok(acc)
    }

    /// `g in K_r`: every entry of `g - 1` divisible by `p^r`.
    pub fn in_congruence(&self, g: &PadicMatrix, r: u32) -> Result<bool> {
        if r > self.ring.precision() {
            return Err(Error::Precision(format!("r = {r} exceeds precision {}", self.ring.precision())));
        }
        let one = self.identity();
        Ok(g.sub(&one).entries().all(|(_, x)| x.vpi().is_none_or(|v| v >= r)))
    }

    /// Congruent to a lower-unipotent matrix modulo `p`.
    pub fn in_iwahori(&self, g: &PadicMatrix) -> bool {
        let one = self.ring.one();
        g.entries().all(|((i, j), x)| match i.cmp(&j) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => (x - &one).vpi().is_none_or(|v| v >= 1),
            std::cmp::Ordering::Less => x.vpi().is_none_or(|v| v >= 1),
        })
    }

    /// `det g = 1` (SL) or `g^t J g = J` (Sp4) at the working precision.
    pub fn satisfies_relation(&self, g: &PadicMatrix) -> bool {
        match self.group() {
            GroupType::Sl2 | GroupType::Sl3 => determinant(g) == self.ring.one(),
            GroupType::Sp4 => {
                let j = symplectic_form(&self.ring);
                g.transpose().mul(&j).mul(g) == j
            }
        }
    }

    /// Roots of `w Phi^-` and `w Phi^+` in factorization order.
    pub fn batches(&self, w: &WeylElement, order: RootOrder) -> (Vec<RootId>, Vec<RootId>) {
        let d = &self.datum;
        let arrange = |base: &[RootId]| -> Vec<RootId> {
            let mut ids: Vec<RootId> = base.to_vec();
            if order == RootOrder::HeightReverseLex {
                ids.sort_by(|&a, &b| d.height(a).abs().cmp(&d.height(b).abs()).then(b.cmp(&a)));
            }
            ids.into_iter().map(|a| d.weyl_act(w, a)).collect()
        };
        (arrange(&d.negative), arrange(&d.positive))
    }

    pub fn factorize(&self, g: &PadicMatrix, w: &WeylElement) -> Result<Factorization> {
        self.factorize_ordered(g, w, RootOrder::HeightLex)
    }

    /// `g = (prod over w Phi^-) * t * (prod over w Phi^+)`.
    ///
    /// Relabelling rows and columns by the position permutation of `w` turns
    /// the two batches into upper and lower unitriangular groups, so the
    /// factorization is the UDL decomposition of the relabelled matrix; root
    /// parameters are then peeled off in increasing height.
    pub fn factorize_ordered(&self, g: &PadicMatrix, w: &WeylElement, order: RootOrder) -> Result<Factorization> {
        if !self.in_iwahori(g) {
            return Err(Error::NotInIwahori(format!("{:?}", g)));
        }
        let n = self.n();
        let perm = self.datum.position_perm(w);
        let gp = Matrix::from_fn(n, n, |i, j| g[(perm[i], perm[j])].clone());
        let (u, diag, l) = udl(&gp, &self.ring)?;
        let unpermute = |m: &PadicMatrix| {
            let mut out = self.identity();
            for i in 0..n {
                for j in 0..n {
                    out[(perm[i], perm[j])] = m[(i, j)].clone();
                }
            }
            out
        };
        let (a, b) = (unpermute(&u), unpermute(&l));
        let torus: Vec<Padic> = (0..n).map(|k| diag[perm.iter().position(|&x| x == k).unwrap()].clone()).collect();
        let (minus_ids, plus_ids) = self.batches(w, order);
        let minus = self.peel(a, &minus_ids)?;
        let plus = self.peel(b, &plus_ids)?;
        for (r, x) in minus.iter().chain(&plus) {
            let need = u32::from(self.datum.height(*r) < 0);
            if x.vpi().is_some_and(|v| v < need) {
                return Err(Error::Factorization(format!("parameter of {} not integral enough", self.datum.roots[*r].name)));
            }
        }
        for t in &torus {
            if (t - &self.ring.one()).vpi().is_some_and(|v| v < 1) {
                return Err(Error::Factorization("torus part outside T^1".into()));
            }
        }
        Ok(Factorization { minus, torus, plus })
    }

    fn peel(&self, mut m: PadicMatrix, ids: &[RootId]) -> Result<Vec<(RootId, Padic)>> {
        let mut out = Vec::with_capacity(ids.len());
        for &r in ids {
            let (i, j, c) = self.root_vectors[r][0];
            debug_assert_eq!(c, 1);
            let x = m[(i, j)].clone();
            m = self.root_unipotent(r, &-&x).mul(&m);
            out.push((r, x));
        }
        if m != self.identity() {
            let (pos, _) = m
                .entries()
                .find(|((i, j), x)| if i == j { **x != self.ring.one() } else { !x.is_zero() })
                .unwrap();
            return Err(Error::Factorization(format!("residual entry at {pos:?} after peeling")));
        }
        Ok(out)
    }

    pub fn multiply_factors(&self, f: &Factorization) -> PadicMatrix {
        let mut g = self.identity();
        for (r, x) in &f.minus {
            g = g.mul(&self.root_unipotent(*r, x));
        }
        let mut t = self.identity();
        for (k, x) in f.torus.iter().enumerate() {
            t[(k, k)] = x.clone();
        }
        g = g.mul(&t);
        for (r, x) in &f.plus {
            g = g.mul(&self.root_unipotent(*r, x));
        }
        g
    }

    /// `omega(u_gamma(x)) = v(x) + ht(gamma) / h` (with `e = 1`).
    pub fn root_factor_omega(&self, r: RootId, x: &Padic) -> PValue {
        x.val().shift(&Rational::new(self.datum.height(r).into(), self.h().into()))
    }

    /// Valuation of each factor: roots first (minus then plus batch), then
    /// the torus depth `min_k v(t_k - 1)`.
    pub fn factor_omegas(&self, f: &Factorization) -> Vec<PValue> {
        let mut out: Vec<PValue> =
            f.minus.iter().chain(&f.plus).map(|(r, x)| self.root_factor_omega(*r, x)).collect();
        out.push(Valuation::min_all(f.torus.iter().map(|t| (t - &self.ring.one()).val())));
        out
    }

    pub fn omega_of_factorization(&self, f: &Factorization) -> PValue {
        Valuation::min_all(self.factor_omegas(f))
    }

    pub fn omega_formula(&self, g: &PadicMatrix) -> Result<PValue> {
        self.datum.gate(self.ring.p())?;
        let f = self.factorize(g, self.datum.identity())?;
        Ok(self.omega_of_factorization(&f))
    }

    pub fn et_data(&self) -> Result<EtData> {
        let (mu, a) = self.datum.adapted_cocharacter(self.datum.identity());
        let m = (a * self.h()) as u32;
        let extension = ScalarRing::new(self.ring.p(), m, self.ring.precision() * m)?;
        let r = m / (self.ring.p() as u32 - 1) + 1;
        Ok(EtData { extension, mu, a, r })
    }

    /// `t g t^{-1}` over `E` with `t = mu(pi)`.
    pub fn conjugate_into_extension(&self, g: &PadicMatrix, et: &EtData) -> Result<PadicMatrix> {
        let k: Vec<i64> = self.datum.diag_weights.iter().map(|wt| dot(wt, &et.mu)).collect();
        let n = self.n();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let x = g[(i, j)].embed(et.extension)?;
                let s = k[i] - k[j];
                row.push(if s >= 0 {
                    x.mul_pi_pow(s as u32)
                } else {
                    x.div_pi_pow((-s) as u32).map_err(|_| Error::NotInIwahori(format!("entry ({i},{j})")))?
                });
            }
            out.push(row);
        }
        Ok(Matrix::from_rows(out))
    }

    /// `(1/e_E) sup{n : t g t^{-1} in K_n}` over `E = Q_p(p^{1/(aeh)})`.
    pub fn omega_oracle(&self, g: &PadicMatrix) -> Result<PValue> {
        self.datum.gate(self.ring.p())?;
        if !self.in_iwahori(g) {
            return Err(Error::NotInIwahori(format!("{:?}", g)));
        }
        let et = self.et_data()?;
        let c = self.conjugate_into_extension(g, &et)?;
        let one = et.extension.one();
        let vals: Vec<PValue> =
            c.entries().map(|((i, j), x)| if i == j { (x - &one).val() } else { x.val() }).collect();
        Ok(Valuation::min_all(vals))
    }

    /// Whether `t h t^{-1} in K_r` over `E`, with `K_r` measured in powers of
    /// the uniformizer of `E`.
    pub fn et_conjugate_in_kr(&self, h: &PadicMatrix, et: &EtData) -> Result<bool> {
        let c = self.conjugate_into_extension(h, et)?;
        let one = et.extension.one();
        let inside = c.entries().all(|((i, j), x)| {
            let d = if i == j { x - &one } else { x.clone() };
            d.vpi().is_none_or(|v| v >= et.r)
        });
        Ok(inside)
    }

    fn basis_scale(&self, r: RootId) -> Padic {
        if self.datum.height(r) < 0 {
            self.ring.from_u64(self.ring.p())
        } else {
            self.ring.one()
        }
    }

    /// `(u_gamma(p))_{w Phi^-, upper}`, `(u_gamma(1))_{lower}`, then
    /// `alpha^vee(exp p)` for simple `alpha`, then the `w Phi^+` batch.
    pub fn ordered_basis(&self, w: &WeylElement) -> Result<OrderedBasis> {
        self.datum.gate(self.ring.p())?;
        let (minus, plus) = self.batches(w, RootOrder::HeightLex);
        let h = self.h();
        let root_elt = |r: RootId| {
            let ht = self.datum.height(r);
            let omega = Rational::new(ht.into(), h.into()) + int(i64::from(ht < 0));
            BasisElement {
                label: format!("u[{}]", self.datum.roots[r].name),
                kind: BasisKind::Root(r),
                generator: self.root_unipotent(r, &self.basis_scale(r)),
                omega,
            }
        };
        let mut elements: Vec<BasisElement> = minus.iter().map(|&r| root_elt(r)).collect();
        let ep = self.ring.from_u64(self.ring.p()).exp()?;
        for k in 0..self.datum.rank() {
            elements.push(BasisElement {
                label: format!("coroot[{}]", self.datum.roots[self.datum.simple[k]].name),
                kind: BasisKind::Coroot(k),
                generator: self.simple_coroot_torus(k, &ep)?,
                omega: int(1),
            });
        }
        elements.extend(plus.iter().map(|&r| root_elt(r)));
        Ok(OrderedBasis { w: w.clone(), elements })
    }

    /// Exponents `x` with `g = h_1^{x_1} ... h_d^{x_d}` for the ordered basis
    /// of `w`.
    pub fn coordinates(&self, g: &PadicMatrix, w: &WeylElement) -> Result<Vec<Padic>> {
        let f = self.factorize(g, w)?;
        let mut out = Vec::new();
        for (r, x) in &f.minus {
            out.push(self.unscale(*r, x)?);
        }
        let y: Vec<Padic> =
            f.torus.iter().map(|t| t.log().and_then(|l| l.div_pi_pow(1))).collect::<Result<_>>()?;
        for row in &self.torus_solve {
            let mut acc = self.ring.zero();
            for (&c, &k) in row.iter().zip(&self.torus_rows) {
                acc = &acc + &(&self.ring.from_i64(c) * &y[k]);
            }
            out.push(acc);
        }
        for (r, x) in &f.plus {
            out.push(self.unscale(*r, x)?);
        }
        Ok(out)
    }

    fn unscale(&self, r: RootId, x: &Padic) -> Result<Padic> {
        if self.datum.height(r) < 0 {
            x.div_pi_pow(1)
        } else {
            Ok(x.clone())
        }
    }

    pub fn from_coordinates(&self, x: &[Padic], w: &WeylElement) -> Result<PadicMatrix> {
        let (minus, plus) = self.batches(w, RootOrder::HeightLex);
        let rank = self.datum.rank();
        if x.len() != minus.len() + rank + plus.len() {
            return Err(Error::Invalid(format!("expected {} coordinates", minus.len() + rank + plus.len())));
        }
        let mut g = self.identity();
        let mut it = x.iter();
        for &r in &minus {
            g = g.mul(&self.root_unipotent(r, &(it.next().unwrap() * &self.basis_scale(r))));
        }
        let p = self.ring.from_u64(self.ring.p());
        for k in 0..rank {
            let c = (&p * it.next().unwrap()).exp()?;
            g = g.mul(&self.simple_coroot_torus(k, &c)?);
        }
        for &r in &plus {
            g = g.mul(&self.root_unipotent(r, &(it.next().unwrap() * &self.basis_scale(r))));
        }
        Ok(g)
    }

    pub fn dimension(&self) -> usize {
        self.datum.roots.len() + self.datum.rank()
    }

    pub fn random_coordinates<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Padic> {
        (0..self.dimension()).map(|_| self.ring.random(rng)).collect()
    }

    /// Uniform coordinates assembled through the identity ordered basis.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PadicMatrix> {
        let x = self.random_coordinates(rng);
        self.from_coordinates(&x, self.datum.identity())
    }
}

/// Upper-unitriangular, diagonal, lower-unitriangular decomposition.
fn udl(g: &PadicMatrix, ring: &ScalarRing) -> Result<(PadicMatrix, Vec<Padic>, PadicMatrix)> {
    let n = g.rows();
    let mut m = g.clone();
    let mut u = Matrix::identity_like(n, &ring.one());
    let mut l = u.clone();
    let mut d = vec![ring.one(); n];
    for k in (0..n).rev() {
        let dk = m[(k, k)].clone();
        let dinv = dk.inv().map_err(|_| Error::Factorization(format!("pivot {k} is not a unit")))?;
        for j in 0..k {
            l[(k, j)] = &m[(k, j)] * &dinv;
            u[(j, k)] = &m[(j, k)] * &dinv;
        }
        for i in 0..k {
            for j in 0..k {
                let v = &m[(i, j)] - &(&u[(i, k)] * &m[(k, j)]);
                m[(i, j)] = v;
            }
        }
        d[k] = dk;
    }
    Ok((u, d, l))
}

pub fn determinant<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.rows();
    if n == 1 {
        return m[(0, 0)].clone();
    }
    let mut acc = m[(0, 0)].zero_like();
    for j in 0..n {
        let minor = Matrix::from_fn(n - 1, n - 1, |a, b| m[(a + 1, if b < j { b } else { b + 1 })].clone());
        let term = m[(0, j)].clone() * determinant(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

pub fn symplectic_form(ring: &ScalarRing) -> PadicMatrix {
    Matrix::from_fn(4, 4, |i, j| match (i, j) {
        (0, 3) | (1, 2) => ring.one(),
        (2, 1) | (3, 0) => ring.from_i64(-1),
        _ => ring.zero(),
    })
}

/// Chooses signs on the matrix positions of a root so that the resulting
/// vector lies in the Lie algebra; the first position gets coefficient 1.
fn root_vector(d: &RootDatum, r: RootId) -> Vec<(usize, usize, i64)> {
    let n = d.n;
    let positions: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| d.root_at(i, j) == Some(r)).collect();
    assert!(!positions.is_empty());
    let in_algebra = |coeffs: &[(usize, usize, i64)]| -> bool {
        match d.group {
            GroupType::Sl2 | GroupType::Sl3 => true,
            GroupType::Sp4 => {
                // X^t J + J X = 0
                let j = |a: usize, b: usize| -> i64 {
                    match (a, b) {
                        (0, 3) | (1, 2) => 1,
                        (2, 1) | (3, 0) => -1,
                        _ => 0,
                    }
                };
                let x = |a: usize, b: usize| -> i64 {
                    coeffs.iter().find(|&&(i, k, _)| i == a && k == b).map_or(0, |&(_, _, c)| c)
                };
                (0..4).all(|a| {
                    (0..4).all(|b| (0..4).map(|k| x(k, a) * j(k, b) + j(a, k) * x(k, b)).sum::<i64>() == 0)
                })
            }
        }
    };
    let k = positions.len();
    for signs in 0..(1u32 << (k - 1)) {
        let coeffs: Vec<(usize, usize, i64)> = positions
            .iter()
            .enumerate()
            .map(|(idx, &(i, j))| (i, j, if idx > 0 && signs >> (idx - 1) & 1 == 1 { -1 } else { 1 }))
            .collect();
        if in_algebra(&coeffs) {
            return coeffs;
        }
    }
    panic!("no root vector for {}", d.roots[r].name);
}

/// Rows `R` and an integral inverse of `C_R`, `C_{kj} = <wt_k, alpha_j^vee>`.
fn torus_left_inverse(d: &RootDatum) -> (Vec<usize>, Vec<Vector>) {
    let rank = d.rank();
    let c: Vec<Vector> = d
        .diag_weights
        .iter()
        .map(|wt| d.simple.iter().map(|&s| dot(wt, &d.roots[s].coroot)).collect())
        .collect();
    let n = c.len();
    let mut subset: Vec<usize> = (0..rank).collect();
    loop {
        let sub = Matrix::from_fn(rank, rank, |i, j| int(c[subset[i]][j]));
        if let Ok(inv) = sub.inverse() {
            if inv.entries().all(|(_, q)| q.is_integer()) {
                let rows = (0..rank)
                    .map(|i| (0..rank).map(|j| inv[(i, j)].to_integer().try_into().unwrap()).collect())
                    .collect();
                return (subset, rows);
            }
        }
        // next combination
        let mut i = rank;
        loop {
            assert!(i > 0, "no unimodular row subset");
            i -= 1;
            if subset[i] < n - rank + i {
                break;
            }
        }
        subset[i] += 1;
        for k in i + 1..rank {
            subset[k] = subset[k - 1] + 1;
        }
    }
}
