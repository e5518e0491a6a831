//! Root data of SL2, SL3 and Sp4 in epsilon coordinates.
//!
//! Characters and cocharacters are integer vectors: for SL_n both live in
//! `Z^n` (characters modulo the all-ones vector, cocharacters with coordinate
//! sum zero), for Sp4 both are `Z^2` with `t_{a,b} = diag(a, b, 1/b, 1/a)`.
//! The pairing is the dot product in every case.
//!
//! The positive system is the one whose root groups are lower triangular, so
//! that the pro-p Iwahori subgroup is "lower-unipotent mod p". Root names
//! record coefficients on the simple roots of this system.
//!
//! | group | simple roots (eps)           | highest root      | h |
//! |-------|------------------------------|-------------------|---|
//! | SL2   | a = e2 - e1                  | a                 | 2 |
//! | SL3   | a1 = e2 - e1, a2 = e3 - e2   | a1+a2 = e3 - e1   | 3 |
//! | Sp4   | a = e2 - e1, b = -2 e2       | 2a+b = -2 e1      | 4 |
//!
//! The upper-triangular Borel uses the opposite system `-Phi+`; for Sp4 its
//! simple roots `t -> a/b`, `t -> b^2` are the negatives of `a`, `b` above.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::{int, Scalar};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupType {
    Sl2,
    Sl3,
    Sp4,
}

impl GroupType {
    pub const ALL: [GroupType; 3] = [GroupType::Sl2, GroupType::Sl3, GroupType::Sp4];

    pub fn label(&self) -> &'static str {
        match self {
            GroupType::Sl2 => "sl2",
            GroupType::Sl3 => "sl3",
            GroupType::Sp4 => "sp4",
        }
    }

    pub fn cartan_type(&self) -> &'static str {
        match self {
            GroupType::Sl2 => "A1",
            GroupType::Sl3 => "A2",
            GroupType::Sp4 => "C2",
        }
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GroupType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl2" => Ok(GroupType::Sl2),
            "sl3" => Ok(GroupType::Sl3),
            "sp4" => Ok(GroupType::Sp4),
            other => Err(Error::Invalid(format!("unsupported group {other:?} (sl2, sl3, sp4)"))),
        }
    }
}

pub type RootId = usize;
pub type Vector = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub name: String,
    pub eps: Vector,
    pub coroot: Vector,
    /// Coefficients on the simple roots of the lower-triangular system.
    pub coeffs: Vector,
    pub height: i64,
}

impl Root {
    pub fn is_positive(&self) -> bool {
        self.height > 0
    }
}

/// Weyl group element acting on epsilon coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub matrix: Vec<Vector>,
    /// A reduced word in the simple reflections (indices into `simple`).
    pub word: Vec<usize>,
}

impl WeylElement {
    pub fn apply(&self, v: &[i64]) -> Vector {
        self.matrix.iter().map(|row| dot(row, v)).collect()
    }

    pub fn apply_q(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(&a, b)| int(a) * b).sum())
            .collect()
    }

    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "1".into()
        } else {
            self.word.iter().map(|k| format!("s{}", k + 1)).collect::<Vec<_>>().join("")
        }
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    pub group: GroupType,
    /// Size of the defining matrix representation.
    pub n: usize,
    /// Length of epsilon vectors.
    pub dim: usize,
    /// Epsilon vector of the character `t -> t_kk`.
    pub diag_weights: Vec<Vector>,
    pub roots: Vec<Root>,
    pub positive: Vec<RootId>,
    pub negative: Vec<RootId>,
    pub simple: Vec<RootId>,
    pub weyl: Vec<WeylElement>,
    by_eps: HashMap<Vector, RootId>,
}

impl RootDatum {
    pub fn new(group: GroupType) -> Self {
        let (n, dim, diag_weights, simple_eps, all_eps): (usize, usize, Vec<Vector>, Vec<Vector>, Vec<Vector>) =
            match group {
                GroupType::Sl2 | GroupType::Sl3 => {
                    let n = if group == GroupType::Sl2 { 2 } else { 3 };
                    let e = |k: usize| -> Vector { (0..n).map(|i| i64::from(i == k)).collect() };
                    let diff = |i: usize, j: usize| -> Vector { (0..n).map(|k| e(i)[k] - e(j)[k]).collect() };
                    let simple = (0..n - 1).map(|k| diff(k + 1, k)).collect();
                    let mut all = Vec::new();
                    for i in 0..n {
                        for j in 0..n {
                            if i != j {
                                all.push(diff(i, j));
                            }
                        }
                    }
                    (n, n, (0..n).map(e).collect(), simple, all)
                }
                GroupType::Sp4 => {
                    let weights = vec![vec![1, 0], vec![0, 1], vec![0, -1], vec![-1, 0]];
                    let simple = vec![vec![-1, 1], vec![0, -2]];
                    let mut all = Vec::new();
                    for s in [1, -1] {
                        all.push(vec![2 * s, 0]);
                        all.push(vec![0, 2 * s]);
                        for t in [1, -1] {
                            all.push(vec![s, t]);
                        }
                    }
                    (4, 2, weights, simple, all)
                }
            };
        let rank = simple_eps.len();
        let simple_q = Matrix::from_fn(dim, rank, |i, j| int(simple_eps[j][i]));
        let mut roots: Vec<Root> = all_eps
            .into_iter()
            .map(|eps| {
                let target: Vec<Rational> = eps.iter().map(|&x| int(x)).collect();
                let coeffs: Vector = simple_q
                    .solve(&target)
                    .expect("root in the span of the simple roots")
                    .iter()
                    .map(|c| {
                        assert!(c.is_integer());
                        c.to_integer().try_into().unwrap()
                    })
                    .collect();
                let norm = dot(&eps, &eps);
                let coroot = eps.iter().map(|x| 2 * x / norm).collect();
                let height = coeffs.iter().sum();
                Root { name: String::new(), eps, coroot, coeffs, height }
            })
            .collect();
        // height-then-lexicographic on coefficient vectors, positives first
        roots.sort_by(|a, b| {
            (a.height < 0)
                .cmp(&(b.height < 0))
                .then(a.height.abs().cmp(&b.height.abs()))
                .then(a.coeffs.iter().map(|c| c.abs()).cmp(b.coeffs.iter().map(|c| c.abs())).reverse())
        });
        for r in &mut roots {
            r.name = root_name(group, &r.coeffs);
        }
        let by_eps: HashMap<Vector, RootId> = roots.iter().enumerate().map(|(i, r)| (r.eps.clone(), i)).collect();
        let positive: Vec<RootId> = (0..roots.len()).filter(|&i| roots[i].height > 0).collect();
        let negative: Vec<RootId> = (0..roots.len()).filter(|&i| roots[i].height < 0).collect();
        let simple: Vec<RootId> = simple_eps.iter().map(|e| by_eps[e]).collect();
        let mut datum = RootDatum { group, n, dim, diag_weights, roots, positive, negative, simple, weyl: Vec::new(), by_eps };
        datum.weyl = datum.enumerate_weyl();
        datum
    }

    pub fn rank(&self) -> usize {
        self.simple.len()
    }

    pub fn root(&self, id: RootId) -> &Root {
        &self.roots[id]
    }

    pub fn root_by_eps(&self, eps: &[i64]) -> Option<RootId> {
        self.by_eps.get(eps).copied()
    }

    pub fn root_by_name(&self, name: &str) -> Option<RootId> {
        self.roots.iter().position(|r| r.name == name)
    }

    pub fn negate(&self, id: RootId) -> RootId {
        let neg: Vector = self.roots[id].eps.iter().map(|x| -x).collect();
        self.by_eps[&neg]
    }

    pub fn height(&self, id: RootId) -> i64 {
        self.roots[id].height
    }

    pub fn highest_root(&self) -> RootId {
        *self.positive.iter().max_by_key(|&&i| self.roots[i].height).unwrap()
    }

    pub fn coxeter_number(&self) -> i64 {
        1 + self.height(self.highest_root())
    }

    pub fn pairing(&self, character: &[i64], cocharacter: &[i64]) -> i64 {
        dot(character, cocharacter)
    }

    fn reflection_matrix(&self, id: RootId) -> Vec<Vector> {
        let r = &self.roots[id];
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| i64::from(i == j) - r.eps[i] * r.coroot[j]).collect())
            .collect()
    }

    fn enumerate_weyl(&self) -> Vec<WeylElement> {
        let identity: Vec<Vector> = (0..self.dim).map(|i| (0..self.dim).map(|j| i64::from(i == j)).collect()).collect();
        let gens: Vec<Vec<Vector>> = self.simple.iter().map(|&s| self.reflection_matrix(s)).collect();
        let mut seen: HashMap<Vec<Vector>, usize> = HashMap::new();
        let mut out = vec![WeylElement { matrix: identity.clone(), word: vec![] }];
        seen.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for (g, gen) in gens.iter().enumerate() {
                let m = mat_mul(&out[k].matrix, gen);
                if !seen.contains_key(&m) {
                    let mut word = out[k].word.clone();
                    word.push(g);
                    seen.insert(m.clone(), out.len());
                    queue.push_back(out.len());
                    out.push(WeylElement { matrix: m, word });
                }
            }
        }
        out
    }

    pub fn identity(&self) -> &WeylElement {
        &self.weyl[0]
    }

    pub fn weyl_by_word(&self, word: &str) -> Result<WeylElement> {
        let word = word.trim();
        if word.is_empty() || word == "1" || word == "e" {
            return Ok(self.weyl[0].clone());
        }
        let mut m: Vec<Vector> = self.weyl[0].matrix.clone();
        let mut letters = Vec::new();
        for tok in word.split('s').filter(|t| !t.is_empty()) {
            let k: usize = tok
                .trim_matches(|c: char| c == '*' || c == ',' || c == ' ')
                .parse()
                .map_err(|_| Error::Parse(format!("bad Weyl word {word:?}; use e.g. s1s2")))?;
            if k == 0 || k > self.rank() {
                return Err(Error::Invalid(format!("simple reflection s{k} out of range")));
            }
            m = mat_mul(&m, &self.reflection_matrix(self.simple[k - 1]));
            letters.push(k - 1);
        }
        let found = self.weyl.iter().find(|w| w.matrix == m).expect("closed under products");
        Ok(found.clone())
    }

    pub fn inverse(&self, w: &WeylElement) -> WeylElement {
        let t: Vec<Vector> = (0..self.dim).map(|i| (0..self.dim).map(|j| w.matrix[j][i]).collect()).collect();
        self.weyl.iter().find(|x| x.matrix == t).expect("signed permutations are orthogonal").clone()
    }

    pub fn compose(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let m = mat_mul(&a.matrix, &b.matrix);
        self.weyl.iter().find(|x| x.matrix == m).unwrap().clone()
    }

    pub fn weyl_act(&self, w: &WeylElement, id: RootId) -> RootId {
        self.by_eps[&w.apply(&self.roots[id].eps)]
    }

    /// `|Phi+ cap w Phi-|`.
    pub fn weyl_length(&self, w: &WeylElement) -> usize {
        let winv = self.inverse(w);
        self.positive.iter().filter(|&&a| !self.roots[self.weyl_act(&winv, a)].is_positive()).count()
    }

    /// A root in `w Phi+ cap w' Phi-`, if any.
    pub fn intersection_witness(&self, w: &WeylElement, w2: &WeylElement) -> Option<RootId> {
        let w2inv = self.inverse(w2);
        self.positive
            .iter()
            .map(|&a| self.weyl_act(w, a))
            .find(|&g| !self.roots[self.weyl_act(&w2inv, g)].is_positive())
    }

    pub fn intersection_nonempty(&self, w: &WeylElement, w2: &WeylElement) -> bool {
        self.intersection_witness(w, w2).is_some()
    }

    /// Position permutation: `w . diag_weights[k] = diag_weights[perm[k]]`.
    pub fn position_perm(&self, w: &WeylElement) -> Vec<usize> {
        self.diag_weights
            .iter()
            .map(|wt| {
                let image = w.apply(wt);
                self.diag_weights
                    .iter()
                    .position(|x| self.same_character(x, &image))
                    .expect("W permutes the weights of the standard representation")
            })
            .collect()
    }

    fn same_character(&self, a: &[i64], b: &[i64]) -> bool {
        match self.group {
            // characters of SL_n are defined modulo the all-ones vector
            GroupType::Sl2 | GroupType::Sl3 => {
                let d: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                d.iter().all(|&x| x == d[0])
            }
            GroupType::Sp4 => a == b,
        }
    }

    /// The root whose root group occupies matrix position `(i, j)`.
    pub fn root_at(&self, i: usize, j: usize) -> Option<RootId> {
        if i == j {
            return None;
        }
        let d: Vector = self.diag_weights[i].iter().zip(&self.diag_weights[j]).map(|(a, b)| a - b).collect();
        self.root_by_eps(&d)
    }

    /// `mu0` with `<alpha, mu0> = ht(alpha)`, as a rational cocharacter.
    pub fn mu0(&self) -> Vec<Rational> {
        let rank = self.rank();
        let extra = usize::from(self.group != GroupType::Sp4);
        let a = Matrix::from_fn(rank + extra, self.dim, |i, j| {
            if i < rank {
                int(self.roots[self.simple[i]].eps[j])
            } else {
                int(1)
            }
        });
        let b: Vec<Rational> = (0..rank + extra).map(|i| if i < rank { int(1) } else { int(0) }).collect();
        a.solve(&b).expect("mu0 exists for supported types")
    }

    /// Minimal `a >= 1` with `a mu0` integral, and `mu = w(a mu0)`.
    pub fn adapted_cocharacter(&self, w: &WeylElement) -> (Vector, i64) {
        let mu0 = self.mu0();
        let a = mu0.iter().fold(num_bigint::BigInt::from(1), |acc, q| acc.lcm(q.denom()));
        let a_q = Rational::from_integer(a.clone());
        let scaled: Vector = mu0.iter().map(|q| (q * &a_q).to_integer().try_into().unwrap()).collect();
        (w.apply(&scaled), a.try_into().unwrap())
    }

    /// `delta = 1/2 sum of the roots in the given positive system`.
    pub fn delta_for(&self, system: &[RootId]) -> Vec<Rational> {
        (0..self.dim)
            .map(|k| system.iter().map(|&r| int(self.roots[r].eps[k])).sum::<Rational>() / int(2))
            .collect()
    }

    /// `<delta, alpha^vee>` for alpha in the lower-triangular positive system.
    pub fn delta_pairings(&self) -> Vec<(RootId, Rational)> {
        let delta = self.delta_for(&self.positive);
        self.positive
            .iter()
            .map(|&a| {
                let cr = &self.roots[a].coroot;
                (a, delta.iter().zip(cr).map(|(d, &c)| d * int(c)).sum())
            })
            .collect()
    }

    /// The opposite (upper-triangular) positive system.
    pub fn upper_positive(&self) -> Vec<RootId> {
        self.positive.iter().map(|&a| self.negate(a)).collect()
    }

    /// Standing hypothesis `p - 1 > e h` with `e = 1`.
    pub fn gate(&self, p: u64) -> Result<()> {
        let eh = self.coxeter_number() as u64;
        if p - 1 > eh {
            Ok(())
        } else {
            Err(Error::Gate { p_minus_one: p - 1, eh })
        }
    }
}

fn mat_mul(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn root_name(group: GroupType, coeffs: &[i64]) -> String {
    let letters: &[&str] = match group {
        GroupType::Sl2 => &["a"],
        GroupType::Sl3 => &["a1", "a2"],
        GroupType::Sp4 => &["a", "b"],
    };
    let sign = if coeffs.iter().any(|&c| c < 0) { "-" } else { "" };
    let body: Vec<String> = coeffs
        .iter()
        .zip(letters)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| if c.abs() == 1 { l.to_string() } else { format!("{}{}", c.abs(), l) })
        .collect();
    let sep = if sign.is_empty() { "+" } else { "-" };
    format!("{sign}{}", body.join(sep))
}

/// A cocharacter paired against a rational character vector.
pub fn pair_q(character: &[Rational], cocharacter: &[i64]) -> Rational {
    character.iter().zip(cocharacter).map(|(c, &x)| c * int(x)).sum()
}

impl Scalar for i64 {
    fn zero_like(&self) -> Self {
        0
    }
    fn one_like(&self) -> Self {
        1
    }
    fn from_i64_like(&self, n: i64) -> Self {
        n
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn try_inv(&self) -> Option<Self> {
        match self {
            1 => Some(1),
            -1 => Some(-1),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn heights_and_coxeter_numbers() {
        let sp4 = RootDatum::new(GroupType::Sp4);
        let names: Vec<&str> = sp4.positive.iter().map(|&i| sp4.roots[i].name.as_str()).collect();
        assert_eq!(names, ["a", "b", "a+b", "2a+b"]);
        assert_eq!(sp4.height(sp4.highest_root()), 3);
        assert_eq!(sp4.coxeter_number(), 4);
        let sl3 = RootDatum::new(GroupType::Sl3);
        assert_eq!(sl3.height(sl3.root_by_name("a1+a2").unwrap()), 2);
        assert_eq!(sl3.coxeter_number(), 3);
        assert_eq!(RootDatum::new(GroupType::Sl2).coxeter_number(), 2);
        for d in GroupType::ALL.map(RootDatum::new) {
            for r in &d.roots {
                assert_eq!(dot(&r.eps, &r.coroot), 2);
            }
            for &s in &d.simple {
                assert_eq!(d.height(s), 1);
            }
        }
    }

    #[test]
    fn weyl_orders_and_lengths() {
        let sp4 = RootDatum::new(GroupType::Sp4);
        assert_eq!(sp4.weyl.len(), 8);
        assert_eq!(sp4.weyl_length(sp4.identity()), 0);
        assert_eq!(sp4.weyl.iter().map(|w| sp4.weyl_length(w)).max(), Some(4));
        assert_eq!(RootDatum::new(GroupType::Sl3).weyl.len(), 6);
        for d in GroupType::ALL.map(RootDatum::new) {
            for w in &d.weyl {
                assert_eq!(d.weyl_length(w), w.word.len(), "{} {}", d.group, w.word_string());
                let flipped = d.positive.iter().filter(|&&a| !d.roots[d.weyl_act(w, a)].is_positive()).count();
                assert_eq!(flipped, d.weyl_length(w));
            }
        }
    }

    #[test]
    fn intersections() {
        let sp4 = RootDatum::new(GroupType::Sp4);
        let s_a = sp4.weyl_by_word("s1").unwrap();
        assert!(sp4.intersection_nonempty(sp4.identity(), &s_a));
        let mut pairs = 0;
        for w in &sp4.weyl {
            assert!(!sp4.intersection_nonempty(w, w));
            for w2 in &sp4.weyl {
                if w != w2 {
                    assert!(sp4.intersection_nonempty(w, w2));
                    pairs += 1;
                }
            }
        }
        assert_eq!(pairs, 56);
    }

    #[test]
    fn adapted_cocharacters() {
        let sl2 = RootDatum::new(GroupType::Sl2);
        let (mu, a) = sl2.adapted_cocharacter(sl2.identity());
        assert_eq!(a, 2);
        assert_eq!(mu, sl2.roots[sl2.simple[0]].coroot);
        let sp4 = RootDatum::new(GroupType::Sp4);
        let (mu, a) = sp4.adapted_cocharacter(sp4.identity());
        let pairings: Vec<i64> = sp4.positive.iter().map(|&r| dot(&sp4.roots[r].eps, &mu)).collect();
        assert_eq!(pairings, [a, a, 2 * a, 3 * a]);
        for d in GroupType::ALL.map(RootDatum::new) {
            for w in &d.weyl {
                let (mu, a) = d.adapted_cocharacter(w);
                for &r in &d.positive {
                    let wr = d.weyl_act(w, r);
                    assert_eq!(dot(&d.roots[wr].eps, &mu), a * d.height(r));
                }
            }
        }
    }

    #[test]
    fn delta() {
        let sp4 = RootDatum::new(GroupType::Sp4);
        for (r, v) in sp4.delta_pairings() {
            if sp4.simple.contains(&r) {
                assert_eq!(v, int(1));
            }
            if r == sp4.highest_root() {
                assert_eq!(v, int(2));
            }
        }
        // t_{a,b} -> a^2 b for the upper Borel
        assert_eq!(sp4.delta_for(&sp4.upper_positive()), vec![int(2), int(1)]);
        assert_eq!(RootDatum::new(GroupType::Sl2).mu0(), vec![ratio(-1, 2), ratio(1, 2)]);
    }

    #[test]
    fn positions() {
        let sl3 = RootDatum::new(GroupType::Sl3);
        assert_eq!(sl3.root_at(1, 0), sl3.root_by_name("a1"));
        assert_eq!(sl3.root_at(0, 2), sl3.root_by_name("-a1-a2"));
        let sp4 = RootDatum::new(GroupType::Sp4);
        assert_eq!(sp4.root_at(3, 0), sp4.root_by_name("2a+b"));
        for w in &sp4.weyl {
            let perm = sp4.position_perm(w);
            let mut sorted = perm.clone();
            sorted.sort();
            assert_eq!(sorted, [0, 1, 2, 3]);
        }
        assert!(sp4.gate(5).is_err());
        assert!(sp4.gate(7).is_ok());
    }
}
