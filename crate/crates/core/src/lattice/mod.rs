//! Exact integer lattice operations: LLL reduction, Hermite normal form,
//! relation (kernel) bases, and continued-fraction convergents.
//!
//! No decision anywhere in this module touches floating point. LLL runs on
//! the all-integer representation (Gram determinants d_i and scaled
//! Gram-Schmidt coefficients lambda_{i,j} = d_j * mu_{i,j}), so base values
//! around 10^30 are handled exactly.

pub mod check;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice vector needs at least one entry")]
    EmptyVector,
    #[error("basis is empty")]
    EmptyBasis,
    #[error("basis rows have differing dimensions")]
    DimensionMismatch,
    #[error("the zero vector cannot be a basis row")]
    ZeroRow,
    #[error("basis rows are linearly dependent")]
    DependentRows,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("delta must satisfy 1/4 < delta <= 1")]
    InvalidDelta,
    #[error("relation coefficients cannot all be zero")]
    ZeroRelation,
    #[error("base values must be positive")]
    BaseNotPositive,
    #[error("base values must be pairwise distinct")]
    BaseNotDistinct,
}

/// Row vector with arbitrary-precision entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVector {
    entries: Vec<BigInt>,
}

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if entries.is_empty() {
            return Err(LatticeError::EmptyVector);
        }
        Ok(IntVector { entries })
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector {
            entries: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> BigInt {
        self.dot(self)
    }

    /// Flip signs so the first nonzero entry is positive.
    pub fn sign_normalized(&self) -> IntVector {
        match self.entries.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => IntVector {
                entries: self.entries.iter().map(|e| -e).collect(),
            },
            _ => self.clone(),
        }
    }
}

/// Rows of equal dimension intended to span a lattice. Linear independence
/// is not checked on construction; operations that require it report
/// [`LatticeError::DependentRows`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    rows: Vec<IntVector>,
    dim: usize,
}

impl LatticeBasis {
    pub fn new(rows: Vec<IntVector>) -> Result<Self, LatticeError> {
        let dim = rows.first().ok_or(LatticeError::EmptyBasis)?.dim();
        if rows.iter().any(|r| r.dim() != dim) {
            return Err(LatticeError::DimensionMismatch);
        }
        if rows.iter().any(|r| r.is_zero()) {
            return Err(LatticeError::ZeroRow);
        }
        Ok(LatticeBasis { rows, dim })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        Self::new(rows.iter().map(|r| IntVector::from_i64s(r)).collect())
    }

    pub fn rows(&self) -> &[IntVector] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// det of the matrix of pairwise inner products; squared covolume.
    #[allow(clippy::needless_range_loop)]
    pub fn gram_determinant(&self) -> BigInt {
        let m = self.rows.len();
        let mut g = vec![vec![BigInt::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                g[i][j] = self.rows[i].dot(&self.rows[j]);
            }
        }
        // Bareiss fraction-free elimination keeps everything integral.
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..m {
            if g[k][k].is_zero() {
                let Some(s) = (k + 1..m).find(|&s| !g[s][k].is_zero()) else {
                    return BigInt::zero();
                };
                g.swap(k, s);
                sign = -sign;
            }
            for i in k + 1..m {
                for j in k + 1..m {
                    let num = &g[k][k] * &g[i][j] - &g[i][k] * &g[k][j];
                    g[i][j] = num / &prev;
                }
            }
            prev = g[k][k].clone();
            for row in g.iter_mut().take(m).skip(k + 1) {
                row[k] = BigInt::zero();
            }
        }
        if sign < 0 {
            -g[m - 1][m - 1].clone()
        } else {
            g[m - 1][m - 1].clone()
        }
    }
}

/// Lovasz parameter as an exact rational in (1/4, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delta {
    num: u64,
    den: u64,
}

impl Delta {
    pub fn new(num: u64, den: u64) -> Result<Self, LatticeError> {
        if den == 0 || 4u128 * num as u128 <= den as u128 || num > den {
            return Err(LatticeError::InvalidDelta);
        }
        Ok(Delta { num, den })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }
}

impl Default for Delta {
    /// 0.99: stronger than the classic 3/4, negligible extra cost at
    /// the row counts used here.
    fn default() -> Self {
        Delta { num: 99, den: 100 }
    }
}

/// Round a/b to the nearest integer (ties toward zero); |a - q b| <= |b|/2.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if 2u32 * r.magnitude() > *b.magnitude() {
        let bump = if r.is_negative() == b.is_negative() {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        q + bump
    } else {
        q
    }
}

/// All-integer LLL working state. d[i] is the Gram determinant of rows
/// 0..=i (d[-1] = 1 implicitly); lambda[i][j] = d[j] * mu_{i,j} for j < i.
struct LllState {
    rows: Vec<Vec<BigInt>>,
    lambda: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
}

impl LllState {
    fn init(basis: &LatticeBasis) -> Result<Self, LatticeError> {
        let m = basis.row_count();
        let rows: Vec<Vec<BigInt>> = basis.rows.iter().map(|r| r.entries.clone()).collect();
        let mut lambda = vec![vec![BigInt::zero(); m]; m];
        let mut d = vec![BigInt::zero(); m];

        // Integral Gram-Schmidt: c_i are the scaled orthogonal vectors.
        let mut c = rows.clone();
        for i in 0..m {
            for j in 0..i {
                let l = dot(&rows[i], &c[j]);
                let dj_prev = if j > 0 {
                    d[j - 1].clone()
                } else {
                    BigInt::one()
                };
                for t in 0..c[i].len() {
                    let num = &d[j] * &c[i][t] - &l * &c[j][t];
                    c[i][t] = exact_div(num, &dj_prev);
                }
                lambda[i][j] = l;
            }
            let dprev = if i > 0 {
                d[i - 1].clone()
            } else {
                BigInt::one()
            };
            d[i] = exact_div(dot(&c[i], &c[i]), &dprev);
            if d[i].is_zero() {
                return Err(LatticeError::DependentRows);
            }
        }
        Ok(LllState { rows, lambda, d })
    }

    fn d_before(&self, i: usize) -> BigInt {
        if i == 0 {
            BigInt::one()
        } else {
            self.d[i - 1].clone()
        }
    }

    /// Make |mu_{k,i}| <= 1/2 by subtracting a multiple of row i from row k.
    #[allow(clippy::needless_range_loop)]
    fn size_reduce(&mut self, i: usize, k: usize) {
        let q = div_round(&self.lambda[k][i], &self.d[i]);
        if q.is_zero() {
            return;
        }
        for t in 0..self.rows[k].len() {
            let sub = &q * &self.rows[i][t];
            self.rows[k][t] -= sub;
        }
        for j in 0..i {
            let sub = &q * &self.lambda[i][j];
            self.lambda[k][j] -= sub;
        }
        let sub = &q * &self.d[i];
        self.lambda[k][i] -= sub;
    }

    fn lovasz_ok(&self, k: usize, delta: Delta) -> bool {
        let d0 = self.d_before(k - 1);
        let d1 = &self.d[k - 1];
        let d2 = &self.d[k];
        let l = &self.lambda[k][k - 1];
        let lhs = BigInt::from(delta.den) * (d0 * d2 + l * l);
        let rhs = BigInt::from(delta.num) * (d1 * d1);
        lhs >= rhs
    }

    /// Swap rows k-1 and k, updating lambda and d in place.
    fn swap(&mut self, k: usize) {
        let m = self.rows.len();
        self.rows.swap(k - 1, k);
        for j in 0..k - 1 {
            let tmp = self.lambda[k - 1][j].clone();
            self.lambda[k - 1][j] = self.lambda[k][j].clone();
            self.lambda[k][j] = tmp;
        }
        let l0 = self.lambda[k][k - 1].clone();
        let d0 = self.d_before(k - 1);
        let d1 = self.d[k - 1].clone();
        let d2 = self.d[k].clone();
        for i in k + 1..m {
            let li1 = self.lambda[i][k - 1].clone();
            let li2 = self.lambda[i][k].clone();
            self.lambda[i][k - 1] = exact_div(&l0 * &li1 + &d0 * &li2, &d1);
            self.lambda[i][k] = exact_div(&d2 * &li1 - &l0 * &li2, &d1);
        }
        self.d[k - 1] = exact_div(&d0 * &d2 + &l0 * &l0, &d1);
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    debug_assert!(!den.is_zero());
    debug_assert!((&num % den).is_zero(), "inexact division in lattice update");
    num / den
}

/// LLL-reduce `basis` with parameter `delta`. The output spans the same
/// lattice, is size-reduced (|mu_{i,j}| <= 1/2) and satisfies the Lovasz
/// condition; every step is exact integer arithmetic.
pub fn lll_reduce(basis: &LatticeBasis, delta: Delta) -> Result<LatticeBasis, LatticeError> {
    let m = basis.row_count();
    let mut st = LllState::init(basis)?;
    let mut k = 1;
    while k < m {
        st.size_reduce(k - 1, k);
        if st.lovasz_ok(k, delta) {
            for i in (0..k.saturating_sub(1)).rev() {
                st.size_reduce(i, k);
            }
            k += 1;
        } else {
            st.swap(k);
            k = (k - 1).max(1);
        }
    }
    LatticeBasis::new(
        st.rows
            .into_iter()
            .map(|entries| IntVector { entries })
            .collect(),
    )
}

/// Row-style Hermite normal form: pivots positive, entries above each
/// pivot reduced into [0, pivot). Two bases span the same lattice iff
/// their HNFs are identical.
#[allow(clippy::needless_range_loop)]
pub fn hnf(basis: &LatticeBasis) -> Result<LatticeBasis, LatticeError> {
    let m = basis.row_count();
    let n = basis.dim();
    let mut a: Vec<Vec<BigInt>> = basis.rows.iter().map(|r| r.entries.clone()).collect();

    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row == m {
            break;
        }
        // Euclidean elimination below the pivot: repeatedly reduce by the
        // row with the smallest nonzero entry in this column.
        while let Some(best) = (pivot_row..m)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].magnitude().clone())
        {
            a.swap(pivot_row, best);
            let mut finished = true;
            for r in pivot_row + 1..m {
                if a[r][col].is_zero() {
                    continue;
                }
                let q = div_round(&a[r][col], &a[pivot_row][col]);
                for t in 0..n {
                    let sub = &q * &a[pivot_row][t];
                    a[r][t] -= sub;
                }
                if !a[r][col].is_zero() {
                    finished = false;
                }
            }
            if finished {
                break;
            }
        }
        if a[pivot_row][col].is_zero() {
            continue;
        }
        if a[pivot_row][col].is_negative() {
            for t in 0..n {
                a[pivot_row][t] = -a[pivot_row][t].clone();
            }
        }
        for r in 0..pivot_row {
            let q = a[r][col].div_floor(&a[pivot_row][col]);
            if q.is_zero() {
                continue;
            }
            for t in 0..n {
                let sub = &q * &a[pivot_row][t];
                a[r][t] -= sub;
            }
        }
        pivot_row += 1;
    }
    if pivot_row < m {
        return Err(LatticeError::DependentRows);
    }
    LatticeBasis::new(a.into_iter().map(|entries| IntVector { entries }).collect())
}

/// Integer relation (alpha, beta, gamma) with alpha A0 + beta B0 + gamma C0 = 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationVector {
    alpha: BigInt,
    beta: BigInt,
    gamma: BigInt,
}

impl RelationVector {
    pub fn new(alpha: BigInt, beta: BigInt, gamma: BigInt) -> Result<Self, LatticeError> {
        if alpha.is_zero() && beta.is_zero() && gamma.is_zero() {
            return Err(LatticeError::ZeroRelation);
        }
        Ok(RelationVector { alpha, beta, gamma })
    }

    pub fn from_i64s(alpha: i64, beta: i64, gamma: i64) -> Self {
        RelationVector {
            alpha: alpha.into(),
            beta: beta.into(),
            gamma: gamma.into(),
        }
    }

    pub fn alpha(&self) -> &BigInt {
        &self.alpha
    }

    pub fn beta(&self) -> &BigInt {
        &self.beta
    }

    pub fn gamma(&self) -> &BigInt {
        &self.gamma
    }

    pub fn entries(&self) -> [&BigInt; 3] {
        [&self.alpha, &self.beta, &self.gamma]
    }

    pub fn norm_sq(&self) -> BigInt {
        &self.alpha * &self.alpha + &self.beta * &self.beta + &self.gamma * &self.gamma
    }

    /// alpha a + beta b + gamma c.
    pub fn apply(&self, a: &BigUint, b: &BigUint, c: &BigUint) -> BigInt {
        &self.alpha * BigInt::from(a.clone())
            + &self.beta * BigInt::from(b.clone())
            + &self.gamma * BigInt::from(c.clone())
    }

    pub fn annihilates(&self, a: &BigUint, b: &BigUint, c: &BigUint) -> bool {
        self.apply(a, b, c).is_zero()
    }

    pub fn sign_normalized(&self) -> RelationVector {
        let first = [&self.alpha, &self.beta, &self.gamma]
            .into_iter()
            .find(|x| !x.is_zero());
        match first {
            Some(x) if x.is_negative() => RelationVector {
                alpha: -&self.alpha,
                beta: -&self.beta,
                gamma: -&self.gamma,
            },
            _ => self.clone(),
        }
    }

    /// Divide out the gcd of the entries. A relation and its multiples
    /// build the same reduced triple.
    pub fn primitive(&self) -> RelationVector {
        let g = self.alpha.gcd(&self.beta).gcd(&self.gamma);
        if g.is_one() {
            return self.clone();
        }
        RelationVector {
            alpha: &self.alpha / &g,
            beta: &self.beta / &g,
            gamma: &self.gamma / &g,
        }
    }

    fn to_vector(&self) -> IntVector {
        IntVector {
            entries: vec![self.alpha.clone(), self.beta.clone(), self.gamma.clone()],
        }
    }

    fn from_entries(e: &[BigInt]) -> Self {
        RelationVector {
            alpha: e[0].clone(),
            beta: e[1].clone(),
            gamma: e[2].clone(),
        }
    }
}

impl std::fmt::Display for RelationVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.gamma)
    }
}

/// LLL-reduced basis (v1, v2) of the full integer kernel lattice
/// {x in Z^3 : x . (a0, b0, c0) = 0}, v1 the shorter generator.
///
/// The kernel is found exactly: a unimodular transform built from two
/// extended gcds sends (a0, b0, c0) to (g, 0, 0), and its last two rows
/// span the kernel. Fullness is certified by the Gram-determinant identity
/// det Gram(v1, v2) = |(a0, b0, c0)/g|^2 with g the gcd of the base.
pub fn relation_basis(
    a0: &BigUint,
    b0: &BigUint,
    c0: &BigUint,
) -> Result<(RelationVector, RelationVector), LatticeError> {
    relation_basis_with_delta(a0, b0, c0, Delta::default())
}

pub fn relation_basis_with_delta(
    a0: &BigUint,
    b0: &BigUint,
    c0: &BigUint,
    delta: Delta,
) -> Result<(RelationVector, RelationVector), LatticeError> {
    if a0.is_zero() || b0.is_zero() || c0.is_zero() {
        return Err(LatticeError::BaseNotPositive);
    }
    let (a, b, c) = (
        BigInt::from(a0.clone()),
        BigInt::from(b0.clone()),
        BigInt::from(c0.clone()),
    );

    // Stage 1: combine coordinates 1,2 so (b, c) -> (g1, 0).
    let e1 = b.extended_gcd(&c);
    let g1 = e1.gcd.clone();
    let r1 = [BigInt::zero(), e1.x.clone(), e1.y.clone()];
    let r2 = [
        BigInt::zero(),
        -exact_div(c.clone(), &g1),
        exact_div(b.clone(), &g1),
    ];
    // Stage 2: combine coordinates 0,1' so (a, g1) -> (g, 0).
    let e2 = a.extended_gcd(&g1);
    let g = e2.gcd.clone();
    // Kernel rows of the combined unimodular transform:
    let k1 = [
        -exact_div(g1.clone(), &g),
        exact_div(a.clone(), &g) * &r1[1],
        exact_div(a.clone(), &g) * &r1[2],
    ];
    let k2 = r2;

    let basis = LatticeBasis::new(vec![
        IntVector {
            entries: k1.to_vec(),
        },
        IntVector {
            entries: k2.to_vec(),
        },
    ])?;
    debug_assert!(dot(&basis.rows[0].entries, &[a.clone(), b.clone(), c.clone()]).is_zero());
    debug_assert!(dot(&basis.rows[1].entries, &[a.clone(), b.clone(), c.clone()]).is_zero());

    let reduced = lll_reduce(&basis, delta)?;

    // Certify fullness: covolume^2 of the kernel of a primitive vector w
    // equals |w|^2.
    let prim = [
        exact_div(a.clone(), &g),
        exact_div(b.clone(), &g),
        exact_div(c, &g),
    ];
    let expected: BigInt = prim.iter().map(|x| x * x).sum();
    debug_assert_eq!(reduced.gram_determinant(), expected);

    let mut v1 = reduced.rows[0].sign_normalized();
    let mut v2 = reduced.rows[1].sign_normalized();
    let (n1, n2) = (v1.norm_sq(), v2.norm_sq());
    if n2 < n1 || (n1 == n2 && v2 < v1) {
        std::mem::swap(&mut v1, &mut v2);
    }
    Ok((
        RelationVector::from_entries(v1.entries()),
        RelationVector::from_entries(v2.entries()),
    ))
}

/// Continued-fraction convergent p/q in lowest terms, q > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
}

impl std::fmt::Display for Convergent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// The continued-fraction convergents of num/den (floor expansion), at
/// most `max_depth` of them. When the depth permits, the final convergent
/// equals num/den in lowest terms.
pub fn convergents(
    num: &BigInt,
    den: &BigInt,
    max_depth: usize,
) -> Result<Vec<Convergent>, LatticeError> {
    if den.is_zero() {
        return Err(LatticeError::ZeroDenominator);
    }
    let (mut n, mut d) = if den.is_negative() {
        (-num.clone(), -den.clone())
    } else {
        (num.clone(), den.clone())
    };
    let mut out = Vec::new();
    let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
    let (mut p_cur, mut q_cur) = (BigInt::one(), BigInt::zero());
    while !d.is_zero() && out.len() < max_depth {
        let a = n.div_floor(&d);
        let r = &n - &a * &d;
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        out.push(Convergent {
            p: p_cur.clone(),
            q: q_cur.clone(),
        });
        n = d;
        d = r;
    }
    Ok(out)
}

/// Small integer combinations c1 v1 + c2 v2 worth scoring: the generators
/// themselves, the convergent-driven combinations that make one coordinate
/// small, and a full sweep over |c1|, |c2| <= box_bound. Deduplicated
/// after sign normalization, zero excluded, sorted by squared norm.
pub fn combine_candidates(
    v1: &RelationVector,
    v2: &RelationVector,
    cf_depth: usize,
    box_bound: u64,
) -> Vec<RelationVector> {
    let w1 = v1.to_vector();
    let w2 = v2.to_vector();

    // (c1, c2) and -(c1, c2) give the same triple up to sign, and since
    // v1, v2 are independent, deduplicating sign-normalized coefficient
    // pairs is the same as deduplicating sign-normalized vectors. Pairs
    // are canonical with c1 > 0, or c1 = 0 and c2 > 0.
    let mut pairs = std::collections::HashSet::new();
    let mut add = |c1: BigInt, c2: BigInt| {
        if c1.is_zero() && c2.is_zero() {
            return;
        }
        let canonical = if c1.is_negative() || (c1.is_zero() && c2.is_negative()) {
            (-c1, -c2)
        } else {
            (c1, c2)
        };
        pairs.insert(canonical);
    };

    add(BigInt::one(), BigInt::zero());
    add(BigInt::zero(), BigInt::one());

    // Zero out coordinate i approximately: c2/c1 ~ -v1[i]/v2[i].
    for i in 0..3 {
        if w2.entries[i].is_zero() {
            continue; // quotient undefined; that element is already small
        }
        let target_num = -&w1.entries[i];
        if let Ok(convs) = convergents(&target_num, &w2.entries[i], cf_depth) {
            for conv in convs {
                add(conv.q, conv.p);
            }
        }
    }

    let bound = box_bound as i64;
    for c1 in 0..=bound {
        let lo = if c1 == 0 { 1 } else { -bound };
        for c2 in lo..=bound {
            add(BigInt::from(c1), BigInt::from(c2));
        }
    }

    let mut out: Vec<RelationVector> = pairs
        .into_iter()
        .filter_map(|(c1, c2)| {
            let entries: Vec<BigInt> = w1
                .entries
                .iter()
                .zip(&w2.entries)
                .map(|(x, y)| &c1 * x + &c2 * y)
                .collect();
            let v = IntVector { entries }.sign_normalized();
            // only reachable with dependent inputs, which violate the pre
            if v.is_zero() {
                return None;
            }
            Some(RelationVector::from_entries(v.entries()))
        })
        .collect();
    out.sort_by_cached_key(|v| {
        (
            v.norm_sq(),
            v.alpha.clone(),
            v.beta.clone(),
            v.gamma.clone(),
        )
    });
    out
}
