//! Independent verification of LLL postconditions via exact rational
//! Gram-Schmidt. This path deliberately shares nothing with the integral
//! working representation in the reduction itself: it recomputes every
//! mu coefficient from scratch over Q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Delta, LatticeBasis, LatticeError};

/// mu matrix and squared norms of the orthogonalized vectors.
pub struct GramSchmidt {
    pub mu: Vec<Vec<BigRational>>,
    pub norms_sq: Vec<BigRational>,
}

pub fn rational_gram_schmidt(basis: &LatticeBasis) -> Result<GramSchmidt, LatticeError> {
    let m = basis.row_count();
    let rows: Vec<Vec<BigRational>> = basis
        .rows()
        .iter()
        .map(|r| {
            r.entries()
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();

    let mut ortho = rows.clone();
    let mut mu = vec![vec![BigRational::zero(); m]; m];
    let mut norms_sq = Vec::with_capacity(m);
    for i in 0..m {
        for j in 0..i {
            let num = dot(&rows[i], &ortho[j]);
            let coeff = &num / &norms_sq[j];
            for t in 0..ortho[i].len() {
                let sub = &coeff * &ortho[j][t];
                ortho[i][t] -= sub;
            }
            mu[i][j] = coeff;
        }
        let n = dot(&ortho[i], &ortho[i]);
        if n.is_zero() {
            return Err(LatticeError::DependentRows);
        }
        norms_sq.push(n);
    }
    Ok(GramSchmidt { mu, norms_sq })
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Every |mu_{i,j}| <= 1/2?
pub fn is_size_reduced(basis: &LatticeBasis) -> Result<bool, LatticeError> {
    let gs = rational_gram_schmidt(basis)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    Ok(gs
        .mu
        .iter()
        .enumerate()
        .all(|(i, row)| row[..i].iter().all(|c| c.abs() <= half)))
}

/// |b*_k|^2 >= (delta - mu_{k,k-1}^2) |b*_{k-1}|^2 for every k?
pub fn satisfies_lovasz(basis: &LatticeBasis, delta: Delta) -> Result<bool, LatticeError> {
    let gs = rational_gram_schmidt(basis)?;
    let delta_q = BigRational::new(BigInt::from(delta.numer()), BigInt::from(delta.denom()));
    Ok((1..basis.row_count()).all(|k| {
        let mu = &gs.mu[k][k - 1];
        gs.norms_sq[k] >= (&delta_q - mu * mu) * &gs.norms_sq[k - 1]
    }))
}

pub fn is_lll_reduced(basis: &LatticeBasis, delta: Delta) -> Result<bool, LatticeError> {
    Ok(is_size_reduced(basis)? && satisfies_lovasz(basis, delta)?)
}
