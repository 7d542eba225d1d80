use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{infeasible, internal, invalid, Result};

/// Scalar abstraction so one tableau implementation serves both the fast
/// float path and the exact rational path used by golden tests.
pub trait LpNum: Clone + std::fmt::Debug + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_usize(v: usize) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    /// Strictly positive beyond tolerance.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond tolerance.
    fn is_neg(&self) -> bool;
    fn to_f64(&self) -> f64;
}

impl LpNum for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_usize(v: usize) -> Self {
        v as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        *self > 1e-9
    }
    fn is_neg(&self) -> bool {
        *self < -1e-9
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpNum for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_usize(v: usize) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Solve min c.x subject to A x >= b, x >= 0 with a dense two-phase
/// tableau simplex under Bland's rule. Requires b >= 0.
pub fn solve_min<T: LpNum>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpSolution<T>> {
    let rows = a.len();
    let cols = c.len();
    if b.len() != rows {
        return Err(invalid("rhs length mismatch"));
    }
    for row in a {
        if row.len() != cols {
            return Err(invalid("constraint row length mismatch"));
        }
    }
    if b.iter().any(|v| v.is_neg()) {
        return Err(invalid("rhs must be nonnegative"));
    }

    // Layout: x (cols) | surplus (rows) | artificial (rows) | rhs.
    // Constraint i: a_i . x - s_i + t_i = b_i.
    let width = cols + 2 * rows + 1;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(rows + 1);
    for i in 0..rows {
        let mut row: Vec<T> = Vec::with_capacity(width);
        row.extend(a[i].iter().cloned());
        for j in 0..rows {
            row.push(if j == i {
                T::zero().sub(&T::one())
            } else {
                T::zero()
            });
        }
        for j in 0..rows {
            row.push(if j == i { T::one() } else { T::zero() });
        }
        row.push(b[i].clone());
        tab.push(row);
    }
    let mut basis: Vec<usize> = (0..rows).map(|i| cols + rows + i).collect();

    // Phase 1: minimize the artificial sum. Objective row holds reduced
    // costs of -sum(artificials), expressed over the current basis.
    let mut obj: Vec<T> = vec![T::zero(); width];
    for i in 0..rows {
        for j in 0..width {
            obj[j] = obj[j].add(&tab[i][j]);
        }
    }
    for j in cols + rows..cols + 2 * rows {
        obj[j] = T::zero();
    }
    pivot_loop(&mut tab, &mut obj, &mut basis, cols + 2 * rows)?;
    if obj[width - 1].is_pos() {
        return Err(infeasible("restricted program has no feasible point"));
    }
    // Drive leftover artificials out of the basis where possible.
    for i in 0..rows {
        if basis[i] >= cols + rows {
            let pivot_col = (0..cols + rows).find(|&j| tab[i][j].is_pos() || tab[i][j].is_neg());
            if let Some(j) = pivot_col {
                pivot(&mut tab, &mut obj, &mut basis, i, j);
            }
        }
    }

    // Phase 2: minimize c.x. Rebuild the objective row from the basis.
    let mut obj: Vec<T> = vec![T::zero(); width];
    for (j, cost) in c.iter().enumerate() {
        obj[j] = T::zero().sub(cost);
    }
    for i in 0..rows {
        if basis[i] < cols {
            let coeff = c[basis[i]].clone();
            for j in 0..width {
                let delta = coeff.mul(&tab[i][j]);
                obj[j] = obj[j].add(&delta);
            }
        }
    }
    // Artificials are barred from re-entering.
    pivot_loop(&mut tab, &mut obj, &mut basis, cols + rows)?;

    let mut x = vec![T::zero(); cols];
    for i in 0..rows {
        if basis[i] < cols {
            x[basis[i]] = tab[i][width - 1].clone();
        }
    }
    let mut objective = T::zero();
    for j in 0..cols {
        objective = objective.add(&c[j].mul(&x[j]));
    }
    Ok(LpSolution { x, objective })
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
}

/// Bland's rule: entering = lowest-index improving column, leaving = min
/// ratio with lowest basis index on ties. Anti-cycling and deterministic.
fn pivot_loop<T: LpNum>(
    tab: &mut [Vec<T>],
    obj: &mut [T],
    basis: &mut [usize],
    allowed_cols: usize,
) -> Result<()> {
    let width = obj.len();
    let rows = tab.len();
    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(internal("simplex pivot budget exhausted"));
        }
        let Some(enter) = (0..allowed_cols).find(|&j| obj[j].is_pos()) else {
            return Ok(());
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..rows {
            if tab[i][enter].is_pos() {
                let ratio = tab[i][width - 1].div(&tab[i][enter]);
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((leave, _)) = leave else {
            return Err(internal("unbounded restricted program"));
        };
        pivot(tab, obj, basis, leave, enter);
    }
}

fn pivot<T: LpNum>(tab: &mut [Vec<T>], obj: &mut [T], basis: &mut [usize], row: usize, col: usize) {
    let width = obj.len();
    let denom = tab[row][col].clone();
    for j in 0..width {
        tab[row][j] = tab[row][j].div(&denom);
    }
    for i in 0..tab.len() {
        if i != row && (tab[i][col].is_pos() || tab[i][col].is_neg()) {
            let factor = tab[i][col].clone();
            for j in 0..width {
                let delta = factor.mul(&tab[row][j]);
                tab[i][j] = tab[i][j].sub(&delta);
            }
            tab[i][col] = T::zero();
        }
    }
    if obj[col].is_pos() || obj[col].is_neg() {
        let factor = obj[col].clone();
        for j in 0..width {
            let delta = factor.mul(&tab[row][j]);
            obj[j] = obj[j].sub(&delta);
        }
        obj[col] = T::zero();
    }
    basis[row] = col;
}
