//! 3×3 exact matrices acting on homogeneous coordinates.

use num_traits::{One, Zero};

use super::rational::{format_rational, Rational};

/// A rational point of the projective plane, as homogeneous coordinates.
pub type ProjPoint = [Rational; 3];

/// Scales a projective point to primitive integer coordinates whose first
/// nonzero entry is positive. Returns `None` for the zero vector.
pub fn normalize_point(p: &ProjPoint) -> Option<ProjPoint> {
    use num_integer::Integer;
    use num_traits::Signed;
    if p.iter().all(Zero::is_zero) {
        return None;
    }
    let mut lcm = num_bigint::BigInt::one();
    for c in p {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<num_bigint::BigInt> = p
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut g = num_bigint::BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    let first = ints.iter().find(|c| !c.is_zero()).unwrap();
    if first.is_negative() {
        g = -g;
    }
    Some([0, 1, 2].map(|i| Rational::from_integer(&ints[i] / &g)))
}

pub fn same_point(p: &ProjPoint, q: &ProjPoint) -> bool {
    // proportional iff all 2x2 minors vanish
    (0..3).all(|i| {
        (i + 1..3).all(|j| &p[i] * &q[j] == &p[j] * &q[i])
    })
}

pub fn format_point(p: &ProjPoint) -> String {
    format!(
        "({}:{}:{})",
        format_rational(&p[0]),
        format_rational(&p[1]),
        format_rational(&p[2])
    )
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix3(pub [[Rational; 3]; 3]);

/// Elementary row operation used to factor an invertible matrix.
#[derive(Clone, Debug)]
pub(crate) enum Elementary {
    Swap(usize, usize),
    Scale(usize, Rational),
    /// Row `target` gets `factor` times row `source` added.
    Shear {
        target: usize,
        source: usize,
        factor: Rational,
    },
}

impl Matrix3 {
    pub fn identity() -> Self {
        Matrix3(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { Rational::one() } else { Rational::zero() })
        }))
    }

    pub fn from_columns(cols: [&ProjPoint; 3]) -> Self {
        Matrix3(std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone())))
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.0[i][j]
    }

    pub fn det(&self) -> Rational {
        let m = &self.0;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    /// Classical adjugate: `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
        };
        let minor = |i: usize, j: usize| {
            let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let v = cof(rows[0], rows[1], cols[0], cols[1]);
            if (i + j).is_multiple_of(2) {
                v
            } else {
                -v
            }
        };
        // adj = transpose of the cofactor matrix
        Matrix3(std::array::from_fn(|i| std::array::from_fn(|j| minor(j, i))))
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let adj = self.adjugate();
        Some(Matrix3(std::array::from_fn(|i| {
            std::array::from_fn(|j| &adj.0[i][j] / &d)
        })))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Matrix3(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..3).fold(Rational::zero(), |acc, k| acc + &self.0[i][k] * &other.0[k][j])
            })
        }))
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        std::array::from_fn(|i| {
            (0..3).fold(Rational::zero(), |acc, k| acc + &self.0[i][k] * &p[k])
        })
    }

    /// Multiplies by a nonzero scalar so the entries are coprime integers and
    /// the first nonzero entry (row-major) is positive.
    pub fn normalized(&self) -> Self {
        let flat: Vec<Rational> = self.0.iter().flatten().cloned().collect();
        let scale = super::homog::primitive_scale(flat.iter());
        Matrix3(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.0[i][j] * &scale)
        }))
    }

    /// Factors `self = E_1 E_2 ... E_k` into elementary matrices, returned in
    /// application order for substitution `p(M x) = (((p ∘ E_1) ∘ E_2) ...)`.
    pub(crate) fn elementary_factors(&self) -> Option<Vec<Elementary>> {
        let mut m = self.0.clone();
        let mut ops = Vec::new();
        // Row-reduce to the identity, recording inverses of each row operation.
        for col in 0..3 {
            let pivot = (col..3).find(|&r| !m[r][col].is_zero())?;
            if pivot != col {
                m.swap(pivot, col);
                ops.push(Elementary::Swap(pivot, col));
            }
            let p = m[col][col].clone();
            if !p.is_one() {
                for c in 0..3 {
                    m[col][c] = &m[col][c] / &p;
                }
                ops.push(Elementary::Scale(col, p));
            }
            for r in 0..3 {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..3 {
                        let v = &m[col][c] * &f;
                        m[r][c] = &m[r][c] - v;
                    }
                    ops.push(Elementary::Shear {
                        target: r,
                        source: col,
                        factor: f,
                    });
                }
            }
        }
        // R_k ... R_1 M = I, so M = R_1^{-1} ... R_k^{-1}; the recorded data
        // already describe the inverses (swap is self-inverse, scale by p undoes
        // division by p, shear by +f undoes subtraction of f).
        Some(ops)
    }
}
