//! The Svetlichny functional and the per-setting correlator bounds behind
//! the relaxed inequalities.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{
    c_range, correlator_from_marginals, correlator_unchecked, reconstruct_joint, validate_behavior, Behavior,
    JointProfile, SettingLabel,
};
use crate::scalar::{int, max_of, min_of, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvetlichnyTerms<T> {
    /// Sign of each correlator, indexed by label row.
    pub coefficients: [i64; 8],
    /// Hidden-variable averaged correlator at each setting.
    pub values: [T; 8],
    pub total: T,
}

pub fn svetlichny_terms<T: Scalar>(b: &Behavior<T>) -> Result<SvetlichnyTerms<T>, ModelError> {
    validate_behavior(b)?;
    let coefficients = SettingLabel::ALL.map(SettingLabel::svetlichny_sign);
    let mut values = Vec::with_capacity(8);
    for label in SettingLabel::ALL {
        values.push(correlator_unchecked(b, label)?);
    }
    let values: [T; 8] = values.try_into().expect("8 settings");
    let total = signed_sum(&values);
    Ok(SvetlichnyTerms {
        coefficients,
        values,
        total,
    })
}

/// `S = sum_{1..6} <X1X2X3> - <X1X2X3>_7 - <X1X2X3>_8`.
pub fn svetlichny_value<T: Scalar>(b: &Behavior<T>) -> Result<T, ModelError> {
    Ok(svetlichny_terms(b)?.total)
}

fn signed_sum<T: Scalar>(values: &[T; 8]) -> T {
    SettingLabel::ALL.iter().zip(values).fold(T::zero(), |acc, (label, v)| {
        if label.svetlichny_sign() > 0 {
            acc + v.clone()
        } else {
            acc - v.clone()
        }
    })
}

/// Nested absolute-value form of the lowest and highest correlator reachable
/// by varying `c` with the six marginals fixed.
pub fn correlator_bounds<T: Scalar>(m: &[T; 6]) -> Result<(T, T), ModelError> {
    c_range(m)?;
    Ok((lower_literal(m), upper_literal(m)))
}

/// Correlator at the two ends of the `c` range.
pub fn correlator_bounds_by_range<T: Scalar>(m: &[T; 6]) -> Result<(T, T), ModelError> {
    let (lo, hi) = c_range(m)?;
    Ok((correlator_from_marginals(&lo, m), correlator_from_marginals(&hi, m)))
}

fn upper_literal<T: Scalar>(m: &[T; 6]) -> T {
    T::one() - int::<T>(2) * upper_penalty_literal(m)
}

fn lower_literal<T: Scalar>(m: &[T; 6]) -> T {
    -T::one() + int::<T>(2) * lower_penalty_literal(m)
}

/// `U` in `<X1X2X3> <= 1 - 2U`.
pub fn upper_penalty_literal<T: Scalar>(m: &[T; 6]) -> T {
    let [m1, m2, m3, m4, m5, m6] = m.clone();
    let a = (m1.clone() - m2.clone()).abs();
    let d = (T::one() + m1 + m2 - m4.clone() - m5.clone() - m6.clone()).abs();
    let e = (m4 + m5 + m6 - int::<T>(2) * m3 - T::one() - a.clone() + d.clone()).abs();
    a + d + e
}

/// `L` in `<X1X2X3> >= -1 + 2L`.
pub fn lower_penalty_literal<T: Scalar>(m: &[T; 6]) -> T {
    let [m1, m2, m3, m4, m5, m6] = m.clone();
    let a = (m2.clone() + m3.clone() - m4.clone()).abs();
    let b = (m2 + m6.clone() - m3 - m5.clone()).abs();
    let e = (m5 + m6 - m4 - int::<T>(2) * m1 + a.clone() - b.clone()).abs();
    a + b + e
}

fn pair_sum<T: Scalar>(m: &[T; 6]) -> T {
    m[0].clone() + m[1].clone() + m[2].clone()
}

fn single_sum<T: Scalar>(m: &[T; 6]) -> T {
    m[3].clone() + m[4].clone() + m[5].clone()
}

/// `U` written as `1 - sum(singles) + 2 sum(pairs) - 4 c_hi`.
///
/// Agrees with [`upper_penalty_literal`] whenever the `c` range is nonempty
/// and is concave in `m`, so `-U` can be handled by linear programming.
pub fn upper_penalty<T: Scalar>(m: &[T; 6]) -> T {
    let [m1, m2, m3, m4, m5, m6] = m.clone();
    let d = T::one() - m4 - m5 - m6 + m1.clone() + m2.clone() + m3.clone();
    let hi = min_of([m1, m2, m3, d]).expect("nonempty");
    T::one() - single_sum(m) + int::<T>(2) * pair_sum(m) - int::<T>(4) * hi
}

/// `L` written as `4 c_lo + sum(singles) - 2 sum(pairs)`.
pub fn lower_penalty<T: Scalar>(m: &[T; 6]) -> T {
    let [m1, m2, m3, m4, m5, m6] = m.clone();
    let lo = max_of([
        T::zero(),
        m2.clone() + m3.clone() - m4,
        m1.clone() + m2 - m5,
        m1 + m3 - m6,
    ])
    .expect("nonempty");
    int::<T>(4) * lo + single_sum(m) - int::<T>(2) * pair_sum(m)
}

/// Marginal values `m[i][j]`: marginal `j` (m1..m6) at setting label row `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentMatrix<T> {
    pub m: [[T; 6]; 8],
}

impl<T: Scalar> AssignmentMatrix<T> {
    pub fn new(m: [[T; 6]; 8]) -> Self {
        Self { m }
    }

    pub fn zeros() -> Self {
        Self::from_fn(|_, _| T::zero())
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn row(&self, label: SettingLabel) -> &[T; 6] {
        &self.m[label.row()]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> AssignmentMatrix<U> {
        AssignmentMatrix::from_fn(|i, j| f(&self.m[i][j]))
    }

    pub fn in_unit_interval(&self) -> bool {
        self.m.iter().flatten().all(|v| *v >= T::zero() && *v <= T::one())
    }
}

/// `E_lambda` for one hidden-variable value given by its marginals and the
/// eight `c` values.
pub fn e_lambda<T: Scalar>(assign: &AssignmentMatrix<T>, c: &[T; 8]) -> Result<T, ModelError> {
    let mut values = Vec::with_capacity(8);
    for (row, ci) in assign.m.iter().zip(c) {
        let profile = JointProfile::new(ci.clone(), row.clone());
        values.push(reconstruct_joint(&profile)?.correlator());
    }
    Ok(signed_sum(&values.try_into().expect("8 settings")))
}

/// The penalty `J` with `E_lambda <= 8 - 2J`, evaluated literally.
pub fn j_functional<T: Scalar>(assign: &AssignmentMatrix<T>) -> T {
    SettingLabel::ALL.iter().fold(T::zero(), |acc, label| {
        let row = assign.row(*label);
        if label.svetlichny_sign() > 0 {
            acc + upper_penalty_literal(row)
        } else {
            acc + lower_penalty_literal(row)
        }
    })
}

/// Per-setting contributions to [`j_functional`], indexed by label row.
pub fn j_terms<T: Scalar>(assign: &AssignmentMatrix<T>) -> [T; 8] {
    SettingLabel::ALL.map(|label| {
        let row = assign.row(label);
        if label.svetlichny_sign() > 0 {
            upper_penalty_literal(row)
        } else {
            lower_penalty_literal(row)
        }
    })
}
