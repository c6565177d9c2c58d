//! Exact Gaussian elimination over the scalar fields (Q and F_p).
//!
//! Used for unit decisions in finite-dimensional quotients and for the
//! minimal-polynomial searches in standard presentations. Localised-integer
//! problems are solved over Q and membership-checked by the caller.

use crate::scalar::{self, Scalar, ScalarRing};

/// Solve `A x = b` where `A` is given by columns, over a scalar field.
/// Returns one solution (free coordinates set to zero), or None if
/// inconsistent. Panics if the scalar ring is not a field.
pub fn solve(field: &ScalarRing, columns: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    assert!(field.is_field(), "linear solving requires a field");
    let ncols = columns.len();
    let nrows = target.len();
    for c in columns {
        assert_eq!(c.len(), nrows, "ragged column");
    }

    // augmented matrix, row-major
    let mut m: Vec<Vec<Scalar>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<Scalar> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = scalar::invert(field, &m[row][col]).expect("nonzero field element");
        for j in col..=ncols {
            m[row][j] = scalar::mul(field, &m[row][j], &inv);
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..=ncols {
                    let delta = scalar::mul(field, &factor, &m[row][j]);
                    m[r][j] = scalar::sub(field, &m[r][j], &delta);
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == nrows {
            break;
        }
    }

    // inconsistent if a zero row has nonzero rhs
    for r in 0..nrows {
        if m[r][..ncols].iter().all(|x| x.is_zero()) && !m[r][ncols].is_zero() {
            return None;
        }
    }

    let mut x = vec![scalar::zero(field); ncols];
    for col in 0..ncols {
        if let Some(r) = pivot_of_col[col] {
            x[col] = m[r][ncols].clone();
        }
    }
    Some(x)
}

/// True iff `target` lies in the span of `columns`.
pub fn in_span(field: &ScalarRing, columns: &[Vec<Scalar>], target: &[Scalar]) -> bool {
    solve(field, columns, target).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ScalarRing {
        ScalarRing::Rationals
    }

    fn int(n: i64) -> Scalar {
        Scalar::from_int(&ScalarRing::Rationals, n)
    }

    #[test]
    fn solves_square_system() {
        // x + 2y = 5, 3x + 4y = 11  =>  x = 1, y = 2
        let cols = vec![vec![int(1), int(3)], vec![int(2), int(4)]];
        let sol = solve(&q(), &cols, &[int(5), int(11)]).unwrap();
        assert_eq!(sol, vec![int(1), int(2)]);
    }

    #[test]
    fn detects_inconsistency() {
        let cols = vec![vec![int(1), int(2)]];
        assert!(solve(&q(), &cols, &[int(1), int(3)]).is_none());
    }

    #[test]
    fn mod_p_system() {
        let f5 = ScalarRing::PrimeField { p: 5 };
        let two = Scalar::from_int(&f5, 2);
        let three = Scalar::from_int(&f5, 3);
        // 2x = 3 mod 5 => x = 4
        let sol = solve(&f5, &[vec![two]], &[three]).unwrap();
        assert_eq!(sol, vec![Scalar::from_int(&f5, 4)]);
    }

    #[test]
    fn span_membership() {
        let cols = vec![vec![int(1), int(0)], vec![int(1), int(1)]];
        assert!(in_span(&q(), &cols, &[int(3), int(2)]));
        let cols2 = vec![vec![int(1), int(0)]];
        assert!(!in_span(&q(), &cols2, &[int(0), int(1)]));
    }
}
