use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::ResultMatrix;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub df: usize,
    /// Upper tail of the chi-square approximation.
    pub p_value: f64,
    pub mean_ranks: Vec<f64>,
}

/// Friedman test over the systems (columns) of `matrix`, blocked by rows.
///
/// `chi2 = 12 / (N k (k+1)) * sum_j R_j^2 - 3 N (k+1)` with `R_j` the rank sum of
/// system `j` (average ranks on ties, no tie correction). Rank sums are
/// multiples of one half, so the numerator below is exact and the statistic is
/// a single correctly rounded division.
pub fn friedman(matrix: &ResultMatrix) -> Result<FriedmanResult> {
    matrix.check_shape()?;
    let n = matrix.blocks() as f64;
    let k = matrix.k() as f64;
    let sums = matrix.rank_sums();
    let sum_sq: f64 = sums.iter().map(|r| r * r).sum();
    let numerator = 12.0 * sum_sq - 3.0 * n * n * k * (k + 1.0) * (k + 1.0);
    let statistic = (numerator / (n * k * (k + 1.0))).max(0.0);
    let df = matrix.k() - 1;
    let p_value = chi_square_sf(statistic, df as f64);
    Ok(FriedmanResult {
        statistic,
        df,
        p_value,
        mean_ranks: sums.into_iter().map(|s| s / n).collect(),
    })
}

pub(crate) fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominant_system_closed_form() {
        let rows = (0..20)
            .map(|i| vec![0.9 + i as f64 * 1e-3, 0.5, 0.1])
            .collect();
        let r = friedman(&ResultMatrix::from_rows(rows).unwrap()).unwrap();
        assert_eq!(r.statistic, 40.0);
        assert_eq!(r.df, 2);
        // df = 2: survival is exp(-x/2).
        assert!((r.p_value - (-20.0f64).exp()).abs() < 1e-15);
        assert_eq!(r.mean_ranks, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn constant_rows_give_zero() {
        let rows = vec![vec![0.5; 3]; 6];
        let r = friedman(&ResultMatrix::from_rows(rows).unwrap()).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn column_permutation_invariant() {
        let rows = vec![
            vec![0.1, 0.5, 0.3],
            vec![0.9, 0.2, 0.2],
            vec![0.4, 0.6, 0.8],
            vec![0.3, 0.3, 0.1],
        ];
        let permuted: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[2], r[0], r[1]]).collect();
        let a = friedman(&ResultMatrix::from_rows(rows).unwrap()).unwrap();
        let b = friedman(&ResultMatrix::from_rows(permuted).unwrap()).unwrap();
        assert_eq!(a.statistic, b.statistic);
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn textbook_example() {
        // Descending ranks per row: 3/1/2, 2/3/1, 1/2/3, 1/3/2 -> rank sums 7, 9, 8.
        let rows = vec![
            vec![7.0, 9.0, 8.0],
            vec![6.0, 5.0, 7.0],
            vec![9.0, 7.0, 6.0],
            vec![8.0, 5.0, 6.0],
        ];
        let r = friedman(&ResultMatrix::from_rows(rows).unwrap()).unwrap();
        // 12/(4*3*4) * (49 + 81 + 64) - 3*4*4 = 48.5 - 48 = 0.5
        assert!((r.statistic - 0.5).abs() < 1e-12);
    }
}
