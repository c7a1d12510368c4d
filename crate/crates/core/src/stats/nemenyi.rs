use super::ResultMatrix;
use crate::error::{Error, Result};

// Critical values q_alpha = studentized range quantile (infinite df) / sqrt(2),
// indexed by k - 2 for k = 2..=10.
const Q_10: [f64; 9] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920,
];
const Q_05: [f64; 9] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
];
const Q_01: [f64; 9] = [
    2.576, 2.913, 3.113, 3.255, 3.364, 3.452, 3.526, 3.590, 3.646,
];

/// Two-tailed Nemenyi critical value for `k` systems at `alpha` (0.10, 0.05 or 0.01).
pub fn nemenyi_q(alpha: f64, k: usize) -> Result<f64> {
    let table = if alpha == 0.05 {
        &Q_05
    } else if alpha == 0.01 {
        &Q_01
    } else if alpha == 0.10 {
        &Q_10
    } else {
        return Err(Error::InvalidParam {
            name: "alpha_level",
            reason: format!("{alpha} not tabulated; use 0.10, 0.05 or 0.01"),
        });
    };
    if !(2..=10).contains(&k) {
        return Err(Error::InvalidParam {
            name: "k",
            reason: format!("{k} systems; the table covers 2..=10"),
        });
    }
    Ok(table[k - 2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseDecision {
    pub a: usize,
    pub b: usize,
    /// Mean rank of `a` minus mean rank of `b` (negative: `a` ranks better).
    pub mean_rank_difference: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NemenyiResult {
    pub critical_difference: f64,
    pub q: f64,
    pub mean_ranks: Vec<f64>,
    pub pairs: Vec<PairwiseDecision>,
}

/// Nemenyi post-hoc test: a pair differs when its mean ranks are at least
/// `CD = q * sqrt(k (k+1) / (6 N))` apart. Computed whether or not the Friedman
/// test rejected; checking that is the caller's call.
pub fn nemenyi(matrix: &ResultMatrix, alpha_level: f64) -> Result<NemenyiResult> {
    matrix.check_shape()?;
    let k = matrix.k();
    let n = matrix.blocks() as f64;
    let q = nemenyi_q(alpha_level, k)?;
    let kf = k as f64;
    let critical_difference = q * (kf * (kf + 1.0) / (6.0 * n)).sqrt();
    let mean_ranks = matrix.mean_ranks();
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            let d = mean_ranks[a] - mean_ranks[b];
            pairs.push(PairwiseDecision {
                a,
                b,
                mean_rank_difference: d,
                significant: d.abs() >= critical_difference,
            });
        }
    }
    Ok(NemenyiResult {
        critical_difference,
        q,
        mean_ranks,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dominant(n: usize) -> ResultMatrix {
        ResultMatrix::from_rows((0..n).map(|_| vec![0.9, 0.5, 0.1]).collect()).unwrap()
    }

    #[test]
    fn dominant_system_is_flagged() {
        let r = nemenyi(&dominant(20), 0.05).unwrap();
        // 2.343 * sqrt(12 / 120)
        assert!((r.critical_difference - 2.343 * 0.1f64.sqrt()).abs() < 1e-12);
        let by_pair = |a, b| r.pairs.iter().find(|p| p.a == a && p.b == b).unwrap();
        assert!(by_pair(0, 1).significant);
        assert!(by_pair(0, 2).significant);
        assert_eq!(by_pair(0, 2).mean_rank_difference, -2.0);
    }

    #[test]
    fn all_equal_flags_nothing() {
        let m = ResultMatrix::from_rows(vec![vec![0.3; 4]; 10]).unwrap();
        let r = nemenyi(&m, 0.05).unwrap();
        assert!(r.pairs.iter().all(|p| !p.significant));
        assert_eq!(r.pairs.len(), 6);
    }

    #[test]
    fn doubling_blocks_shrinks_cd_by_sqrt2() {
        let a = nemenyi(&dominant(10), 0.05).unwrap().critical_difference;
        let b = nemenyi(&dominant(20), 0.05).unwrap().critical_difference;
        assert!((a / b - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn table_bounds() {
        assert!(nemenyi_q(0.05, 1).is_err());
        assert!(nemenyi_q(0.05, 11).is_err());
        assert!(nemenyi_q(0.2, 3).is_err());
        assert_eq!(nemenyi_q(0.05, 2).unwrap(), 1.960);
        assert_eq!(nemenyi_q(0.01, 2).unwrap(), 2.576);
    }
}
