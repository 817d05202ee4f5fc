//! Closed-form signalling cost of each protocol: channel gains that must be
//! known (CSI) and SNR comparisons made per route decision.

use serde::Serialize;

use crate::{Error, Result};

/// Rows of the complexity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableProtocol {
    Optimal,
    Ap1,
    FbAp1,
    Ap2,
    FbAp2,
    ApN,
    FbApN,
    Dpp,
    FbDpp,
}

impl TableProtocol {
    pub const ALL: [TableProtocol; 9] = [
        TableProtocol::Optimal,
        TableProtocol::Ap1,
        TableProtocol::FbAp1,
        TableProtocol::Ap2,
        TableProtocol::FbAp2,
        TableProtocol::ApN,
        TableProtocol::FbApN,
        TableProtocol::Dpp,
        TableProtocol::FbDpp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TableProtocol::Optimal => "Optimal",
            TableProtocol::Ap1 => "AP-1",
            TableProtocol::FbAp1 => "FBAP-1",
            TableProtocol::Ap2 => "AP-2",
            TableProtocol::FbAp2 => "FBAP-2",
            TableProtocol::ApN => "AP-n",
            TableProtocol::FbApN => "FBAP-n",
            TableProtocol::Dpp => "DPP",
            TableProtocol::FbDpp => "FBDPP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub protocol: TableProtocol,
    /// Hop window, for the AP-n rows only.
    pub n: Option<usize>,
    pub n_csi: f64,
    /// Expected value for the DPP rows, which depend on `p_c`.
    pub n_comparisons: f64,
    pub p_c: f64,
}

/// Evaluate every row of the complexity table for `N` hops, `L` relays per
/// cluster and AP-n window `n`. DPP rows use the merge probability
/// `p_c = 1/L²`.
pub fn complexity_table(hops: usize, relays: usize, n: usize) -> Result<Vec<ComplexityReport>> {
    if hops < 2 {
        return Err(Error::domain(format!("complexity table needs N >= 2, got {hops}")));
    }
    if relays < 1 {
        return Err(Error::domain("complexity table needs L >= 1"));
    }
    if n < 1 || n > hops {
        return Err(Error::domain(format!("complexity table needs 1 <= n <= N, got n = {n}")));
    }
    let big_n = hops as f64;
    let l = relays as f64;
    let nn = n as f64;
    let p_c = 1.0 / (l * l);

    let apn_cmp = (l - 1.0) * (big_n - nn) + (2.0 * l - 1.0) * (l * (nn - 2.0) + 1.0);
    let dpp_cmp = (l + 1.0) + (big_n - 2.0) * (2.0 * (l - 1.0) + p_c * (l - 2.0));

    let row = |protocol, csi: f64, cmp: f64| ComplexityReport {
        protocol,
        n: matches!(protocol, TableProtocol::ApN | TableProtocol::FbApN).then_some(n),
        n_csi: csi,
        n_comparisons: cmp,
        p_c,
    };
    Ok(vec![
        row(
            TableProtocol::Optimal,
            l * l * (big_n - 2.0) + 2.0 * l,
            2.0 * l * l * (big_n - 2.0) - l * (big_n - 4.0) - 1.0,
        ),
        row(TableProtocol::Ap1, l * (big_n - 1.0), (l - 1.0) * (big_n - 1.0)),
        row(
            TableProtocol::FbAp1,
            (2.0 * l - 1.0) * (big_n - 1.0) + l,
            2.0 * (l - 1.0) * (big_n - 1.0) + 1.0,
        ),
        row(TableProtocol::Ap2, l * big_n, big_n * (l - 1.0) + 1.0),
        row(
            TableProtocol::FbAp2,
            l * big_n + (l - 1.0) * (big_n - 1.0),
            2.0 * (big_n * (l - 1.0) + 1.0) + 1.0,
        ),
        row(TableProtocol::ApN, l * (big_n - nn) + 2.0 * l + (nn - 2.0) * l * l, apn_cmp),
        row(
            TableProtocol::FbApN,
            2.0 * l * l * (nn - 2.0) + (2.0 * l - 1.0) * (big_n - 2.0 * nn + 3.0) + 1.0,
            2.0 * apn_cmp + 1.0,
        ),
        row(TableProtocol::Dpp, l * (2.0 * big_n - 1.0) + 2.0, dpp_cmp),
        row(
            TableProtocol::FbDpp,
            l * big_n + 2.0 * ((big_n - 1.0) * (l - 1.0) + 1.0),
            2.0 * dpp_cmp + 1.0,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(rows: &[ComplexityReport], p: TableProtocol) -> &ComplexityReport {
        rows.iter().find(|r| r.protocol == p).unwrap()
    }

    #[test]
    fn spot_values() {
        let t = complexity_table(6, 7, 2).unwrap();
        assert_eq!(get(&t, TableProtocol::Optimal).n_csi, 210.0);

        let t = complexity_table(6, 4, 4).unwrap();
        assert_eq!(get(&t, TableProtocol::ApN).n_csi, 48.0);
        assert_eq!(get(&t, TableProtocol::ApN).n_comparisons, 69.0);
        assert_eq!(get(&t, TableProtocol::FbAp2).n_comparisons, 39.0);
    }

    #[test]
    fn ap_n_rows_reduce_to_ap2_at_n_two() {
        for hops in 2..9 {
            for l in 1..8 {
                let t = complexity_table(hops, l, 2).unwrap();
                let ap2 = get(&t, TableProtocol::Ap2);
                let apn = get(&t, TableProtocol::ApN);
                assert_eq!(ap2.n_csi, apn.n_csi);
                assert_eq!(ap2.n_comparisons, apn.n_comparisons);
                assert_eq!(apn.n, Some(2));
            }
        }
    }

    #[test]
    fn ap_n_at_full_window_matches_optimal_csi() {
        for hops in 2..9 {
            for l in 1..8 {
                let t = complexity_table(hops, l, hops).unwrap();
                assert_eq!(get(&t, TableProtocol::ApN).n_csi, get(&t, TableProtocol::Optimal).n_csi);
            }
        }
    }

    #[test]
    fn dpp_rows_use_inverse_square_merge_probability() {
        let t = complexity_table(5, 3, 2).unwrap();
        let dpp = get(&t, TableProtocol::Dpp);
        assert_eq!(dpp.p_c, 1.0 / 9.0);
        assert!((dpp.n_comparisons - (4.0 + 3.0 * (4.0 + 1.0 / 9.0))).abs() < 1e-12);
        assert_eq!(dpp.n_csi, 3.0 * 9.0 + 2.0);
        let fb = get(&t, TableProtocol::FbDpp);
        assert_eq!(fb.n_comparisons, 2.0 * dpp.n_comparisons + 1.0);
        assert_eq!(fb.n_csi, 15.0 + 2.0 * (4.0 * 2.0 + 1.0));
    }

    #[test]
    fn every_row_present_once() {
        let t = complexity_table(4, 2, 3).unwrap();
        assert_eq!(t.len(), TableProtocol::ALL.len());
        for (row, p) in t.iter().zip(TableProtocol::ALL) {
            assert_eq!(row.protocol, p);
        }
    }

    #[test]
    fn range_errors() {
        assert!(complexity_table(1, 2, 1).is_err());
        assert!(complexity_table(4, 0, 1).is_err());
        assert!(complexity_table(4, 2, 0).is_err());
        assert!(complexity_table(4, 2, 5).is_err());
    }
}
