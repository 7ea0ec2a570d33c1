//! Rebuilds the reference per-language result rows from integer counts.
//!
//! Each row gives change rate, precision and gain-risk over 341 cases. The
//! first two pin down (interventions, improvements). No error count in range
//! then reproduces the gain-risk, so every row is reported inconsistent.

use umf_core::metrics::{
    change_rate_from_counts, gain_risk, intervention_precision, GainRisk, MetricsReport, ReportCounts,
};

const TOTAL: usize = 341;

/// (language, change rate, precision, gain-risk), in hundredths.
const ROWS: [(&str, u64, u64, u64); 9] = [
    ("Sinhala", 4516, 2662, 20),
    ("Tamil", 2669, 2967, 16),
    ("Thai", 440, 2000, 2),
    ("Chinese", 323, 10000, 183),
    ("Hindi", 1554, 8491, 214),
    ("Japanese", 733, 7600, 90),
    ("Arabic", 1144, 7949, 100),
    ("French", 909, 8065, 109),
    ("Swahili", 968, 4848, 19),
];

/// `num/den` as a percentage in hundredths, rounded half up, integers only.
fn pct_hundredths(num: u64, den: u64) -> u64 {
    (num * 20_000 + den) / (2 * den)
}

/// `num/den` in hundredths, rounded half up.
fn ratio_hundredths(num: u64, den: u64) -> u64 {
    (num * 200 + den) / (2 * den)
}

fn hundredths(v: f64) -> u64 {
    format!("{v:.2}").replace('.', "").parse().unwrap()
}

#[test]
fn change_rate_and_precision_have_unique_decompositions() {
    let expected = [
        (154, 41),
        (91, 27),
        (15, 3),
        (11, 11),
        (53, 45),
        (25, 19),
        (39, 31),
        (31, 25),
        (33, 16),
    ];
    for ((name, cr, prec, _), want) in ROWS.iter().zip(expected) {
        let mut found = Vec::new();
        for c in 1..=TOTAL as u64 {
            if pct_hundredths(c, TOTAL as u64) != *cr {
                continue;
            }
            for i in 0..=c {
                if pct_hundredths(i, c) == *prec {
                    found.push((c as usize, i as usize));
                }
            }
        }
        assert_eq!(found, [want], "{name}");
        // The library formulas agree with the integer oracle.
        let (c, i) = want;
        assert_eq!(hundredths(change_rate_from_counts(c, TOTAL).unwrap()), *cr, "{name}");
        assert_eq!(hundredths(intervention_precision(i, c).unwrap()), *prec, "{name}");
    }
}

#[test]
fn no_row_is_consistent_with_its_gain_risk() {
    for (name, cr, prec, gr) in ROWS {
        let mut consistent = Vec::new();
        for c in 1..=TOTAL as u64 {
            if pct_hundredths(c, TOTAL as u64) != cr {
                continue;
            }
            for i in 0..=c {
                if pct_hundredths(i, c) != prec {
                    continue;
                }
                for e in 1..=(c - i) {
                    if ratio_hundredths(i, e) == gr {
                        consistent.push((c, i, e));
                    }
                }
            }
        }
        assert!(consistent.is_empty(), "{name}: {consistent:?}");
    }
}

#[test]
fn hindi_row_reproduces_and_is_flagged() {
    // 45 / 21 = 2.14 needs 21 errors, but only 8 non-improvements exist.
    let report = MetricsReport::from_counts(ReportCounts {
        total_cases: TOTAL,
        interventions: 53,
        judged: 53,
        improvements: 45,
        neutrals: 0,
        errors: 21,
    })
    .unwrap();
    assert_eq!(format!("{:.2}", report.change_rate), "15.54");
    assert_eq!(format!("{:.2}", report.intervention_precision.unwrap()), "84.91");
    assert_eq!(report.gain_risk.unwrap().to_string(), "2.14");
    assert!(!report.is_consistent());
    assert_eq!(gain_risk(45, 8, 53).unwrap(), GainRisk::Finite(45.0 / 8.0));
}
