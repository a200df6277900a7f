use proptest::prelude::*;
use prosody_core::timing::{
    canberra, manhattan, npvi, pvi_report, rpvi, wagner_scatter, DurationVector,
};

fn dv(v: &[f64]) -> DurationVector {
    DurationVector::new("t", v.to_vec())
}

/// Direct evaluation of the PVI sums, written independently of the library.
fn oracle_rpvi(d: &[f64]) -> f64 {
    let n = d.len() as f64;
    (0..d.len() - 1)
        .map(|k| (d[k] - d[k + 1]).abs())
        .sum::<f64>()
        / (n - 1.0)
}

fn oracle_npvi(d: &[f64]) -> f64 {
    let n = d.len() as f64;
    100.0
        * (0..d.len() - 1)
            .map(|k| ((d[k] - d[k + 1]) / ((d[k] + d[k + 1]) / 2.0)).abs())
            .sum::<f64>()
        / (n - 1.0)
}

#[test]
fn alternating_and_geometric_series() {
    let alt = dv(&[2.0, 4.0, 2.0, 4.0, 2.0, 4.0]);
    let geo = dv(&[2.0, 4.0, 8.0, 16.0, 32.0, 64.0]);
    let lin = dv(&[2.0, 4.0, 6.0, 8.0, 10.0, 12.0]);
    assert!((npvi(&alt).unwrap() - 66.67).abs() < 0.01);
    assert!((npvi(&geo).unwrap() - 66.67).abs() < 0.01);
    assert_eq!(rpvi(&alt).unwrap(), 2.0);
    assert_eq!(rpvi(&lin).unwrap(), rpvi(&alt).unwrap());
}

#[test]
fn errors() {
    assert_eq!(rpvi(&dv(&[1.0])).unwrap_err().name(), "TooShort");
    assert_eq!(npvi(&dv(&[])).unwrap_err().name(), "TooShort");
    assert_eq!(
        npvi(&dv(&[1.0, 0.0])).unwrap_err().name(),
        "NonPositiveDuration"
    );
    assert_eq!(
        wagner_scatter(&dv(&[1.0, 2.0])).unwrap_err().name(),
        "TooShort"
    );
    assert_eq!(
        wagner_scatter(&dv(&[1.0, 1.0, 1.0])).unwrap_err().name(),
        "ZeroVariance"
    );
    assert_eq!(
        manhattan(&[1.0], &[1.0, 2.0]).unwrap_err().name(),
        "LengthMismatch"
    );
}

#[test]
fn report_carries_tempo() {
    let r = pvi_report(&dv(&[0.161; 10])).unwrap();
    assert!((r.rate_per_s - 6.21).abs() < 0.005);
    assert_eq!(r.n, 10);
    assert_eq!(r.rpvi, 0.0);
}

#[test]
fn scatter_is_z_scored() {
    let s = wagner_scatter(&dv(&[0.1, 0.3, 0.2, 0.5, 0.15])).unwrap();
    assert_eq!(s.pairs.len(), 4);
    let xs: Vec<f64> = s.pairs.iter().map(|p| p.0).collect();
    let q = s.quadrants;
    assert_eq!(
        q.upper_left + q.upper_right + q.lower_left + q.lower_right + q.on_axis,
        4
    );
    // the pairs chain: y of one pair is x of the next
    for w in s.pairs.windows(2) {
        assert_eq!(w[0].1, w[1].0);
    }
    assert!(xs.iter().all(|x| x.abs() < 3.0));
}

fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..10.0, 2..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn npvi_is_bounded(d in positive_vec()) {
        let v = npvi(&dv(&d)).unwrap();
        prop_assert!((0.0..200.0).contains(&v), "{}", v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn pvi_matches_distance_forms(d in positive_vec()) {
        let n = d.len() as f64;
        let (p, q) = (&d[..d.len() - 1], &d[1..]);
        let r = rpvi(&dv(&d)).unwrap();
        prop_assert!((r - manhattan(p, q).unwrap() / (n - 1.0)).abs() < 1e-12);
        prop_assert!((r - oracle_rpvi(&d)).abs() < 1e-12);
        let nv = npvi(&dv(&d)).unwrap();
        prop_assert!((nv - 200.0 * canberra(p, q).unwrap() / (n - 1.0)).abs() < 1e-9);
        prop_assert!((nv - oracle_npvi(&d)).abs() < 1e-9);
    }

    #[test]
    fn npvi_is_scale_invariant(d in positive_vec(), c in 1e-2f64..1e3) {
        let scaled: Vec<f64> = d.iter().map(|x| x * c).collect();
        let a = npvi(&dv(&d)).unwrap();
        let b = npvi(&dv(&scaled)).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
        let ra = rpvi(&dv(&d)).unwrap() * c;
        let rb = rpvi(&dv(&scaled)).unwrap();
        prop_assert!((ra - rb).abs() < 1e-9 * ra.max(1.0));
    }

    #[test]
    fn isochrony_gives_zero(x in 1e-3f64..10.0, n in 2usize..30) {
        let d = vec![x; n];
        prop_assert_eq!(npvi(&dv(&d)).unwrap(), 0.0);
        prop_assert_eq!(rpvi(&dv(&d)).unwrap(), 0.0);
    }
}
