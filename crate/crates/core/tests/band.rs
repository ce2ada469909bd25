use proptest::prelude::*;
use uwcap::{assign_band, band_populations, make_plan, ChannelParams, DistanceKm};

proptest! {
    #[test]
    fn longer_links_never_move_up_in_frequency(l1 in 0.1f64..100.0, l2 in 0.1f64..100.0, df in 0.5f64..20.0) {
        let p = ChannelParams::default();
        let plan = make_plan(p.f_lo, p.f_hi, df).unwrap();
        let (short, long) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let a = assign_band(DistanceKm::new(short).unwrap(), &plan, &p);
        let b = assign_band(DistanceKm::new(long).unwrap(), &plan, &p);
        prop_assert!(b.index <= a.index);
    }
}

#[test]
fn populations_sum_to_link_count() {
    let p = ChannelParams::default();
    let plan = make_plan(p.f_lo, p.f_hi, 5.0).unwrap();
    let ls: Vec<f64> = (1..=200).map(|i| i as f64 * 0.5).collect();
    let counts = band_populations(&ls, &plan, &p).unwrap();
    assert_eq!(counts.iter().sum::<usize>(), ls.len());
}
