use uwcap::netsim::{
    all_feasible, deploy, direct_flows, greedy_schedule, measure_transport, verify_sum_inequality,
    DeployMode, Medium,
};
use uwcap::{bound_fixed_narrowband, NarrowbandScenario};

#[test]
fn greedy_transport_stays_under_bound() {
    for mode in [
        DeployMode::UniformRandom,
        DeployMode::Grid,
        DeployMode::AdversarialLine,
    ] {
        for a_f in [1.0, 10.0, 1e3] {
            for (seed, n) in [(1u64, 6usize), (2, 17), (3, 40), (4, 90)] {
                let (alpha, beta, w) = (1.5, 2.0, 1.0);
                let medium = Medium::narrowband(alpha, a_f, 1.0).unwrap();
                let d = deploy(n, mode, seed).unwrap();
                let schedule = greedy_schedule(&d, &medium, beta, 0, 8);
                for s in &schedule {
                    assert!(all_feasible(s, &d, &medium, beta));
                    assert!(verify_sum_inequality(s, &d, &medium, beta) >= 0.0);
                }
                let tally = measure_transport(&schedule, &d, &direct_flows(&d), w, 1.0, 8).unwrap();
                let bound = bound_fixed_narrowband(&NarrowbandScenario {
                    n: n as u64,
                    alpha,
                    beta,
                    w_rate: w,
                    a_f,
                })
                .unwrap()
                .transport_bound;
                assert!(
                    tally.transport <= bound,
                    "{mode} a {a_f} n {n}: {} > {bound}",
                    tally.transport
                );
            }
        }
    }
}
