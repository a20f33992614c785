use ivtest_core::*;
use std::time::Instant;

fn main() {
    let caps = Caps::default();

    // timing: one (3,3,3) model-sample LP
    let dims = Dims::new(3, 3, 3).unwrap();
    let rm = response::response_matrix(dims, &caps).unwrap();
    let t0 = Instant::now();
    let mut feas = 0;
    for idx in 0..20u64 {
        let q = sampling::response_dist(dims, 99, idx, &caps).unwrap();
        let f = response::sample_compatible(&rm, &q).unwrap();
        if polyhedra::lp_feasible_with(&rm, &f).unwrap().is_feasible() { feas += 1; }
    }
    println!("(3,3,3) 20 model LPs: {:?} feas={feas}", t0.elapsed());

    let t0 = Instant::now();
    let mut infeas = 0;
    for idx in 0..20u64 {
        let mut rng = sampling::rng_for(99, sampling::Stream::CondDist, idx);
        let d = sampling::random_cond_dist(dims, &mut rng);
        if !polyhedra::lp_feasible_with(&rm, &d).unwrap().is_feasible() { infeas += 1; }
    }
    println!("(3,3,3) 20 random LPs: {:?} infeas={infeas}", t0.elapsed());

    // feasibility curve probe for several seeds
    for seed in [1u64, 2, 3] {
        let mut fracs = Vec::new();
        for n in 2..=6usize {
            let d = Dims::new(2, 2, n).unwrap();
            let (ok, total) = batch::feasible_fraction(d, seed, 500, &caps).unwrap();
            fracs.push((n, ok, total));
        }
        println!("seed {seed}: {:?}", fracs);
    }
}
