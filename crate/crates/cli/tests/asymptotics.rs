//! Long-time behavior of the history term on a coarse flower run.

use tfphase_cli::presets::Preset;
use tfphase_core::energy::EnergyRecord;
use tfphase_core::fracops::FractionalOrder;
use tfphase_core::schemes::{run, Scheme, SchemeConfig};

// 32^2 grid with eps scaled by 128 / 32, dt = 0.1 up to t = 64
fn coarse_flower(alpha: f64) -> Vec<EnergyRecord> {
    let d = Preset::Flower.defaults();
    let eps = d.eps * 4.0;
    let grid = Preset::Flower.grid(32).unwrap();
    let u0 = Preset::Flower.initial(grid, eps, 0);
    let cfg = SchemeConfig::new(Scheme::L1Ac, FractionalOrder::new(alpha).unwrap(), d.gamma, eps, 0.1, d.s).with_steps(640);
    run(&cfg, u0, &mut ()).unwrap().records
}

fn gap(r: &EnergyRecord) -> f64 {
    r.e_tilde - r.e
}

#[test]
fn history_term_peaks_then_decays() {
    for a in [0.3, 0.6, 0.9] {
        let recs = coarse_flower(a);
        let g: Vec<f64> = recs.iter().map(gap).collect();
        let peak = (0..g.len()).max_by(|&i, &j| g[i].total_cmp(&g[j])).unwrap();
        assert!(peak < g.len() - 1, "alpha {a}: still growing at t = 64");
        assert!(g[peak..].windows(2).all(|w| w[1] <= w[0]), "alpha {a}: not monotone after the peak");
        assert!(g.iter().all(|x| *x >= 0.0));
        // Ẽ(0) = E(0)
        assert_eq!(g[0], 0.0);
    }
}

#[test]
fn larger_order_gives_smaller_gap() {
    let at_end: Vec<f64> = [0.3, 0.6, 0.9].iter().map(|&a| gap(coarse_flower(a).last().unwrap())).collect();
    assert!(at_end.windows(2).all(|w| w[1] < w[0]), "{at_end:?}");
}

#[test]
#[ignore = "fails: the gap at t = 64 is still above its t = 8 value on this run"]
fn gap_at_64_below_gap_at_8() {
    for a in [0.3, 0.6, 0.9] {
        let recs = coarse_flower(a);
        assert!(gap(&recs[640]) < gap(&recs[80]), "alpha {a}: {} vs {}", gap(&recs[640]), gap(&recs[80]));
    }
}
