//! Dev probe: FD vs analytic max error on the bounded benchmark as a
//! function of the self-jump parameter r (which sets the step count).
use dtrw::analytic::SeriesSolutionParams;
use dtrw::fd::{fd_solve, snap_to_time};
use dtrw::mc::DensityField;
use dtrw::walk::{BoundaryPolicy, JumpModel, LatticeDomain};
use dtrw::waiting::WaitingTimeModel;
use std::time::Instant;

fn main() {
    let d_alpha = 0.1;
    let dx = 0.2;
    let t = 0.5;
    for &alpha in &[0.5, 0.7, 0.9] {
        let series = SeriesSolutionParams::with_terms(alpha, d_alpha, 400_000).unwrap();
        let profile = series.profile(t).unwrap();
        for &r in &[1.0, 0.5, 1.0 / 3.0, 0.2, 0.1, 0.05, 0.02] {
            let snap = snap_to_time(alpha, d_alpha, dx, r, t).unwrap();
            if snap.n_steps > 200_000 { println!("alpha {alpha} r {r}: n too big"); continue; }
            for policy in [BoundaryPolicy::ReflectStay, BoundaryPolicy::ReflectBounce] {
                let t0 = Instant::now();
                let domain = LatticeDomain::centered_interval(5, dx, policy).unwrap();
                let waiting = WaitingTimeModel::sibuya(alpha).unwrap();
                let jumps = JumpModel::symmetric(snap.r_eff).unwrap();
                let initial = DensityField::delta(domain.clone(), 0, 0).unwrap();
                let fields = fd_solve(&waiting, jumps, domain.clone(), &initial, snap.n_steps as usize).unwrap();
                let last = fields.last().unwrap();
                let mut max_flat = 0.0f64;
                let mut max_cell = 0.0f64;
                for site in -5..=5i64 {
                    let u = profile.u(domain.x(site));
                    max_flat = max_flat.max((last.mass_at(site) / dx - u).abs());
                    max_cell = max_cell.max((last.density_at(site) - u).abs());
                }
                let tag = match policy { BoundaryPolicy::ReflectStay => "stay", _ => "bounce" };
                println!(
                    "alpha {alpha} r {r:.3} n {:6} {tag:6}: flat {max_flat:.3e}  cell {max_cell:.3e}  ({:.2?})",
                    snap.n_steps, t0.elapsed()
                );
            }
        }
        println!();
    }
}
