//! Dev probe: pointwise FD vs analytic profiles on the bounded benchmark.
use dtrw::analytic::SeriesSolutionParams;
use dtrw::fd::{fd_solve, snap_to_time};
use dtrw::mc::DensityField;
use dtrw::walk::{BoundaryPolicy, JumpModel, LatticeDomain};
use dtrw::waiting::WaitingTimeModel;

fn main() {
    let d_alpha = 0.1;
    let dx = 0.2;
    let t = 0.5;
    for &(alpha, r) in &[(0.5, 0.1), (0.9, 0.02), (1.0, 0.02)] {
        let snap = snap_to_time(alpha, d_alpha, dx, r, t).unwrap();
        let series = SeriesSolutionParams::with_terms(alpha, d_alpha, 400_000).unwrap();
        let profile = series.profile(t).unwrap();
        let domain = LatticeDomain::centered_interval(5, dx, BoundaryPolicy::ReflectBounce).unwrap();
        let waiting = WaitingTimeModel::sibuya(alpha).unwrap();
        let jumps = JumpModel::symmetric(snap.r_eff).unwrap();
        let initial = DensityField::delta(domain.clone(), 0, 0).unwrap();
        let fields = fd_solve(&waiting, jumps, domain.clone(), &initial, snap.n_steps as usize).unwrap();
        let last = fields.last().unwrap();
        println!("alpha {alpha} r {r} n {} r_eff {:.4}", snap.n_steps, snap.r_eff);
        println!("{:>6} {:>12} {:>12} {:>12}", "x", "fd_dens", "analytic", "diff");
        for site in -5..=5i64 {
            let x = domain.x(site);
            let u = profile.u(x);
            let fd = last.density_at(site);
            println!("{x:>6.2} {fd:>12.6} {u:>12.6} {:>12.3e}", fd - u);
        }
        println!();
    }
}
