//! Dev probe: FD on the unbounded lattice vs the subordination closed form.
use dtrw::fd::fd_solve;
use dtrw::mc::DensityField;
use dtrw::renewal::subordinated_profile;
use dtrw::walk::{JumpModel, LatticeDomain};
use dtrw::waiting::WaitingTimeModel;

fn main() {
    for &alpha in &[0.3, 0.5, 0.7, 0.9] {
        let n = 50usize;
        let domain = LatticeDomain::unbounded(1.0).unwrap();
        let waiting = WaitingTimeModel::sibuya(alpha).unwrap();
        let initial = DensityField::delta(domain.clone(), 0, 0).unwrap();
        let fields = fd_solve(&waiting, JumpModel::symmetric(1.0).unwrap(), domain, &initial, n).unwrap();
        let subord = subordinated_profile(alpha, 0.5, n).unwrap();
        let mut max_diff = 0.0f64;
        for i in -(n as i64)..=(n as i64) {
            let diff = (fields[n].mass_at(i) - subord[(i + n as i64) as usize]).abs();
            max_diff = max_diff.max(diff);
        }
        println!("alpha {alpha}: max |FD - subordination| = {max_diff:.3e}");
    }
}
