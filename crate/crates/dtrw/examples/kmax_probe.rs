//! Dev probe: smallest k_max capturing the jump-count mass at the horizon.
use dtrw::renewal::build_jump_counts;

fn main() {
    for &alpha in &[0.3, 0.5, 0.7, 0.9] {
        for &n in &[128usize, 500, 2000] {
            let mut k = (4.0 * (n as f64).powf(alpha)).ceil() as usize + 20;
            loop {
                k = k.min(n);
                let t = build_jump_counts(alpha, n, k).unwrap();
                let deficit = 1.0 - t.mass_at(n);
                if deficit < 1e-13 || k == n {
                    println!(
                        "alpha {alpha} n {n}: k_max {k} (= {:.2} n^a) deficit {deficit:.2e}",
                        k as f64 / (n as f64).powf(alpha)
                    );
                    break;
                }
                k = (k * 3 / 2).min(n);
            }
        }
    }
}
