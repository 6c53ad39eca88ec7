//! Fixtures shared by the criterion benches.

use strato::spectral_core::{leray_project, transform_forward};
use strato::{Field4, GridSpec};

/// A smooth divergence-free state with all four slots populated.
pub fn sample_state(n: usize) -> Field4 {
    let g = GridSpec::cubic(n).expect("even grid");
    let len = g.len();
    let mut phys: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; len]);
    for idx in 0..len {
        let [i, j, k] = g.unravel(idx);
        let (x, y, z) = (g.coordinate(0, i), g.coordinate(1, j), g.coordinate(2, k));
        phys[0][idx] = (y + 0.3).sin() * z.cos() + 0.2 * (2.0 * z).sin();
        phys[1][idx] = (z - 0.7).sin() * (x + 2.0 * y).cos();
        phys[2][idx] = x.cos() * (y - z).sin();
        phys[3][idx] = 0.5 * (x + y + z).sin() + 0.1 * (3.0 * x).cos();
    }
    let mut f = leray_project(&transform_forward(&g, &phys).expect("grid sizes match"));
    f.dealias();
    f
}
