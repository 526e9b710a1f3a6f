use wellpath::geodesic::{minimize_e, SolveOptions};
use wellpath::oracle::{grid_distance, GridSpec};
use wellpath::Potential;

fn main() {
    let opts = SolveOptions::default();
    let pot = Potential::alikakos_fusco(0.3);
    let r = minimize_e(&pot, &[-1.0, 0.0], &[1.0, 0.0], &opts).unwrap();
    for (ylo, yhi) in [(-0.45f64, 0.75f64), (-0.3, 0.6), (-0.36, 0.84)] {
        let spec = GridSpec::new(vec![-1.5, ylo], vec![1.5, yhi], vec![600, 600]).unwrap();
        let g = grid_distance(&pot, &[-1.0, 0.0], &[1.0, 0.0], &spec).unwrap();
        println!(
            "AF 0.3 y=[{ylo},{yhi}]: solver {:.6} oracle {:.6} gap {:.4}%",
            r.energy, g.cost, 100.0 * (g.cost - r.energy) / r.energy
        );
    }
}
