use irregular_entire::entire::{frechet_distance, EntireFunction};
use num_complex::Complex64;

fn main() -> irregular_entire::Result<()> {
    let exp = EntireFunction::exponential();
    // Taylor polynomials of exp converge in the compact-open topology.
    for deg in [2usize, 5, 10, 20, 40] {
        let taylor = EntireFunction::polynomial(vec![Complex64::new(1.0, 0.0); deg + 1]);
        let d = frechet_distance(&exp, &taylor, 30, 1e-10)?;
        println!("d(exp, T_{deg}) = {d:.3e}");
    }
    Ok(())
}
