//! Writes the growth-exponent region as CSV and SVG into the temp directory.

use irregular_entire::means::{linear_grid, region_csv, region_data};
use irregular_entire::output::svg_polylines;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = region_data(&linear_grid(1.0, 8.0, 57)?)?;
    let yes: Vec<(f64, f64)> = rows.iter().map(|r| (r.p, r.yes_level)).collect();
    let no: Vec<(f64, f64)> = rows.iter().map(|r| (r.p, r.no_level)).collect();
    let svg = svg_polylines("growth exponent a against p", &[("attained", yes), ("excluded", no)], false);

    let dir = std::env::temp_dir();
    std::fs::write(dir.join("region.csv"), region_csv(&rows))?;
    std::fs::write(dir.join("region.svg"), svg)?;
    println!("wrote {} rows to {}", rows.len(), dir.join("region.{csv,svg}").display());
    Ok(())
}
