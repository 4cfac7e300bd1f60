use irregular_entire::means::boundedness_certificate;

fn main() -> irregular_entire::Result<()> {
    for m in [1, 2, 5] {
        let c = boundedness_certificate(1.0, m, 100_000)?;
        println!(
            "m = {m}: sup {:.6} at n = {}, limit {:.6}, tail {:.3e}, bounded = {}",
            c.sup, c.argmax, c.limit, c.tail, c.bounded
        );
    }
    Ok(())
}
