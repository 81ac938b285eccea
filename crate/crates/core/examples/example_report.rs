//! Stated reference values for the helix next to the computed ones.

fn main() -> pg4::error::Result<()> {
    let report = pg4::example::helix_example(1.0, 1.0, 1.0, 256)?;
    print!("{report}");
    println!(
        "{} of {} rows disagree",
        report.discrepancies().count(),
        report.rows.len()
    );
    Ok(())
}
