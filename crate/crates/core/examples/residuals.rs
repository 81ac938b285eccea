//! Compatibility residuals for a static flow and a refinement study on a
//! closed-form rotating, translating helix.

use std::f64::consts::TAU;
use std::sync::Arc;

use pg4::curve::{AdmissibleCurve, Grid, Helix};
use pg4::flow::evolve::History;
use pg4::flow::residuals::REFINEMENT_FLOOR;
use pg4::flow::{evolve, refinement_orders, residual_report, FlowField, RotatingTransport};

fn main() -> pg4::error::Result<()> {
    let curve = AdmissibleCurve::analytic(Helix::new(1.0, 1.0, 1.0), (0.0, TAU), 128)?;
    let flow = FlowField::zero();
    let states = evolve(&curve, &flow, 0.01, 6)?;
    let report = residual_report(&History::from_states(&states, curve.grid)?, &flow)?;
    println!(
        "static flow: {} identities, largest residual {:.2e}",
        report.entries.len(),
        report.max_abs()
    );

    let motion = RotatingTransport::new(
        Arc::new(Helix::new(1.0, 1.0, 1.5).with_wobble(0.1, 2.0)),
        0.3,
        0.5,
        2.0,
    );
    let moving = motion.flow();
    let reports = (0..4)
        .map(|l| {
            let f = 1usize << l;
            let h = motion.history(
                Grid::span(0.0, TAU, 128 * f + 1)?,
                0.0,
                0.0125 / f as f64,
                16 * f + 1,
            )?;
            residual_report(&h, &moving)
        })
        .collect::<pg4::error::Result<Vec<_>>>()?;
    for o in refinement_orders(&reports, REFINEMENT_FLOOR)? {
        match o.order {
            Some(p) => println!("{:<36} order {p:.3}", o.identity),
            None => println!("{:<36} exact", o.identity),
        }
    }
    Ok(())
}
