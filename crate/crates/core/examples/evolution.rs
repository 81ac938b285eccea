//! Evolving a helix under a constant tangential flow and under a stretching
//! flow, watching the polyline length.

use std::f64::consts::TAU;

use pg4::curve::{AdmissibleCurve, Helix};
use pg4::flow::field::is_inextensible;
use pg4::flow::{arc_length_drift, evolve, FlowComponent, FlowField};

fn main() -> pg4::error::Result<()> {
    let curve = AdmissibleCurve::analytic(Helix::new(1.0, 1.0, 1.0), (0.0, TAU), 256)?;

    let tangential = FlowField::tangential(1.0);
    let states = evolve(&curve, &tangential, 0.01, 100)?;
    println!(
        "f = (1, 0, 0, 0): inextensible {}, relative length drift {:.2e}",
        is_inextensible(&tangential, curve.domain(), curve.grid.n, 0.0, 1e-10)?,
        arc_length_drift(&states)
    );

    let stretching = FlowField::new([
        FlowComponent::custom(|s, _| 0.1 * s),
        FlowComponent::Const(0.0),
        FlowComponent::Const(0.0),
        FlowComponent::Const(0.0),
    ]);
    let states = evolve(&curve, &stretching, 0.01, 100)?;
    for st in states.iter().step_by(25) {
        println!("t = {:.2}  length {:.6}", st.t, st.arc_length);
    }
    println!(
        "f1 = 0.1 s: relative length drift {:.3e}",
        arc_length_drift(&states)
    );
    Ok(())
}
