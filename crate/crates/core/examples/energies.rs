//! Energies and pseudo-angles of the frame fields of a helix, along the
//! curve and along the time lines of a tangential motion.

use std::f64::consts::TAU;

use pg4::curve::{AdmissibleCurve, Helix};
use pg4::energy::{energy_s, energy_t, pseudo_angle_s, pseudo_angle_t, Field};
use pg4::flow::evolve::History;
use pg4::flow::FlowField;
use pg4::frenet::FrenetApparatus;

fn main() -> pg4::error::Result<()> {
    let helix = Helix::new(1.0, 1.0, 2.0);
    let curve = AdmissibleCurve::analytic(helix, (0.0, TAU), 257)?;
    let ap = FrenetApparatus::compute(&curve)?;
    let history = History::transported(&helix, 0.5, curve.grid, 0.0, 0.01, 101)?;
    let flow = FlowField::tangential(0.5);

    println!(
        "{:<4} {:>14} {:>14} {:>14} {:>14}",
        "", "E s-line", "A s-line", "E t-line", "A t-line"
    );
    for field in Field::ALL {
        let es = energy_s(&ap, field, (0.0, TAU))?;
        let as_ = pseudo_angle_s(&ap, field, (0.0, TAU))?;
        let et = energy_t(&history, &flow, 128, field, (0.0, 1.0))?;
        let at = pseudo_angle_t(&history, &flow, 128, field, (0.0, 1.0))?;
        let flag = if as_.branch_flag || at.branch_flag {
            "  (imaginary branch)"
        } else {
            ""
        };
        println!(
            "{:<4} {:>14.8} {:>14.8} {:>14.8} {:>14.8}{flag}",
            field.to_string(),
            es.value,
            as_.value,
            et.value,
            at.value
        );
    }
    Ok(())
}
