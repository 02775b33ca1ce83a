//! Solve both sides of the strategic dichotomy below every subspace.

use gowers_lab::reductions::{check_ramsey_dichotomy, DichotomyFlavor};
use gowers_lab::{build_instance, InstanceSpec, Payoff};

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::mathias_silver(5, 0, 1))?;
    let pay = Payoff::new("x_0 even", 1, |s| s[0] % 2 == 0);
    let rep = check_ramsey_dichotomy(&space, &pay, 0, DichotomyFlavor::Strategic, 1_000_000)?;
    for row in &rep.rows {
        let side = match (row.first.goal_won, row.second.goal_won) {
            (true, _) => "I avoids the set in F",
            (_, true) => "II reaches the set in G",
            _ => "neither",
        };
        println!("{:<14} {side}", row.label);
    }
    println!("{} of {} subspaces realize a side", rep.realizing.len(), rep.rows.len());
    Ok(())
}
