//! Check the five axioms on each built-in family.

use gowers_lab::instances::PaletteRule;
use gowers_lab::{build_instance, check_axioms, InstanceSpec, Rat};

fn main() -> gowers_lab::Result<()> {
    let specs = [
        InstanceSpec::mathias_silver(8, 0, 1),
        InstanceSpec::rosendal(2, 4, 0),
        InstanceSpec::rosendal(3, 3, 0),
        InstanceSpec::ProjectiveRosendal {
            field: 3,
            dim: 3,
            slack: 0,
            palette: PaletteRule::TailBlockSubspaces { m: 1, max_blocks: 2, full: false },
        },
        InstanceSpec::GridSphere {
            dim: 2,
            step: Rat::new(1, 4),
            slack: 0,
            palette: PaletteRule::TailBlockSubspaces { m: 1, max_blocks: 2, full: false },
        },
    ];
    for spec in &specs {
        let space = build_instance(spec)?;
        let rep = check_axioms(&space, 2, 50_000_000)?;
        println!("{} ({} subspaces)", space.name, space.num_subspaces());
        for c in std::iter::once(&rep.preorders).chain(&rep.axioms) {
            println!("  {:<40} {:>8} checked  {} violations", c.name, c.checked, c.violations);
        }
    }
    Ok(())
}
