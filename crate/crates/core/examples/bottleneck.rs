//! Bottleneck distance, maximal persistence and their relation.
//!
//! Run with `cargo run --example bottleneck`.

use maxtda::metrics::{bottleneck, bottleneck_to_diagonal, max_persistence};
use maxtda::{PersistenceDiagram, PersistencePoint, Scale};

fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
    PersistenceDiagram::new(points.iter().map(|&(b, d)| PersistencePoint::new(1, b, d)).collect(), Scale::Distance)
}

fn main() -> maxtda::Result<()> {
    let a = diagram(&[(0.0, 4.0), (1.0, 1.6), (2.0, 2.3)]);
    let b = diagram(&[(0.2, 3.5), (1.1, 1.5)]);

    let db = bottleneck(&a, &b, 1)?;
    println!("d_B(a, b)       = {db}");
    println!("mp(a), mp(b)    = {}, {}", max_persistence(&a, 1), max_persistence(&b, 1));
    println!("|mp(a) - mp(b)| = {} <= 2 d_B = {}", (max_persistence(&a, 1) - max_persistence(&b, 1)).abs(), 2.0 * db);
    println!("d_B(a, diagonal) = {} = mp(a) / 2", bottleneck_to_diagonal(&a, 1));

    // diagrams travel as JSON
    let text = a.to_json();
    assert_eq!(PersistenceDiagram::from_json(&text)?, a);
    println!("{text}");
    Ok(())
}
