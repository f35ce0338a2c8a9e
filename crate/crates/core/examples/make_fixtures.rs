//! Regenerates the CSV files under `fixtures/`.

use std::path::Path;

use stopplan::fixtures::{nineteen_neighbourhoods, synthetic_city, two_blobs, FIXTURE_SEED};
use stopplan::io::{points_csv, write_atomic};

fn main() -> stopplan::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    let sets = [
        ("synthetic_city.csv", synthetic_city(FIXTURE_SEED)),
        ("two_blobs.csv", two_blobs(FIXTURE_SEED)),
        (
            "nineteen_neighbourhoods.csv",
            nineteen_neighbourhoods(FIXTURE_SEED),
        ),
    ];
    for (name, houses) in sets {
        write_atomic(dir.join(name), points_csv(&houses).as_bytes())?;
        println!("{name}: {} houses", houses.len());
    }
    Ok(())
}
