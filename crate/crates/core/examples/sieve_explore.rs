//! Residue-class sieves: build, print, tile, and map degrees to MIDI notes.

use hopscotch::sieve::{self, Sieve};

fn main() -> hopscotch::Result<()> {
    let s = sieve::parse_sieve("3@0|4@1")?;
    let points = s.generate(0, 24)?;
    println!("{s}  period {}", s.period()?);
    println!("points    {:?}", points.points);
    println!("intervals {:?}", points.intervals()?);
    let notes: Vec<u8> = (0..12).map(|d| s.to_pitch(d, 48)).collect::<Result<_, _>>()?;
    println!("pads 1-12 -> MIDI {notes:?}");

    let built = Sieve::residue(5, 0)?
        .union(Sieve::residue(5, 2)?)
        .intersection(Sieve::residue(2, 0)?.complement());
    println!("{built} in [-10, 10]: {:?}", built.generate(-10, 10)?.points);
    assert_eq!(sieve::parse_sieve(&built.to_string())?, built);

    for bad in ["0@1", "3@0|", "(2@0"] {
        println!("{bad:<6} -> {}", sieve::parse_sieve(bad).unwrap_err());
    }
    Ok(())
}
