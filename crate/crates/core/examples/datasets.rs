//! Generators and the votes file format.

use kemeny_qa::datagen::{gen_simplified_with_cuts, with_random_list_weights};
use kemeny_qa::{format_votes, gen_synthetic, parse_votes, GenSpec, ListKind, WeightScheme};

fn main() -> kemeny_qa::Result<()> {
    let synth = gen_synthetic(&GenSpec::synthetic(5, 4, 7))?;
    print!("synthetic:\n{}", format_votes(&synth));

    let (simple, cuts) = gen_simplified_with_cuts(&GenSpec::simplified(8, 3, 3, 7))?;
    for (v, c) in simple.votes().iter().zip(&cuts) {
        println!("simplified {v}  cuts {c:?}");
    }

    let partial = gen_synthetic(&GenSpec::synthetic(6, 4, 7).with_kind(ListKind::Ktop, 2))?;
    let weighted = with_random_list_weights(&partial, 7)?;
    let text = format_votes(&weighted);
    print!("k-top, weighted:\n{text}");
    assert_eq!(parse_votes(&text, ListKind::Ktop, WeightScheme::Uniform)?, weighted);
    Ok(())
}
