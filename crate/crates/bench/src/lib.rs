//! Fixtures shared by the benchmarks.

use minpoly_core::matgen::{gen_family, Family};
use minpoly_core::{Field, FieldSpec, Matrix, SeededRng};

/// Field order each family runs over.
pub fn family_field(family: Family) -> u64 {
    match family {
        Family::M1 | Family::M4 => 3,
        Family::M3 => 5,
        Family::M5 => 251,
        Family::M6 => 2,
        Family::M7 => 81,
    }
}

/// A fixed member of `family` at parameter `n`, with its field.
pub fn fixture(family: Family, n: u32, seed: u64) -> (Field, Matrix) {
    let f = Field::new(FieldSpec::from_order(family_field(family)).expect("family field"));
    let mut rng = SeededRng::new(seed);
    let (m, _) = gen_family(family, n, &f, &mut rng).expect("family member");
    (f, m)
}
