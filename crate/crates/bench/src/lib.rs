//! Shared fixtures for the benchmark targets.

use klpath_core::{PrimePowerModulus, SumContext, UnitResidue};

pub fn modulus(p: u64, n: u32) -> PrimePowerModulus {
    PrimePowerModulus::new(p, n).expect("valid benchmark modulus")
}

pub fn context(p: u64, n: u32) -> SumContext {
    SumContext::new(&modulus(p, n)).expect("desk-scale modulus")
}

pub fn unit(v: u64, m: &PrimePowerModulus) -> UnitResidue {
    UnitResidue::new(v, m).expect("unit fixture")
}
