//! Fixtures shared by the benchmarks.

use oneann_core::{
    build_cut_acceptor, build_reduction, compile_mealy, ratio, Alphabet, CutParams,
    MealyMachine, Network, QuotientMode, QuotientSpec, ReductionSpec, Word,
};

pub fn cut_27_8() -> Network {
    build_cut_acceptor(&CutParams::binary(ratio(27, 8), ratio(1, 4))).unwrap()
}

pub fn cut_27_1_28() -> Network {
    build_cut_acceptor(&CutParams::binary(ratio(27, 1), ratio(1, 28))).unwrap()
}

pub fn parity() -> Network {
    compile_mealy(&MealyMachine::even_parity()).unwrap()
}

pub fn bits(s: &str) -> Word {
    Alphabet::binary().parse_word(s).unwrap()
}

pub fn parity_quotient_spec() -> QuotientSpec {
    QuotientSpec::new(parity(), bits("1"), bits("1"), QuotientMode::L2MinusL1).unwrap()
}

pub fn cut_quotient_spec() -> QuotientSpec {
    QuotientSpec::new(cut_27_8(), bits("0"), bits("1"), QuotientMode::L1MinusL2).unwrap()
}

pub fn mod3_reduction_spec() -> ReductionSpec {
    let ab = Alphabet::new(["a", "b"]).unwrap();
    let v = ["a", "a", "b", "b", "b"].map(|s| ab.parse_word(s).unwrap());
    ReductionSpec::new(compile_mealy(&MealyMachine::mod3_ab()).unwrap(), v, 4).unwrap()
}

pub fn mod3_reduction() -> Network {
    build_reduction(&mod3_reduction_spec()).unwrap().network
}
