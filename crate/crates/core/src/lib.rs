pub mod arith;
pub mod constants;
pub mod curves;
pub mod frobenius;
pub mod galois;
pub mod gl2;
pub mod hardylittlewood;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/galois.md")]
    mod galois {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/hardy-littlewood.md")]
    mod hardy_littlewood {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
