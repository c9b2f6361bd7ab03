//! The book chapters, compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/robust-scale.md")]
pub mod robust_scale {}
#[doc = include_str!("../../../book/src/gaussian-rank.md")]
pub mod gaussian_rank {}
#[doc = include_str!("../../../book/src/covariance.md")]
pub mod covariance {}
#[doc = include_str!("../../../book/src/adaptive-lasso.md")]
pub mod adaptive_lasso {}
#[doc = include_str!("../../../book/src/cross-validation.md")]
pub mod cross_validation {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[cfg(test)]
mod tests {
    use std::path::Path;

    #[test]
    fn every_chapter_is_compiled() {
        let book = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/src");
        let summary = std::fs::read_to_string(book.join("SUMMARY.md")).unwrap();
        let lib = include_str!("lib.rs");
        for entry in std::fs::read_dir(&book).unwrap() {
            let name = entry.unwrap().file_name().into_string().unwrap();
            if name.ends_with(".md") && name != "SUMMARY.md" {
                assert!(summary.contains(&format!("({name})")), "{name} missing from SUMMARY.md");
                assert!(lib.contains(&format!("book/src/{name}")), "{name} not compiled");
            }
        }
    }
}
