//! Doc-test harness for the book.
//!
//! mdBook cannot run code blocks against crate dependencies, so each
//! chapter is included here as module documentation and `cargo test
//! --doc -p confmap-guide` executes every Rust snippet in the book. One
//! module per chapter keeps failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spaces.md")]
pub mod spaces {}

#[doc = include_str!("../../../book/src/expressions.md")]
pub mod expressions {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}

#[doc = include_str!("../../../book/src/conformality.md")]
pub mod conformality {}

#[doc = include_str!("../../../book/src/rigidity.md")]
pub mod rigidity {}

#[doc = include_str!("../../../book/src/minkowski-plane.md")]
pub mod minkowski_plane {}

#[doc = include_str!("../../../book/src/compactification.md")]
pub mod compactification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[cfg(test)]
mod tests {
    /// Every chapter in the book's SUMMARY must be doc-tested here, and
    /// every include here must be listed in the SUMMARY.
    #[test]
    fn summary_and_includes_stay_in_sync() {
        let summary = include_str!("../../../book/src/SUMMARY.md");
        let lib = include_str!("lib.rs");
        let summary_files: Vec<&str> = summary
            .lines()
            .filter_map(|l| {
                let (_, rest) = l.split_once("](")?;
                rest.split_once(')').map(|(path, _)| path)
            })
            .collect();
        assert!(!summary_files.is_empty());
        for file in &summary_files {
            assert!(
                lib.contains(&format!("book/src/{file}")),
                "chapter {file} is in SUMMARY.md but not doc-tested"
            );
        }
        let included = lib
            .lines()
            .filter(|l| l.trim_start().starts_with("#[doc = include_str!"))
            .count();
        assert_eq!(
            included,
            summary_files.len(),
            "doc-tested chapters and SUMMARY.md entries differ"
        );
    }
}
