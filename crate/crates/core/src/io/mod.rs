//! File formats: PNML in and out, DOT, LoLA and APT out.

use thiserror::Error;

use crate::model::ModelError;

pub mod apt;
pub mod dot;
pub mod lola;
pub mod pnml;

pub use apt::export_apt;
pub use dot::export_dot;
pub use lola::export_lola;
pub use pnml::{parse_pnml, parse_pnml_with, write_pnml, ParseOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("not a P/T net document: {0}")]
    NotAPtNet(String),
    #[error("bad number `{text}` in `{element}`")]
    BadNumber { element: String, text: String },
    #[error(transparent)]
    Validation(#[from] ModelError),
    #[error("the net has neither places nor transitions")]
    EmptyNet,
    #[error("`{0}` cannot be written in the target format without clashing with another id")]
    UnsupportedName(String),
}

/// Maps every id through `fix`, failing if two ids end up equal.
pub(crate) fn transliterate<'a>(
    ids: impl IntoIterator<Item = &'a str>,
    fix: impl Fn(&str) -> String,
) -> Result<std::collections::HashMap<String, String>, IoError> {
    let mut out = std::collections::HashMap::new();
    let mut taken = std::collections::HashSet::new();
    for id in ids {
        let fixed = fix(id);
        if !taken.insert(fixed.clone()) {
            return Err(IoError::UnsupportedName(id.to_owned()));
        }
        out.insert(id.to_owned(), fixed);
    }
    Ok(out)
}
