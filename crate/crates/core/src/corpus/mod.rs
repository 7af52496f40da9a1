//! TimeML ingestion: parsing `.tml` files into documents, mapping TLINK
//! labels onto Allen relations and splitting the TempEval-3 distribution.

mod load;
mod model;
mod parse;

pub use load::{
    load_corpus, load_dir, split_ids, CorpusError, CorpusOptions, FileFailure, LoadedCorpus, Split,
    DEFAULT_SPLIT_SEED, VALIDATION_FRACTION,
};
pub use model::{map_timeml_to_allen, Document, EntityKind, Span, TLink, TemporalEntity, TimeMLRelation};
pub use parse::{parse_tml, parse_tml_with_id, ParseError, Position};
