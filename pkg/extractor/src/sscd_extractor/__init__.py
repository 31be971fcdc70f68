"""Sibling-embedding extraction from raw corpora.

Finds every occurrence of each target word, encodes its sentence with a
pretrained masked language model, and writes one contextualised vector per
occurrence in the binary sibling-file format the scoring pipeline consumes,
plus the corpus manifest and a skip report.
"""

__version__ = "0.1.0"

from .corpus_io import preprocess_liverpool, read_tokenized, tokenize, write_tokenized
from .extract import ExtractionConfig, ExtractionResult, extract
from .sibling_writer import sibling_filename, write_manifest, write_sibling_file

__all__ = [
    "__version__",
    "ExtractionConfig",
    "ExtractionResult",
    "extract",
    "preprocess_liverpool",
    "read_tokenized",
    "sibling_filename",
    "tokenize",
    "write_manifest",
    "write_sibling_file",
    "write_tokenized",
]
