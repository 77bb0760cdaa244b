from .layout import Block, Line, WordBox, classify_boilerplate, group_lines, segment_blocks
from .spell import load_lexicon, spell_correct
from .chunking import Chunk, IngestConfig, chunk_document, read_word_boxes, write_chunks

__all__ = [
    "Block",
    "Chunk",
    "IngestConfig",
    "Line",
    "WordBox",
    "chunk_document",
    "classify_boilerplate",
    "group_lines",
    "load_lexicon",
    "read_word_boxes",
    "segment_blocks",
    "spell_correct",
    "write_chunks",
]
