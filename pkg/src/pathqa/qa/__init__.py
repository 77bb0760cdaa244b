from .encode import TokenizedWindow, encode
from .decode import AnswerCandidate, SpanLogits, decode_span, merge_windows
from .backend import EncoderBackend, InjectedLogitsBackend, OracleBackend, infer
from .bundle import ModelBundle, load_backend, load_bundle, write_manifest
from .extract import QaConfig, build_query, extract

__all__ = [
    "AnswerCandidate",
    "EncoderBackend",
    "InjectedLogitsBackend",
    "ModelBundle",
    "OracleBackend",
    "QaConfig",
    "SpanLogits",
    "TokenizedWindow",
    "build_query",
    "decode_span",
    "encode",
    "extract",
    "infer",
    "load_backend",
    "load_bundle",
    "merge_windows",
    "write_manifest",
]
