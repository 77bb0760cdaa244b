"""Model bundle directories: manifest parsing and hash validation.

A bundle is a directory holding a manifest of ``key = value`` lines, the
exported encoder graph (npz weights + json config), and the tokenizer
spec.  ``hash.<file>`` entries pin file contents; tampering is rejected at
load time.  An ``oracle`` bundle has no graph and replays gold spans from
a corpus file, which lets the whole pipeline run under test.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .. import corpus as corpus_mod
from ..errors import BundleInvalid
from ..tokenize import FileTokenizer, SimpleTokenizer
from .backend import NumpyEncoderBackend, OracleBackend

MANIFEST_NAME = "manifest.txt"


@dataclass
class ModelBundle:
    root: Path
    kind: str  # numpy-encoder | oracle
    max_seq_len: int
    graph_path: Path | None = None
    tokenizer_spec_path: Path | None = None
    metadata: dict[str, str] = field(default_factory=dict)


def _parse_manifest(path: Path) -> dict[str, str]:
    entries = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise BundleInvalid(f"bad manifest line: {line!r}", manifest=str(path))
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def load_bundle(bundle_dir: str | Path) -> ModelBundle:
    root = Path(bundle_dir)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise BundleInvalid("missing bundle manifest", bundle=str(root))
    entries = _parse_manifest(manifest_path)
    kind = entries.get("kind", "numpy-encoder")
    try:
        max_seq_len = int(entries.get("max_seq_len", "384"))
    except ValueError:
        raise BundleInvalid("max_seq_len is not an integer", bundle=str(root))
    if max_seq_len < 16:
        raise BundleInvalid("max_seq_len must be >= 16", got=max_seq_len)

    for key, expected in entries.items():
        if not key.startswith("hash."):
            continue
        target = root / key[len("hash."):]
        if not target.is_file():
            raise BundleInvalid("hashed file missing", file=str(target))
        actual = sha256_file(target)
        if actual != expected:
            raise BundleInvalid(
                "content hash mismatch", file=str(target), expected=expected, actual=actual
            )

    bundle = ModelBundle(
        root=root,
        kind=kind,
        max_seq_len=max_seq_len,
        metadata={
            k: v
            for k, v in entries.items()
            if k in ("model_name", "training_run_id", "exported_at", "gold_corpus")
        },
    )
    if kind == "numpy-encoder":
        for req in ("graph", "tokenizer"):
            if req not in entries:
                raise BundleInvalid(f"manifest lacks {req!r} entry", bundle=str(root))
        bundle.graph_path = root / entries["graph"]
        bundle.tokenizer_spec_path = root / entries["tokenizer"]
        for p in (bundle.graph_path, bundle.tokenizer_spec_path):
            if not p.is_file():
                raise BundleInvalid("bundle file missing", file=str(p))
    elif kind == "oracle":
        if "gold_corpus" not in entries:
            raise BundleInvalid("oracle bundle needs a gold_corpus entry", bundle=str(root))
    else:
        raise BundleInvalid(f"unknown bundle kind {kind!r}", bundle=str(root))
    return bundle


def load_backend(bundle: ModelBundle):
    """Instantiate (backend, tokenizer) for a loaded bundle."""
    if bundle.kind == "oracle":
        corpus_path = bundle.root / bundle.metadata["gold_corpus"]
        gold: dict[tuple[str, str], tuple[int, int]] = {}
        for rec in corpus_mod.read_corpus(corpus_path):
            if rec.broad_span:
                gold[(rec.id, corpus_mod.BROAD)] = rec.broad_span
            if rec.subtype_span:
                gold[(rec.id, corpus_mod.SUBTYPE)] = rec.subtype_span
        return OracleBackend(gold), SimpleTokenizer()
    from .runtime import NumpyEncoder

    runtime = NumpyEncoder.load(bundle.graph_path)
    return NumpyEncoderBackend(runtime), FileTokenizer(bundle.tokenizer_spec_path)


def write_manifest(
    bundle_dir: str | Path,
    entries: dict[str, str],
    hash_files: list[str] = (),
) -> Path:
    root = Path(bundle_dir)
    lines = [f"{k} = {v}" for k, v in entries.items()]
    for name in hash_files:
        lines.append(f"hash.{name} = {sha256_file(root / name)}")
    path = root / MANIFEST_NAME
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
