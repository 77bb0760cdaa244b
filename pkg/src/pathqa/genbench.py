"""Client for benchmarking a completion-style generation service.

Prompts follow the fixed instructions / context / request layout; replies
are parsed back into (broad, subtype) answers.  The wire format is JSON
over HTTP POST: request {prompt, max_new_tokens, temperature, seed},
response {text}.
"""

from __future__ import annotations

import json
import logging
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass

from .corpus import CorpusRecord
from .errors import ServiceError, ServiceTimeout, ServiceUnreachable

log = logging.getLogger(__name__)

DEFAULT_INSTRUCTIONS = (
    "You are a clinical information extraction assistant. Read the pathology "
    "report excerpt below and answer using short noun phrases."
)
DEFAULT_REQUEST = (
    "Extract the cancer type and the specific cancer subtype. Respond with two "
    "lines: 'Cancer type: <answer>' and 'Subtype: <answer>'."
)


@dataclass(frozen=True)
class PromptTemplate:
    instructions: str = DEFAULT_INSTRUCTIONS
    request: str = DEFAULT_REQUEST


@dataclass
class GenerationParams:
    max_new_tokens: int = 64
    temperature: float = 0.0
    seed: int = 0
    timeout_s: float = 30.0
    retry_max: int = 3
    backoff_base_s: float = 0.5
    context_budget_chars: int = 100_000


@dataclass
class GenerationResult:
    record_id: str
    raw_text: str
    parsed_broad: str | None
    parsed_subtype: str | None
    duplicate_answer_flag: bool
    latency_ms: int
    error: str | None = None


def render_prompt(
    record: CorpusRecord,
    template: PromptTemplate,
    context_budget_chars: int = 100_000,
) -> str:
    context = record.context
    if len(context) > context_budget_chars:
        log.warning(
            "context for %s exceeds budget (%d > %d chars), truncating tail",
            record.id,
            len(context),
            context_budget_chars,
        )
        context = context[:context_budget_chars]
    if not context:
        log.warning("record %s has an empty context", record.id)
    return f"{template.instructions}\n\n{context}\n\n{template.request}"


def call_generation(
    endpoint: str,
    prompt: str,
    params: GenerationParams,
    opener=None,
) -> str:
    """POST the prompt, retrying transient failures with exponential backoff."""
    payload = json.dumps(
        {
            "prompt": prompt,
            "max_new_tokens": params.max_new_tokens,
            "temperature": params.temperature,
            "seed": params.seed,
        }
    ).encode("utf-8")
    open_fn = opener or urllib.request.urlopen
    last_error: Exception | None = None
    for attempt in range(params.retry_max + 1):
        if attempt:
            delay = params.backoff_base_s * 2 ** (attempt - 1)
            log.info("retrying generation call (attempt %d) after %.2fs", attempt + 1, delay)
            time.sleep(delay)
        req = urllib.request.Request(
            endpoint, data=payload, headers={"Content-Type": "application/json"}
        )
        try:
            with open_fn(req, timeout=params.timeout_s) as resp:
                body = resp.read().decode("utf-8")
            return json.loads(body)["text"]
        except urllib.error.HTTPError as exc:
            if exc.code in (429, 500, 502, 503, 504):
                last_error = exc
                continue
            raise ServiceError(
                f"service returned status {exc.code}",
                status=exc.code,
                body=exc.read().decode("utf-8", "replace"),
            ) from exc
        except TimeoutError as exc:
            last_error = exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                last_error = exc
            else:
                last_error = exc
        except (ConnectionError, OSError) as exc:
            last_error = exc
    if isinstance(last_error, TimeoutError) or (
        isinstance(last_error, urllib.error.URLError)
        and isinstance(getattr(last_error, "reason", None), TimeoutError)
    ):
        raise ServiceTimeout("generation request timed out", endpoint=endpoint) from last_error
    raise ServiceUnreachable(
        f"giving up after {params.retry_max + 1} attempts", endpoint=endpoint,
        cause=str(last_error),
    ) from last_error


_LINE_PATTERNS = (
    ("broad", re.compile(r"^\s*cancer\s*type\s*:\s*(.+)$", re.IGNORECASE)),
    ("subtype", re.compile(r"^\s*(?:specific\s+cancer\s+type|subtype)\s*:\s*(.+)$", re.IGNORECASE)),
)


def _clean(text: str) -> str:
    return text.strip().strip(".,;:!?\"'`").strip()


def _norm(text: str) -> str:
    return " ".join(text.lower().split())


def parse_generation(raw: str) -> tuple[str | None, str | None, bool]:
    """Pull (broad, subtype) from labeled lines; never raises."""
    broad: str | None = None
    subtype: str | None = None
    for line in raw.splitlines():
        for field, pattern in _LINE_PATTERNS:
            m = pattern.match(line)
            if not m:
                continue
            value = _clean(m.group(1))
            if not value:
                continue
            if field == "broad" and broad is None:
                broad = value
            elif field == "subtype" and subtype is None:
                subtype = value
    if broad is None and subtype is None:
        for line in raw.splitlines():
            value = _clean(line)
            if value:
                broad = value
                break
    duplicate = broad is not None and subtype is not None and _norm(broad) == _norm(subtype)
    return broad, subtype, duplicate


def run_record(
    record: CorpusRecord,
    endpoint: str,
    template: PromptTemplate,
    params: GenerationParams,
    opener=None,
) -> GenerationResult:
    prompt = render_prompt(record, template, params.context_budget_chars)
    t0 = time.monotonic()
    try:
        raw = call_generation(endpoint, prompt, params, opener=opener)
        error = None
    except (ServiceError, ServiceTimeout, ServiceUnreachable) as exc:
        raw = ""
        error = exc.code
    latency_ms = int((time.monotonic() - t0) * 1000)
    broad, subtype, duplicate = parse_generation(raw)
    return GenerationResult(
        record_id=record.id,
        raw_text=raw,
        parsed_broad=broad,
        parsed_subtype=subtype,
        duplicate_answer_flag=duplicate,
        latency_ms=latency_ms,
        error=error,
    )
