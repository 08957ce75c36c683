"""Turn data facts into sentences with highlighted key messages.

Each fact type has a fixed template; key messages (variable names, values,
and pattern words) are located in the realized text by exact match and
recorded as spans. An optional completion service can polish a single-fact
card or merge a multi-fact card; any transport failure degrades to the
unrefined text.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources

import requests

from .dataset import format_number as num
from .facts import DataFact
from .intent import FACT_PRIORITY, FactType
from .sketch import Scope, Selection

log = logging.getLogger(__name__)

#: span kinds
VARIABLE = "variable"
VALUE = "value"
PATTERN = "pattern"

Span = tuple[int, int, str]
Message = tuple[str, str]

POLISH_INSTRUCTION = "Polish the following finding so it reads accurately, concisely, and naturally."
MERGE_INSTRUCTION = (
    "Rewrite the following findings into fluent prose, merging statements that carry similar information."
)


def default_prompt_template() -> str:
    return resources.files("sketchdoc").joinpath("prompts/refine.txt").read_text(encoding="utf-8")


@dataclass(frozen=True)
class Sentence:
    text: str
    spans: tuple[Span, ...]
    key_messages: tuple[Message, ...]
    fact_type: FactType
    fact_ref: str = ""


@dataclass(frozen=True)
class CardText:
    text: str
    spans: tuple[Span, ...]
    key_messages: tuple[Message, ...]


@dataclass(frozen=True)
class RefinerConfig:
    enabled: bool = False
    endpoint: str = ""
    api_key: str = ""
    timeout: float = 10.0
    prompt_template: str = field(default_factory=default_prompt_template)
    max_tokens: int = 256


# -- key-message matching -----------------------------------------------------

def match_spans(text: str, messages: tuple[Message, ...]) -> tuple[tuple[Span, ...], tuple[str, ...]]:
    """Locate key messages by exact match: first occurrence wins per message,
    overlap conflicts resolved longest-first. Returns (spans, dropped)."""
    seen: set[str] = set()
    unique: list[Message] = []
    for msg, kind in messages:
        if msg and msg not in seen:
            seen.add(msg)
            unique.append((msg, kind))
    claimed: list[Span] = []
    dropped: list[str] = []
    for msg, kind in sorted(unique, key=lambda m: -len(m[0])):
        start = 0
        placed = False
        while True:
            at = text.find(msg, start)
            if at < 0:
                break
            end = at + len(msg)
            if all(end <= s or at >= e for s, e, _ in claimed):
                claimed.append((at, end, kind))
                placed = True
                break
            start = at + 1
        if not placed:
            dropped.append(msg)
    return tuple(sorted(claimed)), tuple(dropped)


def highlight_key_messages(sentence: Sentence) -> Sentence:
    """Recompute spans from the sentence's key messages (dropped ones logged)."""
    spans, dropped = match_spans(sentence.text, sentence.key_messages)
    for msg in dropped:
        log.debug("key message %r not found in sentence", msg)
    return Sentence(sentence.text, spans, sentence.key_messages, sentence.fact_type, sentence.fact_ref)


# -- templates ----------------------------------------------------------------

def _item_phrase(item: dict, fact: DataFact) -> tuple[str, list[Message]]:
    msgs: list[Message] = []
    if item.get("category"):
        msgs.append((item["category"], VALUE))
        if fact.category:
            msgs.append((fact.category, VARIABLE))
        if item.get("x"):
            msgs.append((item["x"], VALUE))
    elif item.get("x") and item["label"].startswith(fact.breakdown):
        msgs.extend([(fact.breakdown, VARIABLE), (item["x"], VALUE)])
    elif item.get("x"):
        msgs.append((item["x"], VALUE))
    return item["label"], msgs


def _short_item_phrase(item: dict, fact: DataFact) -> tuple[str, list[Message]]:
    """Item label relative to the comparison context (avoid repeating it)."""
    if item.get("category") and fact.context_label.startswith(item["category"]):
        return item["x"], [(item["x"], VALUE)]
    if item.get("x") and fact.context_label.startswith(item["x"]) and item.get("category"):
        label = f"{item['category']} ({fact.category})"
        return label, [(item["category"], VALUE), (fact.category, VARIABLE)]
    return _item_phrase(item, fact)


def _context_messages(fact: DataFact) -> list[Message]:
    label = fact.context_label
    if label in ("all items", "the selected items", "the selected range"):
        return []
    return [(label.split(" (")[0], VALUE)]


def _ordinal(n: int) -> str:
    if 10 <= n % 100 <= 20:
        return f"{n}th"
    return f"{n}{({1: 'st', 2: 'nd', 3: 'rd'}.get(n % 10, 'th'))}"


def _realize_value(fact: DataFact) -> tuple[str, list[Message]]:
    label, msgs = _item_phrase(fact.params["item"], fact)
    value = num(fact.params["value"])
    text = f"The {fact.measure} of {label} is {value}."
    return text, [(fact.measure, VARIABLE), *msgs, (value, VALUE)]


def _realize_difference(fact: DataFact) -> tuple[str, list[Message]]:
    p = fact.params
    a_label, a_msgs = _item_phrase(p["itemA"], fact)
    b_label, b_msgs = _item_phrase(p["itemB"], fact)
    va, vb, delta = num(p["valueA"]), num(p["valueB"]), num(p["delta"])
    msgs: list[Message] = [(fact.measure, VARIABLE), *a_msgs, (va, VALUE), *b_msgs, (vb, VALUE)]
    if p["delta"] == 0:
        text = f"The {fact.measure} of {a_label} ({va}) equals that of {b_label} ({vb})."
        msgs.append(("equals", PATTERN))
        return text, msgs
    text = f"The {fact.measure} of {a_label} ({va}) is {delta} more than that of {b_label} ({vb})"
    msgs += [(delta, VALUE), ("more", PATTERN)]
    if "ratioInteger" in p:
        text += f", {p['ratioInteger']} times as large."
        msgs.append((f"{p['ratioInteger']} times", PATTERN))
    elif "percent" in p:
        pct = f"{p['percent']:.1f}%"
        text += f" ({pct} higher)."
        msgs.append((pct, VALUE))
    else:
        text += "."
    return text, msgs


def _realize_proportion(fact: DataFact) -> tuple[str, list[Message]]:
    label, msgs = _item_phrase(fact.params["item"], fact)
    share = f"{fact.params['share'] * 100:.1f}%"
    text = f"{label} accounts for {share} of the total {fact.measure}."
    return text, [*msgs, (share, VALUE), (fact.measure, VARIABLE)]


def _realize_trend(fact: DataFact) -> tuple[str, list[Message]]:
    p = fact.params
    direction = p["direction"]
    if direction == "wavering":
        if p["slope"] < 0:
            word, patterns = "wavered and decreased overall", ["wavered", "decreased"]
        elif p["slope"] > 0:
            word, patterns = "wavered and increased overall", ["wavered", "increased"]
        else:
            word, patterns = "wavered", ["wavered"]
    else:
        word = "increased" if direction == "increasing" else "decreased"
        patterns = [word]
    v0, vn = num(p["startValue"]), num(p["endValue"])
    x0, xn = p["startX"], p["endX"]
    msgs: list[Message] = [(fact.measure, VARIABLE)]
    if p.get("series"):
        series = p["series"]
        text = f"The {fact.measure} of {series['label']} {word} from {v0} to {vn} between {x0} and {xn}."
        if series.get("category"):
            msgs.append((series["category"], VALUE))
            if fact.category:
                msgs.append((fact.category, VARIABLE))
    else:
        text = f"The {fact.measure} {word} from {v0} to {vn} between {x0} and {xn}."
    msgs += [(v0, VALUE), (vn, VALUE), (x0, VALUE), (xn, VALUE)]
    msgs += [(w, PATTERN) for w in patterns]
    segments = p["segments"]
    if len(segments) > 1:
        seg_words = {"increasing": "increased", "decreasing": "decreased", "steady": "stayed flat"}
        clauses = []
        for seg in segments:
            w = seg_words[seg["direction"]]
            clauses.append(f"{w} from {seg['startX']} to {seg['endX']}")
            msgs += [(w, PATTERN), (seg["startX"], VALUE), (seg["endX"], VALUE)]
        text += " In detail, it " + ", then ".join(clauses) + "."
    return text, msgs


def _realize_rank(fact: DataFact) -> tuple[str, list[Message]]:
    p = fact.params
    top, last = p["top"], p["last"]
    n = p["contextSize"]
    top_label, top_msgs = _item_phrase(top["item"], fact)
    msgs: list[Message] = [*top_msgs, (_ordinal(top["position"]), VALUE), (fact.measure, VARIABLE)]
    msgs += _context_messages(fact)
    if top["item"]["rowId"] == last["item"]["rowId"]:
        text = (f"{top_label} ranks {_ordinal(top['position'])} of {n} by {fact.measure} "
                f"among {fact.context_label}.")
        return text, msgs
    last_label, last_msgs = _item_phrase(last["item"], fact)
    text = (f"{top_label} ranks {_ordinal(top['position'])} and {last_label} ranks "
            f"{_ordinal(last['position'])} of {n} by {fact.measure} among {fact.context_label}.")
    msgs += [*last_msgs, (_ordinal(last["position"]), VALUE)]
    return text, msgs


def _realize_distribution(fact: DataFact) -> tuple[str, list[Message]]:
    p = fact.params
    lo, hi, mean, median = num(p["min"]), num(p["max"]), num(p["mean"]), num(p["median"])
    text = (f"Across {p['count']} items, {fact.measure} ranges from {lo} to {hi} "
            f"with mean {mean} and median {median}.")
    msgs: list[Message] = [(fact.measure, VARIABLE), (lo, VALUE), (hi, VALUE),
                           (mean, VALUE), (median, VALUE)]
    corr = p.get("correlation")
    if corr in ("positive", "negative"):
        text += f" {fact.breakdown} and {fact.measure} show a {corr} association."
        msgs += [(fact.breakdown, VARIABLE), (corr, PATTERN)]
    elif corr == "none":
        text += f" {fact.breakdown} and {fact.measure} show no clear association."
        msgs.append((fact.breakdown, VARIABLE))
    return text, msgs


def _realize_extreme(fact: DataFact) -> tuple[str, list[Message]]:
    p = fact.params
    label, msgs = _short_item_phrase(p["item"], fact)
    word = "largest" if p["kind"] == "max" else "smallest"
    value = num(p["value"])
    text = f"Among {fact.context_label}, {label} has the {word} {fact.measure} ({value})."
    return text, [*_context_messages(fact), *msgs, (word, PATTERN), (fact.measure, VARIABLE), (value, VALUE)]


def _realize_outlier(fact: DataFact) -> tuple[str, list[Message]]:
    p = fact.params
    parts = []
    msgs: list[Message] = []
    for entry in p["outliers"]:
        label, item_msgs = _item_phrase(entry["item"], fact)
        parts.append(f"{label} ({num(entry['value'])})")
        msgs += [*item_msgs, (num(entry["value"]), VALUE)]
    lo, hi = num(p["fenceLow"]), num(p["fenceHigh"])
    if len(parts) == 1:
        text = f"{parts[0]} stands out as an outlier in {fact.measure}, beyond the typical range {lo} to {hi}."
        msgs.append(("outlier", PATTERN))
    else:
        text = (f"{', '.join(parts)} stand out as outliers in {fact.measure}, "
                f"beyond the typical range {lo} to {hi}.")
        msgs.append(("outliers", PATTERN))
    msgs += [(fact.measure, VARIABLE), (lo, VALUE), (hi, VALUE)]
    return text, msgs


_REALIZERS = {
    FactType.VALUE: _realize_value,
    FactType.DIFFERENCE: _realize_difference,
    FactType.PROPORTION: _realize_proportion,
    FactType.TREND: _realize_trend,
    FactType.RANK: _realize_rank,
    FactType.DISTRIBUTION: _realize_distribution,
    FactType.EXTREME: _realize_extreme,
    FactType.OUTLIER: _realize_outlier,
}


def realize_fact(fact: DataFact, fact_ref: str = "") -> Sentence:
    """One sentence from the fact's template, with key-message spans."""
    text, messages = _REALIZERS[fact.fact_type](fact)
    spans, _ = match_spans(text, tuple(messages))
    return Sentence(text, spans, tuple(messages), fact.fact_type, fact_ref)


def compose_card(sentences: list[Sentence], sel: Selection) -> CardText:
    """Join sentences in fact-priority order; multi-item direct selections get
    the "Among the selected x items" prefix."""
    order = {t: i for i, t in enumerate(FACT_PRIORITY)}
    ordered = sorted(sentences, key=lambda s: order[s.fact_type])
    text = " ".join(s.text for s in ordered)
    if len(sel.row_ids) > 1 and sel.scope in (Scope.ITEMS, Scope.RANGE):
        if text.startswith("The "):
            text = "the" + text[3:]
        text = f"Among the selected {len(sel.row_ids)} items, " + text
    messages: list[Message] = []
    seen: set[str] = set()
    for s in ordered:
        for msg, kind in s.key_messages:
            if msg not in seen:
                seen.add(msg)
                messages.append((msg, kind))
    spans, _ = match_spans(text, tuple(messages))
    return CardText(text, spans, tuple(messages))


# -- refinement -----------------------------------------------------------------

class HttpCompletionClient:
    """Minimal text-completion client: POST {prompt, maxTokens} -> {text}."""

    def __init__(self, cfg: RefinerConfig):
        self.cfg = cfg

    def complete(self, prompt: str) -> str:
        headers = {}
        if self.cfg.api_key:
            headers["Authorization"] = f"Bearer {self.cfg.api_key}"
        resp = requests.post(
            self.cfg.endpoint,
            json={"prompt": prompt, "maxTokens": self.cfg.max_tokens},
            headers=headers,
            timeout=self.cfg.timeout,
        )
        resp.raise_for_status()
        return resp.json()["text"]


def refine(card_texts: list[str], cfg: RefinerConfig, *,
           fact_counts: list[int] | None = None, client=None) -> list[str]:
    """Refine card texts via the completion service; never changes the card
    count and degrades to the input on any failure."""
    if not cfg.enabled:
        return list(card_texts)
    if client is None:
        if not cfg.endpoint:
            log.warning("refinement enabled but no endpoint configured; keeping template text")
            return list(card_texts)
        client = HttpCompletionClient(cfg)
    counts = fact_counts or [1] * len(card_texts)
    refined = []
    for text, n in zip(card_texts, counts):
        instruction = MERGE_INSTRUCTION if n > 1 else POLISH_INSTRUCTION
        prompt = cfg.prompt_template.format(instruction=instruction, text=text)
        try:
            refined.append(client.complete(prompt).strip() or text)
        except Exception as exc:  # degrade, never fail the pipeline
            log.warning("refinement failed (%s); keeping template text", exc)
            refined.append(text)
    return refined
