"""Accuracy harness for the command corpus.

Corpus format: JSON lines of {text, gold, tier: simple|complex,
grammar_supported: bool}. A parse counts as correct only when its JSON
form equals the gold object exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

from .grammar import parse_with_grammar
from .llm import parse_with_llm


def load_corpus(path) -> list[dict]:
    entries = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        entry = json.loads(line)
        for key in ("text", "gold", "tier", "grammar_supported"):
            if key not in entry:
                raise ValueError(f"corpus line {line_no} missing {key!r}")
        entries.append(entry)
    return entries


def evaluate_corpus(path, engine: str = "grammar", client=None,
                    only_supported: bool = False) -> dict:
    """Run one engine over the corpus; returns accuracy plus diagnostics."""
    entries = load_corpus(path)
    if only_supported:
        entries = [e for e in entries if e["grammar_supported"]]
    correct = 0
    failures = []
    for idx, entry in enumerate(entries):
        if engine == "grammar":
            res = parse_with_grammar(entry["text"])
        elif engine == "llm":
            res = parse_with_llm(entry["text"], client)
        else:
            raise ValueError(f"unknown engine {engine!r}")
        if res.ok and res.structured.to_dict() == entry["gold"]:
            correct += 1
        else:
            failures.append({
                "index": idx,
                "text": entry["text"],
                "tier": entry["tier"],
                "grammar_supported": entry["grammar_supported"],
                "reason": res.failure if not res.ok else "mismatch with gold",
                "got": res.structured.to_dict() if res.ok else None,
            })
    n = len(entries)
    return {
        "engine": engine,
        "n": n,
        "correct": correct,
        "accuracy": correct / n if n else 0.0,
        "failures": failures,
    }
