"""Command parsing: prompt template, grammar engine, schema, corpus, LLM glue."""
import json

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdm.parsing import default_corpus_path
from sdm.parsing.grammar import parse_with_grammar
from sdm.parsing.harness import evaluate_corpus, load_corpus
from sdm.parsing.llm import LlmClient, LlmConfigError, extract_json_object, parse_with_llm
from sdm.parsing.prompt import PromptError, build_cot_prompt
from sdm.parsing.schema import StructuredCommand, validate_schema

CORPUS = default_corpus_path()


# ---------------------------------------------------------------- prompt

def test_prompt_has_five_steps_exactly_once():
    p = build_cot_prompt("move the slot 3mm forward")
    for k in range(1, 6):
        assert p.count(f"Step {k}:") == 1
    assert p.count("Step 6:") == 0
    assert "conducts self-verification to ensure" in p


def test_prompt_is_deterministic_and_quotes_command():
    a = build_cot_prompt("delete the pocket")
    b = build_cot_prompt("delete the pocket")
    assert a == b
    assert 'Command: "delete the pocket"' in a


def test_prompt_worked_example_is_multi_operation():
    p = build_cot_prompt("x")
    first = extract_json_object(p[p.index("Example 1"):])
    assert first is not None
    assert len(first["commands"]) >= 2
    kinds = [c["operation"]["type"] for c in first["commands"]]
    assert len(set(kinds)) >= 2


def test_prompt_rejects_bad_inputs():
    with pytest.raises(PromptError):
        build_cot_prompt("   ")
    with pytest.raises(PromptError):
        build_cot_prompt("move it", version="v99")


# ---------------------------------------------------------------- grammar

def test_grammar_single_delete():
    res = parse_with_grammar("delete the circular through hole")
    assert res.ok and res.source == "grammar"
    d = res.structured.to_dict()
    assert len(d["commands"]) == 1
    cmd = d["commands"][0]
    assert cmd["feature"]["type"] == "circular_through_hole"
    assert cmd["operation"] == {"type": "delete", "parameters": {}}
    assert d["verified"] is True


def test_grammar_two_clauses_with_anaphora():
    res = parse_with_grammar(
        "rotate the pocket 45 degrees about z and move it 2 mm along y")
    assert res.ok
    first, second = [c for c in res.structured.to_dict()["commands"]]
    assert first["operation"] == {
        "type": "rotate", "parameters": {"axis": "Z", "angle_deg": 45.0}}
    assert first["feature"]["type"] == "rect_pocket"
    assert second["feature"] == {"type": "rect_pocket", "hint": "it"}
    assert second["operation"] == {
        "type": "move",
        "parameters": {"axis": "Y", "sign": "+", "distance_mm": 2.0}}


def test_grammar_failure_names_clause_and_offset():
    res = parse_with_grammar("make it nicer")
    assert not res.ok
    assert "clause 1" in res.failure and "offset 0" in res.failure

    res = parse_with_grammar("delete the step, then make it nicer")
    assert not res.ok
    assert "clause 2" in res.failure


def test_grammar_direction_words():
    got = parse_with_grammar("move the slot 3mm down").structured.to_dict()
    assert got["commands"][0]["operation"]["parameters"] == {
        "axis": "Z", "sign": "-", "distance_mm": 3.0}
    got = parse_with_grammar("translate the step 10 mm left").structured.to_dict()
    assert got["commands"][0]["operation"]["parameters"] == {
        "axis": "Y", "sign": "-", "distance_mm": 10.0}


def test_grammar_negative_axis_and_clockwise():
    got = parse_with_grammar(
        "move the slot 5 mm along the negative z axis").structured.to_dict()
    assert got["commands"][0]["operation"]["parameters"] == {
        "axis": "Z", "sign": "-", "distance_mm": 5.0}
    got = parse_with_grammar(
        "turn the step 30 degrees clockwise about y").structured.to_dict()
    assert got["commands"][0]["operation"]["parameters"] == {
        "axis": "Y", "angle_deg": -30.0}


def test_grammar_resize_semantics():
    cases = [
        ("shrink the pocket by a factor of 4", 0.25),
        ("scale the hole to 150%", 1.5),
        ("enlarge the step 2x", 2.0),
        ("reduce the slot to half", 0.5),
        ("grow the notch by 1.5", 1.5),
    ]
    for text, factor in cases:
        res = parse_with_grammar(text)
        assert res.ok, (text, res.failure)
        assert res.structured.to_dict()["commands"][0]["operation"] == {
            "type": "resize", "parameters": {"factor": factor}}, text


def test_grammar_missing_parameter_is_located():
    res = parse_with_grammar("move the slot forward")
    assert not res.ok and "distance" in res.failure
    res = parse_with_grammar("rotate the pocket about z")
    assert not res.ok and "angle" in res.failure


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=80))
def test_grammar_is_total_and_deterministic(text):
    a = parse_with_grammar(text)
    b = parse_with_grammar(text)
    assert (a.structured is None) == (b.structured is None)
    if a.ok:
        assert a.structured.to_dict() == b.structured.to_dict()
        # success implies the schema accepts its own output
        again = validate_schema(a.structured.to_dict())
        assert isinstance(again, StructuredCommand)
    else:
        assert a.failure and a.failure == b.failure


_WORDS = ["move", "rotate", "delete", "shrink", "the", "a", "slot", "pocket",
          "hole", "step", "notch", "it", "3", "mm", "45", "degrees", "left",
          "up", "about", "z", "and", "then", "by", "%", "factor", "of"]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(_WORDS), min_size=1, max_size=12))
def test_grammar_word_salad_never_crashes(words):
    res = parse_with_grammar(" ".join(words))
    if res.ok:
        assert isinstance(validate_schema(res.structured.to_dict()),
                          StructuredCommand)
    else:
        assert isinstance(res.failure, str) and res.failure


# ---------------------------------------------------------------- schema

def _move_entry(**over):
    entry = {"feature": {"type": "rect_through_slot"},
             "operation": {"type": "move",
                           "parameters": {"axis": "X", "sign": "+",
                                          "distance_mm": 3.0}}}
    entry["operation"]["parameters"].update(over)
    return entry


def test_schema_accepts_two_op_command():
    cand = {"commands": [
        _move_entry(),
        {"feature": {"type": "rect_pocket", "hint": "rear"},
         "operation": {"type": "rotate",
                       "parameters": {"axis": "Z", "angle_deg": 45.0}}},
    ], "verified": True}
    got = validate_schema(cand)
    assert isinstance(got, StructuredCommand)
    assert len(got.commands) == 2 and got.verified
    assert got.to_dict() == cand


def test_schema_enumerates_all_violations():
    cand = {"commands": [
        {"feature": {"type": "warp_core"},
         "operation": {"type": "move", "parameters": {"axis": "Q", "sign": "+"}}},
    ], "verified": True}
    got = validate_schema(cand)
    assert isinstance(got, list)
    joined = " | ".join(got)
    assert len(got) >= 3
    assert "warp_core" in joined
    assert "axis" in joined
    assert "distance_mm" in joined


def test_schema_rejects_bad_values():
    for bad in [
        {"commands": [_move_entry(distance_mm=-3.0)], "verified": True},
        {"commands": [_move_entry(distance_mm=0)], "verified": True},
        {"commands": [{"feature": {"type": "step"},
                       "operation": {"type": "rotate",
                                     "parameters": {"axis": "X",
                                                    "angle_deg": 360.0}}}]},
        {"commands": [{"feature": {"type": "step"},
                       "operation": {"type": "rotate",
                                     "parameters": {"axis": "X",
                                                    "angle_deg": 0.0}}}]},
        {"commands": [{"feature": {"type": "step"},
                       "operation": {"type": "resize",
                                     "parameters": {"factor": 0.0}}}]},
        {"commands": [{"feature": {"type": "step"},
                       "operation": {"type": "delete",
                                     "parameters": {"oops": 1}}}]},
        {"commands": [], "verified": True},
        {"verified": True},
    ]:
        got = validate_schema(bad)
        assert isinstance(got, list) and got, bad


def test_schema_feature_aliases_canonicalized():
    cand = {"commands": [
        {"feature": {"type": "slot"},
         "operation": {"type": "delete", "parameters": {}}}]}
    got = validate_schema(cand)
    assert isinstance(got, StructuredCommand)
    assert got.commands[0].feature.type == "rect_through_slot"


# ---------------------------------------------------------------- corpus

def test_corpus_shape():
    rows = load_corpus(CORPUS)
    assert len(rows) == 40
    assert sum(1 for r in rows if r["grammar_supported"]) == 38
    tiers = {r["tier"] for r in rows}
    assert tiers == {"simple", "complex"}
    for r in rows:
        assert isinstance(validate_schema(r["gold"]), StructuredCommand)


def test_corpus_grammar_accuracy():
    sup = evaluate_corpus(CORPUS, engine="grammar", only_supported=True)
    assert sup["correct"] == sup["n"] == 38

    full = evaluate_corpus(CORPUS, engine="grammar")
    assert full["n"] == 40 and full["correct"] == 38
    assert full["accuracy"] == pytest.approx(0.95)
    for failure in full["failures"]:
        assert not failure["grammar_supported"]
        assert "clause" in failure["reason"] and "offset" in failure["reason"]


# ---------------------------------------------------------------- llm glue

def test_extract_json_object_from_prose():
    text = ('Sure. Reasoning: {braces} appear in prose too.\n'
            'JSON:\n{"commands": [{"feature": {"type": "step"}, "operation": '
            '{"type": "delete", "parameters": {}}}], "verified": true}\nDone.')
    got = extract_json_object(text)
    assert got is not None and got["verified"] is True
    assert got["commands"][0]["feature"]["type"] == "step"


def test_extract_json_object_handles_strings_and_noise():
    assert extract_json_object("no json here") is None
    assert extract_json_object('{broken} {"a": "b } c", "d": 2}') == {
        "a": "b } c", "d": 2}
    assert extract_json_object('x {"a": {"b": [1, 2]}} y') == {"a": {"b": [1, 2]}}


class _ScriptedClient:
    """Stands in for LlmClient; replays canned replies or raises."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.prompts = []

    def complete(self, prompt):
        self.prompts.append(prompt)
        reply = self.replies.pop(0)
        if isinstance(reply, Exception):
            raise reply
        return reply


_GOOD_JSON = json.dumps({"commands": [
    {"feature": {"type": "rect_pocket"},
     "operation": {"type": "move",
                   "parameters": {"axis": "Y", "sign": "-", "distance_mm": 2.0}}}],
    "verified": True})


def test_llm_parse_success_first_try():
    client = _ScriptedClient(["Step 1: ... final JSON\n" + _GOOD_JSON])
    res = parse_with_llm("move the pocket 2 mm left", client)
    assert res.ok and res.source == "llm"
    assert res.structured.commands[0].operation.parameters["axis"] == "Y"
    assert len(client.prompts) == 1
    assert 'Command: "move the pocket 2 mm left"' in client.prompts[0]


def test_llm_parse_repair_retry_succeeds():
    bad = _GOOD_JSON.replace('2.0', '-2.0')
    client = _ScriptedClient([bad, _GOOD_JSON])
    res = parse_with_llm("move the pocket 2 mm left", client)
    assert res.ok
    assert len(client.prompts) == 2
    assert "failed schema validation" in client.prompts[1]
    assert res.raw.count("---") == 1


def test_llm_parse_fails_after_retry():
    bad = _GOOD_JSON.replace('2.0', '-2.0')
    client = _ScriptedClient([bad, bad])
    res = parse_with_llm("move the pocket 2 mm left", client)
    assert not res.ok
    assert res.failure.startswith("schema-invalid after retry")


def test_llm_parse_no_json_in_replies():
    client = _ScriptedClient(["I cannot help with that.", "Still prose."])
    res = parse_with_llm("move the pocket 2 mm left", client)
    assert not res.ok and "no JSON object" in res.failure


def test_llm_parse_transport_failure():
    client = _ScriptedClient([httpx.ConnectError("connection refused")])
    res = parse_with_llm("move the pocket 2 mm left", client)
    assert not res.ok and "transport failure" in res.failure


def test_llm_client_requires_endpoint():
    with pytest.raises(LlmConfigError):
        LlmClient("", "some-model")
