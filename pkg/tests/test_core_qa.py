from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamesynth.core import LEVELS, SAMPLE_KEYS, Level, Registry, Sample, TaskSpec, TP, validate_sample
from gamesynth.qa import (
    AnswerExtractionError,
    Derivation,
    DistractorPolicy,
    OptionDomainError,
    SampleAssemblyError,
    TemplateError,
    assemble_sample,
    build_options,
    extract_final_answer,
    fill_template,
    fixed_options,
    format_options,
    placeholders,
)
from gamesynth.rng import derive_rng

MCQ = TaskSpec("demo", "q1", TP, Level.EASY, 4, "demo task")
FILL = TaskSpec("demo", "q2", TP, Level.EASY, 0, "fill task")
LETTER = TaskSpec("demo", "q3", TP, Level.EASY, 4, "letter task", label_style="letter")


# ------------------------------------------------------------------ templates


def test_placeholders_in_order():
    assert placeholders("<a> then <b> then <a>") == ["a", "b", "a"]


def test_fill_template_binds_everything():
    assert fill_template("Move <dir> from <pos>.", {"dir": "up", "pos": "(1, 2)"}) == "Move up from (1, 2)."


def test_fill_template_missing_binding():
    with pytest.raises(TemplateError):
        fill_template("Move <dir>.", {})


# ------------------------------------------------------------------ options


def test_build_options_contains_correct_once():
    rng = derive_rng(1, ["opt"])
    opts = build_options(5, DistractorPolicy("NumericNeighborhood", {"lo": 0}), 8, rng)
    assert len(opts) == 8 and opts.correct == "5"
    assert len(set(opts.options)) == 8


def test_numeric_neighborhood_widens_when_needed():
    rng = derive_rng(1, ["wide"])
    opts = build_options(0, DistractorPolicy("NumericNeighborhood", {"lo": 0}), 8, rng)
    assert all(int(o) >= 0 for o in opts.options)


def test_categorical_pool_too_small():
    rng = derive_rng(1, ["small"])
    with pytest.raises(OptionDomainError):
        build_options("a", DistractorPolicy("CategoricalPool", {"pool": ["a", "b"]}), 4, rng)


def test_accept_hook_filters_candidates():
    rng = derive_rng(2, ["acc"])
    pol = DistractorPolicy("NumericNeighborhood", {"lo": 0, "hi": 20, "accept": lambda t: int(t) % 2 == 0})
    opts = build_options(4, pol, 5, rng)
    assert all(int(o) % 2 == 0 for o in opts.options)


def test_coordinate_perturb_prefers_neighbours():
    cells = [(r, c) for r in range(5) for c in range(5)]
    rng = derive_rng(3, ["coord"])
    opts = build_options((2, 2), DistractorPolicy("CoordinatePerturb", {"cells": cells, "neighbors_first": True}), 5, rng)
    assert set(opts.options) == {"(2, 2)", "(1, 2)", "(3, 2)", "(2, 1)", "(2, 3)"}


def test_fixed_options_keep_order():
    opts = fixed_options(["red", "blue", "white"], "white")
    assert opts.options == ("red", "blue", "white") and opts.correct_index == 3


@pytest.mark.parametrize("k", [4, 8])
def test_correct_position_roughly_uniform(k):
    counts = Counter()
    pol = DistractorPolicy("NumericNeighborhood", {"lo": 0})
    for i in range(2000):
        counts[build_options(10, pol, k, derive_rng(4, ["fair", k, i])).correct_index] += 1
    for slot in range(1, k + 1):
        assert abs(counts[slot] / 2000 - 1 / k) < 0.04


@given(st.integers(0, 200), st.integers(2, 9), st.integers(0, 10**6))
@settings(max_examples=80)
def test_options_always_valid(correct, k, salt):
    opts = build_options(correct, DistractorPolicy("NumericNeighborhood", {"lo": 0}), k, derive_rng(salt, ["p"]))
    assert opts.correct == str(correct)
    assert len(set(opts.options)) == k


def test_format_options_styles():
    assert format_options(["x", "y"], "bracket") == "Options:\n[1] x\n[2] y"
    assert format_options(["x", "y"], "letter") == "Options:\nA. x\nB. y"
    assert format_options(["x", "y"], "colon") == "Options:\n1: x\n2: y"


# ------------------------------------------------------------------ answers


def test_extract_mcq_number_and_letter():
    assert extract_final_answer("blah. The option number is 4.", "MultipleChoice") == 4
    assert extract_final_answer("blah. The option letter is C.", "MultipleChoice") == 3


def test_extract_takes_last_declaration():
    text = "The option number is 2. On reflection... The option number is 5."
    assert extract_final_answer(text, "MultipleChoice") == 5


def test_extract_fill_in():
    assert extract_final_answer("work\nSo the answer is [[0, 1, 0]].", "FillIn") == "[[0, 1, 0]]"


def test_extract_missing():
    with pytest.raises(AnswerExtractionError):
        extract_final_answer("no conclusion", "FillIn")
    with pytest.raises(AnswerExtractionError):
        extract_final_answer("no conclusion", "MultipleChoice")


def _derived(answer="b", opts=None):
    return Derivation("Which?", "Step 1. Step 2.", answer, scene=None,
                      options=opts if opts is not None else fixed_options(["a", "b", "c", "d"], "b"))


def test_assemble_mcq_sample():
    s = assemble_sample(MCQ, Level.MEDIUM, _derived(), intro="Intro.", index=3, seed=42)
    assert s.id == "demo-q1-M-00003"
    assert s.answer == 2 and s.options == ["a", "b", "c", "d"]
    assert s.question.startswith("Intro.\n\nWhich?")
    assert s.analysis.endswith("So the answer is b. The option number is 2.")
    assert validate_sample(s, MCQ) == []


def test_assemble_letter_terminal():
    s = assemble_sample(LETTER, Level.EASY, _derived(), intro="", index=0, seed=1)
    assert s.analysis.endswith("The option letter is B.")


def test_assemble_rejects_wrong_correct_option():
    with pytest.raises(SampleAssemblyError):
        assemble_sample(MCQ, Level.EASY, _derived(answer="c"), intro="", index=0, seed=1)


def test_assemble_rejects_option_count_mismatch():
    d = _derived(opts=fixed_options(["a", "b", "c"], "b"))
    with pytest.raises(SampleAssemblyError):
        assemble_sample(MCQ, Level.EASY, d, intro="", index=0, seed=1)


def test_assemble_fill_in():
    d = Derivation("How many?", "Counting.", "7", scene=None)
    s = assemble_sample(FILL, Level.HARD, d, intro="", index=1, seed=1)
    assert s.answer == "7" and s.options == []


# ------------------------------------------------------------------ sample record


def _sample(**kw):
    d = Derivation("How many?", "Counting.", "7", scene=None)
    s = assemble_sample(FILL, Level.EASY, d, intro="", index=0, seed=1)
    for k, v in kw.items():
        setattr(s, k, v)
    return s


def test_json_round_trip_and_key_order():
    s = assemble_sample(MCQ, Level.EASY, _derived(), intro="x", index=0, seed=9)
    d = s.to_dict()
    assert tuple(d) == SAMPLE_KEYS
    assert Sample.from_dict(d) == s


def test_validate_flags_inconsistent_answer():
    s = _sample(answer="8")
    assert any("inconsistency" in p for p in validate_sample(s))


def test_validate_flags_absolute_image_path():
    assert "image path must be relative" in validate_sample(_sample(image_path="/tmp/x.png"))


def test_validate_flags_unresolved_placeholder():
    assert "unresolved placeholder in question" in validate_sample(_sample(question="Where is <object>?"))


def test_registry_rejects_duplicates(registry):
    r = Registry()
    g = registry.get("sokoban")
    r.register(g)
    with pytest.raises(ValueError):
        r.register(g)


def test_taskspec_rejects_unknown_label_style():
    with pytest.raises(ValueError):
        TaskSpec("demo", "q9", TP, Level.EASY, 4, "x", label_style="roman")


def test_levels_order():
    assert [lv.initial for lv in LEVELS] == ["E", "M", "H"]
