import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctm import make_counter_timer
from ctm.dsl import (
    AttributeDecl,
    CounterTimerDecl,
    CustomTimerDecl,
    LawDecl,
    ModelDecl,
    ParticleTimerDecl,
    SubstrateDecl,
    TaskDecl,
    VariableDecl,
    build_model,
    parse_model,
    pretty_print,
    validate_model,
)


def parse_ok(text):
    result = parse_model(text)
    assert result.ok, result.diagnostics
    return result.model


# parsing ----------------------------------------------------------------------


def test_counter_decl_equals_programmatic_constructor():
    model = build_model(parse_ok("timer counter C1 { bits 4 ; threshold 5 }"))
    spec = model.timers["C1"]
    reference = make_counter_timer(4, 5)
    assert spec.duration == reference.duration
    assert spec.attr0.members == reference.attr0.members
    assert spec.attrR.members == reference.attrR.members
    assert spec.attr1.members == reference.attr1.members
    assert spec.static_horizon == reference.static_horizon


def test_empty_file_is_empty_model():
    result = parse_model("")
    assert result.ok and result.model.empty and result.diagnostics == []


def test_unresolved_law_reference_gets_diagnostic_with_span():
    model = parse_ok("law possible task F on P")
    diags = validate_model(model)
    assert diags and diags[0].severity == "error"
    assert diags[0].line == 1 and diags[0].column == 1
    assert "unknown task 'F'" in diags[0].message


def test_duplicate_names_rejected():
    result = parse_model(
        "substrate S { states a ; step (a) }\nsubstrate S { states b ; step (b) }"
    )
    assert not result.ok
    assert any("duplicate" in d.message for d in result.diagnostics)


def test_incomplete_step_map_is_not_a_bijection():
    result = parse_model("substrate S { states a b ; step (a) }")
    assert not result.ok
    d = result.diagnostics[0]
    assert "not a bijection" in d.message and d.suggestion


def test_repeated_state_in_cycles_rejected():
    result = parse_model("substrate S { states a b ; step (a b)(a) }")
    assert not result.ok
    assert any("twice" in d.message for d in result.diagnostics)


def test_unknown_character_reported_not_raised():
    result = parse_model("law possible € -> y on P")
    assert not result.ok
    assert any("unexpected character" in d.message for d in result.diagnostics)


def test_status_marks_accepted():
    model = parse_ok(
        "substrate S { states a b ; step (a b) }\n"
        "attribute x on S { a }\nattribute y on S { b }\n"
        "law ✓ x -> y on S\nlaw ✗ y -> x on S"
    )
    statuses = sorted(law.status for law in model.laws)
    assert statuses == ["impossible", "possible"]


def test_every_diagnostic_has_a_span_inside_the_input():
    bad_inputs = [
        "substrate { states a ; step (a) }",
        "timer counter X { bits ; threshold 2 }",
        "law maybe x -> y on P",
        "attribute on S { }",
        "variable V on S { 0 : a 1.0 }",
    ]
    for text in bad_inputs:
        result = parse_model(text)
        assert not result.ok
        lines = text.count("\n") + 1
        for d in result.diagnostics:
            assert 1 <= d.line <= lines + 1
            assert d.column >= 1


# round trips -------------------------------------------------------------------


def fixture_texts(models_dir):
    return sorted(models_dir.glob("*.ctm"))


def test_shipped_fixtures_round_trip(models_dir):
    paths = fixture_texts(models_dir)
    assert len(paths) >= 5
    for path in paths:
        model = parse_ok(path.read_text())
        printed = pretty_print(model)
        again = parse_ok(printed)
        assert again == model, path
        assert pretty_print(again) == printed, path


def test_shipped_fixtures_validate_clean(models_dir):
    for path in fixture_texts(models_dir):
        model = parse_ok(path.read_text())
        errors = [d for d in validate_model(model) if d.severity == "error"]
        assert errors == [], path


def test_canonical_section_order():
    text = pretty_print(
        parse_ok(
            "law possible x -> y on S\n"
            "attribute y on S { b }\n"
            "timer counter C { bits 3 ; threshold 2 }\n"
            "attribute x on S { a }\n"
            "substrate S { states a b ; step (a b) }"
        )
    )
    keywords = [line.split()[0] for line in text.splitlines()]
    assert keywords == ["substrate", "attribute", "attribute", "timer", "law"]


NAMES = [f"n{i}" for i in range(40)]


def random_decl(rng: random.Random) -> ModelDecl:
    substrates = {}
    attributes = {}
    names = iter(rng.sample(NAMES, len(NAMES)))
    for _ in range(rng.randrange(1, 3)):
        name = next(names)
        n = rng.randrange(1, 6)
        states = tuple(f"s{i}" for i in range(n))
        image = list(states)
        rng.shuffle(image)
        substrates[name] = SubstrateDecl(name, states, dict(zip(states, image)))
    sub_names = list(substrates)
    for _ in range(rng.randrange(0, 4)):
        name = next(names)
        sub = rng.choice(sub_names)
        members = frozenset(
            s for s in substrates[sub].states if rng.random() < 0.5
        )
        attributes[name] = AttributeDecl(name, sub, members)
    timers = {}
    for _ in range(rng.randrange(0, 3)):
        name = next(names)
        kind = rng.randrange(3)
        if kind == 0:
            timers[name] = CounterTimerDecl(name, rng.randrange(2, 6), rng.randrange(1, 4))
        elif kind == 1:
            speed = rng.choice((1, 2))
            timers[name] = ParticleTimerDecl(name, 16, speed, speed * rng.randrange(1, 5))
        else:
            attr_pool = list(attributes) or ["missing"]
            timers[name] = CustomTimerDecl(
                name,
                rng.choice(sub_names),
                rng.choice(attr_pool),
                rng.choice(attr_pool),
                rng.choice(attr_pool),
                rng.choice(attr_pool) if rng.random() < 0.5 else None,
            )
    tasks = {}
    attr_pool = list(attributes)
    for _ in range(rng.randrange(0, 2)):
        if not attr_pool:
            break
        name = next(names)
        tasks[name] = TaskDecl(
            name, rng.choice(sub_names), rng.choice(attr_pool), rng.choice(attr_pool)
        )
    laws = []
    for _ in range(rng.randrange(0, 3)):
        status = rng.choice(("possible", "impossible"))
        if tasks and rng.random() < 0.4:
            laws.append(LawDecl(status, task=rng.choice(list(tasks))))
        elif attr_pool:
            laws.append(
                LawDecl(
                    status,
                    input=rng.choice(attr_pool),
                    output=rng.choice(attr_pool),
                    substrate=rng.choice(sub_names),
                )
            )
    variables = {}
    for _ in range(rng.randrange(0, 2)):
        if not attr_pool:
            break
        name = next(names)
        entries = {
            lam: (rng.choice(attr_pool), round(rng.uniform(-4, 4), 6))
            for lam in rng.sample(range(12), rng.randrange(1, 4))
        }
        variables[name] = VariableDecl(name, rng.choice(sub_names), entries)
    return ModelDecl(substrates, attributes, timers, tasks, tuple(laws), variables)


def test_generated_models_round_trip():
    rng = random.Random(424242)
    for _ in range(300):
        decl = random_decl(rng)
        printed = pretty_print(decl)
        reparsed = parse_model(printed)
        assert reparsed.ok, (printed, reparsed.diagnostics)
        assert reparsed.model == decl, printed
        assert pretty_print(reparsed.model) == printed


@settings(max_examples=120, deadline=None)
@given(st.integers(min_value=0, max_value=2**31))
def test_round_trip_property(seed):
    decl = random_decl(random.Random(seed))
    printed = pretty_print(decl)
    reparsed = parse_model(printed)
    assert reparsed.ok and reparsed.model == decl


# fuzzing -----------------------------------------------------------------------


FUZZ_ALPHABET = string.ascii_letters + string.digits + "{}();:@->✓✗ \n\t#._" + '"'


def test_fuzz_parser_never_raises():
    rng = random.Random(1234)
    base = "substrate S { states a b ; step (a b) }\nlaw possible x -> y on S\n"
    for i in range(2000):
        if i % 3 == 0:
            text = "".join(rng.choice(FUZZ_ALPHABET) for _ in range(rng.randrange(0, 80)))
        else:
            cut = rng.randrange(0, len(base))
            insert = "".join(rng.choice(FUZZ_ALPHABET) for _ in range(rng.randrange(0, 10)))
            text = base[:cut] + insert + base[cut:]
        result = parse_model(text)
        if not result.ok:
            assert result.diagnostics


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=120))
def test_fuzz_parser_total_on_arbitrary_text(text):
    result = parse_model(text)
    assert result.ok or result.diagnostics


# validation / build ---------------------------------------------------------------


def test_validate_flags_static_starting_attribute():
    text = (
        "substrate F { states f0 f1 f2 ; step (f0)(f1)(f2) }\n"
        "attribute z on F { f0 }\nattribute r on F { f1 }\nattribute o on F { f2 }\n"
        "timer custom K on F { start z ; running r ; done o }"
    )
    diags = validate_model(parse_ok(text))
    assert any(
        d.severity == "error" and "not a well-formed null constructor" in d.message
        for d in diags
    )


def test_validate_flags_attribute_outside_substrate():
    text = "substrate S { states a ; step (a) }\nattribute x on S { zz }"
    diags = validate_model(parse_ok(text))
    assert any("not states of" in d.message for d in diags)


def test_build_wires_laws_and_variables(models_dir):
    model = build_model(parse_ok((models_dir / "rotation.ctm").read_text()))
    assert set(model.timers) == {"T8", "T4", "T2", "T1"}
    assert "theta" in model.trajectories
    assert len(model.trajectories["theta"].variable.domain) == 17


def test_degenerate_counter_warned_not_rejected():
    diags = validate_model(parse_ok("timer counter C { bits 3 ; threshold 1 }"))
    assert any(d.severity == "warning" and "empty" in d.message for d in diags)
    assert not any(d.severity == "error" for d in diags)


def test_load_model_one_step():
    from ctm import ModelError
    from ctm.dsl import load_model

    model, diags = load_model("timer counter C { bits 4 ; threshold 5 }")
    assert model.timers["C"].duration == 5
    with pytest.raises(ModelError):
        load_model("timer counter C { bits 3 ; threshold 9 }")
