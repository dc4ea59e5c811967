from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgrex import templates
from kgrex.ingest import LinkedMention
from kgrex.kb import GroundedFact
from kgrex.model import Example, EntityMention, TaskKind

ALICO_TEXT = ("The two companies were preparing to announce that AIG had agreed "
              "to sell American Life Insurance Co , better known as Alico , for "
              "68 billion dollars in cash and 87 billion in MetLife equity , "
              "the report said .")
ALICO_T1 = ("The two companies were preparing to announce that AIG had agreed "
            "to sell [ms] American Life Insurance Co [gr] business , better "
            "known as [ms] Alico [gr] business , for 68 billion dollars in "
            "cash and 87 billion in MetLife equity , the report said .")

BAVARIAN_TEXT = "1634: The Bavarian Crisis is the sequel to The Grantville Gazettes ."
BAVARIAN_T2 = ("1634: The Bavarian Crisis is the sequel to The Grantville "
               "Gazettes . [gr] 1634: The Bavarian Crisis is an instance of "
               "literary work [gr] The Grantville Gazette is an instance of "
               "literary work")


def fact(surface, start, kb_id, type_label, kb_label=None):
    m = LinkedMention(surface=surface, start=start, end=start + len(surface),
                      kb_id=kb_id, score=-1.0)
    return GroundedFact(mention=m, type_label=type_label,
                        kb_label=kb_label if kb_label is not None else surface)


def alico_example():
    start1 = ALICO_TEXT.index("American Life Insurance Co")
    start2 = ALICO_TEXT.index("Alico ,")
    return Example(
        id="test_1013", text=ALICO_TEXT, task=TaskKind.ETRC,
        gold_entities=(EntityMention("American Life Insurance Co", start1,
                                     start1 + 26, "ORGANIZATION"),
                       EntityMention("Alico", start2, start2 + 5,
                                     "ORGANIZATION")))


def alico_kg():
    ex = alico_example()
    return {ex.id: [fact(m.surface, m.start, f"Q{i}", "business")
                    for i, m in enumerate(ex.gold_entities)]}


def bavarian_example():
    return Example(id="test_578", text=BAVARIAN_TEXT, task=TaskKind.JREE)


def bavarian_kg():
    return {"test_578": [
        fact("1634: The Bavarian Crisis", 0, "QA", "literary work"),
        fact("The Grantville Gazettes", BAVARIAN_TEXT.index("The Grantville"),
             "QB", "literary work", kb_label="The Grantville Gazette"),
    ]}


class TestBuildT1:
    def test_golden_with_ms_marker(self):
        cfg = templates.TemplateConfig(entity_start_token="[ms]")
        assert templates.build_t1(alico_example(), alico_kg(), cfg) == ALICO_T1

    def test_no_kg_keeps_only_start_markers(self):
        cfg = templates.TemplateConfig(entity_start_token="[ms]",
                                       ablation_mode="no_kg")
        expected = ALICO_T1.replace(" [gr] business", "")
        assert templates.build_t1(alico_example(), alico_kg(), cfg) == expected

    def test_mention_without_type_gets_start_marker_only(self):
        ex = Example(id="e", text="Ada met Bo .", task=TaskKind.RC,
                     gold_entities=(EntityMention("Ada", 0, 3),
                                    EntityMention("Bo", 8, 10)))
        kg = {"e": [fact("Bo", 8, "Q2", "human")]}
        got = templates.build_t1(ex, kg, templates.TemplateConfig())
        assert got == "[es] Ada met [es] Bo [gr] human ."

    def test_other_characters_preserved(self):
        out = templates.build_t1(alico_example(), alico_kg(),
                                 templates.TemplateConfig())
        stripped = out.replace("[es] ", "").replace(" [gr] business", "")
        assert stripped == ALICO_TEXT

    def test_jree_task_rejected(self):
        with pytest.raises(templates.TemplateError, match="entity positions"):
            templates.build_t1(bavarian_example(), {}, templates.TemplateConfig())

    def test_overlapping_spans_rejected(self):
        ex = Example(id="e", text="Ada Lovelace .", task=TaskKind.RC,
                     gold_entities=(EntityMention("Ada Lovelace", 0, 12),
                                    EntityMention("Lovelace", 4, 12)))
        with pytest.raises(templates.TemplateError, match="overlapping"):
            templates.build_t1(ex, {}, templates.TemplateConfig())

    def test_marker_collision_rejected(self):
        ex = Example(id="e", text="weird [es] text", task=TaskKind.RC,
                     gold_entities=(EntityMention("weird", 0, 5),))
        with pytest.raises(templates.TemplateError, match="already contains"):
            templates.build_t1(ex, {}, templates.TemplateConfig())

    def test_no_text_invalid_for_t1(self):
        cfg = templates.TemplateConfig(ablation_mode="no_text")
        with pytest.raises(templates.TemplateError, match="only defined for T2"):
            templates.build_t1(alico_example(), alico_kg(), cfg)

    def test_prefix(self):
        cfg = templates.TemplateConfig(task_prefix="summary:")
        got = templates.build_t1(alico_example(), alico_kg(), cfg)
        assert got.startswith("summary: The two companies")


class TestBuildT2:
    def test_golden_table_string(self):
        got = templates.build_t2(bavarian_example(), bavarian_kg(),
                                 templates.TemplateConfig())
        assert got == BAVARIAN_T2

    def test_no_grounding_returns_bare_text(self):
        assert templates.build_t2(bavarian_example(), {},
                                  templates.TemplateConfig()) == BAVARIAN_TEXT

    def test_no_kg_mode(self):
        cfg = templates.TemplateConfig(ablation_mode="no_kg")
        assert templates.build_t2(bavarian_example(), bavarian_kg(), cfg) == BAVARIAN_TEXT

    def test_no_text_mode(self):
        ex = Example(id="e", text="Bill Oddie 's daughter is Kate Hardie .",
                     task=TaskKind.JREE)
        kg = {"e": [fact("Bill Oddie", 0, "Q1", "human")]}
        cfg = templates.TemplateConfig(ablation_mode="no_text")
        assert templates.build_t2(ex, kg, cfg) == "[gr] Bill Oddie is an instance of human"

    def test_surface_labels_config(self):
        cfg = templates.TemplateConfig(use_kb_labels=False)
        got = templates.build_t2(bavarian_example(), bavarian_kg(), cfg)
        assert "The Grantville Gazettes is an instance of" in got

    def test_facts_appended_in_text_order_and_deduped(self):
        ex = Example(id="e", text="c b a c", task=TaskKind.JREE)
        kg = {"e": [fact("a", 4, "QA", "letter"), fact("b", 2, "QB", "letter"),
                    fact("c", 0, "QC", "letter"), fact("c", 6, "QC", "letter")]}
        got = templates.build_t2(ex, kg, templates.TemplateConfig())
        assert got == ("c b a c [gr] c is an instance of letter "
                       "[gr] b is an instance of letter "
                       "[gr] a is an instance of letter")

    def test_injective_in_grounding(self):
        ex = bavarian_example()
        cfg = templates.TemplateConfig()
        kg2 = {"test_578": [fact("1634: The Bavarian Crisis", 0, "QA", "novel")]}
        outputs = {templates.build_t2(ex, bavarian_kg(), cfg),
                   templates.build_t2(ex, kg2, cfg),
                   templates.build_t2(ex, {}, cfg)}
        assert len(outputs) == 3

    def test_prefix_uniform(self):
        cfg = templates.TemplateConfig(task_prefix="summary:")
        got = templates.build_t2(bavarian_example(), bavarian_kg(), cfg)
        assert got == "summary: " + BAVARIAN_T2


class TestConfigValidation:
    def test_tokens_must_differ(self):
        with pytest.raises(ValueError, match="distinct"):
            templates.TemplateConfig(entity_start_token="[x]",
                                     grounding_token="[x]")

    def test_tokens_must_be_non_empty(self):
        with pytest.raises(ValueError, match="non-empty"):
            templates.TemplateConfig(entity_start_token="")

    def test_unknown_ablation(self):
        with pytest.raises(ValueError, match="ablation_mode"):
            templates.TemplateConfig(ablation_mode="bare")

    def test_unknown_template_name(self):
        with pytest.raises(templates.TemplateError, match="unknown template"):
            templates.build_input(bavarian_example(), {},
                                  templates.TemplateConfig(), "t3")


WORDS = st.lists(st.text(alphabet="abcdef", min_size=1, max_size=6),
                 min_size=1, max_size=12)


@settings(max_examples=150, deadline=None)
@given(WORDS, st.data())
def test_t1_strip_recovers_original_text(words, data):
    text = " ".join(words)
    # choose up to three disjoint word spans as mentions
    n = len(words)
    mention_count = data.draw(st.integers(min_value=0, max_value=min(3, n)))
    starts = sorted(data.draw(st.lists(st.integers(0, n - 1),
                                       min_size=mention_count,
                                       max_size=mention_count, unique=True)))
    mentions = []
    offsets = []
    pos = 0
    for i, w in enumerate(words):
        offsets.append((pos, pos + len(w)))
        pos += len(w) + 1
    used_until = -1
    for i in starts:
        if offsets[i][0] <= used_until:
            continue
        mentions.append(EntityMention(words[i], offsets[i][0], offsets[i][1]))
        used_until = offsets[i][1]
    ex = Example(id="e", text=text, task=TaskKind.RC,
                 gold_entities=tuple(mentions))
    kg = {"e": [fact(m.surface, m.start, f"Q{m.start}", "thing")
                for m in mentions[::2]]}
    out = templates.build_t1(ex, kg, templates.TemplateConfig())
    stripped = out.replace("[es] ", "").replace(" [gr] thing", "")
    assert stripped == text


@settings(max_examples=100, deadline=None)
@given(WORDS)
def test_t2_output_extends_original_text(words):
    text = " ".join(words)
    ex = Example(id="e", text=text, task=TaskKind.JREE)
    kg = {"e": [fact(words[0], 0, "Q1", "thing")]}
    out = templates.build_t2(ex, kg, templates.TemplateConfig())
    assert out == text + f" [gr] {words[0]} is an instance of thing"
