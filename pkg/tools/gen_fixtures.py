#!/usr/bin/env python3
"""Regenerate the fixture corpora shipped with the repo.

The benchmark dumps themselves are licensed and cannot be redistributed, so
the repo ships synthetic corpora with the same schema and shape (50+
examples per corpus, gold triple counts 1-4, entity-linking output and a KB
snapshot to match).  A handful of well-known public sentences are pinned
verbatim because tests assert their exact templated/parsed forms.

Usage: python tools/gen_fixtures.py  (run from the repo root; output is
deterministic, so re-running must leave git clean).
"""

from __future__ import annotations

import itertools
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kgrex.model import (Example, EntityMention, RelationTriple, TaskKind,
                         RelationSchema, dump_jsonl_line, example_to_dict,
                         validate_corpus, write_corpus)

ROOT = Path(__file__).resolve().parents[1]


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(dump_jsonl_line(row) + "\n")


# ---------------------------------------------------------------------------
# Position-absent corpus (webnlg-style)

WORKS = [
    ("The Silent Harbor", "Q8810001"),
    ("Crimson Tide Rising", "Q8810002"),
    ("The Glass Orchard", "Q8810003"),
    ("Winter of the Red Moon", "Q8810004"),
    ("Salt and Cinder", "Q8810005"),
    ("The Last Ferryman", "Q8810006"),
    ("Echoes of Parbold", "Q8810007"),
    ("A Corridor of Bells", "Q8810008"),
]
WRITERS = [
    ("Mara Ellison", "Q8820001"),
    ("Tomas Reyes", "Q8820002"),
    ("Ingrid Halvorsen", "Q8820003"),
    ("Samuel Adeyemi", "Q8820004"),
    ("Lucia Ferrante", "Q8820005"),
    ("Henrik Olsen", "Q8820006"),
]
CITIES = [
    ("Aldburgh", "Q8830001"),
    ("Brackenford", "Q8830002"),
    ("Veltsmere", "Q8830003"),
    ("Corvane", "Q8830004"),
]
COUNTRIES = [
    ("Virelia", "Q8840001"),
    ("Kentara", "Q8840002"),
    ("Ostreva", "Q8840003"),
]
DISTRICTS = [
    ("Milltown Rise", "Q8850001"),
    ("Harrow Fen", "Q8850002"),
    ("Gullwing Quay", "Q8850003"),
    ("Tanner's Walk", "Q8850004"),
]

WEBNLG_RELATIONS = [
    "author", "birth_place", "capital_of", "child", "contains",
    "neighborhood_of", "precededBy", "residence",
]


def webnlg_patterns():
    """(size, builder) pairs; builders return (text, triples, linked entities)."""

    def p_sequel(rng):
        a, b = rng.sample(WORKS, 2)
        text = f"{a[0]} is the sequel to {b[0]} ."
        return text, [(a[0], "precededBy", b[0])], [a, b]

    def p_author(rng):
        a = rng.choice(WORKS)
        p = rng.choice(WRITERS)
        text = f"{a[0]} was written by {p[0]} ."
        return text, [(a[0], "author", p[0])], [a, p]

    def p_capital(rng):
        c = rng.choice(CITIES)
        k = rng.choice(COUNTRIES)
        text = f"{c[0]} is the capital of {k[0]} ."
        return text, [(c[0], "capital_of", k[0])], [c, k]

    def p_child(rng):
        p, q = rng.sample(WRITERS, 2)
        text = f"{p[0]} raised a daughter , {q[0]} ."
        return text, [(p[0], "child", q[0])], [p, q]

    def p_author_sequel(rng):
        a, b = rng.sample(WORKS, 2)
        p = rng.choice(WRITERS)
        text = f"{a[0]} , written by {p[0]} , is the sequel to {b[0]} ."
        return text, [(a[0], "author", p[0]), (a[0], "precededBy", b[0])], [a, p, b]

    def p_contains2(rng):
        c = rng.choice(CITIES)
        n1, n2 = rng.sample(DISTRICTS, 2)
        text = f"From {n1[0]} to {n2[0]} , {c[0]} keeps its history alive ."
        return text, [(c[0], "contains", n1[0]), (c[0], "contains", n2[0])], [n1, n2, c]

    def p_shared_author(rng):
        a, b = rng.sample(WORKS, 2)
        p = rng.choice(WRITERS)
        text = (f"{a[0]} and {b[0]} were both written by {p[0]} , "
                f"and {a[0]} is the sequel to {b[0]} .")
        triples = [(a[0], "author", p[0]), (b[0], "author", p[0]),
                   (a[0], "precededBy", b[0])]
        return text, triples, [a, b, p]

    def p_capital_contains(rng):
        c = rng.choice(CITIES)
        k = rng.choice(COUNTRIES)
        n1, n2 = rng.sample(DISTRICTS, 2)
        text = f"{c[0]} , the capital of {k[0]} , contains {n1[0]} and {n2[0]} ."
        triples = [(c[0], "capital_of", k[0]), (c[0], "contains", n1[0]),
                   (c[0], "contains", n2[0])]
        return text, triples, [c, k, n1, n2]

    def p_biography(rng):
        p = rng.choice(WRITERS)
        c = rng.choice(CITIES)
        n = rng.choice(DISTRICTS)
        a, b = rng.sample(WORKS, 2)
        text = (f"Born in {c[0]} , {p[0]} wrote {a[0]} and {b[0]} "
                f"while living in {n[0]} .")
        triples = [(p[0], "birth_place", c[0]), (a[0], "author", p[0]),
                   (b[0], "author", p[0]), (p[0], "residence", n[0])]
        return text, triples, [c, p, a, b, n]

    return ([(1, p_sequel)] * 7 + [(1, p_author)] * 7 + [(1, p_capital)] * 5 +
            [(1, p_child)] * 5 + [(2, p_author_sequel)] * 8 +
            [(2, p_contains2)] * 8 + [(3, p_shared_author)] * 6 +
            [(3, p_capital_contains)] * 6 + [(4, p_biography)] * 8)


# pinned examples with public provenance (WebNLG / NYT sentences); tests
# assert their exact templated and parsed forms
BAVARIAN = {
    "id": "test_578",
    "text": "1634: The Bavarian Crisis is the sequel to The Grantville Gazettes .",
    "triples": [("1634: The Bavarian Crisis", "precededBy", "The Grantville Gazettes")],
    "entities": [("1634: The Bavarian Crisis", "Q8860001"),
                 ("The Grantville Gazettes", "Q8860002")],
}
ODDIE = {
    "id": "test_633",
    "text": "Bill Oddie 's daughter is Kate Hardie .",
    "triples": [("Bill Oddie", "child", "Kate Hardie")],
    "entities": [("Bill Oddie", "Q8860003"), ("Kate Hardie", "Q8860004")],
}
MANHATTAN = {
    "id": "test_582",
    "text": ("Through a series of leisurely walks around the island -- from "
             "the Battery to Washington Heights , and from Wall Street to the "
             "Harlem River -- Lopate ruminates on Manhattan 's history , "
             "architecture and inhabitants ."),
    "triples": [("Manhattan", "contains", "Washington Heights"),
                ("Washington Heights", "neighborhood_of", "Manhattan")],
    "entities": [("the Battery", "Q8860005"), ("Washington Heights", "Q8860006"),
                 ("Wall Street", "Q8860007"), ("Harlem River", "Q8860008"),
                 ("Manhattan", "Q8860009")],
}

PINNED_KB = {
    "Q8860001": ("1634: The Bavarian Crisis", ["literary work"]),
    "Q8860002": ("The Grantville Gazette", ["literary work"]),
    "Q8860003": ("Bill Oddie", ["human"]),
    "Q8860004": ("Kate Hardie", ["human"]),
    "Q8860005": ("The Battery (Manhattan)", ["urban park"]),
    "Q8860006": ("Washington Heights, Manhattan", ["neighborhood"]),
    "Q8860007": ("Wall Street", ["street"]),
    "Q8860008": ("Harlem River", ["strait"]),
    "Q8860009": ("Manhattan", ["borough of New York City"]),
}


def build_webnlg(out_dir: Path) -> None:
    rng = random.Random(20240613)
    corpus: list[Example] = []
    el_rows: list[dict] = []
    kb_types: dict[str, tuple[str, list[str]]] = dict(PINNED_KB)

    for surface, kb_id in WORKS:
        kb_types[kb_id] = (surface, ["literary work", "novel"]
                           if int(kb_id[-1]) % 2 else ["literary work"])
    for surface, kb_id in WRITERS:
        kb_types[kb_id] = (surface, ["human", "writer"]
                           if int(kb_id[-1]) % 2 else ["human"])
    for surface, kb_id in CITIES:
        kb_types[kb_id] = (surface, ["city"])
    for surface, kb_id in COUNTRIES:
        kb_types[kb_id] = (surface, ["country"])
    for surface, kb_id in DISTRICTS:
        kb_types[kb_id] = (surface, ["neighborhood"])

    def add_example(example_id, text, triples, entities, score_floor=-4.0):
        corpus.append(Example(
            id=example_id, text=text,
            gold_triples=tuple(RelationTriple(*t) for t in triples),
            task=TaskKind.JREE))
        mentions = []
        seen = set()
        for surface, kb_id in entities:
            if kb_id in seen:
                continue
            seen.add(kb_id)
            start = text.find(surface)
            assert start >= 0, (example_id, surface)
            mentions.append({"surface": surface, "start": start,
                             "end": start + len(surface), "kb_id": kb_id,
                             "score": round(rng.uniform(score_floor, -0.5), 3)})
        el_rows.append({"example_id": example_id, "mentions": mentions})

    for i, (size, builder) in enumerate(webnlg_patterns()):
        text, triples, entities = builder(rng)
        add_example(f"test_{500 + i}", text, triples, entities)
        assert len(triples) == size, (i, size)

    for pinned in (BAVARIAN, ODDIE, MANHATTAN):
        add_example(pinned["id"], pinned["text"], pinned["triples"],
                    pinned["entities"])

    # a couple of sub-threshold and un-linkable mentions so filtering and
    # grounding diagnostics have something to chew on
    el_rows[0]["mentions"].append({
        "surface": el_rows[0]["mentions"][0]["surface"],
        "start": el_rows[0]["mentions"][0]["start"],
        "end": el_rows[0]["mentions"][0]["end"],
        "kb_id": "Q9999001", "score": -5.2})
    el_rows[1]["mentions"].append({
        "surface": el_rows[1]["mentions"][0]["surface"],
        "start": el_rows[1]["mentions"][0]["start"],
        "end": el_rows[1]["mentions"][0]["end"],
        "kb_id": "Q9999002", "score": -4.2})  # above threshold, not in KB

    write_corpus(corpus, out_dir / "corpus.jsonl")
    write_jsonl(out_dir / "el.jsonl", el_rows)
    write_jsonl(out_dir / "snapshot.jsonl", [
        {"kb_id": kb_id, "label": label, "instance_of": types, "subclass_of": []}
        for kb_id, (label, types) in sorted(kb_types.items())])
    RelationSchema(tuple(WEBNLG_RELATIONS)).to_file(out_dir / "schema.json")

    schema = RelationSchema.from_file(out_dir / "schema.json")
    report = validate_corpus(corpus, schema)
    assert report.ok, report.violations[:5]
    print(f"webnlg fixture: {report.examples} examples, "
          f"mean triple size {report.mean_triple_size:.2f}")


# ---------------------------------------------------------------------------
# Position-aware corpus (tacred-style)

PEOPLE = ["Elena Marsh", "David Okafor", "Priya Natarajan", "John Whitfield",
          "Akiko Tanaka", "Omar Haddad", "Grace Lindqvist", "Viktor Abramov",
          "Nora Castellanos", "Ethan Bloom"]
ORGS = ["Helios Dynamics", "Northgate Capital", "Bluewater Media Group",
        "Ardent Biosciences", "Crescent Rail", "Talvane Systems",
        "Ironwood Holdings", "Meridian Grain Co"]
LOCS = ["Geneva", "Toronto", "Nairobi", "Osaka", "Lisbon", "Denver"]
NATIONALITIES = ["Canadian", "Japanese", "Brazilian"]
TITLES = ["chief executive", "president", "chairman", "spokeswoman"]

TACRED_RELATIONS = [
    "org_alternate_names", "org_founded_by", "org_headquarters",
    "per_employee_of", "per_origin", "per_spouse", "per_title",
]

TACRED_TYPE = {"PERSON": PEOPLE, "ORGANIZATION": ORGS, "LOCATION": LOCS,
               "NATIONALITY": NATIONALITIES, "TITLE": TITLES}
TACRED_KB_TYPE = {"PERSON": "human", "ORGANIZATION": "business",
                  "LOCATION": "city", "NATIONALITY": "nationality",
                  "TITLE": "position"}


def _assemble(parts):
    """parts: str literals and (surface, TYPE) mentions -> (text, mentions)."""
    text = ""
    mentions = []
    for part in parts:
        if isinstance(part, str):
            text += part
        else:
            surface, ent_type = part
            mentions.append(EntityMention(surface=surface, start=len(text),
                                          end=len(text) + len(surface),
                                          entity_type=ent_type))
            text += surface
    return text, tuple(mentions)


def tacred_patterns():
    def p_alt_names(rng):
        o1, o2 = rng.sample(ORGS, 2)
        parts = [(o2, "ORGANIZATION"), " , formerly operating as ",
                 (o1, "ORGANIZATION"), " , reported steady growth ."]
        return parts, [(o1, "org_alternate_names", o2)]

    def p_employee(rng):
        p = rng.choice(PEOPLE)
        o = rng.choice(ORGS)
        parts = [(p, "PERSON"), " joined ", (o, "ORGANIZATION"),
                 " as a senior analyst ."]
        return parts, [(p, "per_employee_of", o)]

    def p_title_employee(rng):
        p = rng.choice(PEOPLE)
        t = rng.choice(TITLES)
        o = rng.choice(ORGS)
        parts = [(p, "PERSON"), " , the ", (t, "TITLE"), " of ",
                 (o, "ORGANIZATION"), " , declined to comment ."]
        return parts, [(p, "per_title", t), (p, "per_employee_of", o)]

    def p_origin_spouse(rng):
        p1, p2 = rng.sample(PEOPLE, 2)
        nat = rng.choice(NATIONALITIES)
        parts = [(p1, "PERSON"), " , a ", (nat, "NATIONALITY"),
                 " citizen , married ", (p2, "PERSON"), " in 2003 ."]
        return parts, [(p1, "per_origin", nat), (p1, "per_spouse", p2)]

    def p_founded(rng):
        o = rng.choice(ORGS)
        p1, p2 = rng.sample(PEOPLE, 2)
        loc = rng.choice(LOCS)
        parts = [(o, "ORGANIZATION"), " , founded by ", (p1, "PERSON"),
                 " and headquartered in ", (loc, "LOCATION"), " , hired ",
                 (p2, "PERSON"), " last spring ."]
        return parts, [(o, "org_founded_by", p1), (o, "org_headquarters", loc),
                       (p2, "per_employee_of", o)]

    def p_career(rng):
        p = rng.choice(PEOPLE)
        t = rng.choice(TITLES)
        o1, o2 = rng.sample(ORGS, 2)
        loc = rng.choice(LOCS)
        parts = [(p, "PERSON"), " , the ", (t, "TITLE"), " of ",
                 (o1, "ORGANIZATION"), " , previously worked for ",
                 (o2, "ORGANIZATION"), " , which is based in ",
                 (loc, "LOCATION"), " ."]
        return parts, [(p, "per_title", t), (p, "per_employee_of", o1),
                       (p, "per_employee_of", o2), (o2, "org_headquarters", loc)]

    return ([(1, p_alt_names)] * 11 + [(1, p_employee)] * 11 +
            [(2, p_title_employee)] * 8 + [(2, p_origin_spouse)] * 8 +
            [(3, p_founded)] * 10 + [(4, p_career)] * 6)


ALICO_PARTS = [
    "The two companies were preparing to announce that AIG had agreed to sell ",
    ("American Life Insurance Co", "ORGANIZATION"), " , better known as ",
    ("Alico", "ORGANIZATION"),
    " , for 68 billion dollars in cash and 87 billion in MetLife equity , "
    "the report said .",
]
ALICO_TRIPLES = [("Alico", "org_alternate_names", "American Life Insurance Co")]


def build_tacred(out_dir: Path) -> None:
    rng = random.Random(20240614)
    kb_ids: dict[str, str] = {}

    def kb_id_for(surface: str) -> str:
        if surface not in kb_ids:
            kb_ids[surface] = f"Q87{len(kb_ids):05d}"
        return kb_ids[surface]

    examples = []
    for size, builder in tacred_patterns():
        parts, triples = builder(rng)
        text, mentions = _assemble(parts)
        assert len(triples) == size
        examples.append((text, mentions, triples))
    alico_text, alico_mentions = _assemble(ALICO_PARTS)
    examples[13] = (alico_text, alico_mentions, ALICO_TRIPLES)

    corpus = []
    el_rows = []
    for i, (text, mentions, triples) in enumerate(examples):
        example_id = f"test_{1000 + i}"
        corpus.append(Example(
            id=example_id, text=text, gold_entities=mentions,
            gold_triples=tuple(RelationTriple(*t) for t in triples),
            task=TaskKind.ETRC))
        el_mentions = [{"surface": m.surface, "start": m.start, "end": m.end,
                        "kb_id": kb_id_for(m.surface),
                        "score": round(rng.uniform(-3.5, -0.5), 3)}
                       for m in mentions]
        el_rows.append({"example_id": example_id, "mentions": el_mentions})

    surface_types = {s: TACRED_KB_TYPE[t] for t, pool in TACRED_TYPE.items()
                     for s in pool}
    surface_types["American Life Insurance Co"] = "business"
    surface_types["Alico"] = "business"

    write_corpus(corpus, out_dir / "corpus.jsonl")
    write_jsonl(out_dir / "el.jsonl", el_rows)
    write_jsonl(out_dir / "snapshot.jsonl", [
        {"kb_id": kb_id, "label": surface,
         "instance_of": [surface_types[surface]], "subclass_of": []}
        for surface, kb_id in sorted(kb_ids.items(), key=lambda kv: kv[1])])
    RelationSchema(tuple(TACRED_RELATIONS),
                   null_relation="no_relation").to_file(out_dir / "schema.json")

    schema = RelationSchema.from_file(out_dir / "schema.json")
    report = validate_corpus(corpus, schema)
    assert report.ok, report.violations[:5]
    print(f"tacred fixture: {report.examples} examples, "
          f"mean triple size {report.mean_triple_size:.2f}")


# ---------------------------------------------------------------------------
# Native-format reader samples


def build_native(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)

    tokens_a = ["Elena", "Marsh", "joined", "Helios", "Dynamics", "as", "an",
                "analyst", "in", "Geneva", "."]
    tacred_records = [
        {"id": "e100", "token": tokens_a, "relation": "per:employee_of",
         "subj_start": 0, "subj_end": 1, "obj_start": 3, "obj_end": 4,
         "subj_type": "PERSON", "obj_type": "ORGANIZATION"},
        # same sentence, second instance: groups into one example
        {"id": "e101", "token": tokens_a, "relation": "per:cities_of_residence",
         "subj_start": 0, "subj_end": 1, "obj_start": 9, "obj_end": 9,
         "subj_type": "PERSON", "obj_type": "CITY"},
        {"id": "e102", "token": ["Omar", "Haddad", "visited", "Toronto", "."],
         "relation": "no_relation", "subj_start": 0, "subj_end": 1,
         "obj_start": 3, "obj_end": 3, "subj_type": "PERSON", "obj_type": "CITY"},
        {"id": "e103", "token": ["Ardent", "Biosciences", "was", "founded",
                                 "by", "Nora", "Castellanos", "."],
         "relation": "org:founded_by", "subj_start": 0, "subj_end": 1,
         "obj_start": 5, "obj_end": 6, "subj_type": "ORGANIZATION",
         "obj_type": "PERSON"},
    ]
    (out_dir / "tacred_sample.json").write_text(
        json.dumps(tacred_records, indent=1) + "\n", encoding="utf-8")

    nyt_rows = [
        {"sentText": "Aldburgh is the capital of Virelia .",
         "relationMentions": [{"em1Text": "Aldburgh", "label": "capital_of",
                               "em2Text": "Virelia"}]},
        {"sentText": "From Milltown Rise to Harrow Fen , Corvane keeps its "
                     "history alive .",
         "relationMentions": [
             {"em1Text": "Corvane", "label": "contains", "em2Text": "Milltown Rise"},
             {"em1Text": "Corvane", "label": "contains", "em2Text": "Harrow Fen"},
             # duplicate triple: dropped at load with a warning
             {"em1Text": "Corvane", "label": "contains", "em2Text": "Harrow Fen"}]},
        {"sentText": "Tomas Reyes raised a daughter , Lucia Ferrante .",
         "relationMentions": [{"em1Text": "Tomas Reyes", "label": "child",
                               "em2Text": "Lucia Ferrante"}]},
    ]
    write_jsonl(out_dir / "nyt_sample.jsonl", nyt_rows)

    webnlg_rows = [
        {"text": "The Silent Harbor was written by Mara Ellison .",
         "triple_list": [["The Silent Harbor", "author", "Mara Ellison"]]},
        {"text": "Salt and Cinder is the sequel to The Glass Orchard .",
         "triple_list": [["Salt and Cinder", "precededBy", "The Glass Orchard"]]},
        {"text": "Veltsmere is the capital of Kentara and contains Gullwing Quay .",
         "triple_list": [["Veltsmere", "capital_of", "Kentara"],
                         ["Veltsmere", "contains", "Gullwing Quay"]]},
    ]
    write_jsonl(out_dir / "webnlg_sample.jsonl", webnlg_rows)

    ace_rows = [
        {"id": "ace_0", "text": "Viktor Abramov works for Crescent Rail .",
         "triples": [{"subject": "Viktor Abramov", "relation": "per_employee_of",
                      "object": "Crescent Rail"}]},
        {"id": "ace_1", "text": "The meeting ended without an agreement .",
         "triples": []},
        {"id": "ace_2", "text": "Grace Lindqvist , born in Lisbon , moved to Denver .",
         "triples": [{"subject": "Grace Lindqvist", "relation": "birth_place",
                      "object": "Lisbon"},
                     {"subject": "Grace Lindqvist", "relation": "residence",
                      "object": "Denver"}]},
    ]
    write_jsonl(out_dir / "ace_sample.jsonl", ace_rows)
    print("native samples written")


# ---------------------------------------------------------------------------
# Type-disambiguation corpus for the inference service tests.  Sentence
# syntax is deliberately constant; for half the corpus the same (X, Y)
# surface pair appears twice with different KB groundings and therefore
# different gold relations, so the bare text is ambiguous and only the
# grounded types can separate the two readings.

FIRST = ["Arden", "Basil", "Corin", "Dale", "Edri", "Falk", "Gwen", "Halle",
         "Iris", "Jona", "Kiva", "Lior", "Mira", "Nash", "Orla", "Pax"]
SECOND = ["Voss", "Reed", "Stone", "Hale", "Finch", "Lund", "Mars", "Cole"]
GROUPS = ["Kestrel Labs", "Novation Group", "Zephyr Union", "Atlas Forge",
          "Tessara", "Quorum Dynamics", "Ember Collective", "Northwind Guild",
          "Solara", "Valtara", "Virelia", "Meridian"]

TYPED_RELATION = {
    ("human", "country"): "nationality",
    ("human", "enterprise"): "company",
    ("fictional human", "fictional organization"): "member_of",
}


def build_typed(out_dir: Path) -> None:
    rng = random.Random(20240615)
    names = [f"{a} {b}" for a, b in itertools.product(FIRST, SECOND)][:32]
    rng.shuffle(names)

    kb_rows = {}
    counter = [0]

    def entity(surface: str, ent_type: str) -> str:
        key = (surface, ent_type)
        if key not in kb_rows:
            counter[0] += 1
            kb_rows[key] = f"Q86{counter[0]:05d}"
        return kb_rows[key]

    corpus = []
    el_rows = []

    def add(example_id, x, x_type, y, y_type):
        relation = TYPED_RELATION[(x_type, y_type)]
        text = f"{x} , from {y} , says hello ."
        corpus.append(Example(id=example_id, text=text,
                              gold_triples=(RelationTriple(x, relation, y),),
                              task=TaskKind.JREE))
        el_rows.append({"example_id": example_id, "mentions": [
            {"surface": x, "start": 0, "end": len(x),
             "kb_id": entity(x, x_type), "score": -1.0},
            {"surface": y, "start": len(x) + 8, "end": len(x) + 8 + len(y),
             "kb_id": entity(y, y_type), "score": -1.0},
        ]})

    index = 0
    # 16 ambiguous pairs -> 32 examples whose text is identical within a pair
    for pair in range(16):
        x = names[pair]
        y = GROUPS[pair % len(GROUPS)]
        add(f"typed_{index}", x, "human", y, "country"); index += 1
        add(f"typed_{index}", x, "fictional human", y, "fictional organization"); index += 1
    # 18 unambiguous examples
    for i in range(18):
        x = names[16 + (i % 8)]
        y = GROUPS[(5 + i) % len(GROUPS)]
        x_type, y_type = rng.choice(list(TYPED_RELATION))
        add(f"typed_{index}", x, x_type, y, y_type); index += 1

    write_corpus(corpus, out_dir / "corpus.jsonl")
    write_jsonl(out_dir / "el.jsonl", el_rows)
    write_jsonl(out_dir / "snapshot.jsonl", [
        {"kb_id": kb_id, "label": surface, "instance_of": [ent_type],
         "subclass_of": []}
        for (surface, ent_type), kb_id in sorted(kb_rows.items(),
                                                 key=lambda kv: kv[1])])
    RelationSchema(tuple(sorted(set(TYPED_RELATION.values())))).to_file(
        out_dir / "schema.json")

    schema = RelationSchema.from_file(out_dir / "schema.json")
    report = validate_corpus(corpus, schema)
    assert report.ok, report.violations[:5]
    print(f"typed fixture: {report.examples} examples, "
          f"mean triple size {report.mean_triple_size:.2f}")


def main() -> None:
    for out_dir in (ROOT / "fixtures" / "webnlg", ROOT / "fixtures" / "tacred",
                    ROOT / "fixtures" / "native",
                    ROOT / "service" / "tests" / "fixtures" / "typed"):
        out_dir.mkdir(parents=True, exist_ok=True)
    build_webnlg(ROOT / "fixtures" / "webnlg")
    build_tacred(ROOT / "fixtures" / "tacred")
    build_native(ROOT / "fixtures" / "native")
    build_typed(ROOT / "service" / "tests" / "fixtures" / "typed")


if __name__ == "__main__":
    main()
