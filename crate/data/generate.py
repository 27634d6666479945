#!/usr/bin/env python3
"""Regenerates the bundled sample data.

    python3 data/generate.py

Writes mini_corpus.txt (blank-line separated documents), questions.tsv,
nounmod.tsv and pairs.tsv next to this script. Output depends only on SEED.
"""

import random
from pathlib import Path

SEED = 20031
DOCS = 2400
HERE = Path(__file__).resolve().parent

# Analogy families: word pairs sharing a relation, and phrasings that put the
# two words around a joining term.
FAMILIES = {
    "flows": {
        "pairs": [("traffic", "street"), ("water", "riverbed"), ("blood", "vein"),
                  ("air", "pipe"), ("electricity", "wire"), ("oil", "pipeline")],
        "templates": ["the {x} in the {y}", "{x} along the {y}", "the {y} with {x}",
                      "{x} into the {y}", "the {y} full of {x}", "{x} on the {y}"],
    },
    "stored": {
        "pairs": [("car", "garage"), ("money", "bank"), ("book", "library"),
                  ("grain", "silo"), ("wine", "cellar"), ("plane", "hangar")],
        "templates": ["the {x} is in the {y}", "{y} for the {x}", "{x} in the {y}",
                      "the {y} has a {x}", "{x} stays within the {y}"],
    },
    "gathered": {
        "pairs": [("crop", "harvest"), ("fish", "catch"), ("ore", "mining"),
                  ("timber", "logging"), ("fruit", "picking")],
        "templates": ["the {y} of the {x}", "{x} after the {y}", "{y} of {x}",
                      "{x} for the {y}", "{y} yet the {x}"],
    },
    "part": {
        "pairs": [("ship", "gangplank"), ("house", "door"), ("tree", "branch"),
                  ("book", "page"), ("bicycle", "pedal"), ("castle", "tower")],
        "templates": ["the {y} of the {x}", "{x} has a {y}", "the {x} 's {y}",
                      "{x} with the {y}", "{y} on the {x}"],
    },
    "means": {
        "pairs": [("pedestrians", "feet"), ("birds", "wings"), ("fish", "fins"),
                  ("rowers", "oars"), ("skiers", "poles")],
        "templates": ["{x} use their {y}", "{x} on their {y}", "{y} for {x}",
                      "{x} need their {y}", "{x} with {y}"],
    },
    "kind": {
        "pairs": [("barley", "grain"), ("pine", "tree"), ("beagle", "dog"),
                  ("aluminum", "metal"), ("emerald", "gem"), ("novel", "book"),
                  ("minnow", "fish")],
        "templates": ["{x} is a {y}", "{y} such as {x}", "{x} and other {y}",
                      "the {x} is the {y}", "{y} like the {x}"],
    },
    "remedy": {
        "pairs": [("tourniquet", "bleeding"), ("antidote", "poisoning"),
                  ("bandage", "wound"), ("aspirin", "headache"), ("splint", "fracture")],
        "templates": ["{x} for the {y}", "{y} without {x}", "{x} to stop the {y}",
                      "{x} against the {y}", "the {y} and not the {x}"],
    },
}

# Noun-modifier classes (modifier, head) with phrasings around both nouns.
NOUNMOD = {
    "inst": {
        "pairs": [("laser", "printer"), ("steam", "engine"), ("wind", "mill"),
                  ("hand", "saw"), ("gas", "stove"), ("water", "wheel")],
        "templates": ["the {h} uses {m}", "{h} with {m}", "a {h} that makes use of {m}",
                      "{m} for the {h}"],
    },
    "mat": {
        "pairs": [("brick", "house"), ("stone", "wall"), ("wood", "table"),
                  ("glass", "bottle"), ("paper", "bag"), ("iron", "gate")],
        "templates": ["{h} of {m}", "the {h} is {m}", "{h} from the {m}", "{m} into a {h}"],
    },
    "tat": {
        "pairs": [("morning", "exercise"), ("night", "shift"), ("winter", "storm"),
                  ("evening", "news"), ("summer", "camp"), ("spring", "rain")],
        "templates": ["{h} in the {m}", "{h} at {m}", "{m} then {h}", "{h} when {m}"],
    },
    "lat": {
        "pairs": [("desert", "storm"), ("mountain", "cabin"), ("ocean", "breeze"),
                  ("city", "park"), ("island", "resort"), ("valley", "farm")],
        "templates": ["{h} at the {m}", "{h} on the {m}", "the {m} has a {h}", "{h} within the {m}"],
    },
    "cs": {
        "pairs": [("flu", "virus"), ("tear", "gas"), ("fever", "germ"),
                  ("rust", "moisture"), ("blister", "friction"), ("smog", "exhaust")],
        "templates": ["{h} give {m}", "{m} from the {h}", "the {h} will make {m}", "{m} after {h}"],
    },
    "prp": {
        "pairs": [("concert", "hall"), ("dining", "room"), ("swimming", "pool"),
                  ("parking", "lot"), ("reading", "lamp"), ("storage", "box")],
        "templates": ["{h} for {m}", "{h} for the {m}", "{m} in the {h}", "{h} to the {m}"],
    },
    "top": {
        "pairs": [("weather", "report"), ("history", "lecture"), ("science", "journal"),
                  ("travel", "guide"), ("sports", "column"), ("music", "review")],
        "templates": ["{h} on {m}", "{h} of the {m}", "the {h} is on {m}", "{m} in this {h}"],
    },
    "freq": {
        "pairs": [("daily", "exercise"), ("weekly", "meeting"), ("annual", "report"),
                  ("monthly", "bill"), ("hourly", "update"), ("yearly", "checkup")],
        "templates": ["{h} is {m}", "a {m} {h}", "{h} that is {m}", "{m} or {h}"],
    },
}

FILLER = [
    "nothing much happened that day",
    "the committee met again to discuss the budget",
    "several people said they would return next year",
    "it rained for most of the afternoon",
    "prices rose slowly through the season",
    "the old road was finally repaired",
    "a small crowd gathered near the square",
    "reports from the north were mixed",
    "the results surprised almost everyone",
    "most visitors left before dark",
    "the library closed early on friday",
    "children played by the fountain",
]

EXTRA_PAIRS = [("restrained", "limit"), ("mason", "stone"), ("carpenter", "wood"), ("quart", "volume")]
EXTRA_TEMPLATES = ["the {x} is very {y}", "{x} with {y}", "{y} of the {x}", "{x} 's {y}"]


def sentence(rng, templates, **words):
    return rng.choice(templates).format(**words)


def documents(rng):
    relational = []
    for fam in FAMILIES.values():
        for x, y in fam["pairs"]:
            relational.append((fam["templates"], {"x": x, "y": y}))
    for cls in NOUNMOD.values():
        for m, h in cls["pairs"]:
            relational.append((cls["templates"], {"m": m, "h": h}))
    for x, y in EXTRA_PAIRS:
        relational.append((EXTRA_TEMPLATES, {"x": x, "y": y}))
    all_templates = [t for group in (FAMILIES, NOUNMOD) for v in group.values() for t in v["templates"]]

    for _ in range(DOCS):
        parts = []
        for _ in range(rng.randint(1, 5)):
            roll = rng.random()
            if roll < 0.4:
                templates, words = rng.choice(relational)
                parts.append(sentence(rng, templates, **words))
            elif roll < 0.75:
                # Noise: a pair under another relation's phrasing.
                templates, words = rng.choice(relational)
                a, b = list(words.values())
                if rng.random() < 0.3:
                    a, b = b, a
                parts.append(rng.choice(all_templates).format(x=a, y=b, m=a, h=b))
            else:
                parts.append(rng.choice(FILLER))
        text = ". ".join(parts) + "."
        yield text[0].upper() + text[1:]


def questions(rng):
    names = sorted(FAMILIES)
    rows = [("q1", ("traffic", "street"),
             [("ship", "gangplank"), ("crop", "harvest"), ("car", "garage"),
              ("pedestrians", "feet"), ("water", "riverbed")], 4)]
    n = 2
    for name in names:
        pairs = FAMILIES[name]["pairs"]
        for i in range(min(3, len(pairs) - 1)):
            stem = pairs[i]
            gold_pair = pairs[(i + 1) % len(pairs)]
            if stem == ("traffic", "street"):
                continue
            others = [p for o in names if o != name for p in FAMILIES[o]["pairs"]]
            choices = rng.sample(others, 4)
            gold = rng.randrange(5)
            choices.insert(gold, gold_pair)
            rows.append((f"q{n}", stem, choices, gold))
            n += 1
    return rows


def main():
    rng = random.Random(SEED)
    docs = list(documents(rng))
    (HERE / "mini_corpus.txt").write_text("\n\n".join(docs) + "\n")

    with open(HERE / "questions.tsv", "w") as f:
        f.write("# id\tstemA\tstemB\tc1A\tc1B\tc2A\tc2B\tc3A\tc3B\tc4A\tc4B\tc5A\tc5B\tgold(0-4)\n")
        for qid, stem, choices, gold in questions(rng):
            fields = [qid, *stem] + [w for c in choices for w in c] + [str(gold)]
            f.write("\t".join(fields) + "\n")

    with open(HERE / "nounmod.tsv", "w") as f:
        f.write("# modifier\thead\tclass\n")
        for cls in sorted(NOUNMOD):
            for m, h in NOUNMOD[cls]["pairs"]:
                f.write(f"{m}\t{h}\t{cls}\n")

    with open(HERE / "pairs.tsv", "w") as f:
        f.write("# first\tsecond\n")
        for x, y in EXTRA_PAIRS:
            f.write(f"{x}\t{y}\n")


if __name__ == "__main__":
    main()
