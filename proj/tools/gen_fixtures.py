#!/usr/bin/env python3
"""Regenerates the bundled fixtures under data/fixtures.

Output is deterministic: running it twice yields identical files.
"""
import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"

SEED_CONCEPTS = [
    ("chronic obstructive pulmonary disease", ["copd"]),
    ("chronic kidney disease", ["ckd"]),
    ("dyspnea", ["shortness of breath", "breathlessness"]),
    ("spirometry", []),
    ("glomerular filtration rate", ["gfr"]),
    ("hypertension", ["high blood pressure"]),
    ("diabetes", []),
    ("exacerbation", []),
    ("proteinuria", []),
    ("dialysis", ["haemodialysis"]),
    ("bronchodilator", []),
    ("inhaled corticosteroids", []),
]

SEED_RELATIONS = [
    ("chronic obstructive pulmonary disease", "dyspnea", "symptom_of", 0.8),
    ("dyspnea", "exacerbation", "related_to", 0.6),
    ("spirometry", "chronic obstructive pulmonary disease", "related_to", 0.7),
    ("bronchodilator", "chronic obstructive pulmonary disease", "treats", 0.9),
    ("inhaled corticosteroids", "exacerbation", "treats", 0.7),
    ("glomerular filtration rate", "chronic kidney disease", "related_to", 0.8),
    ("proteinuria", "chronic kidney disease", "symptom_of", 0.7),
    ("dialysis", "chronic kidney disease", "treats", 0.6),
    ("hypertension", "chronic kidney disease", "comorbidity_of", 0.5),
    ("diabetes", "chronic kidney disease", "comorbidity_of", 0.5),
]

# Recurring multi-word terms absent from the seed ontology.
NEW_TERMS = [
    "pulmonary rehabilitation", "oxygen therapy", "quality of life",
    "hospital admission", "renal function", "heart failure", "smoking cessation",
    "physical activity", "home telemonitoring", "decision support system",
    "vitamin d", "kidney transplant", "lung function decline", "sleep apnea",
]

COPD_TERMS = ["COPD", "chronic obstructive pulmonary disease", "dyspnea", "spirometry",
              "exacerbation", "bronchodilator", "inhaled corticosteroids", "breathlessness"]
CKD_TERMS = ["CKD", "chronic kidney disease", "glomerular filtration rate", "proteinuria",
             "dialysis", "hypertension", "diabetes", "GFR"]

TEMPLATES = [
    "Patients with {a} often report {b} during follow-up.",
    "We assessed {a} and {b} in a prospective cohort.",
    "The association between {a} and {b} remained significant after adjustment.",
    "{A} was measured at baseline and after twelve months.",
    "Reduced {a} predicted {b} in older adults.",
    "A randomized trial compared {a} with usual care and recorded {b}.",
    "Clinicians monitored {a} together with {b} using a home device.",
    "Our findings suggest that {a} improves {b} in this population.",
]

AUTHORS = ["Rossi M", "Bianchi L", "Garcia P", "Novak J", "Smith A", "Kowalski T",
           "Papadopoulos E", "Muller K", "Silva R", "Jensen H"]
JOURNALS = ["Respiratory Medicine", "Kidney International", "Journal of Telemedicine",
            "Chest", "Nephrology Dialysis Transplantation"]


def sentence(rng, pool):
    template = rng.choice(TEMPLATES)
    a, b = rng.sample(pool, 2)
    text = template.format(a=a, b=b, A=a[0].upper() + a[1:])
    return text


def abstract(rng, i):
    domain = CKD_TERMS if i % 2 else COPD_TERMS
    extras = rng.sample(NEW_TERMS, 3)
    pool = domain + extras
    sentences = [sentence(rng, pool) for _ in range(rng.randint(5, 8))]
    # Pair one new term with a seed term so derived relations have evidence.
    sentences.append(f"In addition, {extras[0]} was linked to {domain[1]} in {rng.randint(20, 400)} patients.")
    sentences.append(f"Dr. {rng.choice(AUTHORS).split()[0]} reviewed {extras[1]} and {domain[0]} outcomes.")
    title_term = extras[0]
    title = f"{title_term.capitalize()} in {domain[1]}: study {i + 1}"
    return title, " ".join(sentences)


def write_abstracts(rng):
    out = ROOT / "abstracts"
    out.mkdir(parents=True, exist_ok=True)
    for i in range(50):
        title, text = abstract(rng, i)
        meta = {
            "title": title,
            "author": rng.choice(AUTHORS),
            "journal": rng.choice(JOURNALS),
            "year": 2008 if i % 5 == 0 else rng.randint(2003, 2012),
            "volume": str(rng.randint(10, 90)),
            "doi": f"10.5555/cscope.{i + 1:04d}",
        }
        (out / f"abstract_{i + 1:02d}.txt").write_text(text + "\n")
        (out / f"abstract_{i + 1:02d}.json").write_text(json.dumps(meta, indent=2) + "\n")


def write_seed():
    lines = ["# label | synonym; synonym", "# relation: src | dst | rel_type | weight"]
    for label, syns in SEED_CONCEPTS:
        lines.append(label + (" | " + "; ".join(syns) if syns else ""))
    for src, dst, rel, w in SEED_RELATIONS:
        lines.append(f"relation: {src} | {dst} | {rel} | {w}")
    (ROOT / "seed_ontology.txt").write_text("\n".join(lines) + "\n")


def write_source(rng):
    out = ROOT / "source"
    out.mkdir(parents=True, exist_ok=True)
    for i in range(12):
        title, text = abstract(rng, 100 + i)
        open_access = i % 3 != 2
        ref = {
            "external_id": f"PMC{900100 + i}",
            "doi": f"10.5555/remote.{i + 1:04d}",
            "title": title,
            "author": rng.choice(AUTHORS),
            "journal": rng.choice(JOURNALS),
            "year": rng.randint(2005, 2012),
            "volume": str(rng.randint(10, 90)),
            "open_access": open_access,
            "content": text if open_access else None,
        }
        (out / f"ref_{i + 1:02d}.json").write_text(json.dumps(ref, indent=2) + "\n")


# (relevant retrieved, retrieved) per G for the two systems.
RUNS = {
    "A": [(500, 400, 604), (1000, 500, 880), (2000, 600, 1456)],
    "B": [(500, 300, 508), (1000, 375, 760), (2000, 450, 1312)],
}


def write_comparison():
    out = ROOT / "comparison"
    out.mkdir(parents=True, exist_ok=True)
    judgments = ["# G <query> <count>, then '<query> <doc>' per relevant document"]
    for q, (g, _, _) in enumerate(RUNS["A"], start=1):
        judgments.append(f"G q{q} {g}")
        judgments.extend(f"q{q} rel{q}_{d}" for d in range(g))
    (out / "judgments.txt").write_text("\n".join(judgments) + "\n")
    for system, rows in RUNS.items():
        lines = []
        for q, (_, hits, n) in enumerate(rows, start=1):
            docs = [f"rel{q}_{d}" for d in range(hits)] + [f"irr{q}_{system}_{d}" for d in range(n - hits)]
            # Interleave hits and misses so relevance is not rank-ordered.
            random.Random(q * 31 + len(system)).shuffle(docs)
            lines.extend(f"q{q} {doc} {rank}" for rank, doc in enumerate(docs, start=1))
        (out / f"runs_{system.lower()}.txt").write_text("\n".join(lines) + "\n")


def write_bm25():
    out = ROOT / "bm25"
    out.mkdir(parents=True, exist_ok=True)
    (out / "doc1.txt").write_text("COPD copd treatment\n")
    (out / "doc2.txt").write_text("Kidney disease\n")


def main():
    rng = random.Random(20100)
    write_seed()
    write_abstracts(rng)
    write_source(rng)
    write_comparison()
    write_bm25()


if __name__ == "__main__":
    main()
