#!/usr/bin/env python3
"""Writes data/demo/scripts.jsonl: lemma statements with their proof scripts
for the rule kernel in data/demo/kernel.json. Deterministic."""

import json
import random
import sys
from pathlib import Path

rng = random.Random(20200402)

ATOMS = ["p", "q", "r", "s", "x", "y", "z", "a", "b", "c", "n", "m"]
COMPOUND = ["(f x)", "(g y)", "(S n)", "(S (S m))", "(h a b)", "(f (g z))", "(neg p)"]


def atom():
    return rng.choice(ATOMS)


def term():
    return rng.choice(ATOMS + COMPOUND)


def prop():
    return rng.choice(["p", "q", "r", "(P x)", "(Q y)", "(R a b)", "(lt n m)", "(le (S n) m)"])


def closed():
    """A trivially closable goal and its closing tactic."""
    if rng.random() < 0.5:
        return "true", "trivial"
    t = term()
    return f"(eq {t} {t})", "reflexivity"


def fam_and():
    g1, t1 = closed()
    g2, t2 = closed()
    return f"(and {g1} {g2})", f"split; [{t1} | {t2}]"


def fam_imp_self():
    p = prop()
    return f"(imp {p} {p})", "intro; assumption"


def fam_or():
    p = prop()
    if rng.random() < 0.5:
        return f"(or true {p})", "left; trivial"
    return f"(or {p} true)", "right; trivial"


def fam_plus_zero():
    t = term()
    return f"(eq (plus {t} zero) {t})", "rewrite plus_zero; reflexivity"


def fam_assoc():
    a, b, c = term(), term(), term()
    return f"(eq (plus (plus {a} {b}) {c}) (plus {a} (plus {b} {c})))", "rewrite plus_assoc; reflexivity"


def fam_imp_and():
    p = prop()
    return f"(imp {p} (and {p} true))", "intro; split; [assumption | trivial]"


def fam_quad():
    return "(quad true true true true)", "case4; trivial"


def fam_not_false():
    return "(not false)", "unfold not; intro; assumption"


def fam_ex_falso():
    return f"(imp false {prop()})", "intro; contradiction"


def fam_refl():
    t = term()
    return f"(eq {t} {t})", "reflexivity"


def fam_and_mix():
    p, q = prop(), prop()
    return f"(and (imp {p} {p}) (or {q} true))", "split; [intro; assumption | right; trivial]"


def fam_sym_zero():
    t = term()
    return f"(eq {t} (plus {t} zero))", "symmetry; rewrite plus_zero; reflexivity"


def fam_auto_and():
    t = term()
    return f"(and true (eq {t} {t}))", "split; auto"


FILES = [
    ("Logic/Basics", [], [fam_refl, fam_imp_self, fam_or, fam_and, fam_ex_falso], 14),
    ("Logic/Connectives", ["Logic/Basics"], [fam_imp_and, fam_not_false, fam_and_mix, fam_or, fam_imp_self], 14),
    ("Arith/Plus", ["Logic/Basics"], [fam_plus_zero, fam_sym_zero, fam_refl, fam_auto_and], 14),
    ("Arith/Assoc", ["Arith/Plus"], [fam_assoc, fam_plus_zero, fam_sym_zero, fam_and], 12),
    ("Cases/Quad", ["Logic/Basics"], [fam_quad, fam_and, fam_auto_and, fam_not_false], 10),
]


def main(out_path):
    lines = []
    for name, deps, families, count in FILES:
        lines.append(json.dumps({"file": name, "deps": deps}))
        for i in range(count):
            goal, script = rng.choice(families)()
            lemma = f"{name.split('/')[-1].lower()}_{i}"
            lines.append(json.dumps({"file": name, "lemma": lemma, "script": script, "hyps": [], "goal": goal}))
    Path(out_path).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/demo/scripts.jsonl")
