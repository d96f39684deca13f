#!/usr/bin/env python3
"""Generates the bundled fixture corpus (fixtures/fixture_en.full).

Each sentence is given as (forms, pos, heads, rels, frames) where frames
is {predicate: [(label, start, end), ...]} with inclusive 1-based spans.
The corpus is engineered so that every relation is exactly recoverable
through the joint-label round trip.
"""

S = []

def s(forms, pos, heads, rels, frames):
    n = len(forms)
    assert len(pos) == n and len(heads) == n and len(rels) == n, forms
    for p, args in frames.items():
        assert 1 <= p <= n
        for (lab, a, b) in args:
            assert 1 <= a <= b <= n, (forms, lab, a, b)
            assert not (a <= p <= b), (forms, lab, "predicate inside span")
    S.append((forms, pos, heads, rels, frames))

# 1. Control verb: xcomp (C) with a (D) clause argument.
s("She wanted to design the bridge".split(),
  ["PRP", "VBD", "TO", "VB", "DT", "NN"],
  [2, 0, 4, 2, 6, 4],
  ["nsubj", "root", "mark", "xcomp", "det", "dobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 6)],
   4: [("ARG0", 1, 1), ("ARG1", 5, 6)]})

# 2. Plain transitive (D).
s("She designed the bridge".split(),
  ["PRP", "VBD", "DT", "NN"],
  [2, 0, 4, 2],
  ["nsubj", "root", "det", "dobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 4)]})

# 3. Coordination (C): the second conjunct shares the subject.
s("She designed the tower and built the bridge".split(),
  ["PRP", "VBD", "DT", "NN", "CC", "VBD", "DT", "NN"],
  [2, 0, 4, 2, 2, 2, 8, 6],
  ["nsubj", "root", "det", "dobj", "cc", "conj", "det", "dobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 4)],
   6: [("ARG0", 1, 1), ("ARG1", 7, 8)]})

# 4. Purpose clause: vmod (C).
s("We use wisdom to counsel people".split(),
  ["PRP", "VBP", "NN", "TO", "VB", "NNS"],
  [2, 0, 2, 5, 2, 5],
  ["nsubj", "root", "dobj", "mark", "vmod", "dobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 3)],
   5: [("ARG0", 1, 1), ("ARG1", 6, 6)]})

# 5. Modal predicates under a common governor: mmod (C).
s("Crews should continue repair bridges".split(),
  ["NNS", "MD", "VB", "VB", "NNS"],
  [4, 4, 4, 0, 4],
  ["nsubj", "mmod", "mmod", "root", "dobj"],
  {2: [("ARG0", 1, 1)],
   3: [("ARG0", 1, 1)],
   4: [("ARG0", 1, 1), ("ARG1", 5, 5)]})

# 6. The two-hop (C) chain through xcomp + conj.
s("She wanted to come and help".split(),
  ["PRP", "VBD", "TO", "VB", "CC", "VB"],
  [2, 0, 4, 2, 4, 4],
  ["nsubj", "root", "mark", "xcomp", "cc", "conj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 6)],
   4: [("ARG0", 1, 1)],
   6: [("ARG0", 1, 1)]})

# 7. Relative clause: rcmod (R) with the left-side span rule, plus a
#    reference label and a by-phrase (D).
s("The bridge , which is designed by her , collapsed".split(),
  ["DT", "NN", ",", "WDT", "VBZ", "VBN", "IN", "PRP", ",", "VBD"],
  [2, 10, 2, 6, 6, 2, 6, 7, 10, 0],
  ["det", "nsubj", "punct", "nsubjpass", "auxpass", "rcmod", "prep", "pobj", "punct", "root"],
  {6: [("ARG1", 1, 3), ("R-ARG1", 4, 4), ("ARG0", 7, 8)],
   10: [("ARG1", 1, 8)]})

# 8. Non-finite modifier of a noun: vmod (R), plus a chain into its
#    complement.
s("The administration , hoping to win , appealed".split(),
  ["DT", "NN", ",", "VBG", "TO", "VB", ",", "VBD"],
  [2, 8, 4, 2, 6, 4, 4, 0],
  ["det", "nsubj", "punct", "vmod", "mark", "xcomp", "punct", "root"],
  {4: [("ARG0", 1, 2), ("ARG1", 5, 6)],
   6: [("ARG0", 1, 2)],
   8: [("ARG0", 1, 7)]})

# 9. Participial adjective: amod (R) with the right-side span rule.
s("Crews cleared the broken glass".split(),
  ["NNS", "VBD", "DT", "VBN", "NN"],
  [2, 0, 5, 5, 2],
  ["nsubj", "root", "det", "amod", "dobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 5)],
   4: [("ARG1", 5, 5)]})

# 10. Coordination sharing the subject and all ARGM adjuncts: the
#     propagation flag.
s("She stumbled and fell yesterday".split(),
  ["PRP", "VBD", "CC", "VBD", "NN"],
  [2, 0, 2, 2, 2],
  ["nsubj", "root", "cc", "conj", "tmod"],
  {2: [("ARG0", 1, 1), ("ARGM-TMP", 5, 5)],
   4: [("ARG0", 1, 1), ("ARGM-TMP", 5, 5)]})

# 11. The dummy relation: the governor is not a predicate at all.
s("She nodded , smiling".split(),
  ["PRP", "VBD", ",", "VBG"],
  [2, 0, 2, 2],
  ["nsubj", "root", "punct", "vmod"],
  {4: [("ARG0", 1, 1)]})

# 12. Ditransitive with an ARG2.
s("She gave him the keys".split(),
  ["PRP", "VBD", "PRP", "DT", "NNS"],
  [2, 0, 2, 5, 2],
  ["nsubj", "root", "iobj", "det", "dobj"],
  {2: [("ARG0", 1, 1), ("ARG2", 3, 3), ("ARG1", 4, 5)]})

# 13. Modal adjunct label.
s("She will win".split(),
  ["PRP", "MD", "VB"],
  [3, 3, 0],
  ["nsubj", "aux", "root"],
  {3: [("ARG0", 1, 1), ("ARGM-MOD", 2, 2)]})

# 14. No predicates at all.
s("Hello there".split(),
  ["UH", "RB"],
  [0, 1],
  ["root", "advmod"],
  {})

# 15. A predicate with no arguments.
s("It rained".split(),
  ["PRP", "VBD"],
  [2, 0],
  ["expl", "root"],
  {2: []})

# 16. Multi-token temporal adjunct (D).
s("The committee met last week".split(),
  ["DT", "NN", "VBD", "JJ", "NN"],
  [2, 3, 0, 5, 3],
  ["det", "nsubj", "root", "amod", "tmod"],
  {3: [("ARG0", 1, 2), ("ARGM-TMP", 4, 5)]})

# 17. Second control construction.
s("They tried to leave".split(),
  ["PRP", "VBD", "TO", "VB"],
  [2, 0, 4, 2],
  ["nsubj", "root", "mark", "xcomp"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 4)],
   4: [("ARG0", 1, 1)]})

# 18. Coordination sharing subject and a manner adjunct.
s("They sang and danced loudly".split(),
  ["PRP", "VBD", "CC", "VBD", "RB"],
  [2, 0, 2, 2, 2],
  ["nsubj", "root", "cc", "conj", "advmod"],
  {2: [("ARG0", 1, 1), ("ARGM-MNR", 5, 5)],
   4: [("ARG0", 1, 1), ("ARGM-MNR", 5, 5)]})

# 19. amod (R) whose argument has right-hand children.
s("He dropped the broken glass of wine".split(),
  ["PRP", "VBD", "DT", "VBN", "NN", "IN", "NN"],
  [2, 0, 5, 5, 2, 5, 6],
  ["nsubj", "root", "det", "amod", "dobj", "prep", "pobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 7)],
   4: [("ARG1", 5, 7)]})

# 20. Relative clause with a chain into its complement.
s("Another group that is trying to win".split(),
  ["DT", "NN", "WDT", "VBZ", "VBG", "TO", "VB"],
  [2, 0, 5, 5, 2, 7, 5],
  ["det", "root", "nsubj", "aux", "rcmod", "mark", "xcomp"],
  {5: [("ARG0", 1, 2), ("R-ARG0", 3, 3), ("ARG1", 6, 7)],
   7: [("ARG0", 1, 2)]})

# 21. Purpose vmod (C) again with different lexemes.
s("They arrived to inspect the site".split(),
  ["PRP", "VBD", "TO", "VB", "DT", "NN"],
  [2, 0, 4, 2, 6, 4],
  ["nsubj", "root", "mark", "vmod", "det", "dobj"],
  {2: [("ARG0", 1, 1)],
   4: [("ARG0", 1, 1), ("ARG1", 5, 6)]})

# 22. Prepositional argument (D) spanning a subtree.
s("She relied on her friends".split(),
  ["PRP", "VBD", "IN", "PRP$", "NNS"],
  [2, 0, 2, 5, 3],
  ["nsubj", "root", "prep", "poss", "pobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 5)]})

# 23. Clausal complement (D) and an embedded predicate.
s("The workers said the plant closed".split(),
  ["DT", "NNS", "VBD", "DT", "NN", "VBD"],
  [2, 3, 0, 5, 6, 3],
  ["det", "nsubj", "root", "det", "nsubj", "ccomp"],
  {3: [("ARG0", 1, 2), ("ARG1", 4, 6)],
   6: [("ARG1", 4, 5)]})

# 24. Modal predicate below its complement: mmod (R) with the right-side
#     rule covering the event span.
s("Cities must build new centers".split(),
  ["NNS", "MD", "VB", "JJ", "NNS"],
  [3, 3, 0, 5, 3],
  ["nsubj", "mmod", "root", "amod", "dobj"],
  {2: [("ARG1", 3, 5)],
   3: [("ARG0", 1, 1), ("ARG1", 4, 5)]})

# 25. Object control: the shared argument changes label, (ARG1,ARG0).
s("I tried to help him fix it".split(),
  ["PRP", "VBD", "TO", "VB", "PRP", "VB", "PRP"],
  [2, 0, 4, 2, 4, 4, 6],
  ["nsubj", "root", "mark", "xcomp", "dobj", "dep", "dobj"],
  {2: [("ARG0", 1, 1), ("ARG1", 3, 7)],
   4: [("ARG0", 1, 1), ("ARG1", 5, 5), ("ARG2", 6, 7)],
   6: [("ARG0", 5, 5), ("ARG1", 7, 7)]})

# 26. Chain through vmod + conj.
s("Firms grew to merge and expand".split(),
  ["NNS", "VBD", "TO", "VB", "CC", "VB"],
  [2, 0, 4, 2, 4, 4],
  ["nsubj", "root", "mark", "vmod", "cc", "conj"],
  {2: [("ARG0", 1, 1)],
   4: [("ARG0", 1, 1)],
   6: [("ARG0", 1, 1)]})

# 27. Fronted temporal adjunct.
s("Then she smiled".split(),
  ["RB", "PRP", "VBD"],
  [3, 3, 0],
  ["advmod", "nsubj", "root"],
  {3: [("ARGM-TMP", 1, 1), ("ARG0", 2, 2)]})

# 28. Locative adjunct (D).
s("They met in the park".split(),
  ["PRP", "VBD", "IN", "DT", "NN"],
  [2, 0, 2, 5, 3],
  ["nsubj", "root", "prep", "det", "pobj"],
  {2: [("ARG0", 1, 1), ("ARGM-LOC", 3, 5)]})

# 29. Negation adjunct.
s("He did not agree".split(),
  ["PRP", "VBD", "RB", "VB"],
  [4, 4, 4, 0],
  ["nsubj", "aux", "neg", "root"],
  {4: [("ARG0", 1, 1), ("ARGM-NEG", 3, 3)]})

# 30. Second dummy-relation case with a (D) adjunct of its own.
s("He left , whistling loudly".split(),
  ["PRP", "VBD", ",", "VBG", "RB"],
  [2, 0, 2, 2, 4],
  ["nsubj", "root", "punct", "vmod", "advmod"],
  {4: [("ARG0", 1, 1), ("ARGM-MNR", 5, 5)]})

assert len(S) == 30, len(S)

out = []
for forms, pos, heads, rels, frames in S:
    n = len(forms)
    preds = sorted(frames.keys())
    cols = []
    for p in preds:
        col = ["_"] * n
        col[p - 1] = "V"
        spans = sorted(frames[p], key=lambda a: (a[1], a[2], a[0]))
        for (lab, a, b) in spans:
            assert all(col[t - 1] == "_" for t in range(a, b + 1)), (forms, p, lab)
            col[a - 1] = f"B-{lab}"
            for t in range(a + 1, b + 1):
                col[t - 1] = f"I-{lab}"
        cols.append(col)
    header = "# predicates =" + (" " + ",".join(map(str, preds)) if preds else "")
    out.append(header)
    for t in range(1, n + 1):
        row = [str(t), forms[t - 1], pos[t - 1], str(heads[t - 1]), rels[t - 1]]
        row += [c[t - 1] for c in cols]
        out.append("\t".join(row))
    out.append("")

with open("fixtures/fixture_en.full", "w") as f:
    f.write("\n".join(out) + "\n")
print(f"wrote {len(S)} sentences")
