# Copyright 2026 The EntEval Toolkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes small source corpora in the native formats read by datagen.

One directory per task plus wordvec.txt (16-dimensional vectors for every
token used). The files are checked in; rerunning reproduces them.
"""

import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
DIM = 16
rng = random.Random(42)
vocab = set()


def words(text):
    for w in text.lower().replace(".", " ").replace(",", " ").split():
        vocab.add(w)


def out(task, name):
    d = os.path.join(HERE, task)
    os.makedirs(d, exist_ok=True)
    return open(os.path.join(d, name), "w", encoding="utf-8", newline="\n")


def jsonl(f, rows):
    for r in rows:
        f.write(json.dumps(r) + "\n")


def description(eid, title, text):
    words(title)
    words(text)
    toks = text.lower().replace(".", " .").replace(",", " ,").split()
    return {"entity_id": eid, "title": title, "description": toks}


# ---------------------------------------------------------------- CAP

NAMES = ["the dog", "mary", "the old farmer", "a red car", "john",
         "the village", "the teacher", "a small boat", "the river",
         "the mayor", "a letter", "the children"]
PRONOUNS = {"the dog": "it", "mary": "she", "the old farmer": "he",
            "a red car": "it", "john": "he", "the village": "it",
            "the teacher": "she", "a small boat": "it", "the river": "it",
            "the mayor": "he", "a letter": "it", "the children": "they"}
VERBS = ["saw", "followed", "met", "liked", "found", "passed", "visited"]


def cap_doc(doc_id):
    ents = rng.sample(NAMES, 4)
    sentences, clusters = [], {e: [] for e in ents}

    def surface(e, pronoun):
        return (PRONOUNS[e] if pronoun else e).split()

    for s in range(6):
        a, b, other = rng.sample(ents, 3)
        c = rng.choice([a, b, other])
        forced = s == 2
        toks = []
        for e, tail in [(a, [rng.choice(VERBS)]), (b, ["before"]),
                        (c, ["left", "."])]:
            m = surface(e, forced or rng.random() < 0.3)
            clusters[e].append([s, len(toks), len(toks) + len(m)])
            toks += m + tail
        words(" ".join(toks))
        sentences.append([t.capitalize() if i == 0 else t
                          for i, t in enumerate(toks)])
    return {"id": doc_id, "sentences": sentences,
            "mention_clusters": [c for c in clusters.values() if c]}


with out("cap", "train.jsonl") as f:
    jsonl(f, [cap_doc("train_%02d" % k) for k in range(8)])
with out("cap", "dev.jsonl") as f:
    jsonl(f, [cap_doc("dev_%02d" % k) for k in range(3)])

# ---------------------------------------------------------------- CERP

CONCEPTS = [
    ("paris", "a city", "IsA", "is", "GPE"),
    ("london", "a capital", "IsA", "is", "GPE"),
    ("google", "a company", "IsA", "is", "ORG"),
    ("microsoft", "a software company", "IsA", "is", "ORG"),
    ("obama", "a president", "IsA", "was", "PERSON"),
    ("lincoln", "a president", "IsA", "was", "PERSON"),
    ("amazon", "books", "CapableOf", "can sell", "ORG"),
    ("berlin", "germany", "PartOf", "is part of", "GPE"),
    ("toyota", "cars", "CapableOf", "can build", "ORG"),
    ("tokyo", "a big city", "IsA", "is", "GPE"),
]


def assertion(rel, a, b, surface, lang="en"):
    uri = "/a/[/r/%s/,/c/%s/%s/,/c/%s/%s/]" % (rel, lang, a.replace(" ", "_"),
                                               lang, b.replace(" ", "_"))
    info = json.dumps({"dataset": "/d/conceptnet/4/en",
                       "surfaceText": surface, "weight": 1.0})
    words(surface.replace("[[", " ").replace("]]", " "))
    return "\t".join([uri, "/r/" + rel, "/c/%s/%s" % (lang, a),
                      "/c/%s/%s" % (lang, b), info]), uri


rows, ner = [], []
for a, b, rel, verb, typ in CONCEPTS:
    line, uri = assertion(rel, a, b, "[[%s]] %s [[%s]]" % (
        a.capitalize(), verb, b))
    rows.append(line)
    ner.append({"instance_id": uri, "spans": [[0, 0]], "types": [typ]})
# Filtered: non-English, excluded relations, numeric-only entity, no NER
# row, no relation verb.
rows.append(assertion("IsA", "chat", "animal", "[[Un chat]] est [[un animal]]",
                      lang="fr")[0])
line, uri = assertion("RelatedTo", "paris", "france",
                      "[[Paris]] is related to [[France]]")
rows.append(line)
ner.append({"instance_id": uri, "spans": [[0, 0]], "types": ["GPE"]})
line, uri = assertion("AtLocation", "google", "office",
                      "You are likely to find [[Google]] in [[an office]]")
rows.append(line)
line, uri = assertion("IsA", "seven", "number", "[[Seven]] is [[a number]]")
rows.append(line)
ner.append({"instance_id": uri, "spans": [[0, 0]], "types": ["CARDINAL"]})
rows.append(assertion("IsA", "rome", "city", "[[Rome]] is [[a city]]")[0])
line, uri = assertion("UsedFor", "google", "search",
                      "[[Google]] helps [[search]]")
rows.append(line)
ner.append({"instance_id": uri, "spans": [[0, 0]], "types": ["ORG"]})
with out("cerp", "assertions.csv") as f:
    f.write("\n".join(rows) + "\n")
with out("cerp", "ner.jsonl") as f:
    jsonl(f, ner)

# ---------------------------------------------------------------- EFP

PEOPLE = ["Nikolaj Coster-Waldau", "Roman Atwood", "Adrienne Bailon",
          "Homer Simpson", "Ada Lovelace", "Alan Turing", "Marie Curie",
          "Isaac Newton"]
FACTS = ["worked with the Fox network", "is a content creator",
         "was born in London", "is an accountant", "wrote a novel",
         "played for a football club"]
claims = []
for k in range(40):
    person = PEOPLE[k % len(PEOPLE)]
    fact = FACTS[k % len(FACTS)]
    label = ["SUPPORTS", "REFUTES", "NOT ENOUGH INFO"][k % 3]
    claim = "%s %s." % (person, fact)
    words(claim)
    n = len(person.replace("-", " - ").split())
    mentions = [[0, n - 1]]
    if k % 5 == 0:
        fact_tokens = fact.split()
        mentions.append([n + len(fact_tokens) - 1, n + len(fact_tokens) - 1])
    if k % 13 == 7:
        mentions = []
    claims.append({"id": 100 + k, "label": label, "claim": claim,
                   "mentions": mentions})
with out("efp", "claims.jsonl") as f:
    jsonl(f, claims)

# ---------------------------------------------------------------- ET

TYPES = ["person", "location", "organization", "city", "artist", "writer",
         "company", "country", "politician", "athlete", "event", "building"]
with out("et", "types.txt") as f:
    f.write("\n".join(TYPES) + "\n")
ET_ROWS = [
    (["in", "1990", ","], "Paris", ["hosted", "a", "summit", "."],
     ["location", "city"]),
    (["the", "novel", "by"], "Jane Austen", ["was", "reprinted", "."],
     ["person", "writer", "artist"]),
    ([], "Google", ["bought", "a", "startup", "."],
     ["organization", "company"]),
    (["fans", "cheered", "for"], "Serena Williams", ["."],
     ["person", "athlete"]),
    (["the", "treaty", "was", "signed", "in"], "France", ["."],
     ["location", "country"]),
    (["senator"], "John Smith", ["voted", "no", "."],
     ["person", "politician"]),
    (["they", "toured"], "the Louvre", ["in", "may", "."],
     ["building", "location"]),
    (["after"], "the Olympics", [",", "the", "city", "relaxed", "."],
     ["event"]),
]
for split, lo, hi in [("train", 0, 4), ("dev", 4, 6), ("test", 6, 8)]:
    with out("et", split + ".json") as f:
        for k in range(lo, hi):
            left, mention, right, ys = ET_ROWS[k]
            words(" ".join(left + [mention] + right))
            jsonl(f, [{"annot_id": "%s_%d" % (split, k),
                       "left_context_token": left, "mention_span": mention,
                       "right_context_token": right, "y_str": ys}])

# ---------------------------------------------------------------- ERT

SYLLABLES = ["ka", "lo", "mi", "ra", "ven", "tor", "shi", "pel", "dun", "ar",
             "bel", "cor"]


def random_name():
    return "".join(rng.sample(SYLLABLES, 2)).capitalize() + " " + \
        "".join(rng.sample(SYLLABLES, 2)).capitalize()


ert_desc, tuples = {}, []
pool = [random_name() for _ in range(60)]
for rel in ["/people/person/nationality", "/film/film/director",
            "/music/artist/label"]:
    for k in range(27):
        e1, e2 = rng.sample(pool, 2)
        tuples.append((e1, rel, e2))
for k in range(26):
    e1 = "Lake " + random_name().split()[0]
    e2 = random_name().split()[0] + " River"
    tuples.append((e1, "/geography/lake/outflow", e2))
tuples.append(("Lake Solo", "/geography/rare_relation", "Tiny River"))
tuples.append(("Nobody Known", "/film/film/director", pool[0]))
ids = {}
for e1, _, e2 in tuples:
    for name in (e1, e2):
        if name == "Nobody Known" or name in ids:
            continue
        ids[name] = "m.%04d" % len(ids)
        ert_desc[name] = description(
            ids[name], name, "%s is an entity described in a short text." %
            name)
with out("ert", "tuples.tsv") as f:
    for e1, rel, e2 in tuples:
        f.write("%s\t%s\t%s\n" % (ids.get(e1, "m.missing"), rel,
                                  ids.get(e2, "m.missing")))
with out("ert", "descriptions.jsonl") as f:
    jsonl(f, sorted(ert_desc.values(), key=lambda d: d["entity_id"]))

# ---------------------------------------------------------------- ESR

esr_entities = ["Apple Inc.", "Steve Jobs", "IPhone", "Microsoft",
                "Bill Gates", "Windows", "Linux", "Google", "Larry Page",
                "Android (operating system)"]
with out("esr", "descriptions.jsonl") as f:
    jsonl(f, [description("Q%d" % (k + 1), name,
                          "%s is a topic in computing history." % name)
              for k, name in enumerate(esr_entities)])
with out("esr", "kore.txt") as f:
    f.write("Apple Inc.\n\tSteve Jobs\n\tIPhone\n\tMicrosoft\n")
    f.write("Google\n\tLarry Page\n\tAndroid\n\tLinux\n\tWindows\n")
with out("esr", "alignment.tsv") as f:
    f.write("Android\tQ10\n")
for subset, rows in [("rel", [("Apple Inc.", "Steve Jobs", 9.1),
                              ("Microsoft", "Bill Gates", 8.7),
                              ("Linux", "Google", 4.2),
                              ("IPhone", "Windows", 3.3)]),
                     ("sim", [("Apple Inc.", "Microsoft", 7.5),
                              ("IPhone", "Android", 8.0),
                              ("Steve Jobs", "Linux", 1.2),
                              ("Larry Page", "Bill Gates", 6.4)])]:
    with out("esr", "wikisrs_%s.tsv" % subset) as f:
        f.write("Term1\tTerm2\tMean\tStdDev\n")
        for a, b, m in rows:
            f.write("%s\t%s\t%.1f\t1.0\n" % (a, b, m))

# ---------------------------------------------------------------- CoNLL

conll_desc = {}
for k in range(40):
    eid = "E%02d" % k
    conll_desc[eid] = description(eid, "Entity %d" % k,
                                  "entity %d is a place or a person ." % k)
SURFACES = ["germany", "england", "paris", "jordan", "washington",
            "united", "ajax", "victoria", "oxford", "lincoln"]
crosswikis = []
for s_i, surface in enumerate(SURFACES):
    cands = rng.sample(sorted(conll_desc), 6)
    priors = [round(rng.random(), 3) for _ in cands]
    if s_i == 3:
        priors[1] = priors[0]  # tie on the top prior
    for c, p in zip(cands, priors):
        crosswikis.append((surface, p, c))
    crosswikis.append((surface, 0.05, "E_NODESC"))
# A 35-entry mention for truncation to 30.
for k in range(35):
    crosswikis.append(("river", round(0.5 / (k + 1), 6), "E%02d" % k))
mentions = []
for k in range(49):
    surface = SURFACES[k % len(SURFACES)] if k < 44 else "river"
    entries = [c for s, _, c in crosswikis if s == surface and c != "E_NODESC"]
    gold = entries[k % len(entries)]
    if k % 17 == 5:
        gold = "E39"  # usually absent from the prior table
    if k == 48:
        gold = "E33"  # listed, but below the top 30
    split = ["train", "testa", "testb"][0 if k < 30 else (1 if k < 40 else 2)]
    left = ["the", "team", "from"]
    mention = surface.capitalize()
    mentions.append({"id": "conll/%03d" % k, "split": split,
                     "context": left + [mention, "won", "again", "."],
                     "span": [3, 3], "gold": gold})
    words(" ".join(left + [mention, "won", "again"]))
mentions.append({"id": "conll/nil", "split": "train",
                 "context": ["a", "Nobody", "spoke"], "span": [1, 1],
                 "gold": "--NME--"})
mentions.append({"id": "conll/unseen", "split": "testb",
                 "context": ["the", "Zanzibar", "office"], "span": [1, 1],
                 "gold": "E07"})
with out("conll", "mentions.jsonl") as f:
    jsonl(f, mentions)
with out("conll", "crosswikis.tsv") as f:
    for s, p, c in crosswikis:
        f.write("%s\t%s %s\n" % (s.capitalize(), p, c))
with out("conll", "descriptions.jsonl") as f:
    jsonl(f, [conll_desc[k] for k in sorted(conll_desc)])

# ---------------------------------------------------------------- Rare

rare_desc = {}
for k in range(20):
    eid = "R%02d" % k
    rare_desc[eid] = description(eid, "Rare %d" % k,
                                 "rare entity %d worked as a scholar ." % k)
docs = []
for k in range(30):
    cands = rng.sample(sorted(rare_desc), 5 if k % 9 == 4 else 4)
    gold = cands[k % len(cands)]
    ctx = ["the", "scholar", "**blank**", "wrote", "a", "treatise", "."]
    if k % 11 == 6:
        ctx = ["**blank**", "met", "**blank**", "."]
    words(" ".join(c for c in ctx if c != "**blank**"))
    docs.append({"id": "rare/%02d" % k, "context": ctx, "candidates": cands,
                 "gold": gold})
with out("rare", "instances.jsonl") as f:
    jsonl(f, docs)
with out("rare", "descriptions.jsonl") as f:
    jsonl(f, [rare_desc[k] for k in sorted(rare_desc)])

# ---------------------------------------------------------------- vectors

vocab.update(["lake", "river", "not"])
for name in pool:
    words(name)
vectors = {w: [rng.gauss(0.0, 1.0) for _ in range(DIM)] for w in sorted(vocab)}
# Names that share a head word stay close; "london" is the nearest
# neighbour of "paris" so the CERP example is predictable.
vectors["london"] = [x + rng.gauss(0.0, 0.05) for x in vectors["paris"]]
with open(os.path.join(HERE, "wordvec.txt"), "w", encoding="utf-8",
          newline="\n") as f:
    for w in sorted(vectors):
        f.write(w + " " + " ".join("%.4f" % x for x in vectors[w]) + "\n")
