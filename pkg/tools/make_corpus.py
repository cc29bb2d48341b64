"""Deterministically generate the bundled desk-scale training corpus and
phrase set.

The corpus is conversational, everyday English assembled from a slot-filled
sentence grammar: the kind of short person-to-person messages the text-entry
interfaces target.  Closed-class pools (set phrases, family members, foods)
are sampled with a steep head, the way natural text reuses its core; the
open classes (nouns, verbs, adjectives) are sampled uniformly so that word
prediction stays honest.

The grammar keeps a discipline borrowed from predictive-keyboard corpora:
each function word owns one word family (after "the" come household nouns,
after "could you" come base verbs, after "looks" come adjectives), and no
context accumulates more than about seven plausible successors per initial
letter.  That keeps next-word prediction realistic: a handful of strong
guesses, then a long flat tail.

The phrase file mixes in-vocabulary phrases (drawn from the same
distribution as the corpus) with out-of-vocabulary phrases in which exactly
one word is replaced by a token absent from the corpus.

Run from the repository root:  python3 tools/make_corpus.py
"""

import random
import re
from pathlib import Path

SEED = 20240817
N_SENTENCES = 30000
N_IV_PHRASES = 160
N_OOV_PHRASES = 80

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "singleswitch" / "data"

# ---------------------------------------------------------------------------
# closed-class pools (steep sampling)
# ---------------------------------------------------------------------------

# people and personal items; all follow "my"
MY_PEOPLE = ["mother", "brother", "sister", "son", "friend", "father",
             "aunt", "uncle", "cousin", "carer", "daughter", "niece"]
MY_THINGS = ["phone", "glasses", "medicine", "wheelchair", "watch", "jacket",
             "pills", "hearing aid", "raincoat", "toothbrush", "letters"]

# helpers and pets; all follow "our"
OUR_PEOPLE = ["nurse", "doctor", "neighbor", "teacher", "postman",
              "gardener", "cleaner", "visitor"]
OUR_ANIMALS = ["cat", "dog", "kitten", "goldfish", "robin", "puppy",
               "tortoise", "budgie"]

# foods split by their natural determiner
FOODS_A = ["sandwich", "biscuit", "banana", "scone", "cake", "tart",
           "pear", "drink", "egg", "orange", "lemonade", "juice"]
FOODS_SOME = ["soup", "toast", "fruit", "cheese", "tea", "grapes", "yogurt",
              "honey", "salad", "custard", "porridge", "water"]

# destinations; most follow "to the", a few stand alone
PLACES_THE = ["shops", "park", "library", "beach", "market", "chemist",
              "bakery", "cafe", "seaside", "allotment"]
PLACES_BARE = ["outside", "upstairs", "home", "downstairs", "next door",
               "into town"]

TIMES = ["tonight", "tomorrow", "this afternoon", "soon", "this morning",
         "later today", "on sunday", "after lunch", "at the weekend",
         "on tuesday", "next week", "before dinner", "on friday",
         "after my nap", "in a minute", "on my birthday", "next month",
         "around noon", "in the evening", "after breakfast"]

ACTIVITIES = ["watch a film", "watch the news", "watch the garden birds",
              "listen to music", "listen to the radio", "play cards",
              "play dominoes", "read for a while", "sit out in the garden",
              "have a rest", "go for a walk", "feed the birds",
              "do the crossword", "see the photos", "hear that song again",
              "look at the moon"]

FEELINGS = ["happy", "tired", "hungry", "thirsty", "cold", "comfortable",
            "much better", "sleepy", "a little sore", "cheerful",
            "wide awake", "worn out", "quite peaceful", "grateful",
            "full of energy", "a bit dizzy"]

WEATHER = ["sunny", "rainy", "windy", "cloudy", "frosty", "misty",
           "lovely out", "chilly", "stormy", "drizzly"]

# sentence-opening set phrases
OPENERS = ["you know", "apparently", "honestly", "remember",
           "she said", "he said"]

# question frames; each ends just before "the <noun>"
QUESTIONS = ["have you seen", "where did you put", "could you check",
             "who borrowed", "when did you buy", "what happened to"]

# events; all follow "the"
TOPICS = ["the wedding", "the quiz night", "the flower show",
          "the coffee morning", "the street party", "the jumble sale",
          "the carol service", "the school play"]

ADVERBS = ["slowly", "quickly", "carefully", "quietly", "gently", "neatly",
           "happily", "patiently"]

# ---------------------------------------------------------------------------
# open-class families (uniform sampling)
#
# Per-initial counts are capped: after any owning context plus its couple of
# fixed successors, at most seven candidate words share an initial letter,
# so one typed character narrows prediction to a single display row.  The
# letter mix leans toward common English letters, as everyday words do.
# ---------------------------------------------------------------------------

NOUN_STEMS = [
    "table", "teapot", "tray", "towel", "torch", "trolley", "trivet",
    "shelf", "spoon", "saucer", "stool", "sofa",
    "rug", "ribbon", "ruler", "rake", "radiator",
    "napkin", "necklace", "nutcracker", "nightlight", "noticeboard",
    "ladder", "lantern", "latch", "lid", "loaf",
    "easel", "envelope", "eggcup", "engine",
    "umbrella", "urn",
    "magnet", "mantel", "mirror",
    "footstool", "flask", "fender",
    "settle",
    "gate", "grater",
    "apron", "armchair",
    "oven", "ornament",
    "inkpot",
    "hinge", "hook",
    "cushion", "candle",
    "drawer", "duster", "diary",
    "basket",
    "wardrobe", "workbench",
    "pencil", "parcel",
    "jug", "keyring", "quilt", "vase", "yardstick", "zither",
]

VERB_STEMS = [
    "tidy", "taste", "tighten", "trace", "toast", "test",
    "sort", "stack", "sweep", "stitch", "share",
    "rinse", "repair", "rescue", "rearrange", "roast",
    "notice", "nudge", "neaten", "nurse",
    "lift", "lower", "loosen", "label", "lean",
    "empty", "ease", "examine",
    "unpack", "unfold", "untangle",
    "mend", "mix", "mash",
    "fold", "fetch", "fix",
    "gather", "glue",
    "arrange", "adjust",
    "order", "offer",
    "inspect", "improve",
    "heat", "hang",
    "carry", "clean",
    "dust", "deliver", "dry",
    "brush", "boil",
    "wash", "wipe",
    "polish", "press", "pack",
    "varnish", "knead", "juggle", "quilt",
]

ADJ_STEMS = [
    "tall", "tiny", "tender", "thick", "thin",
    "small", "sweet", "smooth", "sturdy", "shiny",
    "round", "rough", "ripe", "rosy", "roomy",
    "neat", "narrow", "nimble", "noisy",
    "long", "loose", "lumpy", "lively", "leafy",
    "elegant", "enormous", "elderly",
    "untidy", "unusual", "uneven",
    "mellow", "mild",
    "faded", "fresh",
    "golden", "glossy",
    "airy", "ample",
    "odd", "oval",
    "icy", "itchy",
    "hollow", "handy",
    "cosy", "crisp",
    "damp", "dusty", "dainty",
    "bright",
    "warm", "wonky",
    "pale", "plain",
    "vivid", "yellow", "jolly", "quaint", "keen", "zesty",
]

# stems whose final consonant doubles before -ed/-ing
DOUBLED: set[str] = set()


def _past(v: str) -> str:
    if v in DOUBLED:
        return v + v[-1] + "ed"
    if v.endswith("e"):
        return v + "d"
    if v.endswith("y") and v[-2] not in "aeiou":
        return v[:-1] + "ied"
    return v + "ed"


def _ing(v: str) -> str:
    if v in DOUBLED:
        return v + v[-1] + "ing"
    if v.endswith("e") and not v.endswith("ee"):
        return v[:-1] + "ing"
    return v + "ing"


def _third(v: str) -> str:
    if v.endswith(("s", "sh", "ch", "x", "z")):
        return v + "es"
    if v.endswith("y") and v[-2] not in "aeiou":
        return v[:-1] + "ies"
    return v + "s"


def _plural(n: str) -> str:
    if n.endswith(("s", "sh", "ch", "x", "z")):
        return n + "es"
    if n.endswith("y") and n[-2] not in "aeiou":
        return n[:-1] + "ies"
    if n.endswith("f"):
        return n[:-1] + "ves"
    return n + "s"


def _cap_per_initial(words: list[str], cap: int = 5) -> list[str]:
    """Keep at most `cap` entries per initial letter, in list order.

    Combined with the couple of fixed successors a context allows, this
    keeps every context's per-initial candidate count within the seven
    completion slots of a display row."""
    seen: dict[str, int] = {}
    out = []
    for w in words:
        if seen.get(w[0], 0) < cap:
            seen[w[0]] = seen.get(w[0], 0) + 1
            out.append(w)
    return out


NOUN_STEMS = _cap_per_initial(NOUN_STEMS)
VERB_STEMS = _cap_per_initial(VERB_STEMS)
ADJ_STEMS = _cap_per_initial(ADJ_STEMS)

NOUNS = list(NOUN_STEMS)
NOUNS_PL = [_plural(n) for n in NOUN_STEMS]
VERBS = list(VERB_STEMS)
VERBED = [_past(v) for v in VERB_STEMS]
VERBING = [_ing(v) for v in VERB_STEMS]
VERBS3 = [_third(v) for v in VERB_STEMS]

# out-of-vocabulary stand-ins for the phrase file: name-like tokens built
# from common letters, guaranteed absent from the corpus
NAMES_OOV = ["tarnelo", "sorentia", "lindeth", "odaline", "nesrali",
             "hadrion", "celosta", "durneth", "altheon", "rosalind",
             "ethelain", "santorel", "delorna", "harsten", "oleandra",
             "tirsendo", "lanorei", "cedrinal", "asteloni", "rendalia"]

# ---------------------------------------------------------------------------
# sentence grammar
# ---------------------------------------------------------------------------

TEMPLATES = [
    # requests and household chores (open noun/verb families)
    ("could you pass me the {noun} please", 9),
    ("could you {verb} the {noun} please", 14),
    ("could you {verb} that {noun} for me", 8),
    ("could you say hello to {person} for me", 4),
    ("{time} could you check on {person}", 4),
    ("don't {verb} the {noun} please", 5),
    ("let's {verb} the {noun}", 7),
    ("i'd rather {verb} than {verb} today", 4),
    ("{time} we {verbed} the {noun}", 14),
    ("we {verbed} those {nouns} before dinner", 10),
    ("they {verbed} the {noun} for us", 5),
    ("{person} {verbed} the {noun} for me", 11),
    ("{person} kept {verbing} all afternoon", 7),
    ("this morning i was {verbing} the {noun}", 9),
    ("every morning he {verbs} his {noun}", 8),
    ("after tea she {verbs} her {noun}", 8),
    ("she always {verbs} before breakfast", 5),
    ("stop {verbing} and come and eat", 4),
    ("i love {verbing} with {person}", 7),
    ("{person} already {verbed} those {nouns}", 7),
    ("{question} the {noun}", 10),
    ("those {nouns} need {verbing}", 8),
    ("we {verbed} the {noun} and the {noun}", 6),
    ("could you {verb} the {noun} and the {noun}", 8),
    ("put those {nouns} away please", 5),
    ("those {nouns} went missing again", 4),
    ("my {mything} turned up under the {noun}", 5),
    # descriptions (adjective family)
    ("the {noun} looks {adjective} today", 9),
    ("that {noun} looks {adjective} this morning", 6),
    ("the {noun} seems rather {adjective}", 6),
    ("it was too {adjective} to sleep", 5),
    ("the garden looks really {adjective} today", 4),
    ("the {noun} needs mending again", 6),
    ("the {noun} has fallen off the shelf", 5),
    # food and drink
    ("i would like a {fooda} please", 7),
    ("can i have some {foods} {time}", 5),
    ("we could have some {foods} after lunch", 5),
    ("there is some {foods} left if you want it", 3),
    ("that {fooda} was delicious", 3),
    # people, pets, plans
    ("my {myperson} is coming to visit {time}", 7),
    ("{time} my {myperson} asked about you", 5),
    ("my {myperson} sent a card for my birthday", 4),
    ("our {ourperson} called in to say hello", 5),
    ("our {animal} has been asleep all day", 5),
    ("our {animal} kept {verbing} near the {noun}", 4),
    ("our {ourperson} {verbed} the {noun} for us", 4),
    ("could you pass me my {mything} please", 7),
    ("i can't find my {mything} anywhere", 5),
    ("let's go to the {place} {time}", 8),
    ("i would like to go to the {place} tomorrow", 5),
    ("we went {placebare} with {person}", 5),
    ("do you want to {activity} with me", 4),
    ("we could {activity} {time}", 5),
    ("i would love to {activity}", 4),
    ("are you coming to {topic} {time}", 5),
    ("{person} told me all about {topic}", 5),
    ("we should talk about {topic} soon", 5),
    # feelings and weather
    ("i feel {feeling} {time}", 5),
    ("i am feeling {feeling} now", 4),
    ("it turned {weather} overnight", 4),
    ("it stayed {weather} all day", 4),
    ("{opener} it will be {weather} tomorrow", 4),
    # small talk
    ("thank you for helping me {time}", 3),
    ("we had a good laugh about it", 3),
    ("i didn't sleep well last night", 5),
    ("what time is lunch today", 2),
    ("that film we watched was really good", 2),
    ("{opener} the {noun} has gone missing", 5),
    ("{opener} my tea has gone cold", 3),
    ("it's time for my medicine", 2),
    ("i'll wait for you by the door", 2),
    ("let me know when you are ready", 2),
]

PERSON = [f"my {p}" for p in MY_PEOPLE] + [f"our {p}" for p in OUR_PEOPLE]

SLOT_FILLS = {
    "noun": NOUNS, "nouns": NOUNS_PL,
    "verb": VERBS, "verbed": VERBED, "verbing": VERBING, "verbs": VERBS3,
    "adjective": ADJ_STEMS,
    "myperson": MY_PEOPLE, "mything": MY_THINGS, "person": PERSON,
    "ourperson": OUR_PEOPLE, "animal": OUR_ANIMALS,
    "fooda": FOODS_A, "foods": FOODS_SOME,
    "place": PLACES_THE, "placebare": PLACES_BARE,
    "time": TIMES, "activity": ACTIVITIES, "feeling": FEELINGS,
    "weather": WEATHER, "opener": OPENERS, "question": QUESTIONS,
    "topic": TOPICS, "adverb": ADVERBS,
}

OPEN_FAMILIES = {"noun", "nouns", "verb", "verbed", "verbing", "verbs",
                 "adjective"}

WEIGHTS = {slot: ([1.0] * len(values) if slot in OPEN_FAMILIES
                  else [1.0 / (i + 1) ** 3.0 for i in range(len(values))])
           for slot, values in SLOT_FILLS.items()}


def fill(template: str, rng: random.Random) -> str:
    out = template
    for slot, values in SLOT_FILLS.items():
        while "{" + slot + "}" in out:
            pick = rng.choices(values, weights=WEIGHTS[slot])[0]
            out = out.replace("{" + slot + "}", pick, 1)
    return out


def main() -> None:
    rng = random.Random(SEED)
    weighted = [t for t, w in TEMPLATES for _ in range(w)]
    sentences = [fill(rng.choice(weighted), rng) for _ in range(N_SENTENCES)]

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    corpus_path = OUT_DIR / "corpus.txt"
    with open(corpus_path, "w") as f:
        for i, s in enumerate(sentences):
            end = "." if i % 3 else rng.choice([".", ".", "!", "?"])
            f.write(s + end + "\n")

    vocab = set()
    counts: dict[str, int] = {}
    for s in sentences:
        for w in re.findall(r"[a-z']+", s):
            vocab.add(w)
            counts[w] = counts.get(w, 0) + 1
    rank = {w: i + 1 for i, w in
            enumerate(sorted(vocab, key=lambda w: -counts[w]))}
    initial_rank: dict[str, int] = {}
    by_initial: dict[str, list[str]] = {}
    for w in sorted(vocab, key=lambda w: -counts[w]):
        by_initial.setdefault(w[0], []).append(w)
    for ws in by_initial.values():
        for i, w in enumerate(ws):
            initial_rank[w] = i + 1

    def clean_cold(w: str) -> bool:
        # True when the word is comfortable to enter with no left context:
        # either it is a top prediction outright, or it is rare enough to be
        # typed, both overall and among words sharing its first letter.
        return ((rank[w] <= 7 or rank[w] >= 28)
                and (initial_rank[w] <= 7 or initial_rank[w] >= 21))

    def usable(s: str) -> bool:
        # Keep prompt phrases whose first word is either a strong opener
        # (top word-prediction row) or a clearly rare one, mirroring how
        # people open messages: a stock opener or a deliberate word.
        words = s.split()
        return 5 <= len(words) <= 9 and clean_cold(words[0])

    seen = set()
    iv_phrases = []
    for s in sentences:
        if len(iv_phrases) >= N_IV_PHRASES:
            break
        if usable(s) and s not in seen:
            seen.add(s)
            iv_phrases.append(s)

    oov_phrases = []
    pool = [s for s in dict.fromkeys(sentences)
            if s not in seen and usable(s)]
    for i, s in enumerate(pool):
        if len(oov_phrases) >= N_OOV_PHRASES:
            break
        words = s.split()
        # Replace one word (never the first) with an unseen token.  The word
        # after the replacement is entered with no usable context, so it must
        # be comfortable cold, like a phrase opener.
        j = None
        for d in range(len(words) - 1):
            k = 1 + (i + d) % (len(words) - 1)
            if k == len(words) - 1 or clean_cold(words[k + 1]):
                j = k
                break
        if j is None:
            continue
        words[j] = NAMES_OOV[i % len(NAMES_OOV)]
        oov_phrases.append(" ".join(words))

    for p in oov_phrases:
        assert sum(1 for w in p.split() if w not in vocab) == 1, p

    with open(OUT_DIR / "phrases.tsv", "w") as f:
        for p in iv_phrases:
            f.write(f"IV\t{p}\n")
        for p in oov_phrases:
            f.write(f"OOV\t{p}\n")

    n_chars = sum(len(s) + 2 for s in sentences)
    print(f"corpus: {len(sentences)} sentences, {n_chars} chars, "
          f"{len(vocab)} words -> {corpus_path}")
    print(f"phrases: {len(iv_phrases)} IV + {len(oov_phrases)} OOV")


if __name__ == "__main__":
    main()
