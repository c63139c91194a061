"""Generates the synthetic desk corpora under desk/.

classify.jsonl   1200 joke-style and 1200 news-style documents, labeled 1 / 0
markov_5k.jsonl  5000 joke-style documents for the n-gram tests

Output is deterministic for a given SEED. The files are committed; rerun only
to change them.
"""
import json
import pathlib
import random

SEED = 20240611

ANIMALS = ["chicken", "duck", "cow", "dog", "cat", "horse", "pig", "sheep", "goat", "frog",
           "bear", "snake", "fish", "mouse", "owl", "penguin", "turtle", "rabbit", "shark", "bee"]
PLACES = ["road", "street", "river", "park", "bar", "school", "playground", "office", "beach", "church"]
RELATIVES = ["wife", "husband", "mom", "dad", "brother", "sister", "uncle", "grandma", "boss", "friend"]
PROFESSIONS = ["priest", "doctor", "lawyer", "teacher", "pirate", "cowboy", "programmer", "plumber",
               "dentist", "magician", "clown", "chef"]
DRINKS = ["beer", "whiskey", "coffee", "milk", "soda", "water", "wine", "tea"]
ADJ = ["big", "small", "hot", "cold", "old", "new", "fast", "slow", "rich", "poor", "happy", "sad",
       "fat", "ugly", "smart", "stupid", "lazy", "short", "tall", "dark"]
ANTONYM = {"big": "small", "small": "big", "hot": "cold", "cold": "hot", "old": "new", "new": "old",
           "fast": "slow", "slow": "fast", "rich": "poor", "poor": "rich", "happy": "sad", "sad": "happy",
           "smart": "stupid", "stupid": "smart", "short": "long", "dark": "light"}
NOUNS = ["joke", "sandwich", "car", "phone", "hat", "pizza", "book", "ladder", "piano", "boat",
         "banana", "computer", "sock", "door", "clock", "shoe", "cake", "window"]
SLANG = ["dude", "damn", "lol", "crap", "bro", "hell", "nuts", "dang", "butt", "fart"]
PUNS = ["a moo-vie star", "a hot dog", "a cold shoulder", "a big deal", "a slow poke", "a fast food",
        "a dead end", "a happy meal", "a smart cookie", "a bad egg", "a sad sack", "a lazy bones"]
NAMES_JOKE = ["Lettuce", "Boo", "Olive", "Atch", "Tank", "Harry", "Nana", "Orange", "Cow", "Dishes"]
VERBS_PAST = ["ate", "sold", "broke", "stole", "painted", "hid", "lost", "found", "kicked", "married"]

ORGS = ["the ministry", "the council", "the committee", "the agency", "the company", "the university",
        "the central bank", "the commission", "the hospital", "the department"]
CITIES = ["Chicago", "Boston", "Denver", "Madrid", "Berlin", "Toronto", "Sydney", "Dublin", "Lagos",
          "Oslo", "Lima", "Osaka"]
PEOPLE = ["Maria Lopez", "John Carter", "Amina Bello", "Peter Novak", "Li Wei", "Sarah Klein",
          "David Osei", "Elena Petrova", "James Reed", "Fatima Khan"]
ROLES = ["director", "chairman", "spokesperson", "minister", "president", "governor", "manager", "analyst"]
THINGS = ["schools", "bridges", "clinics", "stations", "programs", "contracts", "offices", "projects"]
TOPICS = ["budget", "policy", "report", "proposal", "plan", "agreement", "investigation", "review"]
DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]
PERIODS = ["week", "month", "quarter", "year"]
MARKETS = ["housing", "stock", "energy", "labor", "bond", "retail"]
EVENTS = ["announcement", "election", "report", "decision", "merger", "vote"]
DISEASES = ["influenza", "measles", "malaria", "cholera"]
CONNECTIVES_NEWS = ["However,", "Meanwhile,", "As a result,", "In fact,"]


def pick(rng, xs):
    return xs[rng.randrange(len(xs))]


def maybe_slang(rng, p):
    return (pick(rng, SLANG) + " ") if rng.random() < p else ""


def joke(rng, slang_p=0.25):
    a = pick(rng, ADJ)
    b = ANTONYM.get(a, pick(rng, ADJ)) if rng.random() < 0.4 else pick(rng, ADJ)
    kind = rng.randrange(9)
    if kind == 0:
        return "Why did the %s cross the %s? Because the %s side was %s." % (
            pick(rng, ANIMALS), pick(rng, PLACES), a, b)
    if kind == 1:
        return "What do you call a %s %s? %s." % (a, pick(rng, ANIMALS), pick(rng, PUNS).capitalize())
    if kind == 2:
        return "I told my %s a joke about a %s %s, but %sshe didn't get it." % (
            pick(rng, RELATIVES), a, pick(rng, NOUNS), maybe_slang(rng, slang_p))
    if kind == 3:
        return "My %s is so %s that %she %s a %s %s." % (
            pick(rng, RELATIVES), a, maybe_slang(rng, slang_p), pick(rng, VERBS_PAST), b, pick(rng, NOUNS))
    if kind == 4:
        n = pick(rng, NAMES_JOKE)
        return "Knock knock. Who's there? %s. %s who? %s you glad I'm not a %s %s?" % (
            n, n, n, a, pick(rng, ANIMALS))
    if kind == 5:
        return "A %s walks into a %s and orders a %s %s. The bartender says, %swe don't serve %s %ss here." % (
            pick(rng, PROFESSIONS), pick(rng, PLACES), a, pick(rng, DRINKS), maybe_slang(rng, slang_p),
            b, pick(rng, PROFESSIONS))
    if kind == 6:
        return "What's the difference between a %s %s and a %s %s? One is %s, so the other is %s." % (
            a, pick(rng, ANIMALS), b, pick(rng, NOUNS), a, b)
    if kind == 7:
        return "How many %ss does it take to fix a %s? None, they just call it %s and go home." % (
            pick(rng, PROFESSIONS), pick(rng, NOUNS), a)
    return "I used to be a %s %s, but then I %s my %s... Now I'm just %s%s." % (
        a, pick(rng, PROFESSIONS), pick(rng, VERBS_PAST), pick(rng, NOUNS), maybe_slang(rng, slang_p), b)


def news(rng):
    kind = rng.randrange(6)
    conn = (pick(rng, CONNECTIVES_NEWS) + " ") if rng.random() < 0.15 else ""
    if kind == 0:
        return "%s%s announced on %s that it will open %d new %s in %s." % (
            conn, pick(rng, ORGS).capitalize(), pick(rng, DAYS), rng.randrange(2, 60), pick(rng, THINGS),
            pick(rng, CITIES))
    if kind == 1:
        return "%s, the %s of %s, said the %s would be reviewed next %s." % (
            pick(rng, PEOPLE), pick(rng, ROLES), pick(rng, ORGS), pick(rng, TOPICS), pick(rng, PERIODS))
    if kind == 2:
        return "%sOfficials in %s reported %d cases of %s this %s." % (
            conn, pick(rng, CITIES), rng.randrange(3, 900), pick(rng, DISEASES), pick(rng, PERIODS))
    if kind == 3:
        return "The %s market rose %d percent after the %s in %s." % (
            pick(rng, MARKETS), rng.randrange(1, 12), pick(rng, EVENTS), pick(rng, CITIES))
    if kind == 4:
        return "%sThe %s was approved by %s after a %s debate on %s." % (
            conn, pick(rng, TOPICS), pick(rng, ORGS), pick(rng, ["long", "short", "heated", "brief"]),
            pick(rng, DAYS))
    return "%s met %s in %s to discuss the %s and the %s %s." % (
        pick(rng, PEOPLE), pick(rng, PEOPLE), pick(rng, CITIES), pick(rng, TOPICS),
        pick(rng, ["new", "old", "regional", "national"]), pick(rng, TOPICS))


def write_jsonl(path, records):
    with path.open("w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    out = pathlib.Path(__file__).parent / "desk"
    out.mkdir(exist_ok=True)
    rng = random.Random(SEED)
    docs = [(joke(rng), 1) for _ in range(1200)] + [(news(rng), 0) for _ in range(1200)]
    rng.shuffle(docs)
    write_jsonl(out / "classify.jsonl",
                [{"id": "d%04d" % i, "text": t, "label": y} for i, (t, y) in enumerate(docs)])
    write_jsonl(out / "markov_5k.jsonl",
                [{"id": "m%04d" % i, "text": joke(rng)} for i in range(5000)])


if __name__ == "__main__":
    main()
