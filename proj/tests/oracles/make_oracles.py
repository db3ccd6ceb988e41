#!/usr/bin/env python3
"""Independent reference values for the C++ tests.

Run once from the repository root; writes tests/fixtures/oracle_values.json.
Nothing here shares code with the library: tokens come from a regex split,
case folding from str.casefold, punctuation from unicodedata, compressed
sizes from Python's zlib module.
"""
import collections
import json
import pathlib
import re
import unicodedata
import zlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIX = ROOT / "tests" / "fixtures"

PUNCT = [chr(c) for c in range(0x21, 0x7F) if not chr(c).isalnum()]
PUNCT += ["—", "–", "‘", "’", "“", "”", "…", "·"]
BINS = 16


def load(name):
    text = unicodedata.normalize("NFC", (FIX / name).read_text(encoding="utf-8"))
    return text, [m.span() for m in re.finditer(r"\S+", text)]


def fragment(text, spans, start, end):
    return text[spans[start][0]:spans[end - 1][1]]


def is_punct(c):
    return unicodedata.category(c).startswith("P")


def strip(tok):
    b, e = 0, len(tok)
    while b < e and is_punct(tok[b]):
        b += 1
    while e > b and is_punct(tok[e - 1]):
        e -= 1
    return tok[b:e]


def spec(text, k, f):
    toks = text.split()
    chars = collections.Counter(c for t in toks for c in t)
    words = collections.Counter(strip(t).casefold() for t in toks if strip(t))
    top_chars = [c for c, _ in sorted(chars.items(), key=lambda kv: (-kv[1], ord(kv[0])))[:k]]
    top_words = [w for w, _ in sorted(words.items(), key=lambda kv: (-kv[1], kv[0]))[:f]]
    return top_chars, top_words


def features(frag, top_chars, top_words):
    toks = frag.split()
    ntok = len(toks)
    chars = collections.Counter(frag)
    vec = [chars[c] / len(frag) for c in top_chars]
    words = [strip(t) for t in toks if strip(t)]
    folded = collections.Counter(w.casefold() for w in words)
    vec += [folded[w] / ntok for w in top_words]
    bins = [0] * BINS
    for w in words:
        bins[min(len(w), BINS) - 1] += 1
    vec += [b / ntok for b in bins]
    end = collections.Counter(t[-1] for t in toks)
    inner = collections.Counter(c for t in toks for c in t[:-1])
    vec += [end[p] / ntok for p in PUNCT]
    vec += [inner[p] / ntok for p in PUNCT]
    lengths = [len(w) for w in words]
    mean = sum(lengths) / len(lengths)
    var = sum((x - mean) ** 2 for x in lengths) / len(lengths)
    vec += [mean, var, len(folded) / len(words),
            sum(1 for c in folded.values() if c == 1) / len(words)]
    return vec


def csize(b):
    return len(zlib.compress(b, 9))


def ncd(x, y):
    cx, cy, cxy = csize(x), csize(y), csize(x + y)
    return (cxy - min(cx, cy)) / max(cx, cy)


def main():
    en_text, en_spans = load("interleaved_en.txt")
    gr_text, gr_spans = load("greek_two_part.txt")
    out = {
        "word_counts": {"interleaved_en.txt": len(en_text.split()),
                        "greek_two_part.txt": len(gr_text.split())},
    }

    chars, words = spec(en_text, 60, 300)
    frag = fragment(en_text, en_spans, 3000, 4000)
    out["features"] = {
        "fixture": "interleaved_en.txt", "char_top_k": 60, "word_top_f": 300,
        "start": 3000, "end": 4000,
        "dimension": len(chars) + len(words) + BINS + 2 * len(PUNCT) + 4,
        "top_chars": [ord(c) for c in chars], "top_words": words[:20],
        "values": features(frag, chars, words),
    }
    gchars, gwords = spec(gr_text, 60, 300)
    out["features_greek"] = {
        "fixture": "greek_two_part.txt", "start": 1300, "end": 2200,
        "dimension": len(gchars) + len(gwords) + BINS + 2 * len(PUNCT) + 4,
        "values": features(fragment(gr_text, gr_spans, 1300, 2200), gchars, gwords),
    }

    x = fragment(en_text, en_spans, 0, 1000).encode()
    y = fragment(en_text, en_spans, 3000, 4000).encode()
    out["ncd"] = {
        "fixture": "interleaved_en.txt", "x": [0, 1000], "y": [3000, 4000],
        "c_x": csize(x), "c_y": csize(y), "c_xy": csize(x + y),
        "ncd_xy": ncd(x, y), "ncd_yx": ncd(y, x), "ncd_xx": ncd(x, x),
    }
    (FIX / "oracle_values.json").write_text(json.dumps(out, indent=1, ensure_ascii=False) + "\n",
                                            encoding="utf-8")


if __name__ == "__main__":
    main()
