# SPDX-License-Identifier: Apache-2.0
"""Reference implementation of the deterministic embedder.

Written from the algorithm description, independently of the C++ code, and
used to produce the golden values in embedding_test.cpp. Run it directly to
print them.
"""
import csv
import math
import pathlib
import re

MASK = (1 << 64) - 1
OFFSET = 0xCBF29CE484222325
PRIME = 0x100000001B3


def fnv1a64(data: bytes, state: int = OFFSET) -> int:
    for b in data:
        state ^= b
        state = (state * PRIME) & MASK
    return state


SIGN_SALT = fnv1a64(b"ramo/sign")


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def embed(text: str, dim: int) -> list[float]:
    raw = text.encode("utf-8")
    lower = bytes(b + 32 if 65 <= b <= 90 else b for b in raw)
    words = re.findall(rb"[a-z0-9\x80-\xff]+", lower)
    acc = [0.0] * dim
    if not words:
        return acc
    features = [b"w|" + w for w in words]
    joined = b" " + b" ".join(words) + b" "
    features += [b"t|" + joined[i:i + 3] for i in range(len(joined) - 2)]
    for f in features:
        sign = 1.0 if mix64(fnv1a64(f, SIGN_SALT)) % 2 == 0 else -1.0
        acc[fnv1a64(f) % dim] += sign
    norm = math.sqrt(sum(v * v for v in acc))
    return [v / norm for v in acc] if norm else acc


def cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    return 0.0 if na == 0 or nb == 0 else dot / (na * nb)


def _skills(raw: str) -> list[str]:
    parts = re.split(r",|[ \t]{2,}", raw)
    return [" ".join(p.split()) for p in parts if p.strip()]


def fixture_documents(path) -> list[tuple[str, str]]:
    """(name, document) per retained course, first occurrence wins."""
    out, seen = [], set()
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            name = " ".join(row["Course Name"].split())
            if not name or name.lower() in seen:
                continue
            seen.add(name.lower())
            diff = row["Difficulty Level"].strip()
            diff = diff if diff in ("Beginner", "Intermediate", "Advanced", "Conversant") else "Unrated"
            try:
                rating = repr(float(row["Course Rating"]))
            except ValueError:
                rating = "unrated"
            doc = (f"Title: {name} | University: {row['University'].strip()} | Difficulty: {diff}"
                   f" | Rating: {rating} | Skills: {', '.join(_skills(row['Skills']))}"
                   f" | Description: {' '.join(row['Course Description'].split())}")
            out.append((name, doc))
    return out


def rank(query: str, docs, dim: int = 256) -> list[str]:
    q = embed(query, dim)
    scored = [(-cosine(q, embed(doc, dim)), i, name) for i, (name, doc) in enumerate(docs)]
    return [name for _, _, name in sorted(scored)]


if __name__ == "__main__":
    p = embed("python programming", 256)
    pc = embed("python programming course", 256)
    bv = embed("baroque violin history", 256)
    print(f"cos(p, pc) = {cosine(p, pc):.17g}")
    print(f"cos(p, bv) = {cosine(p, bv):.17g}")
    v = embed("python", 256)
    print("python/256 nonzero:", [(i, round(x, 17)) for i, x in enumerate(v) if x])
    v = embed("C++ Basics", 16)
    print("C++ Basics/16:", [round(x, 17) for x in v])
    docs = fixture_documents(pathlib.Path(__file__).parents[2] / "fixtures" / "mini_catalog.csv")
    for query in ("I want to learn python, can you recommend me some courses?",
                  "I want to learn SQL", "I like classical music history"):
        print(f"{query!r} top-4:", rank(query, docs)[:4])
