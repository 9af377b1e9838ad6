"""
Salvetti presentation of the fundamental groupoid of the complexified complement.

Objects are chambers.  For every ordered pair of adjacent chambers ``A -> B``
there is a generator ``psi(A->B)``; ``psi-(A->B)`` denotes the inverse of
``psi(B->A)``.  Around each codimension-2 face with chambers ``B_1 .. B_2m``
in cyclic order, walking ``m`` steps clockwise or counter-clockwise from the
same start gives equal morphisms.

Words are read left to right in the order the letters are traversed.  On a
module a positive letter ``A -> B`` acts by ``e_B e_A`` and a negative one by
``e_B s_BA``; the matrix of a word is the product with later letters on the
left.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from typing import Sequence

from .arrangement import FacePoset
from .errors import InvalidModule
from .linalg import Matrix
from .modules import Report, RModule


@dataclasses.dataclass(frozen=True)
class Letter:
    source: int
    target: int
    sign: int = 1

    def inverse(self) -> "Letter":
        return Letter(self.target, self.source, -self.sign)

    def label(self, poset: FacePoset) -> str:
        mark = "psi" if self.sign > 0 else "psi-"
        return f"{mark}({poset.name(self.source)}->{poset.name(self.target)})"


@dataclasses.dataclass(frozen=True)
class Word:
    """A composable path; the empty word at ``start`` is the identity there."""

    start: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        at = self.start
        for i, x in enumerate(self.letters):
            if x.source != at:
                raise ValueError(f"letter {i} starts at face {x.source}, expected {at}")
            at = x.target

    @property
    def end(self) -> int:
        return self.letters[-1].target if self.letters else self.start

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.start, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.end, tuple(x.inverse() for x in reversed(self.letters)))

    def label(self, poset: FacePoset) -> str:
        if not self.letters:
            return f"id({poset.name(self.start)})"
        return " ".join(x.label(poset) for x in self.letters)


def path_word(faces: Sequence[int], sign: int = 1) -> Word:
    return Word(faces[0], tuple(Letter(a, b, sign) for a, b in zip(faces, faces[1:])))


@dataclasses.dataclass(frozen=True)
class Relation:
    face: int
    start: int
    left: Word
    right: Word


@dataclasses.dataclass(frozen=True)
class Presentation:
    poset: FacePoset
    base: int
    objects: tuple[int, ...]
    generators: tuple[tuple[int, int], ...]
    relations: tuple[Relation, ...]
    loops: tuple[Word, ...]
    tree: tuple[tuple[int, int], ...]

    def to_text(self) -> str:
        p = self.poset
        lines = [f"base {p.name(self.base)}", f"chambers {len(self.objects)}"]
        lines.append(f"generators {len(self.generators)}")
        lines += [f"  psi({p.name(a)}->{p.name(b)})" for a, b in self.generators]
        lines.append(f"relations {len(self.relations)}")
        for r in self.relations:
            lines.append(f"  [{p.name(r.face)} from {p.name(r.start)}] {r.left.label(p)} = {r.right.label(p)}")
        lines.append(f"loops {len(self.loops)}")
        lines += [f"  {w.label(p)}" for w in self.loops]
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        p = self.poset
        return {
            "base": p.name(self.base),
            "chambers": [p.name(c) for c in self.objects],
            "generators": [f"psi({p.name(a)}->{p.name(b)})" for a, b in self.generators],
            "relations": [
                {"face": p.name(r.face), "start": p.name(r.start), "left": r.left.label(p), "right": r.right.label(p)}
                for r in self.relations
            ],
            "loops": [w.label(p) for w in self.loops],
        }


def chamber_graph(poset: FacePoset, objects: Sequence[int] | None = None) -> dict[int, list[int]]:
    objs = poset.chambers if objects is None else tuple(objects)
    keep = set(objs)
    adj: dict[int, list[int]] = {c: [] for c in objs}
    for a, b, _w in poset.opposing_pairs:
        if a in keep and b in keep:
            adj[a].append(b)
    for c in adj:
        adj[c].sort(key=poset.name)
    return adj


def spanning_tree_loops(poset: FacePoset, base: int, adj: dict[int, list[int]]):
    """Breadth-first tree from ``base``; one loop per directed non-tree edge."""
    parent = {base: None}
    order = [base]
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
                queue.append(v)
    if len(parent) != len(adj):
        raise ValueError("chamber graph is not connected")

    def to_base(v) -> list[int]:
        path = [v]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return path

    tree = {(parent[v], v) for v in order if parent[v] is not None}
    loops = []
    for u in sorted(adj, key=poset.name):
        for v in adj[u]:
            if (u, v) in tree:
                continue
            there = list(reversed(to_base(u)))
            back = to_base(v)
            loops.append(path_word(there) + path_word([u, v]) + path_word(back))
    return tuple(sorted(tree)), tuple(loops)


def presentation(poset: FacePoset, base: int | None = None) -> Presentation:
    """Generators, clock relations and loop generators of ``pi_1`` at ``base``."""
    base = poset.chambers[0] if base is None else base
    if base not in poset.chambers:
        raise ValueError(f"base {poset.name(base)} is not a chamber")
    adj = chamber_graph(poset)
    generators = tuple((a, b) for a in sorted(adj, key=poset.name) for b in adj[a])
    relations = []
    for f in sorted(poset.by_codim(2), key=poset.name):
        cycle = poset.codim2_cycle(f)
        n = len(cycle)
        m = n // 2
        for i in sorted(range(n), key=lambda k: poset.name(cycle[k])):
            fwd = [cycle[(i + k) % n] for k in range(m + 1)]
            bwd = [cycle[(i - k) % n] for k in range(m + 1)]
            relations.append(Relation(f, cycle[i], path_word(fwd), path_word(bwd)))
    tree, loops = spanning_tree_loops(poset, base, adj)
    return Presentation(poset, base, tuple(sorted(adj, key=poset.name)), generators, tuple(relations), loops, tree)


def letter_matrix(module: RModule, x: Letter) -> Matrix:
    e = module.act
    if x.sign > 0:
        return e[x.target] @ e[x.source]
    try:
        return e[x.target] @ module.s(x.target, x.source)
    except KeyError:
        raise InvalidModule(
            f"no localization inverse for {module.poset.name(x.target)}, {module.poset.name(x.source)}"
        ) from None


def evaluate_word(module: RModule, word: Word) -> Matrix:
    """Matrix of ``word`` as a map ``e_start M -> e_end M`` in ambient coordinates.

    Positive letters only use the face actions, so clock relations can be
    evaluated on assignments that fail validation.
    """
    out = module.act[word.start]
    for x in word.letters:
        out = letter_matrix(module, x) @ out
    return out


def on_image(module: RModule, face: int, matrix: Matrix) -> Matrix:
    """Restrict an endomorphism of ``e_face M`` to the canonical basis of that image."""
    space = module.image(face)
    return space.coordinate_map() @ matrix @ space.matrix()


def check_zifferblatt(module: RModule, pres: Presentation | None = None) -> Report:
    pres = pres or presentation(module.poset)
    p = module.poset
    rep = Report("clock relations")
    for r in pres.relations:
        rep.check(evaluate_word(module, r.left) == evaluate_word(module, r.right),
                  f"relation around {p.name(r.face)} from {p.name(r.start)} fails: {r.left.label(p)} != {r.right.label(p)}")
    return rep
