"""Difference-family designs on the additive group of GF(p^a).

The family fixes a primitive element x and takes the m = (q-1)/(lam-1) base
blocks {0, x^i, x^(i+m), ..., x^(i+(lam-2)m)} for i < m; the design consists
of all q translates of every base block, giving a BIBD with v = q, k = lam,
and every pair covered lam times.  Repeated blocks are kept as separate
instances.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import Field, make_field
from .structures import Design, LocalResolutionSystem


@dataclass(frozen=True)
class DifferenceFamily:
    field: Field
    base_blocks: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.base_blocks)


def sprott_family(p: int, a: int, lam: int) -> DifferenceFamily:
    """The base blocks only; see sprott_design for the developed design."""
    f = make_field(p, a)
    q = f.q
    if lam < 2:
        raise ValueError("block size must be at least 2")
    if lam >= q:
        raise ValueError(f"block size {lam} must be smaller than the field order {q}")
    if (q - 1) % (lam - 1):
        raise ValueError(f"{lam - 1} does not divide {q - 1}; no such family")
    m = (q - 1) // (lam - 1)
    blocks = []
    for i in range(m):
        blk = [0] + [f.exp[(i + j * m) % (q - 1)] for j in range(lam - 1)]
        if len(set(blk)) != lam:
            raise ValueError(f"base block {i} has coincident entries")  # never for lam < q
        blocks.append(tuple(sorted(blk)))
    return DifferenceFamily(f, tuple(blocks))


def sprott_design(p: int, a: int, lam: int) -> tuple[DifferenceFamily, Design]:
    """Develop the family through all translates.

    Block instances are ordered by (content, base-block index, shift), which
    pins down instance indices and groups repeated contents together.
    """
    fam = sprott_family(p, a, lam)
    f = fam.field
    translates = []
    for i, base in enumerate(fam.base_blocks):
        for g in f.elements():
            content = tuple(sorted(f.add(e, g) for e in base))
            translates.append((content, i, g))
    translates.sort()
    return fam, Design(f.q, [t[0] for t in translates])


def affine_plane(q: int) -> Design:
    """Lines of AG(2,q): point (x,y) is index x*q + y.

    Slope lines y = m*x + c come first (m ascending, then c), verticals last.
    """
    f = make_field(*_prime_power(q))
    blocks = []
    for m in f.elements():
        for c in f.elements():
            blocks.append(tuple(sorted(x * q + f.add(f.mul(m, x), c) for x in f.elements())))
    for c in f.elements():
        blocks.append(tuple(c * q + y for y in f.elements()))
    return Design(q * q, blocks)


def replicate(d: Design, n: int) -> Design:
    """n consecutive instances of every block, in block order."""
    if n < 1:
        raise ValueError("replication count must be positive")
    return Design(d.point_count, [b for b in d.blocks for _ in range(n)])


def _prime_power(q: int):
    from .field import factor_prime_power
    pa = factor_prime_power(q)
    if pa is None:
        raise ValueError(f"order {q} is not a prime power")
    return pa


def sprott_lrs(q: int) -> tuple[Design, LocalResolutionSystem]:
    """Explicit non-triangular local resolution system for the family with
    v = q^2 and block size q + 2, where q is a power of 2, q >= 4.

    About the zero point the classes are: the m base blocks themselves, and for
    each j in 0..q one class of the q - 1 multiples x^(j + (q+1)i) of the fixed
    block (0, 1, x^(q-1) + 1, ..., x^(q(q-1)) + 1).  Classes about any other
    point v are the translates by v of the classes about 0.
    """
    from .field import factor_prime_power
    pa = factor_prime_power(q)
    if pa is None or pa[0] != 2 or q < 4:
        raise ValueError(f"need a power of 2 with q >= 4, got {q}")
    fam, design = sprott_design(2, 2 * pa[1], q + 2)
    f = fam.field
    qq = f.q  # q^2 points
    m = fam.m  # equals q - 1

    special = tuple(sorted([0, 1] + [f.add(f.exp[(j * (q - 1)) % (qq - 1)], 1)
                                     for j in range(1, q + 1)]))
    zero_classes: list[list[tuple[int, ...]]] = [list(fam.base_blocks)]
    for j in range(q + 1):
        cls = []
        for i in range(q - 1):
            scale = f.exp[(j + (q + 1) * i) % (qq - 1)]
            cls.append(tuple(sorted(f.mul(scale, e) for e in special)))
        zero_classes.append(cls)

    # match described block contents to instance indices, consuming ascending
    by_content: dict[tuple[int, ...], list[int]] = {}
    for idx, blk in enumerate(design.blocks):
        by_content.setdefault(blk, []).append(idx)

    classes_by_point = []
    for v in range(qq):
        cursor = {c: 0 for c in by_content}
        point_classes = []
        for cls in zero_classes:
            out = []
            for content in cls:
                shifted = tuple(sorted(f.add(e, v) for e in content))
                pool = by_content.get(shifted)
                pos = cursor.get(shifted, 0)
                if pool is None or pos >= len(pool):
                    raise RuntimeError(f"described block {shifted} matches no remaining instance")
                out.append(pool[pos])
                cursor[shifted] = pos + 1
            point_classes.append(out)
        classes_by_point.append(point_classes)
    return design, LocalResolutionSystem(classes_by_point)
