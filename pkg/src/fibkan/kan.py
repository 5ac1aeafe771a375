"""Strict right Kan extension of an algebra-valued functor to the base.

The value at a base object is the invariant subalgebra of the product of
algebras over the fiber (equivalently, over the under-category), carried by
an explicit subspace with an induced algebra structure. The comparison
isomorphism with the under-category limit and the counit projections are
computed as matrices and checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .finalg import AxiomReport, FinAlgebra, QftFunctor, check_axioms_on_str
from .fincat import (
    FiberedModel,
    FlabbinessReport,
    LocStructure,
    classify_flabbiness,
    connected_components,
    under_category,
)
from .qlinalg import ONE, ZERO, QMatrix, Subspace, kernel_basis, rank


class KanError(ValueError):
    pass


@dataclass(frozen=True)
class Invariants:
    """A subalgebra of a product of algebras indexed by named objects."""

    objects: tuple        # carrier objects in ambient block order
    ambient_labels: tuple  # (object, basis index) per ambient coordinate
    subspace: Subspace
    algebra: FinAlgebra   # induced structure on the subspace basis

    @property
    def dim(self) -> int:
        return self.subspace.dim

    def ambient(self, coords) -> tuple:
        """Expand subspace coordinates to an ambient vector."""
        out = [ZERO] * self.subspace.ambient_dim
        for c, vec in zip(coords, self.subspace.basis):
            if c:
                for j, v in enumerate(vec):
                    if v:
                        out[j] += c * v
        return tuple(out)


def _invariants(objects, arrows, alg_of, mat_of) -> Invariants:
    """Joint equalizer of mat_of(g) x(source) = x(target) over all arrows."""
    objects = tuple(objects)
    offsets = {}
    labels = []
    for obj in objects:
        offsets[obj] = len(labels)
        labels.extend((obj, k) for k in range(alg_of(obj).dim))
    total = len(labels)
    data = {}
    row = 0
    for name, src, tgt in arrows:
        mat = mat_of(name)
        for (i, j), v in mat.data.items():
            data[(row + i, offsets[src] + j)] = data.get(
                (row + i, offsets[src] + j), ZERO) + v
        for i in range(alg_of(tgt).dim):
            key = (row + i, offsets[tgt] + i)
            w = data.get(key, ZERO) - ONE
            if w:
                data[key] = w
            else:
                data.pop(key, None)
        row += alg_of(tgt).dim
    subspace = kernel_basis(QMatrix(row, total, data))

    def blockwise_mul(x, y):
        out = [ZERO] * total
        for obj in objects:
            alg = alg_of(obj)
            off = offsets[obj]
            prod = alg.mul(x[off:off + alg.dim], y[off:off + alg.dim])
            for k, v in enumerate(prod):
                out[off + k] = v
        return tuple(out)

    k = subspace.dim
    sc = []
    for vx in subspace.basis:
        row_sc = []
        for vy in subspace.basis:
            coords = subspace.coords(blockwise_mul(vx, vy))
            if coords is None:
                raise KanError("invariants are not closed under the product")
            row_sc.append(coords)
        sc.append(row_sc)
    unit_ambient = [ZERO] * total
    for obj in objects:
        for i, v in enumerate(alg_of(obj).unit):
            unit_ambient[offsets[obj] + i] = v
    unit = subspace.coords(tuple(unit_ambient))
    if unit is None:
        raise KanError("unit family is not invariant")
    return Invariants(objects, tuple(labels), subspace,
                      FinAlgebra(k, sc, unit) if k else FinAlgebra(0, [], []))


def u_object(fm: FiberedModel, A: QftFunctor, M: str) -> Invariants:
    """Invariants of the fiber over M."""
    fiber = fm.fiber(M)
    arrows = [
        (g, fiber.source(g), fiber.target(g))
        for g in sorted(fiber.morphisms) if not fiber.is_identity(g)
    ]
    return _invariants(fiber.objects, arrows,
                       lambda S: A.algebra(S), lambda g: A.matrix(g))


@dataclass(frozen=True)
class RanUnder:
    invariants: Invariants
    under: object  # the UnderCategory the limit was taken over


def ran_under(fm: FiberedModel, A: QftFunctor, M: str) -> RanUnder:
    """Limit of A over the category of objects under M."""
    under = under_category(fm.pi, M)
    objects = tuple(sorted(under.cat.objects))
    arrows = [
        (name, under.cat.source(name), under.cat.target(name))
        for name in sorted(under.cat.morphisms)
        if not under.cat.is_identity(name)
    ]
    inv = _invariants(
        objects, arrows,
        lambda obj: A.algebra(under.obj_info[obj][0]),
        lambda name: A.matrix(under.mor_info[name][0]),
    )
    return RanUnder(inv, under)


def _transport_matrix(src: Invariants, tgt: Invariants, image_of) -> QMatrix:
    """Matrix in subspace coordinates of an ambient-level assignment.

    image_of(ambient_vector_of_src) must return an ambient vector of tgt
    lying in its subspace.
    """
    data = {}
    for j, vec in enumerate(src.subspace.basis):
        coords = tgt.subspace.coords(image_of(vec))
        if coords is None:
            raise KanError("image leaves the invariant subspace")
        for i, v in enumerate(coords):
            if v:
                data[(i, j)] = v
    return QMatrix(tgt.dim, src.dim, data)


def _block(inv: Invariants, vec, obj):
    off = next(i for i, lbl in enumerate(inv.ambient_labels) if lbl[0] == obj)
    dim = sum(1 for lbl in inv.ambient_labels if lbl[0] == obj)
    return tuple(vec[off:off + dim])


def u_morphism(fm: FiberedModel, A: QftFunctor, f: str,
               src: Invariants, tgt: Invariants) -> QMatrix:
    """The induced map on invariants along a base morphism f: M -> M'.

    The value at S' over M' transports the component at the pullback of S'
    along the cartesian lift.
    """
    def image_of(vec):
        out = []
        for S_prime in tgt.objects:
            pb, lift = fm.lift(S_prime, f)
            out.extend(A.matrix(lift).apply(_block(src, vec, pb)))
        return tuple(out)

    return _transport_matrix(src, tgt, image_of)


def kappa_iso(fm: FiberedModel, A: QftFunctor, M: str,
              ran: RanUnder, u: Invariants):
    """Mutually inverse comparison matrices between the under-category limit
    and the fiber invariants.

    Forward: restrict to the slots whose augmentation is the identity of M.
    Backward: transport every slot from the pullback along its augmentation.
    """
    under = ran.under
    base = fm.loc
    inv = ran.invariants

    def forward(vec):
        out = []
        for S in u.objects:
            name = under.obj_name(S, base.id_of(M))
            out.extend(_block(inv, vec, name))
        return tuple(out)

    def backward(vec):
        out = []
        for obj in inv.objects:
            S, h = under.obj_info[obj]
            pb, lift = fm.lift(S, h)
            out.extend(A.matrix(lift).apply(_block(u, vec, pb)))
        return tuple(out)

    kappa = _transport_matrix(inv, u, forward)
    kappa_inv = _transport_matrix(u, inv, backward)
    if kappa * kappa_inv != QMatrix.identity(u.dim):
        raise KanError("comparison maps do not compose to the identity")
    if kappa_inv * kappa != QMatrix.identity(inv.dim):
        raise KanError("comparison maps do not compose to the identity")
    return kappa, kappa_inv


def counit(fm: FiberedModel, A: QftFunctor, ran: RanUnder, S: str) -> QMatrix:
    """Projection of the under-category limit at the slot (S, identity)."""
    inv = ran.invariants
    M = fm.pi.on_obj(S)
    name = ran.under.obj_name(S, fm.loc.id_of(M))
    if name not in inv.objects:
        raise KanError(f"{S!r} does not lie over the base object of the limit")
    alg = A.algebra(S)
    data = {}
    for j, vec in enumerate(inv.subspace.basis):
        for i, v in enumerate(_block(inv, vec, name)):
            if v:
                data[(i, j)] = v
    return QMatrix(alg.dim, inv.dim, data)


def pullback_dimension_check(fm: FiberedModel, A: QftFunctor, M: str,
                             u: Invariants):
    """For a fiberwise-constant functor the invariants have dimension
    (number of fiber components) x (dimension of the common algebra).

    Returns None when the hypothesis does not apply.
    """
    fiber = fm.fiber(M)
    if not fiber.objects:
        return None
    algs = [A.algebra(S) for S in fiber.objects]
    if any(alg != algs[0] for alg in algs):
        return None
    if any(A.matrix(g) != QMatrix.identity(algs[0].dim)
           for g in fiber.morphisms):
        return None
    expected = len(connected_components(fiber)) * algs[0].dim
    return u.dim == expected


@dataclass(frozen=True)
class KanReport:
    qft_axioms: AxiomReport
    flabbiness: FlabbinessReport
    u_dims: dict
    isotony: bool
    isotony_violations: tuple
    causality: bool
    causality_violations: tuple
    timeslice: bool
    timeslice_violations: tuple
    functorial: bool
    isotony_iff_flabby: bool | None

    @property
    def all_pass(self) -> bool:
        return (self.isotony and self.causality and self.timeslice
                and self.functorial)


def check_induced_axioms(fm: FiberedModel, loc: LocStructure,
                  A: QftFunctor) -> KanReport:
    """Check the three axioms for the induced functor on the base category.

    Injectivity of the induced maps is equivalent to flabbiness whenever the
    input functor satisfies its own three axioms; the report records both
    sides and their agreement.
    """
    base = fm.loc
    qft = check_axioms_on_str(fm, loc, A)
    flab = classify_flabbiness(fm, loc)

    u_at = {M: u_object(fm, A, M) for M in base.objects}
    u_maps = {
        f: u_morphism(fm, A, f, u_at[base.source(f)], u_at[base.target(f)])
        for f in base.morphisms
    }

    iso_bad = tuple(
        f for f in sorted(base.morphisms)
        if rank(u_maps[f]) != u_at[base.source(f)].dim
    )
    ts_bad = tuple(
        f for f in sorted(loc.cauchy)
        if u_at[base.source(f)].dim != u_at[base.target(f)].dim
        or rank(u_maps[f]) != u_at[base.source(f)].dim
    )
    causal_bad = []
    for f1, f2 in loc.cospan_pairs():
        M = base.target(f1)
        alg = u_at[M].algebra
        m1, m2 = u_maps[f1], u_maps[f2]
        for i in range(u_at[base.source(f1)].dim):
            x = m1.apply(u_at[base.source(f1)].algebra.basis_vector(i))
            for j in range(u_at[base.source(f2)].dim):
                y = m2.apply(u_at[base.source(f2)].algebra.basis_vector(j))
                if any(alg.commutator(x, y)):
                    causal_bad.append((f1, f2, i, j))

    functorial = all(
        u_maps[base.id_of(M)] == QMatrix.identity(u_at[M].dim)
        for M in base.objects
    ) and all(
        u_maps[g] * u_maps[f] == u_maps[h]
        for (g, f), h in base.compose.items()
    )

    iff = None
    if qft.all_pass:
        iff = (not iso_bad) == flab.flabby

    return KanReport(
        qft_axioms=qft,
        flabbiness=flab,
        u_dims={M: u_at[M].dim for M in base.objects},
        isotony=not iso_bad,
        isotony_violations=iso_bad,
        causality=not causal_bad,
        causality_violations=tuple(causal_bad),
        timeslice=not ts_bad,
        timeslice_violations=ts_bad,
        functorial=functorial,
        isotony_iff_flabby=iff,
    )
