"""Truncated cochain complexes and dg-algebras over QQ.

A complex stores degrees 0..max_degree with labelled bases and explicit
differential matrices. Dg-algebras carry sparse product tables keyed by
basis pairs. Diagrams of dg-algebras admit limits (equalizer subalgebras)
and homotopy limits (normalized cochain total complexes); weak equivalence
means isomorphism on cohomology through the requested degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import FinCategory, nerve
from .qlinalg import (
    ONE,
    QMatrix,
    Subspace,
    kernel_basis,
    rank,
    rat,
    row_space,
    solve,
)


class ComplexError(ValueError):
    pass


class Complex:
    """A cochain complex truncated to degrees 0..max_degree.

    labels[n] is the ordered basis of degree n; d[n] is the matrix of the
    differential from degree n to degree n+1.
    """

    def __init__(self, max_degree: int, labels, differentials):
        self.max_degree = max_degree
        self.labels = {n: tuple(labels.get(n, ())) for n in range(max_degree + 1)}
        self.pos = {
            n: {lbl: i for i, lbl in enumerate(lbls)}
            for n, lbls in self.labels.items()
        }
        self.differentials = dict(differentials)

    def dim(self, n: int) -> int:
        return len(self.labels.get(n, ()))

    def index(self, n: int, label) -> int:
        return self.pos[n][label]

    def d(self, n: int) -> QMatrix:
        m = self.differentials.get(n)
        if m is None:
            return QMatrix.zero(self.dim(n + 1), self.dim(n))
        return m

    def violations(self):
        out = []
        for n, lbls in self.labels.items():
            if len(set(lbls)) != len(lbls):
                out.append(f"duplicate basis labels in degree {n}")
        for n in range(self.max_degree):
            dn = self.d(n)
            if (dn.rows, dn.cols) != (self.dim(n + 1), self.dim(n)):
                out.append(f"differential in degree {n} has wrong shape")
        if out:
            return out
        for n in range(self.max_degree - 1):
            if not (self.d(n + 1) * self.d(n)).is_zero():
                out.append(f"d*d is nonzero out of degree {n}")
        return out


def validate_complex(max_degree, labels, differentials) -> Complex:
    cx = Complex(max_degree, labels, differentials)
    violations = cx.violations()
    if violations:
        raise ComplexError("; ".join(violations))
    return cx


def _sparse_apply(m: QMatrix, vec: dict) -> dict:
    out = {}
    by_col = {}
    for (i, j), v in m.data.items():
        by_col.setdefault(j, []).append((i, v))
    for j, c in vec.items():
        if not c:
            continue
        for i, v in by_col.get(j, ()):
            s = out.get(i, 0) + v * c
            if s:
                out[i] = s
            else:
                out.pop(i, None)
    return out


def _dense(vec: dict, dim: int) -> tuple:
    return tuple(vec.get(i, rat(0)) for i in range(dim))


@dataclass
class GradedLinearMap:
    """A degreewise linear map of complexes raising degree by `shift`."""

    source: Complex
    target: Complex
    shift: int
    maps: dict  # n -> QMatrix of shape target.dim(n + shift) x source.dim(n)

    def matrix(self, n: int) -> QMatrix:
        m = self.maps.get(n)
        if m is None:
            tgt = self.target.dim(n + self.shift) if 0 <= n + self.shift <= self.target.max_degree else 0
            src = self.source.dim(n) if 0 <= n <= self.source.max_degree else 0
            return QMatrix.zero(tgt, src)
        return m

    @classmethod
    def identity(cls, cx: Complex) -> "GradedLinearMap":
        return cls(cx, cx, 0, {
            n: QMatrix.identity(cx.dim(n)) for n in range(cx.max_degree + 1)
        })

    @classmethod
    def zero(cls, source: Complex, target: Complex, shift: int = 0) -> "GradedLinearMap":
        return cls(source, target, shift, {})

    def after(self, other: "GradedLinearMap") -> "GradedLinearMap":
        maps = {}
        for n in range(other.source.max_degree + 1):
            mid = n + other.shift
            if not (0 <= mid <= self.source.max_degree):
                continue
            m = self.matrix(mid) * other.matrix(n)
            if not m.is_zero() or m.rows * m.cols:
                maps[n] = m
        return GradedLinearMap(other.source, self.target,
                               self.shift + other.shift, maps)

    def __add__(self, other: "GradedLinearMap") -> "GradedLinearMap":
        if self.shift != other.shift:
            raise ComplexError("cannot add maps of different shifts")
        degrees = set(self.maps) | set(other.maps)
        return GradedLinearMap(self.source, self.target, self.shift, {
            n: self.matrix(n) + other.matrix(n) for n in degrees
        })

    def __neg__(self) -> "GradedLinearMap":
        return GradedLinearMap(self.source, self.target, self.shift,
                               {n: -m for n, m in self.maps.items()})

    def __sub__(self, other: "GradedLinearMap") -> "GradedLinearMap":
        return self + (-other)

    def scale(self, c) -> "GradedLinearMap":
        c = rat(c)
        return GradedLinearMap(self.source, self.target, self.shift,
                               {n: m.scale(c) for n, m in self.maps.items()})

    def is_cochain_map(self, up_to: int | None = None) -> bool:
        if self.shift != 0:
            raise ComplexError("cochain map check requires shift 0")
        top = min(self.source.max_degree, self.target.max_degree) - 1
        if up_to is not None:
            top = min(top, up_to)
        for n in range(top + 1):
            if self.target.d(n) * self.matrix(n) != self.matrix(n + 1) * self.source.d(n):
                return False
        return True


def check_homotopy_identity(lhs: GradedLinearMap, rhs: GradedLinearMap,
                            homotopy: GradedLinearMap, up_to: int):
    """Degrees n <= up_to where lhs - rhs != d*H + H*d; empty means verified."""
    if lhs.shift != 0 or rhs.shift != 0 or homotopy.shift != -1:
        raise ComplexError("homotopy identity expects two shift-0 maps and a shift -1 map")
    src, tgt = lhs.source, lhs.target
    bad = []
    for n in range(up_to + 1):
        want = lhs.matrix(n) - rhs.matrix(n)
        got = homotopy.matrix(n + 1) * src.d(n)
        if n > 0:
            got = got + tgt.d(n - 1) * homotopy.matrix(n)
        if want != got:
            bad.append(n)
    return bad


# --- cohomology ------------------------------------------------------------


def cocycle_space(cx: Complex, n: int) -> Subspace:
    if n < cx.max_degree:
        return kernel_basis(cx.d(n))
    return Subspace.full(cx.dim(n))


def coboundary_space(cx: Complex, n: int) -> Subspace:
    if n == 0:
        return Subspace.from_vectors(cx.dim(0), [])
    return row_space(cx.d(n - 1).transpose())


def cohomology_dim(cx: Complex, n: int) -> int:
    return cocycle_space(cx, n).dim - coboundary_space(cx, n).dim


def cohomology_representatives(cx: Complex, n: int):
    """Cocycles whose classes form a basis of the degree-n cohomology."""
    bnd = coboundary_space(cx, n)
    reps = []
    span = bnd
    for vec in cocycle_space(cx, n).basis:
        if not span.contains(vec):
            reps.append(vec)
            span = Subspace.from_vectors(
                cx.dim(n), list(span.basis) + [vec])
    return reps


def _class_coords(cx: Complex, n: int, reps, vec):
    """Coefficients of the class of vec in the given representative basis."""
    bnd = coboundary_space(cx, n)
    cols = list(reps) + list(bnd.basis)
    m = QMatrix(cx.dim(n), len(cols), {
        (i, j): v for j, col in enumerate(cols) for i, v in enumerate(col) if v
    })
    sol = solve(m, vec)
    if sol is None:
        raise ComplexError("vector is not a cocycle class in the given basis")
    return sol[:len(reps)]


def induced_cohomology_map(f: GradedLinearMap, n: int) -> QMatrix:
    """Matrix of H^n(f) in the canonical representative bases."""
    if f.shift != 0:
        raise ComplexError("induced map requires a shift-0 cochain map")
    src_reps = cohomology_representatives(f.source, n)
    tgt_reps = cohomology_representatives(f.target, n)
    data = {}
    for j, rep in enumerate(src_reps):
        image = f.matrix(n).apply(rep)
        for i, v in enumerate(_class_coords(f.target, n, tgt_reps, image)):
            if v:
                data[(i, j)] = v
    return QMatrix(len(tgt_reps), len(src_reps), data)


def is_weak_equivalence(f: GradedLinearMap, up_to: int) -> bool:
    """True when f is a cochain map inducing isomorphisms on H^n, n <= up_to."""
    if not f.is_cochain_map(up_to):
        return False
    for n in range(up_to + 1):
        h_src = cohomology_dim(f.source, n)
        h_tgt = cohomology_dim(f.target, n)
        if h_src != h_tgt:
            return False
        if rank(induced_cohomology_map(f, n)) != h_src:
            return False
    return True


# --- dg-algebras -----------------------------------------------------------


class Dga:
    """A dg-algebra on a truncated complex.

    products[(n1, n2)] maps basis index pairs (i, j) to the sparse product
    vector in degree n1 + n2; missing keys mean the product is zero. unit is
    a sparse degree-0 vector.
    """

    def __init__(self, complex_: Complex, products, unit):
        self.complex = complex_
        self.products = {
            key: {pair: dict(vec) for pair, vec in table.items() if vec}
            for key, table in products.items()
        }
        self.unit = dict(unit)
        self._left_index = {}
        self._right_index = {}

    def table(self, n1: int, n2: int) -> dict:
        return self.products.get((n1, n2), {})

    def _lefts(self, n1, n2):
        # right index j -> set of left indices i with a nonzero table entry
        key = (n1, n2)
        if key not in self._left_index:
            idx = {}
            for (i, j) in self.table(n1, n2):
                idx.setdefault(j, set()).add(i)
            self._left_index[key] = idx
        return self._left_index[key]

    def _rights(self, n1, n2):
        # left index i -> set of right indices j with a nonzero table entry
        key = (n1, n2)
        if key not in self._right_index:
            idx = {}
            for (i, j) in self.table(n1, n2):
                idx.setdefault(i, set()).add(j)
            self._right_index[key] = idx
        return self._right_index[key]

    def mul_basis(self, n1: int, i: int, n2: int, j: int) -> dict:
        return self.table(n1, n2).get((i, j), {})

    def mul(self, n1: int, x: dict, n2: int, y: dict) -> dict:
        out = {}
        table = self.table(n1, n2)
        for i, xv in x.items():
            if not xv:
                continue
            for j, yv in y.items():
                if not yv:
                    continue
                vec = table.get((i, j))
                if not vec:
                    continue
                c = xv * yv
                for k, v in vec.items():
                    s = out.get(k, 0) + c * v
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def violations(self, full_associativity: bool = False):
        out = []
        out.extend(self.complex.violations())
        cx = self.complex
        top = cx.max_degree
        # unit element must be a degree-0 cocycle
        if not self.unit:
            out.append("unit element is zero")
        dunit = _sparse_apply(cx.d(0), self.unit) if top >= 1 else {}
        if dunit:
            out.append("unit element is not closed")
        for n in range(top + 1):
            for i in range(cx.dim(n)):
                e = {i: ONE}
                if self.mul(0, self.unit, n, e) != e:
                    out.append(f"left unit law fails in degree {n} at index {i}")
                if self.mul(n, e, 0, self.unit) != e:
                    out.append(f"right unit law fails in degree {n} at index {i}")
        out.extend(self._associativity_violations(full_associativity))
        out.extend(self._leibniz_violations())
        return out

    def _assoc_check(self, n1, i, n2, j, n3, k):
        xy = self.mul_basis(n1, i, n2, j)
        yz = self.mul_basis(n2, j, n3, k)
        lhs = self.mul(n1 + n2, xy, n3, {k: ONE})
        rhs = self.mul(n1, {i: ONE}, n2 + n3, yz)
        return lhs == rhs

    def _associativity_violations(self, full: bool):
        out = []
        top = self.complex.max_degree
        for n1 in range(top + 1):
            for n2 in range(top + 1 - n1):
                for n3 in range(top + 1 - n1 - n2):
                    if full:
                        pairs = [
                            ((i, j), k)
                            for i in range(self.complex.dim(n1))
                            for j in range(self.complex.dim(n2))
                            for k in range(self.complex.dim(n3))
                        ]
                        checked = set()
                        for (i, j), k in pairs:
                            if not self._assoc_check(n1, i, n2, j, n3, k):
                                out.append(
                                    f"associativity fails on degrees ({n1},{n2},{n3})"
                                    f" indices ({i},{j},{k})")
                        continue
                    # a triple can only be nonzero when one of the two inner
                    # products is; sweep both tables and dedupe
                    checked = set()
                    for (i, j), vec in self.table(n1, n2).items():
                        ks = set(self._rights(n2, n3).get(j, ()))
                        rights = self._rights(n1 + n2, n3)
                        for l in vec:
                            ks.update(rights.get(l, ()))
                        for k in ks:
                            checked.add((i, j, k))
                    for (j, k), vec in self.table(n2, n3).items():
                        is_ = set(self._lefts(n1, n2).get(j, ()))
                        lefts = self._lefts(n1, n2 + n3)
                        for l in vec:
                            is_.update(lefts.get(l, ()))
                        for i in is_:
                            checked.add((i, j, k))
                    for i, j, k in sorted(checked):
                        if not self._assoc_check(n1, i, n2, j, n3, k):
                            out.append(
                                f"associativity fails on degrees ({n1},{n2},{n3})"
                                f" indices ({i},{j},{k})")
        return out

    def _leibniz_violations(self):
        out = []
        cx = self.complex
        top = cx.max_degree
        sign = {0: ONE}
        for n1 in range(top):
            for n2 in range(top - n1):
                dcols1 = {j: cx.d(n1).column(j) for j in range(cx.dim(n1))}
                dcols2 = {j: cx.d(n2).column(j) for j in range(cx.dim(n2))}
                s = ONE if n1 % 2 == 0 else -ONE
                for i in range(cx.dim(n1)):
                    di = dcols1[i]
                    for j in range(cx.dim(n2)):
                        lhs = _sparse_apply(
                            cx.d(n1 + n2), self.mul_basis(n1, i, n2, j))
                        rhs = self.mul(n1 + 1, di, n2, {j: ONE})
                        for k, v in self.mul(
                                n1, {i: ONE}, n2 + 1, dcols2[j]).items():
                            w = rhs.get(k, 0) + s * v
                            if w:
                                rhs[k] = w
                            else:
                                rhs.pop(k, None)
                        if lhs != rhs:
                            out.append(
                                f"Leibniz rule fails on degrees ({n1},{n2})"
                                f" indices ({i},{j})")
        return out


def validate_dga(complex_, products, unit) -> Dga:
    dga = Dga(complex_, products, unit)
    violations = dga.violations()
    if violations:
        raise ComplexError("; ".join(violations[:10]))
    return dga


def algebra_to_dga(alg, max_degree: int) -> Dga:
    """A unital algebra viewed as a dg-algebra concentrated in degree 0."""
    cx = Complex(max_degree, {0: tuple(range(alg.dim))}, {})
    table = {}
    for i in range(alg.dim):
        for j in range(alg.dim):
            vec = {k: v for k, v in enumerate(alg.sc[i][j]) if v}
            if vec:
                table[(i, j)] = vec
    unit = {i: v for i, v in enumerate(alg.unit) if v}
    return Dga(cx, {(0, 0): table}, unit)


def matrix_to_map(matrix: QMatrix, source: Dga, target: Dga) -> GradedLinearMap:
    """A degree-0 algebra map promoted to a map of one-degree dg-algebras."""
    return GradedLinearMap(source.complex, target.complex, 0, {0: matrix})


# --- diagrams of dg-algebras ------------------------------------------------


@dataclass
class DgaDiagram:
    """A functor from a finite category to dg-algebras."""

    cat: FinCategory
    at: dict    # object -> Dga
    maps: dict  # morphism -> GradedLinearMap of shift 0

    def violations(self):
        out = []
        for obj in self.cat.objects:
            if obj not in self.at:
                out.append(f"no dg-algebra at {obj!r}")
        for g in self.cat.morphisms:
            if g not in self.maps:
                out.append(f"no map at {g!r}")
        if out:
            return out
        for obj in self.cat.objects:
            cx = self.at[obj].complex
            ident = self.maps[self.cat.id_of(obj)]
            for n in range(cx.max_degree + 1):
                if ident.matrix(n) != QMatrix.identity(cx.dim(n)):
                    out.append(f"identity of {obj!r} is not the identity map")
                    break
        for (g, f), h in self.cat.compose.items():
            comp = self.maps[g].after(self.maps[f])
            cx = self.maps[f].source
            for n in range(cx.max_degree + 1):
                if comp.matrix(n) != self.maps[h].matrix(n):
                    out.append(f"functoriality fails on ({g!r},{f!r})")
                    break
        for g in self.cat.morphisms:
            if not self.maps[g].is_cochain_map():
                out.append(f"map at {g!r} does not commute with differentials")
        return out


def validate_diagram(cat, at, maps) -> DgaDiagram:
    diagram = DgaDiagram(cat, dict(at), dict(maps))
    violations = diagram.violations()
    if violations:
        raise ComplexError("; ".join(violations))
    return diagram


def _anchor_object(cat: FinCategory, anchor):
    return anchor if isinstance(anchor, str) else cat.target(anchor[0])


@dataclass
class DoubleComplex:
    """Normalized-nerve double complex of a diagram of dg-algebras.

    Bidegree (n, m): n-tuples of composable non-identity morphisms with a
    degree-m class of the dg-algebra at the target of the first arrow.
    Degree-0 anchors are objects.
    """

    diagram: DgaDiagram
    max_total_degree: int
    labels: dict     # (n, m) -> tuple of (anchor, internal_label)
    d_vertical: dict    # (n, m) -> QMatrix into (n+1, m)
    d_horizontal: dict  # (n, m) -> QMatrix into (n, m+1)


def double_complex(diagram: DgaDiagram, max_total_degree: int) -> DoubleComplex:
    cat = diagram.cat
    nerves = {n: nerve(cat, n) for n in range(max_total_degree + 2)}
    labels = {}
    pos = {}
    for n in range(max_total_degree + 2):
        for m in range(max_total_degree + 1):
            lbls = []
            for anchor in nerves[n]:
                cx = diagram.at[_anchor_object(cat, anchor)].complex
                lbls.extend((anchor, il) for il in cx.labels.get(m, ()))
            labels[(n, m)] = tuple(lbls)
            pos[(n, m)] = {lbl: i for i, lbl in enumerate(lbls)}

    d_vertical = {}
    for n in range(max_total_degree + 1):
        for m in range(max_total_degree + 1):
            data = {}
            tgt_pos = pos[(n + 1, m)]
            src_pos = pos[(n, m)]
            for u in nerves[n + 1]:
                anchor_obj = cat.target(u[0])
                cxu = diagram.at[anchor_obj].complex
                for il in cxu.labels.get(m, ()):
                    row = tgt_pos[(u, il)]
                    # first face applies the diagram map along the leading arrow
                    tail = u[1:] if n >= 1 else cat.source(u[0])
                    src_cx = diagram.at[_anchor_object(cat, tail)].complex
                    mat = diagram.maps[u[0]].matrix(m)
                    i_row = cxu.pos[m][il]
                    for jl in src_cx.labels.get(m, ()):
                        v = mat.get(i_row, src_cx.pos[m][jl])
                        if v:
                            key = (row, src_pos[(tail, jl)])
                            data[key] = data.get(key, 0) + v
                    # inner faces compose adjacent arrows
                    for i in range(1, n + 1):
                        comp = cat.comp(u[i - 1], u[i])
                        if cat.is_identity(comp):
                            continue
                        t = u[:i - 1] + (comp,) + u[i + 1:]
                        key = (row, src_pos[(t, il)])
                        s = -ONE if i % 2 else ONE
                        w = data.get(key, 0) + s
                        if w:
                            data[key] = w
                        else:
                            data.pop(key, None)
                    # last face drops the trailing arrow
                    t_last = u[:n] if n >= 1 else cat.target(u[0])
                    key = (row, src_pos[(t_last, il)])
                    s = -ONE if (n + 1) % 2 else ONE
                    w = data.get(key, 0) + s
                    if w:
                        data[key] = w
                    else:
                        data.pop(key, None)
            d_vertical[(n, m)] = QMatrix(
                len(labels[(n + 1, m)]), len(labels[(n, m)]), data)

    d_horizontal = {}
    for n in range(max_total_degree + 2):
        for m in range(max_total_degree):
            data = {}
            tgt_pos = pos[(n, m + 1)]
            for col, (anchor, il) in enumerate(labels[(n, m)]):
                cx = diagram.at[_anchor_object(cat, anchor)].complex
                for i, v in cx.d(m).column(cx.pos[m][il]).items():
                    data[(tgt_pos[(anchor, cx.labels[m + 1][i])], col)] = v
            d_horizontal[(n, m)] = QMatrix(
                len(labels[(n, m + 1)]), len(labels[(n, m)]), data)

    return DoubleComplex(diagram, max_total_degree, labels,
                         d_vertical, d_horizontal)


def total_complex(dc: DoubleComplex) -> Complex:
    """Total complex with differential d_vertical + (-1)^n d_horizontal."""
    top = dc.max_total_degree
    labels = {}
    for p in range(top + 1):
        lbls = []
        for n in range(p + 1):
            lbls.extend(dc.labels.get((n, p - n), ()))
        labels[p] = tuple(lbls)
    cx = Complex(top, labels, {})
    differentials = {}
    for p in range(top):
        data = {}
        for n in range(p + 1):
            m = p - n
            block = dc.labels.get((n, m), ())
            if not block:
                continue
            col0 = cx.pos[p][block[0]]
            dv = dc.d_vertical.get((n, m))
            if dv is not None and dv.data:
                row0 = cx.pos[p + 1][dc.labels[(n + 1, m)][0]] \
                    if dc.labels.get((n + 1, m)) else None
                for (i, j), v in dv.data.items():
                    data[(row0 + i, col0 + j)] = data.get((row0 + i, col0 + j), 0) + v
            dh = dc.d_horizontal.get((n, m))
            if dh is not None and dh.data:
                s = ONE if n % 2 == 0 else -ONE
                row0 = cx.pos[p + 1][dc.labels[(n, m + 1)][0]] \
                    if dc.labels.get((n, m + 1)) else None
                for (i, j), v in dh.data.items():
                    key = (row0 + i, col0 + j)
                    w = data.get(key, 0) + s * v
                    if w:
                        data[key] = w
                    else:
                        data.pop(key, None)
        differentials[p] = QMatrix(cx.dim(p + 1), cx.dim(p), data)
    cx.differentials = differentials
    return cx


def holim_dgalg(diagram: DgaDiagram, max_degree: int) -> Dga:
    """Homotopy limit: the total complex with the twisted shuffle product.

    The product of classes anchored on tuples concatenates the tuples,
    transports the second factor along the composite of the first factor's
    arrows, multiplies internally, and applies the Koszul sign from the
    internal degree of the first factor passing the nerve degree of the
    second.
    """
    cat = diagram.cat
    dc = double_complex(diagram, max_degree)
    cx = total_complex(dc)
    products = {}
    for p1 in range(max_degree + 1):
        for p2 in range(max_degree + 1 - p1):
            table = {}
            for j1, (anchor1, il1) in enumerate(cx.labels[p1]):
                n1 = 0 if isinstance(anchor1, str) else len(anchor1)
                m1 = p1 - n1
                obj1 = _anchor_object(cat, anchor1)
                tail1 = anchor1 if isinstance(anchor1, str) \
                    else cat.source(anchor1[-1])
                chain = None if isinstance(anchor1, str) \
                    else cat.comp_chain(anchor1)
                dga_tgt = diagram.at[obj1]
                cx1 = dga_tgt.complex
                for j2, (anchor2, il2) in enumerate(cx.labels[p2]):
                    n2 = 0 if isinstance(anchor2, str) else len(anchor2)
                    m2 = p2 - n2
                    obj2 = _anchor_object(cat, anchor2)
                    if obj2 != tail1:
                        continue
                    if isinstance(anchor1, str):
                        out_anchor = anchor2
                    elif isinstance(anchor2, str):
                        out_anchor = anchor1
                    else:
                        out_anchor = anchor1 + anchor2
                    cx2 = diagram.at[obj2].complex
                    if chain is None:
                        moved = {cx2.pos[m2][il2]: ONE}
                    else:
                        moved = _sparse_apply(
                            diagram.maps[chain].matrix(m2),
                            {cx2.pos[m2][il2]: ONE})
                    prod = dga_tgt.mul(
                        m1, {cx1.pos[m1][il1]: ONE}, m2, moved)
                    if not prod:
                        continue
                    sign = ONE if (m1 * n2) % 2 == 0 else -ONE
                    vec = {}
                    out_pos = cx.pos[p1 + p2]
                    lbls_tgt = cx1.labels[m1 + m2]
                    for k, v in prod.items():
                        vec[out_pos[(out_anchor, lbls_tgt[k])]] = sign * v
                    table[(j1, j2)] = vec
            products[(p1, p2)] = table
    unit = {}
    for obj in cat.objects:
        dga = diagram.at[obj]
        cx0 = dga.complex
        for i, v in dga.unit.items():
            unit[cx.pos[0][(obj, cx0.labels[0][i])]] = v
    return Dga(cx, products, unit)


@dataclass
class LimDga:
    """The limit dg-algebra together with its inclusion data.

    ambient_labels[m] lists the slots of the product complex; subspaces[m]
    carries the equalizer subspace in those coordinates.
    """

    dga: Dga
    ambient_labels: dict
    subspaces: dict


def lim_dgalg(diagram: DgaDiagram, max_degree: int | None = None) -> LimDga:
    """Limit: families x with X(f)(x at source of f) = x at target of f."""
    cat = diagram.cat
    if max_degree is None:
        max_degree = min(
            diagram.at[obj].complex.max_degree for obj in cat.objects)
    objects = sorted(cat.objects)
    ambient_labels = {}
    offsets = {}
    for m in range(max_degree + 1):
        lbls = []
        offs = {}
        for obj in objects:
            offs[obj] = len(lbls)
            lbls.extend(
                (obj, il) for il in diagram.at[obj].complex.labels.get(m, ()))
        ambient_labels[m] = tuple(lbls)
        offsets[m] = offs
    arrows = sorted(
        g for g in cat.morphisms if not cat.is_identity(g))
    subspaces = {}
    for m in range(max_degree + 1):
        total = len(ambient_labels[m])
        data = {}
        row = 0
        for g in arrows:
            src, tgt = cat.source(g), cat.target(g)
            mat = diagram.maps[g].matrix(m)
            src_dim = diagram.at[src].complex.dim(m)
            tgt_dim = diagram.at[tgt].complex.dim(m)
            for (i, j), v in mat.data.items():
                data[(row + i, offsets[m][src] + j)] = v
            for i in range(tgt_dim):
                key = (row + i, offsets[m][tgt] + i)
                w = data.get(key, 0) - ONE
                if w:
                    data[key] = w
                else:
                    data.pop(key, None)
            row += tgt_dim
        subspaces[m] = kernel_basis(QMatrix(row, total, data))

    labels = {m: tuple(range(subspaces[m].dim)) for m in range(max_degree + 1)}
    cx = Complex(max_degree, labels, {})

    def ambient_d(m, vec):
        out = {}
        for obj in objects:
            ocx = diagram.at[obj].complex
            block = {
                j: vec[offsets[m][obj] + j] for j in range(ocx.dim(m))
                if vec[offsets[m][obj] + j]
            }
            for i, v in _sparse_apply(ocx.d(m), block).items():
                out[offsets[m + 1][obj] + i] = v
        return _dense(out, len(ambient_labels[m + 1]))

    differentials = {}
    for m in range(max_degree):
        data = {}
        for j, vec in enumerate(subspaces[m].basis):
            image = ambient_d(m, vec)
            coords = subspaces[m + 1].coords(image)
            if coords is None:
                raise ComplexError(
                    "differential does not preserve the limit subspace")
            for i, v in enumerate(coords):
                if v:
                    data[(i, j)] = v
        differentials[m] = QMatrix(subspaces[m + 1].dim, subspaces[m].dim, data)
    cx.differentials = differentials

    def ambient_mul(m1, vec1, m2, vec2):
        out = {}
        for obj in objects:
            dga = diagram.at[obj]
            ocx = dga.complex
            b1 = {
                j: vec1[offsets[m1][obj] + j] for j in range(ocx.dim(m1))
                if vec1[offsets[m1][obj] + j]
            }
            b2 = {
                j: vec2[offsets[m2][obj] + j] for j in range(ocx.dim(m2))
                if vec2[offsets[m2][obj] + j]
            }
            for k, v in dga.mul(m1, b1, m2, b2).items():
                out[offsets[m1 + m2][obj] + k] = v
        return _dense(out, len(ambient_labels[m1 + m2]))

    products = {}
    for m1 in range(max_degree + 1):
        for m2 in range(max_degree + 1 - m1):
            table = {}
            for i, v1 in enumerate(subspaces[m1].basis):
                for j, v2 in enumerate(subspaces[m2].basis):
                    prod = ambient_mul(m1, v1, m2, v2)
                    coords = subspaces[m1 + m2].coords(prod)
                    if coords is None:
                        raise ComplexError(
                            "product does not preserve the limit subspace")
                    vec = {k: v for k, v in enumerate(coords) if v}
                    if vec:
                        table[(i, j)] = vec
            products[(m1, m2)] = table

    unit_ambient = [rat(0)] * len(ambient_labels[0])
    for obj in objects:
        dga = diagram.at[obj]
        for i, v in dga.unit.items():
            unit_ambient[offsets[0][obj] + i] = v
    unit_coords = subspaces[0].coords(tuple(unit_ambient))
    if unit_coords is None:
        raise ComplexError("unit family does not satisfy the limit constraints")
    unit = {i: v for i, v in enumerate(unit_coords) if v}
    return LimDga(Dga(cx, products, unit), ambient_labels, subspaces)


def canonical_e(diagram: DgaDiagram, lim: LimDga, holim: Dga) -> GradedLinearMap:
    """The comparison map from the limit into the homotopy limit.

    A limit family in internal degree m is placed in the tuple-degree-0 slots
    of total degree m.
    """
    cx_lim = lim.dga.complex
    cx_ho = holim.complex
    maps = {}
    for m in range(cx_lim.max_degree + 1):
        if m > cx_ho.max_degree:
            break
        data = {}
        for j, vec in enumerate(lim.subspaces[m].basis):
            for slot, v in enumerate(vec):
                if not v:
                    continue
                obj, il = lim.ambient_labels[m][slot]
                data[(cx_ho.pos[m][(obj, il)], j)] = v
        maps[m] = QMatrix(cx_ho.dim(m), cx_lim.dim(m), data)
    return GradedLinearMap(cx_lim, cx_ho, 0, maps)


# --- tensor products --------------------------------------------------------


class TensorComplex(Complex):
    """Tensor product of two complexes; labels are (left degree, i, j)."""

    def __init__(self, left: Complex, right: Complex, max_degree: int):
        self.left = left
        self.right = right
        labels = {}
        for p in range(max_degree + 1):
            lbls = []
            for p1 in range(p + 1):
                p2 = p - p1
                for i in range(left.dim(p1)):
                    for j in range(right.dim(p2)):
                        lbls.append((p1, i, j))
            labels[p] = tuple(lbls)
        super().__init__(max_degree, labels, {})
        differentials = {}
        for p in range(max_degree):
            data = {}
            for col, (p1, i, j) in enumerate(self.labels[p]):
                p2 = p - p1
                for k, v in left.d(p1).column(i).items():
                    data[(self.pos[p + 1][(p1 + 1, k, j)], col)] = v
                s = ONE if p1 % 2 == 0 else -ONE
                for k, v in right.d(p2).column(j).items():
                    key = (self.pos[p + 1][(p1, i, k)], col)
                    data[key] = data.get(key, 0) + s * v
            differentials[p] = QMatrix(self.dim(p + 1), self.dim(p), data)
        self.differentials = differentials


def graded_tensor(left: Complex, right: Complex, max_degree: int) -> TensorComplex:
    return TensorComplex(left, right, max_degree)


def tensor_map(f: GradedLinearMap, g: GradedLinearMap,
               source: TensorComplex, target: TensorComplex) -> GradedLinearMap:
    """f tensor g with the Koszul sign (-1)^{|g| * (left degree)}."""
    maps = {}
    for p in range(source.max_degree + 1):
        q = p + f.shift + g.shift
        if not (0 <= q <= target.max_degree):
            continue
        data = {}
        for col, (p1, i, j) in enumerate(source.labels[p]):
            p2 = p - p1
            sign = ONE if (g.shift * p1) % 2 == 0 else -ONE
            fcol = f.matrix(p1).column(i)
            gcol = g.matrix(p2).column(j)
            if not fcol or not gcol:
                continue
            for a, va in fcol.items():
                for b, vb in gcol.items():
                    key = (target.pos[q][(p1 + f.shift, a, b)], col)
                    w = data.get(key, 0) + sign * va * vb
                    if w:
                        data[key] = w
                    else:
                        data.pop(key, None)
        maps[p] = QMatrix(target.dim(q), source.dim(p), data)
    return GradedLinearMap(source, target, f.shift + g.shift, maps)


def mu_map(dga: Dga, tensor: TensorComplex) -> GradedLinearMap:
    """The multiplication of a dg-algebra as a map from its tensor square."""
    cx = dga.complex
    maps = {}
    for p in range(tensor.max_degree + 1):
        if p > cx.max_degree:
            break
        data = {}
        for col, (p1, i, j) in enumerate(tensor.labels[p]):
            for k, v in dga.mul_basis(p1, i, p - p1, j).items():
                data[(k, col)] = v
        maps[p] = QMatrix(cx.dim(p), tensor.dim(p), data)
    return GradedLinearMap(tensor, cx, 0, maps)


def muop_map(dga: Dga, tensor: TensorComplex) -> GradedLinearMap:
    """The opposite multiplication with the Koszul sign (-1)^{p1 * p2}."""
    cx = dga.complex
    maps = {}
    for p in range(tensor.max_degree + 1):
        if p > cx.max_degree:
            break
        data = {}
        for col, (p1, i, j) in enumerate(tensor.labels[p]):
            p2 = p - p1
            sign = ONE if (p1 * p2) % 2 == 0 else -ONE
            for k, v in dga.mul_basis(p2, j, p1, i).items():
                data[(k, col)] = sign * v
        maps[p] = QMatrix(cx.dim(p), tensor.dim(p), data)
    return GradedLinearMap(tensor, cx, 0, maps)
