"""Finite categories, functors, nerves, under-categories and fibered models.

Categories are given by explicit total composition tables, so validation,
cartesianness and all extension/flabbiness properties are decided by
exhaustive search.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class CategoryError(ValueError):
    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class FiberedModelError(ValueError):
    pass


@dataclass(frozen=True)
class Morphism:
    name: str
    source: str
    target: str


class FinCategory:
    """Finite category: named objects/morphisms plus a total composition table.

    compose maps (g, f) with source(g) = target(f) to the name of g after f.
    """

    def __init__(self, objects, morphisms, identity, compose):
        self.objects = tuple(objects)
        self.morphisms = {}
        for m in morphisms:
            if not isinstance(m, Morphism):
                m = Morphism(*m)
            if m.name in self.morphisms:
                raise CategoryError(f"duplicate morphism name {m.name!r}")
            self.morphisms[m.name] = m
        self.identity = dict(identity)
        self.compose = dict(compose)
        if len(set(self.objects)) != len(self.objects):
            raise CategoryError("duplicate object names")

    # --- basic accessors -------------------------------------------------

    def source(self, g: str) -> str:
        return self.morphisms[g].source

    def target(self, g: str) -> str:
        return self.morphisms[g].target

    def id_of(self, obj: str) -> str:
        return self.identity[obj]

    def is_identity(self, g: str) -> bool:
        return self.identity.get(self.morphisms[g].source) == g

    def comp(self, g: str, f: str) -> str:
        """Name of g composed after f."""
        return self.compose[(g, f)]

    def comp_chain(self, names) -> str:
        """Compose a tuple (g1, ..., gn) with source(g_i) = target(g_{i+1})."""
        names = list(names)
        out = names.pop()
        while names:
            out = self.comp(names.pop(), out)
        return out

    def hom(self, a: str, b: str):
        return [m.name for m in self.morphisms.values()
                if m.source == a and m.target == b]

    def morphisms_into(self, b: str):
        return [m.name for m in self.morphisms.values() if m.target == b]

    def is_groupoid(self) -> bool:
        return all(self.inverse(g) is not None for g in self.morphisms)

    def inverse(self, g: str):
        m = self.morphisms[g]
        for h in self.hom(m.target, m.source):
            if (self.comp(h, g) == self.id_of(m.source)
                    and self.comp(g, h) == self.id_of(m.target)):
                return h
        return None

    # --- validation ------------------------------------------------------

    def violations(self):
        out = []
        for obj in self.objects:
            e = self.identity.get(obj)
            if e is None or e not in self.morphisms:
                out.append(f"missing identity for object {obj!r}")
                continue
            m = self.morphisms[e]
            if m.source != obj or m.target != obj:
                out.append(f"identity {e!r} of {obj!r} is not an endomorphism")
        for m in self.morphisms.values():
            if m.source not in self.objects or m.target not in self.objects:
                out.append(f"morphism {m.name!r} references unknown object")
        names = set(self.morphisms)
        for (g, f), h in self.compose.items():
            if g not in names or f not in names or h not in names:
                out.append(f"composition entry ({g!r},{f!r})={h!r} references unknown morphism")
                continue
            if self.source(g) != self.target(f):
                out.append(f"composition entry ({g!r},{f!r}) is not composable")
            elif (self.source(h) != self.source(f)
                  or self.target(h) != self.target(g)):
                out.append(f"composition entry ({g!r},{f!r})={h!r} is ill-typed")
        for g in names:
            for f in names:
                if self.source(g) == self.target(f) and (g, f) not in self.compose:
                    out.append(f"composition table missing entry ({g!r},{f!r})")
        if out:
            return out
        for m in self.morphisms.values():
            if self.comp(m.name, self.id_of(m.source)) != m.name:
                out.append(f"unit axiom fails: {m.name!r} after identity")
            if self.comp(self.id_of(m.target), m.name) != m.name:
                out.append(f"unit axiom fails: identity after {m.name!r}")
        for h in names:
            for g in names:
                if self.source(h) != self.target(g):
                    continue
                hg = self.comp(h, g)
                for f in names:
                    if self.source(g) != self.target(f):
                        continue
                    if self.comp(hg, f) != self.comp(h, self.comp(g, f)):
                        out.append(f"associativity fails on ({h!r},{g!r},{f!r})")
        return out


def validate_category(objects, morphisms, identity, compose) -> FinCategory:
    cat = FinCategory(objects, morphisms, identity, compose)
    violations = cat.violations()
    if violations:
        raise CategoryError("invalid category", violations)
    return cat


def nerve(cat: FinCategory, n: int, normalized: bool = True):
    """Composable n-tuples (g1,...,gn) with source(g_i) = target(g_{i+1}).

    Degree 0 returns the objects. Lexicographic order throughout.
    """
    if n < 0:
        raise ValueError("nerve degree must be nonnegative")
    if n == 0:
        return sorted(cat.objects)
    arrows = sorted(
        g for g in cat.morphisms
        if not (normalized and cat.is_identity(g))
    )
    tuples = [(g,) for g in arrows]
    for _ in range(n - 1):
        tuples = [
            t + (g,)
            for t in tuples
            for g in arrows
            if cat.target(g) == cat.source(t[-1])
        ]
    return sorted(tuples)


class CatFunctor:
    def __init__(self, source: FinCategory, target: FinCategory,
                 object_map, morphism_map):
        self.source = source
        self.target = target
        self.object_map = dict(object_map)
        self.morphism_map = dict(morphism_map)

    def on_obj(self, obj: str) -> str:
        return self.object_map[obj]

    def on_mor(self, g: str) -> str:
        return self.morphism_map[g]

    def violations(self):
        out = []
        for obj in self.source.objects:
            if self.object_map.get(obj) not in self.target.objects:
                out.append(f"object {obj!r} has no valid image")
        for g, m in self.source.morphisms.items():
            img = self.morphism_map.get(g)
            if img not in self.target.morphisms:
                out.append(f"morphism {g!r} has no valid image")
                continue
            if (self.target.source(img) != self.object_map.get(m.source)
                    or self.target.target(img) != self.object_map.get(m.target)):
                out.append(f"image of {g!r} has wrong source/target")
        if out:
            return out
        for obj in self.source.objects:
            if self.on_mor(self.source.id_of(obj)) != self.target.id_of(self.on_obj(obj)):
                out.append(f"identity of {obj!r} not preserved")
        for (g, f), h in self.source.compose.items():
            if self.target.comp(self.on_mor(g), self.on_mor(f)) != self.on_mor(h):
                out.append(f"composition ({g!r},{f!r}) not preserved")
        return out


def validate_functor(source, target, object_map, morphism_map) -> CatFunctor:
    fun = CatFunctor(source, target, object_map, morphism_map)
    violations = fun.violations()
    if violations:
        raise CategoryError("invalid functor", violations)
    return fun


@dataclass(frozen=True)
class LocStructure:
    """Base category with declared causal cospans and Cauchy morphisms."""

    base: FinCategory
    causal_cospans: tuple = ()
    cauchy: frozenset = frozenset()

    def violations(self):
        out = []
        cat = self.base
        for pair in self.causal_cospans:
            f1, f2 = tuple(pair)[0], tuple(pair)[-1]
            if f1 not in cat.morphisms or f2 not in cat.morphisms:
                out.append(f"causal cospan {pair!r} references unknown morphism")
            elif cat.target(f1) != cat.target(f2):
                out.append(f"causal cospan {pair!r} does not share a target")
        for f in self.cauchy:
            if f not in cat.morphisms:
                out.append(f"cauchy morphism {f!r} unknown")
        if out:
            return out
        for obj in cat.objects:
            if cat.id_of(obj) not in self.cauchy:
                out.append(f"identity of {obj!r} not declared Cauchy")
        for g in self.cauchy:
            for f in self.cauchy:
                if cat.source(g) == cat.target(f) and cat.comp(g, f) not in self.cauchy:
                    out.append(f"cauchy set not closed under ({g!r},{f!r})")
        return out

    def cospan_pairs(self):
        out = []
        for pair in self.causal_cospans:
            items = sorted(pair)
            f1, f2 = items[0], items[-1]
            out.append((f1, f2))
        return out


def validate_loc_structure(base, causal_cospans, cauchy) -> LocStructure:
    loc = LocStructure(
        base,
        tuple(frozenset(p) for p in causal_cospans),
        frozenset(cauchy),
    )
    violations = loc.violations()
    if violations:
        raise CategoryError("invalid base structure", violations)
    return loc


# --- under-categories ----------------------------------------------------


@dataclass
class UnderCategory:
    """M down pi: objects (S, h: M -> pi(S)), morphisms (g, h) over Str."""

    cat: FinCategory
    proj: CatFunctor  # to Str
    obj_info: dict    # name -> (S, h)
    mor_info: dict    # name -> (g, h_at_source)

    def obj_name(self, S, h):
        return f"({S},{h})"


def under_category(pi: CatFunctor, M: str) -> UnderCategory:
    loc, strcat = pi.target, pi.source
    if M not in loc.objects:
        raise CategoryError(f"unknown base object {M!r}")
    obj_info = {}
    for S in strcat.objects:
        for h in loc.morphisms:
            if loc.source(h) == M and loc.target(h) == pi.on_obj(S):
                obj_info[f"({S},{h})"] = (S, h)
    mor_info = {}
    morphisms = []
    identity = {}
    for name, (S, h) in obj_info.items():
        for g, m in strcat.morphisms.items():
            if m.source != S:
                continue
            h_target = loc.comp(pi.on_mor(g), h)
            src = name
            tgt = f"({m.target},{h_target})"
            mname = f"({g},{h})"
            mor_info[mname] = (g, h)
            morphisms.append(Morphism(mname, src, tgt))
            if g == strcat.id_of(S):
                identity[name] = mname
    compose = {}
    by_name = {m.name: m for m in morphisms}
    for m2 in morphisms:
        for m1 in morphisms:
            if m2.source != m1.target:
                continue
            g2, _ = mor_info[m2.name]
            g1, h1 = mor_info[m1.name]
            compose[(m2.name, m1.name)] = f"({strcat.comp(g2, g1)},{h1})"
    cat = FinCategory(sorted(obj_info), [by_name[k] for k in sorted(by_name)],
                      identity, compose)
    proj = CatFunctor(cat, strcat,
                      {name: S for name, (S, _) in obj_info.items()},
                      {name: g for name, (g, _) in mor_info.items()})
    return UnderCategory(cat, proj, obj_info, mor_info)


# --- fibered models ------------------------------------------------------


def _lifts(pi: CatFunctor, g: str, g_prime: str, f_tilde: str):
    """All g_tilde with pi(g_tilde) = f_tilde and g after g_tilde = g_prime."""
    strcat = pi.source
    out = []
    for cand in strcat.hom(strcat.source(g_prime), strcat.source(g)):
        if pi.on_mor(cand) == f_tilde and strcat.comp(g, cand) == g_prime:
            out.append(cand)
    return out


def is_cartesian(pi: CatFunctor, g: str) -> bool:
    """Exhaustive check of the unique-factorization property."""
    strcat, loc = pi.source, pi.target
    target = strcat.target(g)
    fg = pi.on_mor(g)
    for g_prime in strcat.morphisms_into(target):
        base_src = pi.on_obj(strcat.source(g_prime))
        for f_tilde in loc.morphisms:
            if (loc.source(f_tilde) != base_src
                    or loc.target(f_tilde) != loc.source(fg)):
                continue
            if loc.comp(fg, f_tilde) != pi.on_mor(g_prime):
                continue
            if len(_lifts(pi, g, g_prime, f_tilde)) != 1:
                return False
    return True


@dataclass
class FiberedModel:
    """Validated fibered-in-groupoids functor with a deterministic cleavage."""

    pi: CatFunctor
    cleavage: dict  # (S_prime, f) -> (pullback_object, lift_morphism)
    order: str = "normal"
    _fibers: dict = field(default_factory=dict)

    @property
    def strcat(self) -> FinCategory:
        return self.pi.source

    @property
    def loc(self) -> FinCategory:
        return self.pi.target

    def fiber(self, M: str) -> FinCategory:
        if M not in self._fibers:
            strcat = self.strcat
            objs = sorted(S for S in strcat.objects if self.pi.on_obj(S) == M)
            morphs = [
                m for m in strcat.morphisms.values()
                if m.source in objs and m.target in objs
                and self.loc.is_identity(self.pi.on_mor(m.name))
            ]
            names = {m.name for m in morphs}
            compose = {
                key: val for key, val in strcat.compose.items()
                if key[0] in names and key[1] in names
            }
            identity = {obj: strcat.id_of(obj) for obj in objs}
            self._fibers[M] = FinCategory(objs, morphs, identity, compose)
        return self._fibers[M]

    def lift(self, S_prime: str, f: str):
        """(f*S', f_*) for the base morphism f into pi(S')."""
        return self.cleavage[(S_prime, f)]

    def fiber_inverse(self, g: str) -> str:
        inv = self.strcat.inverse(g)
        if inv is None:
            raise FiberedModelError(f"fiber morphism {g!r} not invertible")
        return inv

    def solve_cartesian(self, g: str, g_prime: str, f_tilde: str) -> str:
        """Unique g_tilde with pi(g_tilde)=f_tilde and g after g_tilde = g_prime."""
        lifts = _lifts(self.pi, g, g_prime, f_tilde)
        if len(lifts) != 1:
            raise FiberedModelError(
                f"expected a unique lift of {g_prime!r} through {g!r}, found {len(lifts)}"
            )
        return lifts[0]


def build_fibered_model(pi: CatFunctor, order: str = "normal") -> FiberedModel:
    if order not in ("normal", "reversed"):
        raise ValueError("order must be 'normal' or 'reversed'")
    strcat, loc = pi.source, pi.target
    # fibers must be groupoids
    for g, m in strcat.morphisms.items():
        if not loc.is_identity(pi.on_mor(g)):
            continue
        inv = strcat.inverse(g)
        if inv is None or not loc.is_identity(pi.on_mor(inv)):
            raise FiberedModelError(f"fiber morphism {g!r} is not invertible in its fiber")
    pick = min if order == "normal" else max
    cleavage = {}
    for S_prime in strcat.objects:
        base_target = pi.on_obj(S_prime)
        for f in loc.morphisms:
            if loc.target(f) != base_target:
                continue
            if f == loc.id_of(loc.source(f)):
                lift = strcat.id_of(S_prime)
                if not is_cartesian(pi, lift):
                    raise FiberedModelError(f"identity of {S_prime!r} is not cartesian")
                cleavage[(S_prime, f)] = (S_prime, lift)
                continue
            candidates = [
                g for g in strcat.morphisms_into(S_prime)
                if pi.on_mor(g) == f and is_cartesian(pi, g)
            ]
            if not candidates:
                raise FiberedModelError(
                    f"no cartesian lift of {f!r} with target {S_prime!r}"
                )
            g = pick(candidates)
            cleavage[(S_prime, f)] = (strcat.source(g), g)
    return FiberedModel(pi, cleavage, order)


# --- pullbacks of tuples -------------------------------------------------


def pullback_fiber_square(fm: FiberedModel, f: str, g_prime: str) -> str:
    """Fiber morphism g over M with lift(target) after g = g_prime after lift(source).

    g_prime is a fiber morphism over M' and f: M -> M'; the result is the
    unique arrow f*S1' -> f*S0' making the cleavage square commute.
    """
    strcat = fm.strcat
    M = fm.loc.source(f)
    S0, S1 = strcat.target(g_prime), strcat.source(g_prime)
    _, lift0 = fm.lift(S0, f)
    _, lift1 = fm.lift(S1, f)
    return fm.solve_cartesian(lift0, strcat.comp(g_prime, lift1), fm.loc.id_of(M))


def pullback_tuple(fm: FiberedModel, f: str, arrows) -> tuple:
    """Pull a fiber tuple over the target of f back along f, entry by entry."""
    return tuple(pullback_fiber_square(fm, f, g) for g in arrows)


def under_pullback_tuple(fm: FiberedModel, under: UnderCategory, arrows) -> tuple:
    """The fiber tuple (g1^h, ..., gn^h) attached to an under-category tuple.

    Each entry g_i: (S_i, h_i) -> (S_{i-1}, h_{i-1}) is replaced by the unique
    fiber arrow h_i*S_i -> h_{i-1}*S_{i-1} closing the cleavage square.
    """
    strcat = fm.strcat
    out = []
    for name in arrows:
        g, h_src = under.mor_info[name]
        src_obj = under.cat.source(name)
        tgt_obj = under.cat.target(name)
        _, h_tgt = under.obj_info[tgt_obj]
        S_tgt, _ = under.obj_info[tgt_obj]
        _, lift_tgt = fm.lift(S_tgt, h_tgt)
        S_src, _ = under.obj_info[src_obj]
        _, lift_src = fm.lift(S_src, h_src)
        M = fm.loc.source(h_src)
        out.append(fm.solve_cartesian(
            lift_tgt, strcat.comp(g, lift_src), fm.loc.id_of(M)))
    return tuple(out)


# --- flabbiness ----------------------------------------------------------


@dataclass(frozen=True)
class FlabbinessReport:
    flabby: bool
    flabby_counterexample: tuple | None
    cauchy_flabby: bool
    cauchy_counterexample: tuple | None
    strongly_cauchy_flabby: bool
    strong_counterexample: tuple | None


def _extensions(fm: FiberedModel, S: str, f: str):
    strcat = fm.strcat
    return sorted(
        g for g, m in strcat.morphisms.items()
        if m.source == S and fm.pi.on_mor(g) == f
    )


def classify_flabbiness(fm: FiberedModel, loc: LocStructure) -> FlabbinessReport:
    strcat, base = fm.strcat, fm.loc
    flabby, flabby_ce = True, None
    for S in strcat.objects:
        for f in base.morphisms:
            if base.source(f) != fm.pi.on_obj(S):
                continue
            if not _extensions(fm, S, f):
                flabby, flabby_ce = False, (S, f)
                break
        if not flabby:
            break

    cauchy_ok, cauchy_ce = True, None
    strong_ok, strong_ce = True, None
    for S in strcat.objects:
        for f in sorted(loc.cauchy):
            if base.source(f) != fm.pi.on_obj(S):
                continue
            exts = _extensions(fm, S, f)
            if not exts:
                cauchy_ok, cauchy_ce = False, (S, f)
                continue
            M_prime = base.target(f)
            fiber = fm.fiber(M_prime)
            for g in exts:
                for g_tilde in exts:
                    closing = [
                        gp for gp in fiber.hom(strcat.target(g), strcat.target(g_tilde))
                        if strcat.comp(gp, g) == g_tilde
                    ]
                    if not closing:
                        cauchy_ok, cauchy_ce = False, (S, f, g, g_tilde)
                    elif len(closing) > 1:
                        strong_ok, strong_ce = False, (S, f, g, g_tilde)
    if not cauchy_ok:
        strong_ok = False
        strong_ce = strong_ce or cauchy_ce
    return FlabbinessReport(flabby, flabby_ce, cauchy_ok, cauchy_ce,
                            strong_ok, strong_ce)


# --- extension data along Cauchy morphisms --------------------------------


@dataclass(frozen=True)
class ExtensionData:
    f: str
    obj_map: dict   # S -> (ext_f S, f_sharp)
    mor_map: dict   # fiber g over source(f) -> ext_f g


def extension_data(fm: FiberedModel, loc: LocStructure, f: str) -> ExtensionData:
    if f not in loc.cauchy:
        raise FiberedModelError(f"{f!r} is not a Cauchy morphism")
    report = classify_flabbiness(fm, loc)
    if not report.strongly_cauchy_flabby:
        raise FiberedModelError("model is not strongly Cauchy flabby")
    strcat, base = fm.strcat, fm.loc
    M, M_prime = base.source(f), base.target(f)
    pick = min if fm.order == "normal" else max
    obj_map = {}
    for S in fm.fiber(M).objects:
        exts = _extensions(fm, S, f)
        if not exts:
            raise FiberedModelError(f"no extension of {S!r} along {f!r}")
        f_sharp = pick(exts)
        obj_map[S] = (strcat.target(f_sharp), f_sharp)
    fiber_prime = fm.fiber(M_prime)
    mor_map = {}
    for g in fm.fiber(M).morphisms:
        S, S_tilde = strcat.source(g), strcat.target(g)
        ext_S, sharp_S = obj_map[S]
        ext_St, sharp_St = obj_map[S_tilde]
        candidates = [
            gp for gp in fiber_prime.hom(ext_S, ext_St)
            if strcat.comp(gp, sharp_S) == strcat.comp(sharp_St, g)
        ]
        if len(candidates) != 1:
            raise FiberedModelError(
                f"extension of {g!r} along {f!r} is not unique ({len(candidates)} found)"
            )
        mor_map[g] = candidates[0]
    # functoriality
    fiber = fm.fiber(M)
    for S in fiber.objects:
        assert mor_map[fiber.id_of(S)] == fiber_prime.id_of(obj_map[S][0])
    for (g1, g2), g12 in fiber.compose.items():
        assert fiber_prime.comp(mor_map[g1], mor_map[g2]) == mor_map[g12]
    return ExtensionData(f, obj_map, mor_map)


def lemma_witnesses(fm: FiberedModel, loc: LocStructure, f: str,
                    ext: ExtensionData):
    """Unique closing arrows for the two extension triangles along f.

    Returns (into, outof): into[S] is the fiber arrow S -> f*ext_f S with
    f_* after it equal to f_sharp; outof[S'] is the fiber arrow
    S' -> ext_f f*S' with it after f_* equal to f_sharp at f*S'.
    """
    strcat, base = fm.strcat, fm.loc
    M, M_prime = base.source(f), base.target(f)
    into = {}
    for S in fm.fiber(M).objects:
        ext_S, f_sharp = ext.obj_map[S]
        _, lift = fm.lift(ext_S, f)
        into[S] = fm.solve_cartesian(lift, f_sharp, base.id_of(M))
    outof = {}
    fiber_prime = fm.fiber(M_prime)
    for S_prime in fiber_prime.objects:
        pb, lift = fm.lift(S_prime, f)
        ext_pb, f_sharp = ext.obj_map[pb]
        candidates = [
            gp for gp in fiber_prime.hom(S_prime, ext_pb)
            if strcat.comp(gp, lift) == f_sharp
        ]
        if len(candidates) != 1:
            raise FiberedModelError(
                f"triangle witness at {S_prime!r} not unique ({len(candidates)} found)"
            )
        outof[S_prime] = candidates[0]
    return into, outof


def connected_components(groupoid: FinCategory):
    """pi_0 of a groupoid: object classes under existence of a morphism."""
    if not groupoid.is_groupoid():
        raise CategoryError("input category is not a groupoid")
    parent = {obj: obj for obj in groupoid.objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in groupoid.morphisms.values():
        a, b = find(m.source), find(m.target)
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes = {}
    for obj in groupoid.objects:
        classes.setdefault(find(obj), []).append(obj)
    return sorted(tuple(sorted(v)) for v in classes.values())
