"""Generator systems for finite projective linear groups.

Three nested systems of elements of PGL_d(F_q) are built from the cyclic
division algebra of :mod:`cayplex.cyclic`:

* the base system (kind ``omega``): the n = (q^d-1)/(q-1) conjugates
  u^j (1 - z^{-1}) u^{-j} of 1 - z^{-1}, specialized to finite matrices;
* its inverse closure (kind ``omegabar``), expected size 2n;
* the product system (kind ``omegahat``): all proper prefixes of
  length-d words over the base system whose product is a central scalar,
  one element per projective class, carrying a color in 1..d-1 and a
  shortest witnessing word.  Its color classes are counted by Gaussian
  binomials and its elements correspond to the proper nonzero subspaces
  of F_q^d via :func:`attach_subspace`.

Every finite matrix carries an exact global lift in the algebra, and the
structural claims (cardinalities, colors, inverse closure, class sizes)
are asserted at build time rather than trusted.
"""

from __future__ import annotations

import hashlib
import math
import os

import numpy as np

from .cyclic import (
    CycAlg,
    CycElem,
    gamma_from_alpha,
    omega_cleared,
    pc_is_central_scalar,
    pc_mul_omega,
)
from .ffield import (
    frobenius_matrix,
    gaussian_binomial,
    get_ext_field,
    get_field,
    mult_generator,
    regular_rep,
)
from .projmat import (
    MatSpace,
    ProjMat,
    canon_rows,
    column_space_rref,
    mat_add,
    mat_eye,
    mat_inv,
    mat_mul,
)
from .ratfunc import RatFunc
from .util import ordered_chunked_map

KIND_OMEGA = "omega"
KIND_OMEGABAR = "omegabar"
KIND_OMEGAHAT = "omegahat"

_DEFAULT_MEM_BUDGET = 4 << 30  # bytes
_MEM_BUDGET_ENV = "CAYPLEX_MEM_BUDGET"


class MemoryBudgetError(MemoryError):
    """Raised when a build would exceed the configured memory budget."""


def default_mem_budget() -> int:
    """Memory budget in bytes (env override via CAYPLEX_MEM_BUDGET)."""
    raw = os.environ.get(_MEM_BUDGET_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError as exc:
            raise ValueError(
                f"{_MEM_BUDGET_ENV} must be an integer byte count, got {raw!r}"
            ) from exc
    return _DEFAULT_MEM_BUDGET


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"q = {q} is not a prime power")
    m = q
    for p in range(2, q + 1):
        if m % p == 0:
            f = 0
            while m % p == 0:
                m //= p
                f += 1
            if m != 1:
                raise ValueError(f"q = {q} is not a prime power")
            return p, f
    raise ValueError(f"q = {q} is not a prime power")


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


class GenParams:
    """Parameters of a generator system over F_q with extension degree d.

    Attributes:
        base: the field F_q.
        E: the degree-d extension of ``base``.
        q, d, s: field size, degree, and twist exponent (gcd(s, d) = 1).
        alpha: base-field code with alpha and gamma = N(1+alpha) - 1 both
            outside {0, -1}.
        gamma: derived specialization point (base-field code).
        u: code of a fixed generator of E^x / F_q^x (smallest, so the
            choice is deterministic).
        n: (q^d - 1)/(q - 1), the size of the base system.
        warnings: non-fatal parameter advisories (odd/co-primality of q
            and d; the q > 4d^2 + 1 heuristic bound).
    """

    __slots__ = ("base", "E", "q", "d", "s", "alpha", "gamma", "u", "n",
                 "warnings", "_alg")

    def __init__(self, base, E, s: int, alpha: int, warnings):
        self.base = base
        self.E = E
        self.q = base.q
        self.d = E.d
        self.s = s
        self.alpha = alpha
        self.gamma = gamma_from_alpha(E, alpha)
        self.u = mult_generator(E).code
        self.n = (base.q**E.d - 1) // (base.q - 1)
        self.warnings = tuple(warnings)
        self._alg = None

    def alg(self) -> CycAlg:
        if self._alg is None:
            self._alg = CycAlg(self.E, self.s)
        return self._alg

    def __eq__(self, other):
        return (
            isinstance(other, GenParams)
            and self.E == other.E
            and self.s == other.s
            and self.alpha == other.alpha
        )

    def __hash__(self):
        return hash((self.E, self.s, self.alpha))

    def __repr__(self):
        return (
            f"GenParams(q={self.q}, d={self.d}, s={self.s}, "
            f"alpha={self.alpha}, gamma={self.gamma}, n={self.n})"
        )


def default_alpha(E) -> int:
    """Default specialization parameter: -2 when admissible, else the
    smallest admissible base-field code."""
    base = E.base
    cand = base.neg(2)
    try:
        gamma_from_alpha(E, cand)
        return cand
    except ValueError:
        pass
    for code in range(1, base.order):
        try:
            gamma_from_alpha(E, code)
            return code
        except ValueError:
            continue
    raise ValueError(
        f"no admissible alpha exists over {base.descriptor()} (q too small)"
    )


def make_params(
    q: int,
    d: int,
    s: int = 1,
    alpha: int | None = None,
    modulus=None,
    base_modulus=None,
) -> GenParams:
    """Validate and assemble generator-system parameters.

    Raises ValueError for q = 2 (the residue field is too small for any
    admissible alpha), non-prime-power q, or gcd(s, d) != 1.  Parameter
    combinations that merely fall outside the comfortable regime (q, d
    not both odd and co-prime; q <= 4d^2 + 1) produce entries in
    ``params.warnings`` instead of errors.
    """
    p, f = _prime_power(q)
    if q == 2:
        raise ValueError(
            "q = 2 is unsupported: no alpha with alpha, gamma outside {0, -1}"
        )
    if d < 2:
        raise ValueError("d must be at least 2")
    s %= d
    if math.gcd(s, d) != 1:
        raise ValueError(f"s = {s} must be invertible modulo d = {d}")
    base = get_field(p, f, tuple(base_modulus) if base_modulus else None)
    E = get_ext_field(p, f, d, tuple(modulus) if modulus else None)
    warnings = []
    if not (q % 2 == 1 and d % 2 == 1 and math.gcd(q, d) == 1):
        warnings.append(
            f"q = {q} and d = {d} are not both odd and co-prime; "
            "constructed sets are verified explicitly rather than assumed"
        )
    if q <= 4 * d * d + 1:
        warnings.append(
            f"q = {q} <= 4d^2 + 1 = {4 * d * d + 1}; the size heuristic "
            "does not apply, duplicate checks are enforced at build time"
        )
    if alpha is None:
        alpha = default_alpha(E)
    return GenParams(base, E, s, alpha, warnings)


# ---------------------------------------------------------------------------
# Generators and generator sets
# ---------------------------------------------------------------------------


class Generator:
    """One generator: finite projective matrix plus exact global lift.

    ``j`` is the conjugation exponent into the base system (-1 for
    product-system elements, whose provenance is the witnessing word).
    ``color`` is the valuation of the reduced norm of the lift at t = 0,
    taken mod d.  ``inv`` is the index of the inverse partner within the
    owning set (-1 when the set is not inverse-closed).  ``word`` is the
    shortest witnessing word (indices into the base system), present only
    for product-system elements.
    """

    __slots__ = ("finite", "lift", "j", "color", "inv", "word")

    def __init__(self, finite: ProjMat, lift: CycElem, j: int, color: int,
                 inv: int = -1, word=None):
        self.finite = finite
        self.lift = lift
        self.j = j
        self.color = color
        self.inv = inv
        self.word = tuple(word) if word is not None else None

    def __repr__(self):
        return (
            f"Generator(j={self.j}, color={self.color}, inv={self.inv}"
            + (f", word={self.word}" if self.word is not None else "")
            + ")"
        )


class GenSet:
    """An ordered generator system with serialization support.

    ``meta`` carries build diagnostics (coincidence pairs for the
    inverse closure; candidate/collision counts for the product system);
    it is informational and not serialized.
    """

    def __init__(self, params: GenParams, kind: str, gens, meta=None):
        if kind not in (KIND_OMEGA, KIND_OMEGABAR, KIND_OMEGAHAT):
            raise ValueError(f"unknown generator-set kind {kind!r}")
        self.params = params
        self.kind = kind
        self.gens = list(gens)
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def __getitem__(self, i):
        return self.gens[i]

    def finite_rows(self):
        """Row-tuple matrices of all generators, in set order."""
        return [g.finite.rows for g in self.gens]

    def is_symmetric(self) -> bool:
        return self.kind in (KIND_OMEGABAR, KIND_OMEGAHAT)

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        p = self.params
        head = [
            f"version=1 kind={self.kind} q={p.q} d={p.d} s={p.s}",
            f"alpha={p.alpha}",
        ]
        if p.base.f > 1:
            bmod = ",".join(str(c) for c in p.base.modulus)
            head.append(f"p={p.base.p} f={p.base.f} bmod={bmod}")
        head.append("mod=" + ",".join(str(c) for c in p.E.modulus))
        lines = [" ".join(head)]
        f = p.base.f
        for i, g in enumerate(self.gens):
            flat = []
            for row in g.finite.rows:
                for code in row:
                    coeffs = p.base.decode(code) if f > 1 else (code,)
                    flat.extend(str(c) for c in coeffs)
            line = (
                f"idx={i} j={g.j} color={g.color} inv={g.inv} "
                f"mat={','.join(flat)}"
            )
            if g.word is not None:
                line += " word=" + ",".join(str(w) for w in g.word)
            lines.append(line)
        return "\n".join(lines) + "\n"

    def save(self, path: str) -> None:
        from .util import atomic_write_text

        atomic_write_text(path, self.to_text())

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    @classmethod
    def from_text(cls, text: str) -> "GenSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty generator-set file")
        head = _parse_kv(lines[0])
        if head.get("version") != "1":
            raise ValueError(f"unsupported version {head.get('version')!r}")
        kind = head["kind"]
        q, d, s = int(head["q"]), int(head["d"]), int(head["s"])
        alpha = int(head["alpha"])
        modulus = tuple(int(c) for c in head["mod"].split(","))
        base_modulus = None
        if "bmod" in head:
            base_modulus = tuple(int(c) for c in head["bmod"].split(","))
        params = make_params(
            q, d, s=s, alpha=alpha, modulus=modulus, base_modulus=base_modulus
        )
        alg = params.alg()
        base, f = params.base, params.base.f
        gens = []
        for i, ln in enumerate(lines[1:]):
            kv = _parse_kv(ln)
            if int(kv["idx"]) != i:
                raise ValueError(f"generator indices out of order at line {i + 2}")
            j, color, inv = int(kv["j"]), int(kv["color"]), int(kv["inv"])
            raw = [int(x) for x in kv["mat"].split(",")]
            if len(raw) != d * d * f:
                raise ValueError(f"matrix entry count mismatch at idx={i}")
            codes = (
                raw
                if f == 1
                else [base.encode(tuple(raw[k : k + f])) for k in range(0, len(raw), f)]
            )
            rows = tuple(tuple(codes[r * d : (r + 1) * d]) for r in range(d))
            word = None
            if "word" in kv:
                word = tuple(int(w) for w in kv["word"].split(","))
            gens.append((rows, j, color, inv, word))
        return cls._rebuild(params, kind, gens, alg)

    @classmethod
    def load(cls, path: str) -> "GenSet":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_text(handle.read())

    @classmethod
    def _rebuild(cls, params, kind, raw_gens, alg) -> "GenSet":
        """Reconstruct global lifts from (j, word) data and verify each
        against its stored finite matrix."""
        E, F, n = params.E, params.base, params.n
        out = []
        for i, (rows, j, color, inv, word) in enumerate(raw_gens):
            pm = ProjMat(F, rows)
            if pm.rows != rows:
                raise ValueError(f"matrix at idx={i} is not in canonical form")
            if kind == KIND_OMEGAHAT:
                if word is None:
                    raise ValueError(f"product-system entry idx={i} lacks word=")
                lift = _word_lift(alg, params, word)
            else:
                if not (0 <= j < n):
                    raise ValueError(f"conjugation index {j} out of range at idx={i}")
                lift = alg.omega(E.pow_(params.u, j))
                if kind == KIND_OMEGABAR and i >= n:
                    lift = lift.inverse()
            spec = canon_rows(F, alg.specialize(lift, params.alpha))
            if spec != rows:
                raise ValueError(
                    f"lift verification failed at idx={i}: stored matrix does "
                    "not match the specialized lift"
                )
            out.append(Generator(pm, lift, j, color, inv, word))
        gs = cls(params, kind, out)
        _check_inverse_partners(gs)
        return gs


def _parse_kv(line: str) -> dict:
    out = {}
    for tok in line.split():
        if "=" not in tok:
            raise ValueError(f"malformed token {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _word_lift(alg: CycAlg, params: GenParams, word) -> CycElem:
    E = params.E
    lift = None
    for j in word:
        factor = alg.omega(E.pow_(params.u, j))
        lift = factor if lift is None else lift * factor
    if lift is None:
        raise ValueError("empty witnessing word")
    return lift


def _check_inverse_partners(gs: GenSet) -> None:
    if not gs.is_symmetric():
        return
    d = gs.params.d
    for i, g in enumerate(gs.gens):
        k = g.inv
        if not (0 <= k < len(gs.gens)):
            raise ValueError(f"generator {i} has no inverse partner")
        if gs.gens[k].finite != g.finite.inverse():
            raise ValueError(f"inverse partner of generator {i} is wrong")
        if gs.gens[k].inv != i:
            raise ValueError(f"inverse pairing is not symmetric at {i}")
        if (g.color + gs.gens[k].color) % d != 0:
            raise ValueError(f"inverse colors of generator {i} do not complement")


# ---------------------------------------------------------------------------
# Colors, norms
# ---------------------------------------------------------------------------


def _norm_valuation(lift: CycElem) -> int:
    v = lift.reduced_norm().valuation_at(0)
    if not isinstance(v, int):
        raise ValueError("lift has zero reduced norm")
    return v


def color_of(g: Generator) -> int:
    """Color of a generator: valuation at t = 0 of the reduced norm of
    its lift, mod d.  Asserts agreement with the stored color (which for
    product-system elements equals the witnessing-word length)."""
    d = g.lift.alg.d
    color = _norm_valuation(g.lift) % d
    if not 1 <= color <= d - 1:
        raise ValueError(f"element has central color {color}")
    if color != g.color:
        raise AssertionError(
            f"stored color {g.color} disagrees with norm valuation {color}"
        )
    return color


# ---------------------------------------------------------------------------
# Base system
# ---------------------------------------------------------------------------


def build_omega(params: GenParams) -> GenSet:
    """The base system: conjugates of 1 - z^{-1} by powers of u.

    Element j has global lift u^j (1 - z^{-1}) u^{-j} and finite matrix
    theta^j b theta^{-j}, where theta is the regular representation of u
    and b the specialization of 1 - z^{-1}.  The two constructions are
    cross-checked per element; the n finite matrices must be pairwise
    projectively distinct (a collision means the finite quotient is too
    small to hold the system, and is a hard error).
    """
    alg = params.alg()
    E, F, d, n = params.E, params.base, params.d, params.n
    theta = regular_rep(E, params.u)
    theta_inv = mat_inv(F, theta)
    b = alg.specialize(alg.one_minus_z_inv(), params.alpha)
    cur = mat_eye(F, d)
    cur_inv = cur
    u_pow = 1
    gens = []
    seen = {}
    for j in range(n):
        lift = alg.omega(u_pow)
        rows = mat_mul(F, mat_mul(F, cur, b), cur_inv)
        pm = ProjMat(F, rows)
        spec = canon_rows(F, alg.specialize(lift, params.alpha))
        if spec != pm.rows:
            raise AssertionError(
                f"conjugate {j}: specialized lift disagrees with the "
                "conjugated finite matrix"
            )
        color = _norm_valuation(lift) % d
        if color != 1:
            raise AssertionError(f"conjugate {j} has color {color}, expected 1")
        key = pm.packed()
        if key in seen:
            raise ValueError(
                f"duplicate finite matrices at j={seen[key]} and j={j}: "
                "the finite quotient is too small for this parameter set"
            )
        seen[key] = j
        gens.append(Generator(pm, lift, j, color))
        cur = mat_mul(F, cur, theta)
        cur_inv = mat_mul(F, theta_inv, cur_inv)
        u_pow = E.mul(u_pow, params.u)
    return GenSet(params, KIND_OMEGA, gens)


def symmetrize(base_set: GenSet) -> GenSet:
    """Inverse closure of the base system.

    Returns the union of the input and its element-wise projective
    inverses, deduplicated, with inverse-partner indices filled in.  The
    expected size is 2n; coincidences (an inverse already present) are
    collected in ``meta['coincidences']`` as (source index, existing
    index) pairs and reported rather than treated as errors.
    """
    if base_set.kind not in (KIND_OMEGA, KIND_OMEGABAR):
        raise ValueError("symmetrize expects the base system or its closure")
    params = base_set.params
    F, d = params.base, params.d
    alg = params.alg()
    gens = []
    index_of = {}
    for g in base_set.gens:
        ng = Generator(g.finite, g.lift, g.j, g.color, -1, g.word)
        index_of[g.finite.packed()] = len(gens)
        gens.append(ng)
    coincidences = []
    for i in range(len(gens)):
        g = gens[i]
        inv_pm = g.finite.inverse()
        key = inv_pm.packed()
        if key in index_of:
            coincidences.append((i, index_of[key]))
            continue
        inv_lift = g.lift.inverse()
        spec = canon_rows(F, alg.specialize(inv_lift, params.alpha))
        if spec != inv_pm.rows:
            raise AssertionError(
                f"inverse of generator {i}: specialized lift disagrees with "
                "the inverted finite matrix"
            )
        color = _norm_valuation(inv_lift) % d
        if color != (d - g.color) % d:
            raise AssertionError(
                f"inverse of generator {i} has color {color}, expected {d - g.color}"
            )
        index_of[key] = len(gens)
        gens.append(Generator(inv_pm, inv_lift, g.j, color, -1, None))
    for i, g in enumerate(gens):
        g.inv = index_of[g.finite.inverse().packed()]
    out = GenSet(
        params,
        KIND_OMEGABAR,
        gens,
        meta={"coincidences": coincidences},
    )
    _check_inverse_partners(out)
    return out


# ---------------------------------------------------------------------------
# Product system (meet in the middle)
# ---------------------------------------------------------------------------


def _digits(x: int, n: int, k: int) -> tuple[int, ...]:
    """k base-n digits of x, most significant first (word letters)."""
    out = [0] * k
    for i in range(k - 1, -1, -1):
        x, out[i] = divmod(x, n)
    return tuple(out)


def _outer_products(ms: MatSpace, prev: np.ndarray, O: np.ndarray,
                    out_rows_per_block: int = 1 << 18) -> np.ndarray:
    """All products prev[i] @ O[j], row-major in (i, j), built blockwise
    to bound peak memory."""
    m, n = prev.shape[0], O.shape[0]
    out = np.empty((m * n, ms.d, ms.d), dtype=ms.dtype)
    step = max(1, out_rows_per_block // n)
    for i0 in range(0, m, step):
        i1 = min(m, i0 + step)
        A = np.repeat(prev[i0:i1], n, axis=0)
        B = np.tile(O, (i1 - i0, 1, 1))
        out[i0 * n : i1 * n] = ms.mul(A, B)
    return out


def hat_class_sizes(d: int, q: int) -> list[int]:
    """Expected color-class sizes of the product system: the Gaussian
    binomial coefficients for colors 1..d-1."""
    return [gaussian_binomial(d, l, q) for l in range(1, d)]


def _hat_memory_estimate(n: int, d: int, a: int, b: int) -> int:
    prefix_rows = sum(n**k for k in range(1, a + 1))
    suffix_rows = sum(n**k for k in range(1, b + 1))
    mat_bytes = d * d
    est = 2 * prefix_rows * mat_bytes  # stored levels + canon copy
    est += 16 * (n**a)  # packed keys + searchsorted bounds
    est += 4 * suffix_rows * mat_bytes + 24 * (n**b)
    est += (1 << 18) * mat_bytes * 28  # blockwise multiply temporaries
    est += 64 * (n ** max(a, b))  # join bookkeeping, candidate tuples
    return est


def build_omega_hat(
    base_set: GenSet,
    memory_budget: int | None = None,
    threads: int = 1,
) -> GenSet:
    """The product system, by meet-in-the-middle over the finite quotient.

    Steps: (i) enumerate all length-a prefix products (a = ceil(d/2)) and
    all length-(d-a) suffix products in the finite quotient, joining
    prefix keys against inverted-suffix keys on canonical projective
    equality to produce candidate length-d identity words; (ii) verify
    every candidate globally — the exact product of the lifts must be a
    central scalar of the algebra — discarding and counting failures;
    (iii) collect all proper prefixes (lengths 1..d-1) of verified words,
    deduplicated projectively, each with color = prefix length and the
    lexicographically least witnessing word.

    Color-class sizes must equal the Gaussian binomials (fatal mismatch
    otherwise).  ``meta`` records candidate, verified-word, and rejected
    collision counts.  Results are deterministic for any thread count.
    """
    if base_set.kind != KIND_OMEGA:
        raise ValueError("the product system is built from the base system")
    params = base_set.params
    E, F, d, n, q = params.E, params.base, params.d, params.n, params.q
    alg = params.alg()
    budget = default_mem_budget() if memory_budget is None else memory_budget
    a = (d + 1) // 2
    b = d - a
    est = _hat_memory_estimate(n, d, a, b)
    if est > budget:
        raise MemoryBudgetError(
            f"meet-in-the-middle needs ~{est} bytes (budget {budget}); "
            "raise the budget or use smaller parameters"
        )
    ms = MatSpace(F, d)
    O = ms.asbatch(base_set.finite_rows())
    u_codes = [E.pow_(params.u, j) for j in range(n)]

    levels = [O]
    for _ in range(a - 1):
        levels.append(_outer_products(ms, levels[-1], O))
    pre_keys = ms.pack(ms.canon(levels[-1]))

    suffix = O
    for _ in range(b - 1):
        suffix = _outer_products(ms, suffix, O)
    inv_rows = [mat_inv(F, m) for m in ms.astuples(suffix)]
    suf_keys = ms.pack(ms.canon(ms.asbatch(inv_rows)))

    order = np.argsort(suf_keys, kind="stable")
    sorted_suf = suf_keys[order]
    lo = np.searchsorted(sorted_suf, pre_keys, side="left")
    hi = np.searchsorted(sorted_suf, pre_keys, side="right")
    candidates = []
    for w in np.nonzero(hi > lo)[0]:
        vs = np.sort(order[lo[w] : hi[w]])
        for v in vs:
            candidates.append((int(w), int(v)))

    def verify_chunk(chunk):
        out = []
        last_w = None
        chain = None
        for w, v in chunk:
            if w != last_w:
                wd = _digits(w, n, a)
                pc = omega_cleared(alg, u_codes[wd[0]])
                for j in wd[1:]:
                    pc = pc_mul_omega(alg, pc, u_codes[j])
                chain, last_w = pc, w
            pc = chain
            for j in _digits(v, n, b):
                pc = pc_mul_omega(alg, pc, u_codes[j])
            out.append(pc_is_central_scalar(alg, pc))
        return out

    flags = ordered_chunked_map(
        verify_chunk, candidates, threads=threads, chunk=4096
    )
    verified = [cand for cand, ok in zip(candidates, flags) if ok]
    collisions = len(candidates) - len(verified)
    if not verified:
        raise ValueError("no identity words found; parameters are inconsistent")

    W = np.array([w for w, _ in verified], dtype=np.int64)
    V = np.array([v for _, v in verified], dtype=np.int64)
    elems = {}
    running = None
    for level in range(1, d):
        if level <= a:
            ids = W // (n ** (a - level))
            canon_arr = ms.canon(levels[level - 1][ids])
        else:
            if running is None:
                running = levels[-1][W]
            digit = (V // (n ** (b - (level - a)))) % n
            running = ms.mul(running, O[digit])
            canon_arr = ms.canon(running)
        keys = ms.pack(canon_arr)
        uniq, first = np.unique(keys, return_index=True)
        expect = gaussian_binomial(d, level, q)
        if len(uniq) != expect:
            raise ValueError(
                f"color-{level} class has {len(uniq)} elements, expected "
                f"{expect}: the product system is inconsistent"
            )
        for key, fi in zip(uniq.tolist(), first.tolist()):
            if key in elems:
                raise ValueError(
                    "one projective matrix appears in two color classes"
                )
            word = _digits(int(W[fi]), n, a) + _digits(int(V[fi]), n, b)
            rows = tuple(tuple(int(x) for x in r) for r in canon_arr[fi])
            elems[key] = (level, word[:level], rows)

    identity_rows = mat_eye(F, d)
    gens = []
    for level, word, rows in sorted(elems.values(), key=lambda e: (e[0], e[1])):
        if rows == identity_rows:
            raise ValueError("the identity appeared as a product-system element")
        pm = ProjMat(F, rows)
        lift = _word_lift(alg, params, word)
        spec = canon_rows(F, alg.specialize(lift, params.alpha))
        if spec != pm.rows:
            raise AssertionError(
                f"witness {word}: specialized lift disagrees with the "
                "meet-in-the-middle matrix"
            )
        color = _norm_valuation(lift) % d
        if color != level:
            raise AssertionError(
                f"witness {word}: norm valuation color {color} != prefix "
                f"length {level}"
            )
        gens.append(Generator(pm, lift, -1, level, -1, word))

    index_of = {g.finite.packed(): i for i, g in enumerate(gens)}
    for g in gens:
        key = g.finite.inverse().packed()
        if key not in index_of:
            raise ValueError("product system is not inverse-closed")
        g.inv = index_of[key]
    out = GenSet(
        params,
        KIND_OMEGAHAT,
        gens,
        meta={
            "candidates": len(candidates),
            "identity_words": len(verified),
            "collisions": collisions,
        },
    )
    _check_inverse_partners(out)
    return out


# ---------------------------------------------------------------------------
# Subspace attachment
# ---------------------------------------------------------------------------


def attach_subspace(g: Generator):
    """The subspace of F_q^d attached to a generator.

    The lift is normalized by a power of t so that every coordinate is
    integral at t = 0 with one of them a unit; the matrix of the
    normalized lift in the local splitting at t = 0 is then reduced
    coefficient-wise at t = 0 and column-reduced over F_q.  The result is
    the reduced-echelon basis (rows) of the image subspace; its dimension
    is d - color(g).
    """
    lift = g.lift
    alg = lift.alg
    E, F, d = alg.E, alg.E.base, alg.d
    vals = [c.valuation_at(0) for c in lift.coords if not c.is_zero()]
    if not vals:
        raise ValueError("zero lift has no attached subspace")
    vmin = min(vals)
    coords = lift.coords
    if vmin != 0:
        tpow = RatFunc.t(E) ** (-vmin)
        coords = tuple(c * tpow for c in coords)
    det_val = _norm_valuation(lift) - d * vmin
    if not 1 <= det_val <= d - 1:
        raise ValueError(
            f"normalized determinant valuation {det_val} outside 1..{d - 1}: "
            "the element is not a neighbor of the standard lattice"
        )
    if det_val % d != g.color:
        raise AssertionError(
            f"determinant valuation {det_val} disagrees with color {g.color}"
        )
    phi = frobenius_matrix(E, alg.s)
    acc = None
    phi_pow = mat_eye(F, d)
    for j in range(d):
        cj = coords[j]
        code = 0 if cj.is_zero() else cj.eval_code(0)
        if code:
            term = mat_mul(F, regular_rep(E, code), phi_pow)
            acc = term if acc is None else mat_add(F, acc, term)
        if j + 1 < d:
            phi_pow = mat_mul(F, phi_pow, phi)
    if acc is None:
        raise ValueError("lift reduces to zero at t = 0 after normalization")
    basis = column_space_rref(F, acc)
    if len(basis) != d - det_val:
        raise AssertionError(
            f"attached subspace has dimension {len(basis)}, expected "
            f"{d - det_val}"
        )
    return basis


# ---------------------------------------------------------------------------
# Group membership and index
# ---------------------------------------------------------------------------


def psl_check(M: ProjMat) -> bool:
    """Whether a projective matrix lies in PSL_d(F_q) <= PGL_d(F_q).

    Scalars change the determinant by d-th powers, so membership is
    det in (F_q^x)^d, tested on the canonical representative.
    """
    F = M.F
    g = math.gcd(M.d, F.q - 1)
    if g == 1:
        return True
    e = (F.q - 1) // g
    return F.pow_(M.det_class(), e) == 1


def expected_index(params: GenParams) -> int:
    """Multiplicative order of gamma/(1+gamma) in F_q^x / (F_q^x)^d: the
    index of PSL_d(F_q) in the group generated by the systems."""
    F = params.base
    one_plus = F.add(params.gamma, 1)
    x = F.mul(params.gamma, F.inv(one_plus))
    g = math.gcd(params.d, F.q - 1)
    e = (F.q - 1) // g
    cur = F.pow_(x, e)
    k = 1
    step = cur
    while cur != 1:
        cur = F.mul(cur, step)
        k += 1
    return k


def group_order_pgl(d: int, q: int) -> int:
    """|PGL_d(F_q)| from the classical product formula."""
    order = 1
    for i in range(d):
        order *= q**d - q**i
    return order // (q - 1)


def group_order_psl(d: int, q: int) -> int:
    """|PSL_d(F_q)| = |PGL_d(F_q)| / gcd(d, q-1)."""
    return group_order_pgl(d, q) // math.gcd(d, q - 1)


def predicted_group_order(params: GenParams) -> int:
    """Order of the group generated by the systems: |PSL_d(F_q)| times
    the index of PSL in it."""
    return group_order_psl(params.d, params.q) * expected_index(params)


# ---------------------------------------------------------------------------
# q-power family
# ---------------------------------------------------------------------------


def family_order_m(q: int, d: int) -> int:
    """Order of q in (Z/dZ)^x / {+-1}: the number of distinct systems in
    the q-power family."""
    if math.gcd(q, d) != 1:
        raise ValueError(f"q = {q} and d = {d} must be co-prime")
    if d <= 2:
        return 1
    k = 1
    cur = q % d
    while cur != 1 and cur != d - 1:
        cur = (cur * q) % d
        k += 1
    return k


def family(params: GenParams, base: GenSet) -> list[GenSet]:
    """The q-power family of a symmetric generator system.

    Returns m = family_order_m(q, d) independently built sets, set i
    carrying twist exponent s*q^i mod d.  The power identity is verified
    element-wise on the base system (conjugate j of the twist-s system,
    raised to the q^i-th power, must equal conjugate j of the
    independently built twist-s*q^i system); a mismatch is fatal.  For
    inverse closures this pins down the whole set: it equals the input
    with every matrix raised to the power q^i.

    For product systems the power map is additionally compared per color
    class against the rebuilt system, with the outcome recorded in
    ``meta['power_bijection']`` of each returned set.  Element-wise
    powering reproduces the color-1 and color-(d-1) classes exactly but
    (empirically, e.g. for q=3, d=5) sends the middle color classes to
    elements outside the rebuilt system, so the rebuilt product system
    is returned rather than the powered image.
    """
    if base.kind not in (KIND_OMEGABAR, KIND_OMEGAHAT):
        raise ValueError("the family is built from a symmetric system")
    if base.params != params:
        raise ValueError("params does not match the base set")
    m = family_order_m(params.q, params.d)
    sets = [base]
    for i in range(1, m):
        qe = params.q**i
        s_i = (params.s * qe) % params.d
        params_i = make_params(
            params.q,
            params.d,
            s=s_i,
            alpha=params.alpha,
            modulus=params.E.modulus,
            base_modulus=params.base.modulus if params.base.f > 1 else None,
        )
        omega_i = build_omega(params_i)
        for j in range(params.n):
            powered = base.gens[j].finite ** qe
            if powered != omega_i.gens[j].finite:
                raise ValueError(
                    f"family mismatch at conjugate {j}: the q^{i}-power of "
                    f"the twist-{params.s} element differs from the "
                    f"independently built twist-{s_i} element"
                )
        if base.kind == KIND_OMEGABAR:
            indep = symmetrize(omega_i)
            for k, g in enumerate(base.gens):
                powered = g.finite ** qe
                if powered != indep.gens[k].finite:
                    raise ValueError(
                        f"family mismatch at element {k} of the inverse closure"
                    )
        else:
            indep = build_omega_hat(omega_i)
            indep.meta["power_bijection"] = _power_bijection_report(
                base, indep, qe
            )
        sets.append(indep)
    return sets


def _power_bijection_report(base: GenSet, indep: GenSet, qe: int) -> dict:
    """Check whether element-wise q^i-powering maps the base product
    system onto the independently built one, per color class."""
    target = {}
    for g in indep.gens:
        target.setdefault(g.color, set()).add(g.finite.packed())
    report = {}
    for color in sorted(target):
        powered = {
            (g.finite**qe).packed() for g in base.gens if g.color == color
        }
        report[color] = {
            "matched": len(powered & target[color]),
            "expected": len(target[color]),
            "surjective": powered == target[color],
        }
    return report
