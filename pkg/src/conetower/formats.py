"""Line-oriented document formats: manifests, complexes, maps, certificates.

One grammar for everything: `[section tokens]` headers, `key = value` pairs,
and matrix rows written one per line in brackets.  A bracketed line whose
first token starts with a letter is a section header; rows start with a
digit, sign, or parenthesis.  Comments start with `#`; serialization is
canonical, so identical inputs give byte-identical documents.

Entries are integers in integer mode; in field mode a bare integer c means
c * 1 and a tuple (c0,c1,...) gives coordinates over the algebra basis.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .algebra import FieldContext, IntegerContext, QuiverPresentation, make_algebra, path_algebra
from .complexes import Complex
from .envelope import CertificateData, MembershipCertificate
from .exactlin import is_prime


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    """A structurally parseable document whose contents fail validation."""


@dataclass
class Section:
    name: tuple[str, ...]
    pairs: list[tuple[str, str]] = field(default_factory=list)
    rows: list[tuple[int, str]] = field(default_factory=list)
    line: int = 0

    def get(self, key: str, default=None):
        for k, v in self.pairs:
            if k == key:
                return v
        return default

    def require(self, key: str) -> str:
        v = self.get(key)
        if v is None:
            raise ParseError(f"line {self.line}: section [{' '.join(self.name)}] needs '{key}'")
        return v

    def get_all(self, key: str) -> list[str]:
        return [v for k, v in self.pairs if k == key]


def _is_header(line: str) -> bool:
    if not (line.startswith("[") and line.endswith("]")):
        return False
    inner = line[1:-1].strip()
    return bool(inner) and inner[0].isalpha()


def parse_document(text: str) -> list[Section]:
    sections: list[Section] = []
    cur: Section | None = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if _is_header(line):
            cur = Section(tuple(line[1:-1].split()), line=i)
            sections.append(cur)
            continue
        if cur is None:
            raise ParseError(f"line {i}: content before the first section header")
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"line {i}: unterminated matrix row")
            cur.rows.append((i, line))
            continue
        if "=" in line:
            k, v = line.split("=", 1)
            cur.pairs.append((k.strip(), v.strip()))
            continue
        raise ParseError(f"line {i}: expected 'key = value', a matrix row, or a section")
    return sections


def find_section(sections, *name):
    for s in sections:
        if s.name == name:
            return s
    return None


# ---------------------------------------------------------------------------
# entries, rows, matrices


def _split_top(s: str, sep: str = ",") -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or parts:
        parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_entry(tok: str, ctx, line: int):
    tok = tok.strip()
    try:
        if tok.startswith("("):
            if not tok.endswith(")"):
                raise ValueError
            coords = [int(x) for x in tok[1:-1].split(",") if x.strip()]
            if ctx.mode == "integer":
                if len(coords) != 1:
                    raise ParseError(f"line {line}: integer mode entries are plain integers")
                return coords[0]
            if len(coords) != ctx.dim:
                raise ParseError(
                    f"line {line}: entry has {len(coords)} coordinates, algebra has {ctx.dim}"
                )
            return tuple(c % ctx.p for c in coords)
        c = int(tok)
    except ParseError:
        raise
    except ValueError:
        raise ParseError(f"line {line}: bad entry {tok!r}") from None
    if ctx.mode == "integer":
        return c
    return ctx.scal(c, ctx.one)


def parse_row(rowline: str, ctx, line: int, width: int | None = None):
    inner = rowline.strip()[1:-1]
    entries = tuple(parse_entry(t, ctx, line) for t in _split_top(inner))
    if width is not None and len(entries) != width:
        raise ParseError(f"line {line}: row has {len(entries)} entries, expected {width}")
    return entries


def format_entry(e, ctx) -> str:
    if ctx.mode == "integer":
        return str(e)
    if ctx.dim == 1:
        return str(e[0])
    return "(" + ",".join(str(c) for c in e) + ")"


def format_row(row, ctx) -> str:
    return "[" + ", ".join(format_entry(e, ctx) for e in row) + "]"


def parse_matrix(section: Section, ctx, rows: int, cols: int):
    if len(section.rows) != rows:
        raise ParseError(
            f"line {section.line}: section [{' '.join(section.name)}] has "
            f"{len(section.rows)} rows, expected {rows}"
        )
    return tuple(parse_row(r, ctx, i, cols) for i, r in section.rows)


# ---------------------------------------------------------------------------
# category manifests


def parse_category_manifest(text: str):
    """Parse and validate a manifest; returns the coefficient context."""
    sections = parse_document(text)
    cat = find_section(sections, "category")
    if cat is None:
        raise ParseError("manifest needs a [category] section")
    mode = cat.require("mode")
    if mode == "integer":
        return IntegerContext()
    if mode != "field":
        raise ParseError(f"line {cat.line}: mode must be 'field' or 'integer', got {mode!r}")
    try:
        p = int(cat.require("p"))
    except ValueError:
        raise ParseError(f"line {cat.line}: p must be an integer") from None
    if not (2 <= p < 2**16) or not is_prime(p):
        raise ParseError(f"line {cat.line}: characteristic must be prime (and < 2^16), got {p}")
    kind = cat.get("kind", "table")
    if kind == "table":
        return FieldContext(_parse_table_algebra(sections, cat, p))
    if kind == "quiver":
        return FieldContext(_parse_quiver_algebra(sections, p))
    raise ParseError(f"line {cat.line}: kind must be 'table' or 'quiver', got {kind!r}")


def _parse_vector(value: str, line: int, width: int) -> tuple[int, ...]:
    value = value.strip()
    if not (value.startswith("[") and value.endswith("]")):
        raise ParseError(f"line {line}: expected a bracketed vector")
    try:
        coords = [int(x) for x in value[1:-1].split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"line {line}: bad vector {value!r}") from None
    if len(coords) != width:
        raise ParseError(f"line {line}: vector has {len(coords)} entries, expected {width}")
    return tuple(coords)


def _parse_table_algebra(sections, cat: Section, p: int):
    try:
        dim = int(cat.require("dim"))
    except ValueError:
        raise ParseError(f"line {cat.line}: dim must be an integer") from None
    if dim < 1:
        raise ParseError(f"line {cat.line}: dim must be positive")
    unit = _parse_vector(cat.require("unit"), cat.line, dim)
    mult = [[None] * dim for _ in range(dim)]
    ms = find_section(sections, "mult")
    if dim > 1 or ms is not None:
        if ms is None:
            raise ParseError("table manifests with dim > 1 need a [mult] section")
        for k, v in ms.pairs:
            try:
                i, j = (int(t) for t in k.split())
            except ValueError:
                raise ParseError(f"line {ms.line}: mult keys are 'i j', got {k!r}") from None
            if not (0 <= i < dim and 0 <= j < dim):
                raise ParseError(f"line {ms.line}: mult index ({i}, {j}) out of range")
            mult[i][j] = _parse_vector(v, ms.line, dim)
    for i in range(dim):
        for j in range(dim):
            if mult[i][j] is None:
                if dim == 1:
                    mult[i][j] = (1,)
                else:
                    raise ParseError(f"[mult] is missing the product {i} {j}")
    try:
        return make_algebra(p, dim, unit, mult)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _parse_quiver_algebra(sections, p: int):
    qs = find_section(sections, "quiver")
    if qs is None:
        raise ParseError("quiver manifests need a [quiver] section")
    try:
        vertices = int(qs.require("vertices"))
        maxlen = int(qs.require("maxlen"))
    except ValueError:
        raise ParseError(f"line {qs.line}: vertices and maxlen must be integers") from None
    arrows = []
    names = {}
    for k, v in qs.pairs:
        if not k.startswith("arrow "):
            continue
        name = k[len("arrow ") :].strip()
        if "->" not in v:
            raise ParseError(f"line {qs.line}: arrow {name!r} needs 'src -> tgt'")
        s, t = v.split("->", 1)
        try:
            src, tgt = int(s), int(t)
        except ValueError:
            raise ParseError(f"line {qs.line}: arrow {name!r} endpoints must be integers") from None
        if not (0 <= src < vertices and 0 <= tgt < vertices):
            raise ParseError(f"line {qs.line}: arrow {name!r} endpoint out of range")
        if name in names:
            raise ParseError(f"line {qs.line}: duplicate arrow name {name!r}")
        names[name] = len(arrows)
        arrows.append((name, src, tgt))
    relations = []
    for v in qs.get_all("relation"):
        relations.append(_parse_relation(v, names, qs.line, p))
    quiver = QuiverPresentation(p, vertices, tuple(arrows), tuple(relations), maxlen)
    try:
        return path_algebra(quiver)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _parse_relation(expr: str, names: dict[str, int], line: int, p: int):
    # terms separated by top-level + or -; each term = [coef] path
    terms = []
    cur = ""
    pending_sign = 1
    for ch in expr:
        if ch in "+-":
            if cur.strip():
                terms.append((pending_sign, cur.strip()))
            cur = ""
            pending_sign = 1 if ch == "+" else -1
        else:
            cur += ch
    if cur.strip():
        terms.append((pending_sign, cur.strip()))
    if not terms:
        raise ParseError(f"line {line}: empty relation")
    out = []
    for sgn, term in terms:
        parts = term.split()
        coef = 1
        if len(parts) == 2:
            try:
                coef = int(parts[0])
            except ValueError:
                raise ParseError(f"line {line}: bad coefficient in relation term {term!r}") from None
            path_str = parts[1]
        elif len(parts) == 1:
            path_str = parts[0]
        else:
            raise ParseError(f"line {line}: bad relation term {term!r}")
        path = []
        for arrow in path_str.split("*"):
            arrow = arrow.strip()
            if arrow not in names:
                raise ParseError(f"line {line}: unknown arrow {arrow!r} in relation")
            path.append(names[arrow])
        out.append(((sgn * coef) % p, tuple(path)))
    return tuple(out)


def context_document(ctx) -> str:
    """Canonical manifest for a validated context (quivers serialize as their
    multiplication table); used for digests."""
    lines = ["[category]"]
    if ctx.mode == "integer":
        lines.append("mode = integer")
        return "\n".join(lines) + "\n"
    alg = ctx.algebra
    lines.append("mode = field")
    lines.append(f"p = {alg.p}")
    lines.append("kind = table")
    lines.append(f"dim = {alg.dim}")
    lines.append("unit = [" + ", ".join(str(c) for c in alg.unit) + "]")
    lines.append("[mult]")
    for i in range(alg.dim):
        for j in range(alg.dim):
            lines.append(f"{i} {j} = [" + ", ".join(str(c) for c in alg.mult[i][j]) + "]")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# complexes and maps


def complex_document(X: Complex, name: str | None = None, meta: dict | None = None) -> str:
    lines = ["[complex]"]
    if name:
        lines.append(f"name = {name}")
    for k, v in (meta or {}).items():
        lines.append(f"{k} = {v}")
    lines.append("[module]")
    for d in X.degrees():
        lines.append(f"{d} = {X.rank(d)}")
    for d in X.degrees():
        if X.rank(d) and X.rank(d + 1):
            lines.append(f"[d {d}]")
            for row in X.diff(d):
                lines.append(format_row(row, X.ctx))
    return "\n".join(lines) + "\n"


def parse_complex(text: str, ctx) -> Complex:
    """Parse a complex document; enforces d o d = 0 (DSquaredNonzero)."""
    sections = parse_document(text)
    mod = find_section(sections, "module")
    if mod is None:
        if find_section(sections, "complex") is not None:
            return Complex(ctx, 0, (), ())
        raise ParseError("complex document needs a [module] section")
    ranks_by_degree = {}
    for k, v in mod.pairs:
        try:
            d, r = int(k), int(v)
        except ValueError:
            raise ParseError(f"line {mod.line}: [module] lines are '<degree> = <rank>'") from None
        if r < 0:
            raise ParseError(f"line {mod.line}: negative rank at degree {d}")
        if d in ranks_by_degree:
            raise ParseError(f"line {mod.line}: duplicate degree {d}")
        ranks_by_degree[d] = r
    if not ranks_by_degree or all(r == 0 for r in ranks_by_degree.values()):
        return Complex(ctx, 0, (), ())
    start = min(ranks_by_degree)
    end = max(ranks_by_degree) + 1
    ranks = tuple(ranks_by_degree.get(d, 0) for d in range(start, end))
    diffs = []
    for d in range(start, end - 1):
        rt, rs = ranks[d + 1 - start], ranks[d - start]
        sec = find_section(sections, "d", str(d))
        if sec is None:
            diffs.append(tuple(tuple(ctx.zero for _ in range(rs)) for _ in range(rt)))
        else:
            diffs.append(parse_matrix(sec, ctx, rt, rs))
    for sec in sections:
        if sec.name and sec.name[0] == "d":
            if len(sec.name) != 2:
                raise ParseError(f"line {sec.line}: differential sections are [d <degree>]")
            try:
                dd = int(sec.name[1])
            except ValueError:
                raise ParseError(f"line {sec.line}: bad differential degree") from None
            if not (start <= dd < end - 1) or ranks[dd - start] == 0 or ranks[dd + 1 - start] == 0:
                raise ParseError(f"line {sec.line}: differential at degree {dd} has no modules")
    return Complex(ctx, start, ranks, tuple(diffs))


def map_document(f, name: str | None = None) -> str:
    lines = ["[map]"]
    if name:
        lines.append(f"name = {name}")
    for d, M in f.comps:
        lines.append(f"[component {d}]")
        for row in M:
            lines.append(format_row(row, f.source.ctx))
    return "\n".join(lines) + "\n"


def parse_chain_map(text: str, ctx, source: Complex, target: Complex):
    from .complexes import ChainMap

    sections = parse_document(text)
    comps = []
    for sec in sections:
        if sec.name and sec.name[0] == "component":
            if len(sec.name) != 2:
                raise ParseError(f"line {sec.line}: component sections are [component <degree>]")
            try:
                d = int(sec.name[1])
            except ValueError:
                raise ParseError(f"line {sec.line}: bad component degree") from None
            comps.append((d, parse_matrix(sec, ctx, target.rank(d), source.rank(d))))
    try:
        return ChainMap(source, target, tuple(comps))
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


# ---------------------------------------------------------------------------
# digests


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def digest_context(ctx) -> str:
    return sha256_text(context_document(ctx))


def digest_complex(X: Complex) -> str:
    return sha256_text(complex_document(X))


# ---------------------------------------------------------------------------
# certificates


def certificate_document(
    cert: MembershipCertificate,
    manifest_digest: str,
    target_digest: str,
    gen_digests: list[str],
    version: str,
) -> str:
    ctx = cert.Xprime.ctx
    lines = ["[certificate]"]
    lines.append("tool = conetower")
    lines.append(f"version = {version}")
    lines.append(f"mode = {'local' if cert.prime is not None else 'global'}")
    if cert.prime is not None:
        lines.append(f"prime = {cert.prime}")
    lines.append(f"multiplier = {cert.multiplier}")
    lines.append(f"stage = {cert.stage}")
    lines.append(f"generators = {len(gen_digests)}")
    lines.append(f"manifest_digest = {manifest_digest}")
    lines.append(f"target_digest = {target_digest}")
    for k, g in enumerate(gen_digests):
        lines.append(f"gen_digest {k} = {g}")
    for n, stage in enumerate(cert.stage_components, start=1):
        lines.append(f"[summands {n}]")
        for k, maps in enumerate(stage):
            lines.append(f"gen {k} = {len(maps)}")
        for k, maps in enumerate(stage):
            for j, m in enumerate(maps):
                for d, M in m.comps:
                    lines.append(f"[towermap {n} {k} {j} d {d}]")
                    for row in M:
                        lines.append(format_row(row, ctx))
    lines.append("[xprime module]")
    for d in cert.Xprime.degrees():
        lines.append(f"{d} = {cert.Xprime.rank(d)}")
    for d in cert.Xprime.degrees():
        if cert.Xprime.rank(d) and cert.Xprime.rank(d + 1):
            lines.append(f"[xprime d {d}]")
            for row in cert.Xprime.diff(d):
                lines.append(format_row(row, ctx))
    for label, comps in (
        ("proj", cert.proj.comps),
        ("lift", cert.lift.comps),
        ("homotopy", cert.homotopy.comps),
    ):
        for d, M in comps:
            lines.append(f"[{label} d {d}]")
            for row in M:
                lines.append(format_row(row, ctx))
    return "\n".join(lines) + "\n"


@dataclass
class ParsedCertificate:
    data: CertificateData
    manifest_digest: str
    target_digest: str
    gen_digests: list[str]
    version: str


def parse_certificate(text: str, ctx, generators: int) -> ParsedCertificate:
    """Structural parse only; semantic checks live in verify_certificate_data
    so that tampering shows up as a verification failure, not a parse error."""
    sections = parse_document(text)
    head = find_section(sections, "certificate")
    if head is None:
        raise ParseError("certificate document needs a [certificate] section")
    try:
        stage = int(head.require("stage"))
        multiplier = int(head.require("multiplier"))
        ngens = int(head.require("generators"))
    except ValueError:
        raise ParseError(f"line {head.line}: stage/multiplier/generators must be integers") from None
    mode = head.require("mode")
    prime = None
    if mode == "local":
        try:
            prime = int(head.require("prime"))
        except ValueError:
            raise ParseError(f"line {head.line}: bad prime") from None
    elif mode != "global":
        raise ParseError(f"line {head.line}: mode must be 'global' or 'local'")
    if ngens != generators:
        raise ParseError(f"certificate records {ngens} generators, {generators} supplied")

    counts: dict[int, dict[int, int]] = {}
    for sec in sections:
        if sec.name[0] == "summands" and len(sec.name) == 2:
            n = int(sec.name[1])
            counts[n] = {}
            for k, v in sec.pairs:
                toks = k.split()
                if len(toks) != 2 or toks[0] != "gen":
                    raise ParseError(f"line {sec.line}: summand lines are 'gen <k> = <count>'")
                counts[n][int(toks[1])] = int(v)
    if sorted(counts) != list(range(1, stage + 1)):
        raise ParseError("certificate must record summands for stages 1..stage")

    # tower maps are stored as raw per-degree matrices; matrix shapes are
    # only fixed once the tower is rebuilt, so rows are parsed unchecked
    raw_maps: dict[tuple[int, int, int], list[tuple[int, tuple]]] = {}
    xp_ranks: dict[int, int] = {}
    xp_diffs: dict[int, object] = {}
    extras: dict[str, dict[int, object]] = {"proj": {}, "lift": {}, "homotopy": {}}
    for sec in sections:
        nm = sec.name
        if nm[0] == "towermap":
            if len(nm) != 6 or nm[4] != "d":
                raise ParseError(f"line {sec.line}: bad towermap section header")
            n, k, j, d = int(nm[1]), int(nm[2]), int(nm[3]), int(nm[5])
            raw_maps.setdefault((n, k, j), []).append(
                (d, tuple(parse_row(r, ctx, i) for i, r in sec.rows))
            )
        elif nm[0] == "xprime" and nm[1:] == ("module",):
            for k, v in sec.pairs:
                xp_ranks[int(k)] = int(v)
        elif nm[0] == "xprime" and len(nm) == 3 and nm[1] == "d":
            d = int(nm[2])
            xp_diffs[d] = tuple(parse_row(r, ctx, i) for i, r in sec.rows)
        elif nm[0] in extras and len(nm) == 3 and nm[1] == "d":
            extras[nm[0]][int(nm[2])] = tuple(parse_row(r, ctx, i) for i, r in sec.rows)

    stage_maps = []
    for n in range(1, stage + 1):
        per_gen = []
        for k in range(generators):
            cnt = counts.get(n, {}).get(k, 0)
            maps = []
            for j in range(cnt):
                comps = sorted(raw_maps.get((n, k, j), []))
                maps.append(tuple(comps))
            per_gen.append(tuple(maps))
        stage_maps.append(tuple(per_gen))

    if xp_ranks:
        xstart = min(xp_ranks)
        xend = max(xp_ranks) + 1
        ranks = tuple(xp_ranks.get(d, 0) for d in range(xstart, xend))
        diffs = []
        for d in range(xstart, xend - 1):
            if d in xp_diffs:
                diffs.append(xp_diffs[d])
            else:
                rt, rs = ranks[d + 1 - xstart], ranks[d - xstart]
                diffs.append(tuple(tuple(ctx.zero for _ in range(rs)) for _ in range(rt)))
        xprime = (xstart, ranks, tuple(diffs))
    else:
        xprime = (0, (), ())

    data = CertificateData(
        stage,
        multiplier,
        prime,
        tuple(stage_maps),
        xprime[0],
        xprime[1],
        xprime[2],
        tuple(sorted(extras["proj"].items())),
        tuple(sorted(extras["lift"].items())),
        tuple(sorted(extras["homotopy"].items())),
    )
    gen_digests = []
    for k in range(generators):
        v = head.get(f"gen_digest {k}")
        if v is None:
            raise ParseError(f"certificate is missing gen_digest {k}")
        gen_digests.append(v)
    return ParsedCertificate(
        data,
        head.require("manifest_digest"),
        head.require("target_digest"),
        gen_digests,
        head.get("version", "unknown"),
    )
